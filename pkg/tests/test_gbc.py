"""Curvature-integral route to chi: pfaffians, densities, quadrature."""

import math

import numpy as np
import pytest

from eulerchar.gbc import (
    EmbeddedTorus,
    FlatTorusMetric,
    GbcError,
    RoundSphere2,
    RoundSphere4,
    catalog_manifold,
    catalog_manifold_names,
    euler_density_value,
    frame_contraction,
    integrate_euler,
    pfaffian,
)

RNG_SEED = 1729


def random_antisymmetric(n, rng):
    a = rng.standard_normal((n, n))
    return a - a.T


def test_pfaffian_small_cases():
    assert pfaffian(np.array([[0.0, 3.0], [-3.0, 0.0]])) == 3.0
    a = np.zeros((4, 4))
    a[0, 1], a[2, 3] = 2.0, 5.0
    a[0, 2], a[1, 3] = 1.0, 7.0
    a[0, 3], a[1, 2] = 4.0, -3.0
    a = a - a.T
    # Pf = a01 a23 - a02 a13 + a03 a12
    assert abs(pfaffian(a) - (2 * 5 - 1 * 7 + 4 * -3)) < 1e-12


def test_pfaffian_squares_to_determinant():
    rng = np.random.default_rng(RNG_SEED)
    for n in (2, 4, 6, 8):
        for _ in range(5):
            a = random_antisymmetric(n, rng)
            assert abs(pfaffian(a) ** 2 - np.linalg.det(a)) < 1e-8 * max(
                1.0, abs(np.linalg.det(a)))


def test_pfaffian_rejects_bad_input():
    with pytest.raises(GbcError):
        pfaffian(np.ones((3, 3)))
    with pytest.raises(GbcError):
        pfaffian(np.ones((2, 2)))  # not antisymmetric
    with pytest.raises(GbcError):
        pfaffian(np.zeros((10, 10)))


def test_frame_contraction_decomposable():
    # for F^{ab}_{cd} = B_ab B_cd the contraction collapses to 2 Pf(B)^2
    rng = np.random.default_rng(RNG_SEED + 1)
    for n in (2, 4):
        b = random_antisymmetric(n, rng)
        f = np.einsum("ab,cd->abcd", b, b)
        got = frame_contraction(f)
        want = 2.0 * pfaffian(b) ** 2 if n == 4 else pfaffian(b) ** 2
        # n = 2: eps eps F = 2 F^{12}_{12} ... realized as Pf(F_(12)) = B_12^2
        assert abs(got - want) < 1e-10 * max(1.0, abs(want))


def test_sphere_density_matches_gauss_curvature():
    # surface: density = K / (2 pi); round sphere K = 1 / r^2
    for r in (0.5, 1.0, 3.0):
        s = RoundSphere2(radius=r)
        f = s.curvature_constant()
        val = euler_density_value(f)
        assert abs(val - 1.0 / (2.0 * math.pi * r * r)) < 1e-14


def test_s4_constant_curvature_density():
    # constant curvature kappa: eps eps F F = 96 kappa^2, density 3 kappa^2 / (2 pi)^2
    s = RoundSphere4(radius=1.0)
    f = s.curvature_constant()
    val = euler_density_value(f)
    assert abs(val - 3.0 / (2.0 * math.pi) ** 2) < 1e-14


def test_flat_torus_zero_density():
    t = FlatTorusMetric()
    pts, _ = t.quadrature()
    assert np.allclose(t.euler_density(pts), 0.0)


def test_embedded_torus_gauss_curvature_signs():
    # K = cos v / (r (R + r cos v)): positive outside, negative inside
    t = EmbeddedTorus(big_radius=2.0, small_radius=1.0)
    pts = np.array([[0.3, 0.0], [0.3, math.pi]])
    dens = t.euler_density(pts)
    assert dens[0] > 0.0 > dens[1]


@pytest.mark.parametrize("radius", [0.5, 1.0, 3.0])
def test_sphere_integral_radius_independent(radius):
    res = integrate_euler(RoundSphere2(radius=radius))
    assert res.rounded == 2
    assert abs(res.raw - 2.0) < 1e-6


def test_flat_torus_integral():
    res = integrate_euler(FlatTorusMetric())
    assert res.rounded == 0
    assert abs(res.raw) < 1e-8


def test_embedded_torus_integral():
    res = integrate_euler(EmbeddedTorus())
    assert res.rounded == 0
    assert abs(res.raw) < 1e-8


def test_s4_integral():
    res = integrate_euler(RoundSphere4())
    assert res.rounded == 2
    assert abs(res.raw - 2.0) < 1e-4


def test_sphere_area_normalization():
    # weights x sqrt_g integrate the volume: 4 pi r^2 and (8/3) pi^2 r^4
    s2 = RoundSphere2(radius=2.0)
    pts, wts = s2.quadrature()
    vol = float(np.dot(wts, s2.sqrt_g(pts)))
    assert abs(vol - 4.0 * math.pi * 4.0) < 1e-8
    s4 = RoundSphere4(radius=1.0)
    pts, wts = s4.quadrature()
    vol = float(np.dot(wts, s4.sqrt_g(pts)))
    assert abs(vol - 8.0 * math.pi ** 2 / 3.0) < 1e-8


def test_scale_refinement_keeps_answer():
    coarse = integrate_euler(RoundSphere2(), scale=0.5)
    fine = integrate_euler(RoundSphere2(), scale=2.0)
    assert coarse.rounded == fine.rounded == 2
    assert fine.nodes > coarse.nodes


def test_catalog_manifold_lookup():
    assert set(catalog_manifold_names()) == {"s2", "s4", "torus-embedded",
                                             "torus-flat"}
    m = catalog_manifold({"name": "s2", "radius": 3.0})
    assert isinstance(m, RoundSphere2) and m.radius == 3.0
    assert isinstance(catalog_manifold("torus-flat"), FlatTorusMetric)
    with pytest.raises(GbcError):
        catalog_manifold("hyperbolic")


def test_residual_guard():
    # a deliberately starved quadrature must refuse to round
    class Starved(RoundSphere2):
        def quadrature(self, scale=1.0):
            return super().quadrature(scale=0.08)

    with pytest.raises(GbcError):
        integrate_euler(Starved(radius=1.0), max_residual=1e-9)
