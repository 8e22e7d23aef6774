"""Sphere quadrature and winding numbers, cross-checked by two oracles."""

import math

import numpy as np
import pytest

from eulerchar.fields import (
    ComplexProductField,
    complex_power_field,
    constant_field,
    identity_field,
    linear_field,
    quaternion_square_field,
    rotation_field,
    saddle_field,
)
from eulerchar.winding import (
    SphereQuadrature,
    UndersampledError,
    ZeroOnSphereError,
    default_quadrature,
    oracle_degree_anglesum,
    oracle_degree_preimage,
    sphere_area,
    sphere_mesh,
    winding_number,
)

RNG_SEED = 424242


def test_sphere_area_values():
    assert abs(sphere_area(2) - 2 * math.pi) < 1e-14
    assert abs(sphere_area(3) - 4 * math.pi) < 1e-14
    assert abs(sphere_area(4) - 2 * math.pi ** 2) < 1e-13


def test_quadrature_weights_sum_to_area():
    for n in (2, 3, 4):
        q = SphereQuadrature.build(n)
        assert abs(q.weights.sum() - sphere_area(n)) < 1e-10 * sphere_area(n)
        norms = np.linalg.norm(q.nodes, axis=1)
        assert np.max(np.abs(norms - 1.0)) < 1e-13


def test_quadrature_tangents_oriented():
    rng = np.random.default_rng(RNG_SEED)
    for n in (2, 3, 4):
        q = SphereQuadrature.build(n)
        take = rng.choice(q.size, size=25, replace=False)
        for i in take:
            m = np.column_stack([q.nodes[i], *q.tangents[i].T])
            assert np.linalg.det(m) > 0.9  # orthonormal and outward


def test_quadrature_moment_exactness():
    # integral of x_1^2 over S^(n-1) equals area / n
    for n in (2, 3, 4):
        q = SphereQuadrature.build(n)
        val = float(np.dot(q.weights, q.nodes[:, 0] ** 2))
        assert abs(val - sphere_area(n) / n) < 1e-9


N2_CASES = [
    (complex_power_field(-2), -2),
    (complex_power_field(-1), -1),
    (constant_field([0.3, 0.8]), 0),
    (complex_power_field(1), 1),
    (complex_power_field(2), 2),
    (complex_power_field(3), 3),
    (rotation_field(2), 1),
    (saddle_field(), -1),
    (linear_field(-np.eye(2)), 1),
]


@pytest.mark.parametrize("field,expected", N2_CASES,
                         ids=[f.name + f"/{d}" for f, d in N2_CASES])
def test_planar_winding_catalog(field, expected):
    w = winding_number(field, (0.0, 0.0), 1.0)
    assert w.rounded == expected
    assert abs(w.residual) < 1e-6
    assert oracle_degree_anglesum(field, (0.0, 0.0), 1.0) == expected
    assert oracle_degree_preimage(field, (0.0, 0.0), 1.0) == expected


N4_CASES = [
    (identity_field(4), 1),
    (constant_field([0.1, -0.2, 0.4, 0.9]), 0),
    (quaternion_square_field(), 2),
]


@pytest.mark.parametrize("field,expected", N4_CASES,
                         ids=[f.name for f, _ in N4_CASES])
def test_four_dim_winding_catalog(field, expected):
    w = winding_number(field, (0.0, 0.0, 0.0, 0.0), 1.0)
    assert w.rounded == expected
    assert abs(w.residual) < 1e-3
    assert oracle_degree_preimage(field, (0.0, 0.0, 0.0, 0.0), 1.0) == expected


def test_winding_radius_independent():
    f = complex_power_field(2)
    for r in (0.25, 1.0, 3.0):
        assert winding_number(f, (0.0, 0.0), r).rounded == 2


def test_winding_center_shift_drops_zero():
    # moving the circle away from the only zero of z^2 gives degree 0
    f = complex_power_field(2)
    w = winding_number(f, (3.0, 0.0), 1.0)
    assert w.rounded == 0
    assert oracle_degree_anglesum(f, (3.0, 0.0), 1.0) == 0


def test_winding_around_translated_zero():
    f = linear_field(np.eye(2), offset=[-0.4, 0.7])  # zero at (0.4, -0.7)
    assert winding_number(f, (0.4, -0.7), 0.5).rounded == 1
    assert winding_number(f, (5.0, 5.0), 0.5).rounded == 0


def test_refinement_reduces_residual():
    f = complex_power_field(3)
    coarse = SphereQuadrature.build(2, counts=(24,))
    fine = coarse.refine(8)
    wc = winding_number(f, (0.1, -0.05), 1.0, coarse)
    wf = winding_number(f, (0.1, -0.05), 1.0, fine)
    assert abs(wf.residual) <= abs(wc.residual)
    assert wf.rounded == 3


def test_zero_on_sphere_detected():
    f = identity_field(2)
    with pytest.raises(ZeroOnSphereError):
        winding_number(f, (1.0, 0.0), 1.0)  # zero sits on the circle


def test_undersampled_quadrature_rejected():
    # zeros hugging the circle make 8 nodes land far from any integer
    f = ComplexProductField(roots=[0.9, -0.9, 0.85j])
    q = SphereQuadrature.build(2, counts=(8,))
    with pytest.raises(UndersampledError):
        winding_number(f, (0.0, 0.0), 1.0, q)
    assert winding_number(f, (0.0, 0.0), 1.0).rounded == 3


def test_anglesum_rejects_undersampling():
    f = complex_power_field(3)
    with pytest.raises(UndersampledError):
        oracle_degree_anglesum(f, (0.0, 0.0), 1.0, samples=5)


def test_sphere_mesh_closes():
    for n, level in ((2, 4), (3, 3), (4, 2)):
        verts, cells = sphere_mesh(n, level)
        assert np.max(np.abs(np.linalg.norm(verts, axis=1) - 1.0)) < 1e-12
        for cell in cells[:50]:
            m = verts[list(cell)].T
            assert np.linalg.det(m) > 0.0


def test_preimage_oracle_random_rotated_linear():
    rng = np.random.default_rng(RNG_SEED + 1)
    for n in (2, 4):
        for _ in range(5):
            a = rng.standard_normal((n, n))
            q, r = np.linalg.qr(a)
            q *= np.sign(np.diag(r))  # make it a proper sample
            expected = 1 if np.linalg.det(q) > 0 else -1
            f = linear_field(q)
            assert oracle_degree_preimage(f, (0.0,) * n, 1.0) == expected
            w = winding_number(f, (0.0,) * n, 1.0)
            assert w.rounded == expected


def test_default_quadrature_cached_and_scaled():
    q1 = default_quadrature(2)
    q2 = default_quadrature(2)
    assert q1 is q2
    big = default_quadrature(2, scale=2.0)
    assert big.size == 2 * q1.size
