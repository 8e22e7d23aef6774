"""Clifford algebra layer: products, reversion, rotors, frames."""

import math

import numpy as np
import pytest

from eulerchar.clifford import (
    Multivector,
    commutator,
    exp,
    gamma,
    generator,
    geometric_product,
    pseudoscalar,
    random_bivector,
    random_rotor,
    sandwich_factor,
    sandwich_sum,
    versor_frame,
)

RNG_SEED = 20240301


def test_gamma_anticommutation_exact():
    for n in range(2, 7):
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                g = gamma(n, a) * gamma(n, b) + gamma(n, b) * gamma(n, a)
                want = Multivector.scalar(n, 2.0 if a == b else 0.0)
                assert np.array_equal(g.coeffs, want.coeffs)


def test_known_bivector_products():
    # gamma_1 gamma_2 squared is -1 in the plane it spans
    n = 3
    b = gamma(n, 1) * gamma(n, 2)
    sq = b * b
    assert sq.approx_eq(Multivector.scalar(n, -1.0), 0.0)


def test_associativity_random():
    rng = np.random.default_rng(RNG_SEED)
    for n in (2, 3, 4):
        for _ in range(20):
            a = Multivector(n, rng.standard_normal(2 ** n))
            b = Multivector(n, rng.standard_normal(2 ** n))
            c = Multivector(n, rng.standard_normal(2 ** n))
            left = (a * b) * c
            right = a * (b * c)
            assert left.approx_eq(right, 1e-10)


def test_reversion_is_antiautomorphism():
    rng = np.random.default_rng(RNG_SEED + 1)
    for n in (2, 3, 4, 5):
        a = Multivector(n, rng.standard_normal(2 ** n))
        b = Multivector(n, rng.standard_normal(2 ** n))
        assert (a * b).reverse().approx_eq(b.reverse() * a.reverse(), 1e-10)


def test_reversion_signs_per_grade():
    # grade r picks up (-1)^(r(r-1)/2)
    n = 5
    for r in range(n + 1):
        mask = (1 << r) - 1  # lowest r generators
        blade = Multivector.blade(n, mask, 1.0)
        sign = (-1) ** (r * (r - 1) // 2)
        assert np.array_equal(blade.reverse().coeffs, sign * blade.coeffs)


def test_pseudoscalar_square():
    for n in range(2, 7):
        i = pseudoscalar(n)
        want = Multivector.scalar(n, (-1.0) ** (n * (n - 1) // 2))
        assert (i * i).approx_eq(want, 1e-13)


def test_grade_projection_partitions():
    rng = np.random.default_rng(RNG_SEED + 2)
    n = 4
    a = Multivector(n, rng.standard_normal(2 ** n))
    total = Multivector.zero(n)
    for r in range(n + 1):
        total = total + a.grade_project(r)
    assert total.approx_eq(a, 0.0)


def test_exp_of_plane_bivector_is_rotor():
    n = 2
    theta = 0.73
    u = exp(generator(1, 2, n) * (2.0 * theta))  # = exp(theta gamma_1 gamma_2)
    want = Multivector.scalar(n, math.cos(theta)) + \
        Multivector.blade(n, 0b11, math.sin(theta))
    assert u.approx_eq(want, 1e-13)


def test_exp_large_argument_scaling():
    n = 3
    u = exp(generator(1, 3, n) * 40.0)  # forces many squarings
    norm = (u * u.reverse()).scalar_part()
    assert abs(norm - 1.0) < 1e-10


def test_generator_commutation_with_gammas():
    # bare commutator: [G_12, gamma_1] = -gamma_2, [G_12, gamma_2] = gamma_1;
    # the frame sandwich U~ gamma U undoes the sign, hence counterclockwise
    n = 4
    g = generator(1, 2, n)
    assert commutator(g, gamma(n, 1)).approx_eq(-gamma(n, 2), 1e-13)
    assert commutator(g, gamma(n, 2)).approx_eq(gamma(n, 1), 1e-13)
    assert commutator(g, gamma(n, 3)).norm() < 1e-13


def test_versor_frame_quarter_turn():
    n = 2
    theta = math.pi / 2.0
    rotor = exp(generator(1, 2, n) * theta)
    frame = versor_frame(rotor)
    assert frame.vectors[0].approx_eq(gamma(n, 2), 1e-12)
    assert frame.vectors[1].approx_eq(-gamma(n, 1), 1e-12)


def test_versor_frame_general_angle():
    n = 2
    theta = 0.41
    rotor = exp(generator(1, 2, n) * theta)
    frame = versor_frame(rotor)
    want = gamma(n, 1) * math.cos(theta) + gamma(n, 2) * math.sin(theta)
    assert frame.vectors[0].approx_eq(want, 1e-12)


def test_versor_frames_are_orthonormal():
    rng = np.random.default_rng(RNG_SEED + 3)
    for n in (2, 3, 4, 5, 6):
        for _ in range(10):
            frame = versor_frame(random_rotor(n, rng))
            assert frame.orthonormality_residual() < 1e-10
            m = frame.matrix()
            assert abs(abs(np.linalg.det(m)) - 1.0) < 1e-10


def test_frame_matrix_is_rotation():
    rng = np.random.default_rng(RNG_SEED + 4)
    n = 4
    frame = versor_frame(random_rotor(n, rng))
    m = frame.matrix()
    assert np.allclose(m @ m.T, np.eye(n), atol=1e-12)
    assert abs(np.linalg.det(m) - 1.0) < 1e-10


def test_sandwich_identity_all_grades():
    rng = np.random.default_rng(RNG_SEED + 5)
    for n in (2, 3, 4, 5):
        frame = versor_frame(random_rotor(n, rng))
        for r in range(n + 1):
            blade = Multivector.blade(n, (1 << r) - 1, 1.0)
            got = sandwich_sum(blade, frame)
            want = blade * sandwich_factor(n, r)
            assert got.approx_eq(want, 1e-10)


def test_sandwich_factor_table():
    # (-1)^r (N - 2r) straight from the anticommutation count
    assert sandwich_factor(4, 0) == 4.0
    assert sandwich_factor(4, 1) == -2.0
    assert sandwich_factor(4, 2) == 0.0
    assert sandwich_factor(4, 3) == 2.0
    assert sandwich_factor(4, 4) == -4.0


def test_versor_frame_rejects_odd_elements():
    with pytest.raises(ValueError):
        versor_frame(gamma(3, 1))


def test_versor_frame_rejects_non_unit():
    with pytest.raises(ValueError):
        versor_frame(Multivector.scalar(2, 2.0))


def test_random_bivector_is_grade_two():
    rng = np.random.default_rng(RNG_SEED + 6)
    for n in (2, 4, 6):
        b = random_bivector(n, rng)
        assert b.grades() == [2]


def test_geometric_product_function_matches_operator():
    rng = np.random.default_rng(RNG_SEED + 7)
    n = 3
    a = Multivector(n, rng.standard_normal(2 ** n))
    b = Multivector(n, rng.standard_normal(2 ** n))
    assert geometric_product(a, b).approx_eq(a * b, 0.0)


def test_vector_round_trip():
    v = np.array([0.3, -1.2, 0.5])
    mv = Multivector.from_vector(3, v)
    assert np.allclose(mv.vector_part(), v)
    assert mv.grades() == [1]
