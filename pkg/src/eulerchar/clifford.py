"""Real Clifford algebra Cl(N) with positive-definite signature.

A multivector is stored densely as 2^N coefficients indexed by blade
bitmasks: bit a of the index set means the basis vector gamma_{a+1} is a
factor of that blade, so index 0 is the scalar, index 0b11 is
gamma_1 gamma_2, and index 2^N - 1 is the pseudoscalar.  Products are
evaluated through cached sign/index Cayley tables, which keeps the
geometric product a single vectorized scatter-add.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_DIMENSION = 8

# exp() series control: scale argument below this norm, then square back up
_EXP_SCALE_LIMIT = 0.5
_EXP_TERMS = 16


class CliffordError(ValueError):
    """Structural misuse of the algebra (bad dimension, grade, versor...)."""


def _merge_sign(a: int, b: int) -> float:
    """Sign from reordering the blade product a * b into canonical order.

    Counts transpositions needed to move each generator of b past the
    higher-index generators of a; odd count flips the sign.
    """
    a >>= 1
    swaps = 0
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1.0 if swaps & 1 else 1.0


@lru_cache(maxsize=MAX_DIMENSION + 1)
def _tables(n: int):
    """(flat blade-index table, sign table, grade-per-blade) for Cl(n)."""
    if not 1 <= n <= MAX_DIMENSION:
        raise CliffordError(f"dimension must be in 1..{MAX_DIMENSION}, got {n}")
    size = 1 << n
    blades = np.arange(size)
    index = (blades[:, None] ^ blades[None, :]).ravel()
    signs = np.empty((size, size))
    for a in range(size):
        for b in range(size):
            signs[a, b] = _merge_sign(a, b)
    grades = np.array([bin(b).count("1") for b in range(size)])
    return index, signs, grades


def blade_grades(n: int) -> np.ndarray:
    return _tables(n)[2]


class Multivector:
    """Element of Cl(N); immutable by convention (do not mutate coeffs)."""

    __slots__ = ("dimension", "coeffs")

    def __init__(self, dimension: int, coeffs):
        _tables(dimension)  # validates the dimension
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (1 << dimension,):
            raise CliffordError(
                f"expected {1 << dimension} coefficients for Cl({dimension}), "
                f"got shape {coeffs.shape}"
            )
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is read-only")

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(dimension: int) -> "Multivector":
        return Multivector(dimension, np.zeros(1 << dimension))

    @staticmethod
    def scalar(dimension: int, value: float) -> "Multivector":
        c = np.zeros(1 << dimension)
        c[0] = value
        return Multivector(dimension, c)

    @staticmethod
    def blade(dimension: int, mask: int, value: float = 1.0) -> "Multivector":
        if not 0 <= mask < (1 << dimension):
            raise CliffordError(f"blade mask {mask} out of range for Cl({dimension})")
        c = np.zeros(1 << dimension)
        c[mask] = value
        return Multivector(dimension, c)

    @staticmethod
    def from_vector(dimension: int, components) -> "Multivector":
        components = np.asarray(components, dtype=float)
        if components.shape != (dimension,):
            raise CliffordError(
                f"vector needs {dimension} components, got {components.shape}"
            )
        c = np.zeros(1 << dimension)
        c[[1 << a for a in range(dimension)]] = components
        return Multivector(dimension, c)

    # -- ring operations ----------------------------------------------

    def _check_peer(self, other: "Multivector"):
        if self.dimension != other.dimension:
            raise CliffordError(
                f"mixed algebras Cl({self.dimension}) and Cl({other.dimension})"
            )

    def __add__(self, other):
        if isinstance(other, Multivector):
            self._check_peer(other)
            return Multivector(self.dimension, self.coeffs + other.coeffs)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Multivector):
            self._check_peer(other)
            return Multivector(self.dimension, self.coeffs - other.coeffs)
        return NotImplemented

    def __neg__(self):
        return Multivector(self.dimension, -self.coeffs)

    def __mul__(self, other):
        if isinstance(other, Multivector):
            self._check_peer(other)
            index, signs, _ = _tables(self.dimension)
            terms = (self.coeffs[:, None] * other.coeffs[None, :]) * signs
            out = np.bincount(index, weights=terms.ravel(), minlength=self.coeffs.size)
            return Multivector(self.dimension, out)
        if isinstance(other, (int, float)):
            return Multivector(self.dimension, self.coeffs * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.dimension, self.coeffs * other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Multivector(self.dimension, self.coeffs / other)
        return NotImplemented

    # -- involutions and projections ----------------------------------

    def reverse(self) -> "Multivector":
        """Reversal: each grade-r part picks up (-1)^(r(r-1)/2)."""
        g = blade_grades(self.dimension)
        signs = np.where((g * (g - 1) // 2) % 2 == 0, 1.0, -1.0)
        return Multivector(self.dimension, self.coeffs * signs)

    def grade_project(self, r: int) -> "Multivector":
        if not 0 <= r <= self.dimension:
            raise CliffordError(
                f"grade {r} out of range for Cl({self.dimension})"
            )
        g = blade_grades(self.dimension)
        return Multivector(self.dimension, np.where(g == r, self.coeffs, 0.0))

    def grades(self, tol: float = 0.0) -> list[int]:
        """Grades with any coefficient magnitude above tol."""
        g = blade_grades(self.dimension)
        present = np.abs(self.coeffs) > tol
        return sorted(set(g[present].tolist()))

    def scalar_part(self) -> float:
        return float(self.coeffs[0])

    def vector_part(self) -> np.ndarray:
        return self.coeffs[[1 << a for a in range(self.dimension)]].copy()

    # -- metrics -------------------------------------------------------

    def norm(self) -> float:
        """Max-abs over blade coefficients."""
        return float(np.max(np.abs(self.coeffs)))

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def approx_eq(self, other: "Multivector", tol: float = 1e-12) -> bool:
        self._check_peer(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= tol)

    def __repr__(self):
        terms = []
        for mask in np.flatnonzero(np.abs(self.coeffs) > 1e-14):
            name = "1" if mask == 0 else "g" + "".join(
                str(a + 1) for a in range(self.dimension) if mask >> a & 1
            )
            terms.append(f"{self.coeffs[mask]:+.6g}*{name}")
        body = " ".join(terms) if terms else "0"
        return f"<Cl({self.dimension}) {body}>"


# -- module-level operation spellings ---------------------------------


def gamma(dimension: int, a: int) -> Multivector:
    """Basis vector gamma_a, 1-indexed."""
    if not 1 <= a <= dimension:
        raise CliffordError(f"gamma index {a} out of range 1..{dimension}")
    return Multivector.blade(dimension, 1 << (a - 1))


def pseudoscalar(dimension: int) -> Multivector:
    return Multivector.blade(dimension, (1 << dimension) - 1)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    return a * b


def grade_project(a: Multivector, r: int) -> Multivector:
    return a.grade_project(r)


def reverse(a: Multivector) -> Multivector:
    return a.reverse()


def commutator(a: Multivector, b: Multivector) -> Multivector:
    return a * b - b * a


def generator(a: int, b: int, dimension: int) -> Multivector:
    """Rotation generator in the (a,b) coordinate plane, a != b.

    Quarter commutator of the two basis vectors; for orthogonal gammas this
    is half their product, and exp(theta * generator) rotates by theta.
    """
    if a == b:
        raise CliffordError("generator needs two distinct axes")
    ga, gb = gamma(dimension, a), gamma(dimension, b)
    return (ga * gb - gb * ga) * 0.25


def exp(a: Multivector) -> Multivector:
    """Series exponential with scaling and squaring."""
    n = a.norm()
    squarings = 0
    while n > _EXP_SCALE_LIMIT:
        n *= 0.5
        squarings += 1
    base = a * (0.5 ** squarings)
    acc = Multivector.scalar(a.dimension, 1.0)
    term = Multivector.scalar(a.dimension, 1.0)
    for k in range(1, _EXP_TERMS + 1):
        term = term * base * (1.0 / k)
        acc = acc + term
    for _ in range(squarings):
        acc = acc * acc
    return acc


def random_bivector(dimension: int, rng: np.random.Generator,
                    scale: float = 1.0) -> Multivector:
    g = blade_grades(dimension)
    c = np.zeros(1 << dimension)
    idx = np.flatnonzero(g == 2)
    c[idx] = rng.normal(scale=scale, size=idx.size)
    return Multivector(dimension, c)


def random_rotor(dimension: int, rng: np.random.Generator,
                 scale: float = 1.0) -> Multivector:
    """exp of a random bivector: a unit versor in the spin group.

    One Newton-Schulz step U (3 - U~U)/2 squares away the small
    non-unitarity the truncated exponential leaves on large arguments.
    """
    u = exp(random_bivector(dimension, rng, scale))
    correction = Multivector.scalar(dimension, 1.5) - (u.reverse() * u) * 0.5
    return u * correction


@dataclass(frozen=True)
class Frame:
    """Orthonormal vector frame u_i, each a grade-1 multivector."""

    dimension: int
    vectors: tuple

    def __post_init__(self):
        if len(self.vectors) != self.dimension:
            raise CliffordError(
                f"frame in Cl({self.dimension}) needs {self.dimension} vectors"
            )

    def matrix(self) -> np.ndarray:
        """Rows are the frame vectors' components in the gamma basis."""
        return np.stack([u.vector_part() for u in self.vectors])

    def orthonormality_residual(self) -> float:
        m = self.matrix()
        return float(np.max(np.abs(m @ m.T - np.eye(self.dimension))))


def versor_frame(rotor: Multivector, tol: float = 1e-10) -> Frame:
    """Frame u_i = U~ gamma_i U obtained by rotating the gamma basis.

    The reverse acts on the left so that exp(theta * generator(1,2,N))
    turns gamma_1 toward +gamma_2: versor_frame is counterclockwise in
    each generator plane.  Rejects versors that are not unit-normalized
    or carry odd-grade content, reporting the offending deviation.
    """
    n = rotor.dimension
    unit_dev = (rotor * rotor.reverse() - Multivector.scalar(n, 1.0)).norm()
    if unit_dev > tol:
        raise CliffordError(f"versor is not unit: |UU~ - 1| = {unit_dev:.3e}")
    odd = sum(1 for r in rotor.grades(tol) if r % 2)
    if odd:
        raise CliffordError("versor has odd-grade components; rotors only")
    rrev = rotor.reverse()
    vectors = []
    for a in range(1, n + 1):
        u = rrev * gamma(n, a) * rotor
        leak = (u - u.grade_project(1)).norm()
        if leak > max(tol, 1e-10):
            raise CliffordError(f"frame vector {a} is not grade 1 (leak {leak:.3e})")
        vectors.append(u.grade_project(1))
    return Frame(n, tuple(vectors))


def sandwich_sum(a: Multivector, frame: Frame) -> Multivector:
    """Sum_i u_i A u_i for homogeneous A of grade r.

    Equals (-1)^r (N - 2r) A for any orthonormal frame, which is the
    workhorse identity behind the connection decomposition.
    """
    if frame.dimension != a.dimension:
        raise CliffordError("frame and multivector dimensions differ")
    gs = a.grades(tol=1e-13)
    if len(gs) > 1:
        raise CliffordError(f"sandwich_sum needs homogeneous input, grades {gs}")
    acc = Multivector.zero(a.dimension)
    for u in frame.vectors:
        acc = acc + u * a * u
    return acc


def sandwich_factor(dimension: int, r: int) -> float:
    """Predicted eigenvalue (-1)^r (N - 2r) of the frame sandwich sum."""
    return float((-1) ** r * (dimension - 2 * r))
