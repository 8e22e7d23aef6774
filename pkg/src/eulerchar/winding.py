"""Winding numbers of vector fields over small spheres.

The winding (Brouwer degree of the normalized field n = phi/|phi| on a
sphere around a candidate zero) is computed as a surface integral of the
pulled-back unit-sphere volume form, evaluated pointwise as

    det([ n | J_phi t_1 | ... | J_phi t_{N-1} ]) / |phi|^{N-1}

over an oriented orthonormal tangent frame (t_j), normalized by the
unit-sphere area.  Columns proportional to n drop out of the
determinant, so no explicit tangential projection is needed.

Two independent cross-checks live here as well: a 1-D angle-summation
degree for planar fields, and a generic preimage-counting degree that
triangulates the source sphere and counts signed simplices covering a
probe direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .fields import VectorField

MIN_FIELD_NORM = 1e-8
MAX_RESIDUAL = 0.1

_DEFAULT_NODES = {2: (512,), 3: (48, 96), 4: (48, 48, 96)}
_DEFAULT_MESH_LEVEL = {2: 6, 3: 4, 4: 3}
_RETRY_SEED = 20240229


class WindingError(ValueError):
    pass


class ZeroOnSphereError(WindingError):
    """The field nearly vanishes on the integration sphere."""


class UndersampledError(WindingError):
    """Sampling too coarse to certify the result; refine and retry."""


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^(n-1) in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _oriented_tangents(nodes: np.ndarray) -> np.ndarray:
    """Orthonormal tangent frames T with det([s | T]) = +1 at each node.

    Householder reflections carry e_N to -sign(s_N) s, so their leading
    columns span the tangent space; a determinant sweep then fixes the
    outward-normal-first orientation.
    """
    m, n = nodes.shape
    sign = np.where(nodes[:, -1] >= 0.0, 1.0, -1.0)
    v = nodes.copy()
    v[:, -1] += sign
    vv = np.einsum("ij,ij->i", v, v)
    h = np.eye(n)[None, :, :] - 2.0 * v[:, :, None] * v[:, None, :] / vv[:, None, None]
    tang = h[:, :, : n - 1]
    full = np.concatenate([nodes[:, :, None], tang], axis=2)
    flip = np.linalg.det(full) < 0.0
    tang = tang.copy()
    tang[flip, :, -1] *= -1.0
    return tang


@dataclass(frozen=True)
class SphereQuadrature:
    """Nodes/weights on the unit sphere S^(N-1) plus oriented tangents.

    Weights sum to the sphere area.  N=2 uses the uniform trapezoid rule
    (spectrally accurate on the circle); N>=3 uses Gauss-Legendre in the
    polar angles with the measure's sine powers folded into the weights,
    and the trapezoid rule in the azimuth.
    """

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray
    tangents: np.ndarray
    counts: tuple

    @staticmethod
    def build(dimension: int, counts=None, scale: float = 1.0) -> "SphereQuadrature":
        if dimension not in _DEFAULT_NODES:
            raise WindingError(f"no quadrature for dimension {dimension}")
        if counts is None:
            counts = tuple(
                max(4, int(round(c * scale))) for c in _DEFAULT_NODES[dimension]
            )
        counts = tuple(int(c) for c in counts)
        if dimension == 2:
            (mm,) = counts
            theta = 2.0 * math.pi * np.arange(mm) / mm
            nodes = np.column_stack([np.cos(theta), np.sin(theta)])
            weights = np.full(mm, 2.0 * math.pi / mm)
            tangents = np.stack([-np.sin(theta), np.cos(theta)], axis=1)[:, :, None]
            return SphereQuadrature(2, nodes, weights, tangents, counts)

        *polar_counts, azim = counts
        if len(polar_counts) != dimension - 2:
            raise WindingError(
                f"dimension {dimension} needs {dimension - 1} node counts"
            )
        polar = []
        for k, cnt in enumerate(polar_counts):
            xi, wi = roots_legendre(cnt)
            th = 0.5 * math.pi * (xi + 1.0)
            w = 0.5 * math.pi * wi * np.sin(th) ** (dimension - 2 - k)
            polar.append((th, w))
        phis = 2.0 * math.pi * np.arange(azim) / azim
        wphi = np.full(azim, 2.0 * math.pi / azim)

        grids = np.meshgrid(*[p[0] for p in polar], phis, indexing="ij")
        wgrids = np.meshgrid(*[p[1] for p in polar], wphi, indexing="ij")
        angles = [g.ravel() for g in grids]
        weights = np.ones_like(angles[0])
        for w in wgrids:
            weights = weights * w.ravel()

        m = angles[0].size
        nodes = np.empty((m, dimension))
        sin_running = np.ones(m)
        for k in range(dimension - 1):
            ang = angles[k]
            nodes[:, k] = sin_running * np.cos(ang)
            sin_running = sin_running * np.sin(ang)
        nodes[:, dimension - 1] = sin_running
        tangents = _oriented_tangents(nodes)
        return SphereQuadrature(dimension, nodes, weights, tangents, counts)

    def refine(self, factor: int = 2) -> "SphereQuadrature":
        return SphereQuadrature.build(
            self.dimension, counts=tuple(c * factor for c in self.counts)
        )

    @property
    def size(self) -> int:
        return self.nodes.shape[0]


@lru_cache(maxsize=32)
def default_quadrature(dimension: int, scale: float = 1.0) -> SphereQuadrature:
    return SphereQuadrature.build(dimension, scale=scale)


@dataclass(frozen=True)
class WindingResult:
    raw: float
    rounded: int
    residual: float
    center: tuple
    radius: float

    @staticmethod
    def from_raw(raw: float, center, radius) -> "WindingResult":
        rounded = int(round(raw))
        return WindingResult(
            raw=float(raw),
            rounded=rounded,
            residual=float(raw - rounded),
            center=tuple(np.asarray(center, dtype=float).tolist()),
            radius=float(radius),
        )


def chern_form_value(field: VectorField, x, tangents) -> float:
    """Pulled-back volume form at x on an (N-1)-tuple of tangent vectors."""
    x = np.asarray(x, dtype=float)
    tangents = np.asarray(tangents, dtype=float)
    phi = field.evaluate(x)
    norm = np.linalg.norm(phi)
    if norm <= MIN_FIELD_NORM:
        raise ZeroOnSphereError(f"field magnitude {norm:.3e} at {x.tolist()}")
    jac = field.jacobian(x)
    cols = np.column_stack([phi / norm, (jac @ tangents) / norm])
    return float(np.linalg.det(cols)) / sphere_area(field.dimension)


def winding_number(field: VectorField, center, radius: float,
                   quadrature: SphereQuadrature | None = None,
                   max_residual: float = MAX_RESIDUAL) -> WindingResult:
    """Degree of phi/|phi| over the sphere |x - center| = radius."""
    center = np.asarray(center, dtype=float)
    n = field.dimension
    if center.shape != (n,):
        raise WindingError(f"center must have {n} components")
    if radius <= 0.0:
        raise WindingError("radius must be positive")
    quad = quadrature or default_quadrature(n)
    if quad.dimension != n:
        raise WindingError("quadrature dimension mismatch")

    pts = center[None, :] + radius * quad.nodes
    phi = field.evaluate_many(pts)
    norms = np.linalg.norm(phi, axis=1)
    lo = float(norms.min())
    if lo <= MIN_FIELD_NORM:
        k = int(np.argmin(norms))
        raise ZeroOnSphereError(
            f"field magnitude {lo:.3e} on sphere at {pts[k].tolist()}"
        )
    jac = field.jacobian_many(pts)
    cols = np.concatenate(
        [phi[:, :, None], np.einsum("pij,pjk->pik", jac, quad.tangents)], axis=2
    )
    dets = np.linalg.det(cols) / norms ** n
    raw = radius ** (n - 1) * float(np.dot(quad.weights, dets)) / sphere_area(n)
    result = WindingResult.from_raw(raw, center, radius)
    if abs(result.residual) > max_residual:
        raise UndersampledError(
            f"winding {raw:.6f} is {result.residual:+.3f} from an integer; "
            "refine the quadrature or shrink the sphere"
        )
    return result


def oracle_degree_anglesum(field: VectorField, center, radius: float,
                           samples: int = 4096) -> int:
    """Planar degree by accumulating angle increments of phi around the circle.

    Independent of the quadrature route: only needs arctan2 and a branch
    correction.  Errors out if consecutive samples jump by more than
    pi/2, since then the branch correction is no longer certified.
    """
    if field.dimension != 2:
        raise WindingError("angle-sum oracle is planar only")
    center = np.asarray(center, dtype=float)
    theta = 2.0 * math.pi * np.arange(samples + 1) / samples
    pts = center[None, :] + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    phi = field.evaluate_many(pts)
    norms = np.linalg.norm(phi, axis=1)
    if norms.min() <= MIN_FIELD_NORM:
        raise ZeroOnSphereError("field vanishes on the sampling circle")
    ang = np.arctan2(phi[:, 1], phi[:, 0])
    jumps = np.diff(ang)
    jumps = (jumps + math.pi) % (2.0 * math.pi) - math.pi
    if np.max(np.abs(jumps)) > 0.5 * math.pi:
        raise UndersampledError(
            f"angle jump {np.max(np.abs(jumps)):.3f} rad exceeds pi/2; "
            "increase samples"
        )
    total = float(jumps.sum())
    deg = total / (2.0 * math.pi)
    if abs(deg - round(deg)) > 1e-6:
        raise UndersampledError(f"angle sum {total:.6e} is not a multiple of 2*pi")
    return int(round(deg))


# -- triangulated source spheres for the preimage oracle ---------------


def _split_simplex(cell, midpoint):
    """Subdivide one simplex (tuple of vertex ids) into 2^dim children."""
    k = len(cell)
    if k == 2:
        a, b = cell
        m = midpoint(a, b)
        return [(a, m), (m, b)]
    if k == 3:
        a, b, c = cell
        ab, ac, bc = midpoint(a, b), midpoint(a, c), midpoint(b, c)
        return [(a, ab, ac), (b, ab, bc), (c, ac, bc), (ab, ac, bc)]
    if k == 4:
        v0, v1, v2, v3 = cell
        m01, m02, m03 = midpoint(v0, v1), midpoint(v0, v2), midpoint(v0, v3)
        m12, m13, m23 = midpoint(v1, v2), midpoint(v1, v3), midpoint(v2, v3)
        corners = [
            (v0, m01, m02, m03),
            (v1, m01, m12, m13),
            (v2, m02, m12, m23),
            (v3, m03, m13, m23),
        ]
        # central octahedron split along the (m01, m23) diagonal; the
        # equator cycle keeps opposite midpoints apart
        cyc = (m02, m03, m13, m12)
        middle = [
            (m01, m23, cyc[i], cyc[(i + 1) % 4]) for i in range(4)
        ]
        return corners + middle
    raise WindingError(f"no subdivision rule for {k}-vertex cells")


@lru_cache(maxsize=16)
def sphere_mesh(dimension: int, level: int):
    """(vertices, cells) triangulating S^(dimension-1), outward oriented.

    Starts from the boundary of the cross-polytope (the unit ball of the
    1-norm) and refines by edge bisection, reprojecting to the sphere.
    Cells are vertex-id tuples ordered so det([v_0 ... v_{N-1}]) > 0.
    """
    if dimension not in (2, 3, 4):
        raise WindingError(f"no sphere mesh for dimension {dimension}")
    verts = [np.zeros(dimension) for _ in range(2 * dimension)]
    for a in range(dimension):
        verts[2 * a][a] = 1.0
        verts[2 * a + 1][a] = -1.0
    cells = []
    for signs in np.ndindex(*(2,) * dimension):
        cells.append(tuple(2 * a + s for a, s in enumerate(signs)))

    cache = {}

    def midpoint(i, j):
        key = (i, j) if i < j else (j, i)
        if key not in cache:
            p = verts[i] + verts[j]
            verts.append(p / np.linalg.norm(p))
            cache[key] = len(verts) - 1
        return cache[key]

    for _ in range(level):
        nxt = []
        for cell in cells:
            nxt.extend(_split_simplex(cell, midpoint))
        cells = nxt

    vv = np.stack(verts)
    cc = np.array(cells, dtype=int)
    mats = vv[cc].transpose(0, 2, 1)
    flip = np.linalg.det(mats) < 0.0
    cc[flip, -2:] = cc[flip, -2:][:, ::-1]
    return vv, cc


def oracle_degree_preimage(field: VectorField, center, radius: float,
                           level: int | None = None,
                           direction=None) -> int:
    """Degree by counting signed preimages of a probe direction.

    Triangulates the source sphere, maps vertices through n = phi/|phi|,
    and sums orientation signs of the image simplices whose conic hull
    contains the probe.  Directions that graze an image face are
    rejected and retried with seeded random probes.
    """
    n = field.dimension
    center = np.asarray(center, dtype=float)
    if level is None:
        level = _DEFAULT_MESH_LEVEL[n]
    verts, cells = sphere_mesh(n, level)
    pts = center[None, :] + radius * verts
    phi = field.evaluate_many(pts)
    norms = np.linalg.norm(phi, axis=1)
    if norms.min() <= MIN_FIELD_NORM:
        raise ZeroOnSphereError("field vanishes on the sampling sphere")
    images = phi / norms[:, None]

    mats = images[cells].transpose(0, 2, 1)  # columns are image vertices
    dets = np.linalg.det(mats)
    regular = np.abs(dets) > 1e-12
    eps = 1e-9

    if direction is not None:
        candidates = [np.asarray(direction, dtype=float)]
    else:
        candidates = [np.sin(np.arange(1, n + 1))]
    rng = np.random.default_rng(_RETRY_SEED)
    candidates += [rng.normal(size=n) for _ in range(4)]

    for probe in candidates:
        probe = probe / np.linalg.norm(probe)
        rhs = np.broadcast_to(probe, (int(regular.sum()), n))[:, :, None]
        lam = np.linalg.solve(mats[regular], rhs)[:, :, 0]
        inside = (lam > eps).all(axis=1)
        outside = (lam < -eps).any(axis=1)
        if bool((~inside & ~outside).any()):
            continue  # probe grazes a face; try another
        return int(np.sign(dets[regular][inside]).sum())
    raise UndersampledError(
        "all probe directions graze image simplices; refine the mesh"
    )
