"""Locating vector field zeros and certifying their indices.

A coarse grid scan proposes cells where every field component changes
sign (plus the lowest-magnitude cells as extra seeds), damped Newton
polishes each candidate, and duplicates are merged.  Each surviving
zero gets a winding number from a quadrature sphere at its isolation
radius; for regular zeros this must match the Jacobian determinant
sign, and for degenerate zeros the winding itself is the index.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .domains import BallDomain, BoxDomain
from .fields import VectorField
from .winding import (
    SphereQuadrature,
    WindingResult,
    default_quadrature,
    oracle_degree_preimage,
    winding_number,
)

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 50
MIN_DAMPING = 2.0 ** -10
REGULAR_DET_TOL = 1e-8
DEDUP_SCALE = 1e-6
ISOLATION_FLOOR_SCALE = 1e-5
EXTRA_SEEDS = 8

_DEFAULT_RESOLUTION = {1: 64, 2: 32, 3: 16, 4: 10}


class ZeroFindingError(RuntimeError):
    pass


class BoundaryZoneError(ZeroFindingError):
    """A zero sits too close to the domain boundary to classify."""


@dataclass(frozen=True)
class ZeroRecord:
    location: tuple
    field_norm: float
    jacobian_det: float
    regular: bool
    eta: int              # sign(det J) for regular zeros, else 0 when winding is 0
    beta: int             # |winding|
    winding: int
    winding_raw: float
    winding_residual: float
    isolation_radius: float
    degenerate: bool

    def to_dict(self) -> dict:
        return {
            "location": list(self.location),
            "winding": self.winding,
            "eta": self.eta,
            "beta": self.beta,
            "regular": self.regular,
            "degenerate": self.degenerate,
            "jacobian_det": self.jacobian_det,
            "field_norm": self.field_norm,
            "winding_raw": self.winding_raw,
            "winding_residual": self.winding_residual,
            "isolation_radius": self.isolation_radius,
        }


def _newton(field: VectorField, start, tol, maxiter):
    """Damped Newton; returns the root or None on non-convergence."""
    x = np.asarray(start, dtype=float).copy()
    fx = field.evaluate(x)
    norm = float(np.linalg.norm(fx))
    for _ in range(maxiter):
        if norm <= tol:
            return x
        jac = field.jacobian(x)
        try:
            step = np.linalg.solve(jac, fx)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, fx, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        lam = 1.0
        while lam >= MIN_DAMPING:
            trial = x - lam * step
            ft = field.evaluate(trial)
            nt = float(np.linalg.norm(ft))
            if nt < norm:
                x, fx, norm = trial, ft, nt
                break
            lam *= 0.5
        else:
            return None
    return x if norm <= tol else None


def _candidate_cells(vals_grid, counts):
    """Cells where every component spans zero; indices into the grid."""
    n = len(counts)
    comp = vals_grid  # shape counts+1 each axis, then component axis
    ok = None
    corner_offsets = list(np.ndindex(*(2,) * n))
    for c in range(comp.shape[-1]):
        v = comp[..., c]
        cmin = None
        cmax = None
        for off in corner_offsets:
            sl = tuple(slice(o, o + cnt) for o, cnt in zip(off, counts))
            block = v[sl]
            cmin = block if cmin is None else np.minimum(cmin, block)
            cmax = block if cmax is None else np.maximum(cmax, block)
        this = (cmin <= 0.0) & (cmax >= 0.0)
        ok = this if ok is None else (ok & this)
    return np.argwhere(ok)


def find_zeros(field: VectorField, domain, resolution: int | None = None,
               tol: float = NEWTON_TOL, maxiter: int = NEWTON_MAXITER,
               quadrature: SphereQuadrature | None = None,
               isolation_floor: float | None = None) -> list:
    """All isolated zeros of the field inside the domain, with indices."""
    n = field.dimension
    if domain.dimension != n:
        raise ZeroFindingError("field and domain dimensions differ")
    res = resolution or _DEFAULT_RESOLUTION.get(n, 8)
    lo, hi = domain.bounding_box()
    axes = [np.linspace(lo[j], hi[j], res + 1) for j in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    vals = field.evaluate_many(pts)
    vals_grid = vals.reshape(*(res + 1,) * n, n)

    counts = (res,) * n
    cells = _candidate_cells(vals_grid, counts)
    widths = (hi - lo) / res

    # seed list: candidate cell centers plus the lowest-|phi| vertices
    seeds = []
    for idx in cells:
        seeds.append(lo + (np.asarray(idx) + 0.5) * widths)
    norms = np.linalg.norm(vals, axis=1)
    for k in np.argsort(norms)[:EXTRA_SEEDS]:
        seeds.append(pts[k])

    scale = domain.diameter
    floor = isolation_floor if isolation_floor is not None else ISOLATION_FLOOR_SCALE * scale
    roots = []
    for s in seeds:
        r = _newton(field, s, tol, maxiter)
        if r is None or not np.all(np.isfinite(r)):
            continue
        if not domain.contains(r):
            continue
        if not any(np.linalg.norm(r - q) < DEDUP_SCALE * scale for q in roots):
            roots.append(r)

    if not roots:
        return []

    for r in roots:
        if domain.boundary_distance(r) < floor:
            raise BoundaryZoneError(
                f"zero at {r.tolist()} within {floor:.2e} of the domain boundary"
            )

    records = []
    quad = quadrature or default_quadrature(n)
    for i, r in enumerate(roots):
        others = [np.linalg.norm(r - q) for j, q in enumerate(roots) if j != i]
        rad = 0.5 * min([domain.boundary_distance(r)] + others)
        if rad < floor:
            raise ZeroFindingError(
                f"zeros too close together near {r.tolist()} (radius {rad:.2e})"
            )
        rad = min(rad, 1.0)
        wres = winding_number(field, r, rad, quad)
        det = float(np.linalg.det(field.jacobian(r)))
        regular = abs(det) > REGULAR_DET_TOL
        w = wres.rounded
        if regular:
            eta = 1 if det > 0 else -1
            if w != eta:
                raise ZeroFindingError(
                    f"winding {w} contradicts Jacobian sign {eta} at {r.tolist()}"
                )
        else:
            eta = 0 if w == 0 else (1 if w > 0 else -1)
        records.append(ZeroRecord(
            location=tuple(r.tolist()),
            field_norm=float(np.linalg.norm(field.evaluate(r))),
            jacobian_det=det,
            regular=regular,
            eta=int(eta),
            beta=abs(w),
            winding=int(w),
            winding_raw=wres.raw,
            winding_residual=wres.residual,
            isolation_radius=float(rad),
            degenerate=not regular,
        ))
    records.sort(key=lambda z: z.location)
    return records


def total_index(records) -> int:
    return int(sum(z.winding for z in records))


@dataclass(frozen=True)
class ExcisionResult:
    """Zero-by-zero indices against one big enclosing sphere."""

    records: tuple
    zero_sum: int
    enclosing_winding: int
    enclosing_raw: float
    agree: bool
    oracle_degree: int
    oracle_agree: bool

    def to_dict(self) -> dict:
        return {
            "zero_sum": self.zero_sum,
            "enclosing_winding": self.enclosing_winding,
            "enclosing_raw": self.enclosing_raw,
            "agree": self.agree,
            "oracle_degree": self.oracle_degree,
            "oracle_agree": self.oracle_agree,
            "zeros": [z.to_dict() for z in self.records],
        }


def index_sum_with_excision(field: VectorField, ball: BallDomain,
                            resolution: int | None = None,
                            quadrature: SphereQuadrature | None = None) -> ExcisionResult:
    """Sum of per-zero windings checked against the enclosing sphere.

    Shrinking the big sphere onto disjoint small spheres around the
    zeros changes nothing off the zero set, so the two totals must
    agree; a preimage-count degree on the big sphere cross-checks the
    quadrature route.
    """
    records = find_zeros(field, ball, resolution=resolution, quadrature=quadrature)
    zero_sum = total_index(records)
    big = winding_number(field, ball.center, ball.radius,
                         quadrature or default_quadrature(field.dimension))
    deg = oracle_degree_preimage(field, ball.center, ball.radius)
    return ExcisionResult(
        records=tuple(records),
        zero_sum=zero_sum,
        enclosing_winding=big.rounded,
        enclosing_raw=big.raw,
        agree=zero_sum == big.rounded,
        oracle_degree=deg,
        oracle_agree=deg == big.rounded,
    )
