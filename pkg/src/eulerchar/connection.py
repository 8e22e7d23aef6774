"""Spin connections induced by moving orthonormal frames.

A frame field assigns to each chart point an orthonormal Clifford frame
u_i(x), either directly or through a rotor U(x).  From its derivatives
we build the connection that makes the frame covariantly constant,

    omega_0 = (1/4) sum_i (d u_i) u_i,

which is flat wherever the frame is smooth; its holonomy around frame
singularities is quantized and measures the frame's winding.  The
decomposition check verifies the reconstruction identity

    omega = (1/4) sum_i (d u_i  u_i - D u_i  u_i)

for arbitrary grade-2 connections.  The covariant derivative D u_i is
evaluated by parallel-transporting neighbor samples with the rotor
exp(-h omega) before differencing; reusing the plain difference d u_i
on both sides would cancel exactly and certify nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import (
    CliffordError,
    Frame,
    Multivector,
    blade_grades,
    exp,
    gamma,
    versor_frame,
)

DEFAULT_STEP = 1e-4
FRAME_TOL = 1e-9


class ChartError(ValueError):
    """Point outside the chart or too close to a frame singularity."""


@dataclass(frozen=True)
class ConnectionSample:
    """Connection components omega_mu at one chart point."""

    point: tuple
    step: float
    omegas: tuple  # length-N tuple of Multivectors

    @property
    def dimension(self) -> int:
        return len(self.omegas)

    def max_norm(self) -> float:
        return max(w.norm() for w in self.omegas)

    def grade2_leakage(self) -> float:
        return max((w - w.grade_project(2)).norm() for w in self.omegas)


@dataclass(frozen=True)
class CurvatureSample:
    """Antisymmetric curvature components F_{mu nu}, mu < nu."""

    point: tuple
    step: float
    components: dict  # (mu, nu) -> Multivector

    def max_norm(self) -> float:
        return max(f.norm() for f in self.components.values())


class FrameField:
    """Orthonormal frame on a box chart of R^N, possibly with singular points."""

    def __init__(self, dimension, frame_fn=None, rotor_fn=None,
                 chart_lo=None, chart_hi=None, singular_points=(),
                 name="frame-field"):
        if (frame_fn is None) == (rotor_fn is None):
            raise ValueError("provide exactly one of frame_fn, rotor_fn")
        self.dimension = dimension
        self.name = name
        self._frame_fn = frame_fn
        self._rotor_fn = rotor_fn
        self.chart_lo = (np.full(dimension, -1.5) if chart_lo is None
                         else np.asarray(chart_lo, dtype=float))
        self.chart_hi = (np.full(dimension, 1.5) if chart_hi is None
                         else np.asarray(chart_hi, dtype=float))
        self.singular_points = [np.asarray(p, dtype=float) for p in singular_points]

    def contains(self, x, margin: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.chart_lo + margin)
                    and np.all(x <= self.chart_hi - margin))

    def clearance(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if not self.singular_points:
            return math.inf
        return min(float(np.linalg.norm(x - p)) for p in self.singular_points)

    def check_point(self, x, margin: float):
        if not self.contains(x, margin):
            raise ChartError(f"{np.asarray(x).tolist()} too close to chart edge")
        c = self.clearance(x)
        if c <= 2.0 * margin:
            raise ChartError(
                f"{np.asarray(x).tolist()} within {c:.3e} of a singular point"
            )

    def rotor(self, x):
        return None if self._rotor_fn is None else self._rotor_fn(np.asarray(x, float))

    def frame(self, x) -> Frame:
        x = np.asarray(x, dtype=float)
        if self._frame_fn is not None:
            fr = self._frame_fn(x)
            resid = fr.orthonormality_residual()
            if resid > FRAME_TOL:
                raise CliffordError(
                    f"frame at {x.tolist()} not orthonormal (residual {resid:.3e})"
                )
            return fr
        return versor_frame(self._rotor_fn(x))

    def __repr__(self):
        return f"<FrameField {self.name!r} N={self.dimension}>"


# -- builtin frame families --------------------------------------------


def constant_frame_field(dimension, rotor=None, name="constant-frame") -> FrameField:
    if rotor is None:
        fr = Frame(dimension, tuple(gamma(dimension, a)
                                    for a in range(1, dimension + 1)))
        return FrameField(dimension, frame_fn=lambda x: fr, name=name)
    return FrameField(dimension, rotor_fn=lambda x: rotor, name=name)


def hedgehog_frame_field(winding: int, chart_half_width: float = 1.5,
                         name=None) -> FrameField:
    """Planar frame turning k times around the origin: u_1 = (cos k*theta,
    sin k*theta) in the gamma basis.  Singular at the origin."""
    k = int(winding)

    def frame_fn(x):
        theta = math.atan2(x[1], x[0])
        c, s = math.cos(k * theta), math.sin(k * theta)
        u1 = Multivector.from_vector(2, [c, s])
        u2 = Multivector.from_vector(2, [-s, c])
        return Frame(2, (u1, u2))

    w = chart_half_width
    return FrameField(2, frame_fn=frame_fn, chart_lo=[-w, -w], chart_hi=[w, w],
                      singular_points=[[0.0, 0.0]],
                      name=name or f"hedgehog-k{k}")


def polynomial_bivector_field(dimension, rng: np.random.Generator,
                              scale: float = 0.5):
    """Random smooth bivector-valued map x -> B(x) with quadratic coefficients."""
    g = blade_grades(dimension)
    masks = np.flatnonzero(g == 2)
    const = rng.normal(scale=scale, size=masks.size)
    lin = rng.normal(scale=scale, size=(masks.size, dimension))
    quad = rng.normal(scale=0.5 * scale, size=(masks.size, dimension, dimension))

    def bivector(x):
        x = np.asarray(x, dtype=float)
        c = np.zeros(1 << dimension)
        vals = const + lin @ x + 0.5 * np.einsum("kij,i,j->k", quad, x, x)
        c[masks] = vals
        return Multivector(dimension, c)

    return bivector


def random_rotor_frame_field(dimension, rng: np.random.Generator,
                             scale: float = 0.5, name="rotor-frame") -> FrameField:
    biv = polynomial_bivector_field(dimension, rng, scale)
    return FrameField(dimension, rotor_fn=lambda x: exp(biv(x)), name=name)


def random_connection(dimension, rng: np.random.Generator, scale: float = 0.7):
    """Random smooth grade-2 connection: x -> tuple of N bivectors."""
    comps = [polynomial_bivector_field(dimension, rng, scale)
             for _ in range(dimension)]

    def conn(x):
        return tuple(c(x) for c in comps)

    return conn


# -- differential operations -------------------------------------------


def _frame_vectors(ff: FrameField, x) -> list:
    return list(ff.frame(x).vectors)


def frame_derivatives(ff: FrameField, x, h: float = DEFAULT_STEP):
    """Central differences du_i/dx_mu; du[mu][i] is a grade-1 Multivector."""
    x = np.asarray(x, dtype=float)
    n = ff.dimension
    du = []
    for mu in range(n):
        step = np.zeros(n)
        step[mu] = h
        hi = _frame_vectors(ff, x + step)
        lo = _frame_vectors(ff, x - step)
        du.append([(a - b) * (0.5 / h) for a, b in zip(hi, lo)])
    return du


def pseudo_flat_connection(ff: FrameField, x, h: float = DEFAULT_STEP) -> ConnectionSample:
    """omega_0 = (1/4) sum_i (du_i) u_i from the frame alone.

    Grade 2 up to rounding: the scalar part is half the derivative of
    |u_i|^2, which vanishes for unit frames.
    """
    x = np.asarray(x, dtype=float)
    ff.check_point(x, margin=h)
    u = _frame_vectors(ff, x)
    du = frame_derivatives(ff, x, h)
    omegas = []
    for mu in range(ff.dimension):
        acc = Multivector.zero(ff.dimension)
        for i in range(ff.dimension):
            acc = acc + du[mu][i] * u[i]
        omegas.append(acc * 0.25)
    return ConnectionSample(tuple(x.tolist()), h, tuple(omegas))


def covariant_frame_derivatives(ff: FrameField, omegas, x, h: float = DEFAULT_STEP):
    """D u_i = du_i - [omega, u_i] via parallel-transported differences.

    Neighbor frames are conjugated back to x with the transport rotor
    G = exp(-h omega_mu) before the central difference, which carries an
    O(h^2) truncation error independent of the one in du_i.
    """
    x = np.asarray(x, dtype=float)
    n = ff.dimension
    out = []
    for mu in range(n):
        step = np.zeros(n)
        step[mu] = h
        g = exp(omegas[mu] * (-h))
        grev = g.reverse()
        hi = _frame_vectors(ff, x + step)
        lo = _frame_vectors(ff, x - step)
        row = []
        for i in range(n):
            fwd = g * hi[i] * grev
            back = grev * lo[i] * g
            row.append((fwd - back) * (0.5 / h))
        out.append(row)
    return out


def decompose_check(ff: FrameField, omegas, x, h: float = DEFAULT_STEP) -> float:
    """Residual of the connection reconstruction at x.

    Rebuilds omega from (1/4) sum_i (du_i u_i - Du_i u_i) and returns the
    worst max-abs coefficient deviation across components; O(h^2) in the
    step for smooth inputs.
    """
    x = np.asarray(x, dtype=float)
    n = ff.dimension
    if len(omegas) != n:
        raise ValueError(f"need {n} connection components")
    for w in omegas:
        leak = (w - w.grade_project(2)).norm()
        if leak > 1e-12:
            raise CliffordError(f"connection component not grade 2 (leak {leak:.3e})")
    u = _frame_vectors(ff, x)
    du = frame_derivatives(ff, x, h)
    cov = covariant_frame_derivatives(ff, omegas, x, h)
    worst = 0.0
    for mu in range(n):
        acc = Multivector.zero(n)
        for i in range(n):
            acc = acc + (du[mu][i] - cov[mu][i]) * u[i]
        worst = max(worst, (acc * 0.25 - omegas[mu]).norm())
    return worst


def curvature(conn_fn, x, h: float = DEFAULT_STEP,
              dimension: int | None = None) -> CurvatureSample:
    """F_{mu nu} = d_mu omega_nu - d_nu omega_mu - [omega_mu, omega_nu].

    conn_fn maps a point to a ConnectionSample; derivatives are central
    differences of the sampled components.
    """
    x = np.asarray(x, dtype=float)
    here = conn_fn(x)
    n = dimension or here.dimension
    plus = []
    minus = []
    for mu in range(n):
        step = np.zeros(n)
        step[mu] = h
        plus.append(conn_fn(x + step))
        minus.append(conn_fn(x - step))
    comps = {}
    for mu in range(n):
        for nu in range(mu + 1, n):
            d_mu_w_nu = (plus[mu].omegas[nu] - minus[mu].omegas[nu]) * (0.5 / h)
            d_nu_w_mu = (plus[nu].omegas[mu] - minus[nu].omegas[mu]) * (0.5 / h)
            wm, wn = here.omegas[mu], here.omegas[nu]
            comps[(mu, nu)] = d_mu_w_nu - d_nu_w_mu - (wm * wn - wn * wm)
    return CurvatureSample(tuple(x.tolist()), h, comps)


# -- flatness and holonomy scans ----------------------------------------


@dataclass(frozen=True)
class FluxResult:
    singular_point: tuple
    loop_radius: float
    flux: float
    quantum: float        # flux / (2 pi)
    quantum_rounded: int
    residual: float


@dataclass(frozen=True)
class FlatnessReport:
    points_checked: int
    max_curvature_norm: float
    max_grade2_leakage: float
    step: float
    fluxes: tuple


def annulus_grid(r_inner: float, r_outer: float, radial: int = 8,
                 angular: int = 24, center=(0.0, 0.0)) -> np.ndarray:
    """Polar product grid on a planar annulus."""
    c = np.asarray(center, dtype=float)
    rs = np.linspace(r_inner, r_outer, radial)
    ts = 2.0 * math.pi * np.arange(angular) / angular
    rr, tt = np.meshgrid(rs, ts, indexing="ij")
    pts = np.stack([rr * np.cos(tt), rr * np.sin(tt)], axis=-1).reshape(-1, 2)
    return pts + c


def box_grid(ff: FrameField, resolution: int, h: float,
             min_clearance: float = 0.0) -> np.ndarray:
    axes = [np.linspace(lo + 3 * h, hi - 3 * h, resolution)
            for lo, hi in zip(ff.chart_lo, ff.chart_hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    keep = np.array([ff.clearance(p) > max(min_clearance, 4 * h) for p in pts])
    return pts[keep]


def holonomy_flux(ff: FrameField, singular_point, loop_radius: float,
                  segments: int = 512, h: float = DEFAULT_STEP) -> FluxResult:
    """Loop integral of -2 * (gamma_1 gamma_2 component of omega_0).

    Counterclockwise around a planar frame singularity this is the total
    frame turning angle, 2 pi times the winding.
    """
    if ff.dimension != 2:
        raise ChartError("holonomy flux loops are planar")
    z = np.asarray(singular_point, dtype=float)
    # parametric trapezoid rule: spectrally accurate for the smooth
    # periodic integrand omega(x(t)) . x'(t)
    theta = 2.0 * math.pi * np.arange(segments) / segments
    pts = z[None, :] + loop_radius * np.column_stack([np.cos(theta), np.sin(theta)])
    tangents = loop_radius * np.column_stack([-np.sin(theta), np.cos(theta)])
    total = 0.0
    for p, dx in zip(pts, tangents):
        sample = pseudo_flat_connection(ff, p, h)
        for mu in range(2):
            total += -2.0 * sample.omegas[mu].coeffs[0b11] * dx[mu]
    total *= 2.0 * math.pi / segments
    quantum = total / (2.0 * math.pi)
    return FluxResult(
        singular_point=tuple(z.tolist()),
        loop_radius=float(loop_radius),
        flux=float(total),
        quantum=float(quantum),
        quantum_rounded=int(round(quantum)),
        residual=float(quantum - round(quantum)),
    )


def flatness_scan(ff: FrameField, grid_points=None, resolution: int = 12,
                  h: float = DEFAULT_STEP, min_clearance: float = 0.0,
                  loop_radius: float | None = None,
                  loop_segments: int = 512) -> FlatnessReport:
    """Check F(omega_0) = 0 away from singular points; measure their flux."""
    if grid_points is None:
        grid_points = box_grid(ff, resolution, h, min_clearance)
    grid_points = np.asarray(grid_points, dtype=float)

    conn_fn = lambda y: pseudo_flat_connection(ff, y, h)
    max_f = 0.0
    max_leak = 0.0
    for p in grid_points:
        ff.check_point(p, margin=2 * h)
        sample = conn_fn(p)
        max_leak = max(max_leak, sample.grade2_leakage())
        f = curvature(conn_fn, p, h)
        max_f = max(max_f, f.max_norm())

    fluxes = []
    if ff.dimension == 2:
        for z in ff.singular_points:
            if loop_radius is not None:
                rad = loop_radius
            else:
                edge = float(min(np.min(z - ff.chart_lo), np.min(ff.chart_hi - z)))
                others = [np.linalg.norm(z - w) for w in ff.singular_points
                          if w is not z and np.linalg.norm(z - w) > 0]
                rad = 0.5 * min([edge] + [0.5 * d for d in others])
            fluxes.append(holonomy_flux(ff, z, rad, loop_segments, h))
    return FlatnessReport(
        points_checked=int(grid_points.shape[0]),
        max_curvature_norm=float(max_f),
        max_grade2_leakage=float(max_leak),
        step=float(h),
        fluxes=tuple(fluxes),
    )
