"""Curvature trajectories and closed profile curves in the 3-sphere.

The curvature is integrated through ``u = sqrt(kappa)`` using the smooth
second-order equation ``u_ss = 2/9 u (2 Q + u Q')``; the first integral
``u_s**2 = 4/9 u**2 Q(u)`` then serves as a conservation check.  Starting
from the curvature minimum (``u = beta``, ``u_s = 0``) fixes the curve up
to an ambient isometry.  The profile curve in R^4 is

    gamma(s) = (a, 0, r sin psi, r cos psi),
    a = 1 / (4 sqrt(d) u^{3/2}),  r = sqrt(16 d u^3 - rho) / (4 sqrt(rho d) u^{3/2}),

with ``psi' = -12 sqrt(rho d) u^{7/2} / (16 d u^3 - rho)`` and psi(0) = 0.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import kernels
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import DomainError, NumericError
from .quadrature import period_of_d
from .spaceform import SpaceForm, check_regime, critical_d, solve_extremal_curvatures

SAMPLES_PER_PERIOD = 2000
_STATUS_TEXT = {
    kernels.UNDERFLOW: "step-size underflow",
    kernels.MAX_STEPS: "step budget exhausted",
    kernels.LEFT_REGIME: "denominator 16 d u^3 - rho reached zero (d outside regime?)",
}


@dataclass(frozen=True)
class CurvatureTrajectory:
    rho: float
    d: float
    beta: float
    alpha: float
    s: np.ndarray
    u: np.ndarray
    u_s: np.ndarray
    u_ss: np.ndarray
    psi: np.ndarray
    lam: np.ndarray
    max_defect: float  # largest relative defect over accepted steps
    nsteps: int

    @property
    def kappa(self) -> np.ndarray:
        return self.u * self.u

    @property
    def kappa_s(self) -> np.ndarray:
        return 2.0 * self.u * self.u_s

    def first_integral_defect(self) -> np.ndarray:
        return np.abs(self.u_s**2 - (4.0 / 9.0) * self.u**2
                      * (self.u**3 * (16.0 * self.d - 9.0 * self.u) - self.rho))

    def relative_defect(self) -> np.ndarray:
        """Defect divided by ``rho u**2``; 3.75 times this bounds the EL residual / rho."""
        return self.first_integral_defect() / (self.rho * self.u**2)

    @property
    def measured_period(self) -> float:
        return measure_period(self)


def _u_ss(u, rho, d):
    Q = u**3 * (16.0 * d - 9.0 * u) - rho
    dQ = u * u * (48.0 * d - 36.0 * u)
    return (2.0 / 9.0) * u * (2.0 * Q + u * dQ)


def _run(rho, d, y0, s_out, tol: Tolerances, h0=1e-3, max_steps=50_000_000):
    Y, nsteps, status, max_def, s_end = kernels.integrate_curvature(
        rho, d, tuple(float(v) for v in y0), np.asarray(s_out, dtype=float),
        tol.ode_rtol, tol.ode_atol, h0, max_steps)
    if status != kernels.OK:
        raise NumericError(f"curvature integration failed: {_STATUS_TEXT[status]}",
                           s=s_end, nsteps=nsteps)
    return np.asarray(Y), int(nsteps), float(max_def)


def integrate_u(space: SpaceForm, d: float, s_max: float,
                tol: Tolerances = DEFAULT_TOLERANCES, samples: int | None = None,
                s_grid=None) -> CurvatureTrajectory:
    """Integrate the curvature system on ``[0, s_max]`` from the canonical phase.

    Samples are taken on ``s_grid`` when given, otherwise on ``samples``
    equally spaced points (default: ``SAMPLES_PER_PERIOD`` per period).
    psi and the closure accumulator are integrated with the same step
    controller.  Raises NumericError if the first-integral defect, relative
    to ``rho u**2``, exceeds ``tol.first_integral`` at any accepted step or
    sample, or if the relative Euler-Lagrange residual exceeds
    ``tol.euler_lagrange``.  At the default tolerances this happens for
    ``d / d_star`` beyond roughly 12 over a few periods: the excursion to
    large curvature then costs more accuracy than the step controller
    recovers.
    """
    check_regime(space, d)
    if s_max < 0:
        raise DomainError("s_max must be non-negative")
    rho = space.rho
    prof = solve_extremal_curvatures(space, d, tol)
    if s_grid is not None:
        s_out = np.asarray(s_grid, dtype=float)
        if s_out[0] != 0.0 or np.any(np.diff(s_out) < 0):
            raise DomainError("s_grid must start at 0 and be non-decreasing")
    elif s_max == 0:
        s_out = np.zeros(1)
    else:
        if samples is None:
            per = period_of_d(space, d, tol)
            samples = max(3, int(math.ceil(s_max / per * SAMPLES_PER_PERIOD)) + 1)
        s_out = np.linspace(0.0, s_max, samples)
    Y, nsteps, max_def = _run(rho, d, (prof.beta, 0.0, 0.0, 0.0), s_out, tol)
    u, v = Y[:, 0], Y[:, 1]
    traj = CurvatureTrajectory(rho, d, prof.beta, prof.alpha, s_out, u, v,
                               _u_ss(u, rho, d), Y[:, 2], Y[:, 3], max_def / rho, nsteps)
    sample_def = traj.relative_defect()
    worst = max(traj.max_defect, float(sample_def.max()))
    if worst > tol.first_integral:
        i = int(np.argmax(sample_def))
        raise NumericError("first-integral residual above tolerance",
                           residual=worst, tolerance=tol.first_integral, s=float(s_out[i]),
                           d_over_d_star=d / critical_d(space))
    el = el_residual(space, traj, relative=True)
    if el > tol.euler_lagrange:
        raise NumericError("Euler-Lagrange residual above tolerance", residual=el,
                           tolerance=tol.euler_lagrange, d_over_d_star=d / critical_d(space))
    return traj


def _hermite_root(s0, s1, f0, f1, g0, g1):
    # root of the cubic Hermite interpolant of f on [s0, s1]
    h = s1 - s0

    def p(t):
        t2, t3 = t * t, t * t * t
        return ((2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * h * g0
                + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * h * g1)

    if f0 == 0.0:
        return s0
    if f1 == 0.0:
        return s1
    return s0 + h * brentq(p, 0.0, 1.0, xtol=1e-15)


def curvature_minima(traj: CurvatureTrajectory) -> np.ndarray:
    """Arc-length positions of the minima of u (u_s crossing upward)."""
    s, f, g = traj.s, traj.u_s, traj.u_ss
    roots = []
    if f[0] == 0.0 and g[0] > 0:
        roots.append(s[0])
    for i in range(len(s) - 1):
        if f[i] < 0.0 <= f[i + 1]:
            roots.append(_hermite_root(s[i], s[i + 1], f[i], f[i + 1], g[i], g[i + 1]))
    # a minimum sitting just past the last sample (rounding left u_s < 0)
    if len(s) > 1 and f[-1] < 0.0 < g[-1] and -f[-1] / g[-1] < 1e-3 * (s[-1] - s[-2]):
        roots.append(s[-1] - f[-1] / g[-1])
    return np.unique(np.asarray(roots, dtype=float))


def curvature_maxima(traj: CurvatureTrajectory) -> np.ndarray:
    s, f, g = traj.s, traj.u_s, traj.u_ss
    roots = [_hermite_root(s[i], s[i + 1], f[i], f[i + 1], g[i], g[i + 1])
             for i in range(len(s) - 1) if f[i] > 0.0 >= f[i + 1]]
    return np.unique(np.asarray(roots, dtype=float))


def measure_period(traj: CurvatureTrajectory) -> float:
    """Mean spacing of successive curvature minima."""
    mins = curvature_minima(traj)
    if len(mins) < 2:
        raise NumericError("fewer than two curvature minima on the trajectory",
                           minima=mins.tolist())
    return float((mins[-1] - mins[0]) / (len(mins) - 1))


def integrate_psi(space: SpaceForm, d: float, traj: CurvatureTrajectory) -> np.ndarray:
    """Rotation angle psi along ``traj`` (psi(0) = 0, strictly decreasing).

    psi is carried by the same integration as u; this re-validates the
    sign of the density ``-12 sqrt(rho d) u^{7/2} / (16 d u^3 - rho)``.
    """
    den = 16.0 * d * traj.u**3 - space.rho
    if np.any(den <= 0):
        s_bad = float(traj.s[np.argmax(den <= 0)])
        raise NumericError("psi density denominator is not positive", s=s_bad)
    return traj.psi


def lambda_along_path(space: SpaceForm, d: float,
                      tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``12 int_0^period kappa^{7/4} / (16 d kappa^{3/2} - rho) ds`` on the ODE path.

    The period used is the one measured from the trajectory itself, so no
    quadrature enters this route.
    """
    prof = solve_extremal_curvatures(space, d, tol)
    # coarse scan long enough for two minima, then one exact run to the period
    s_guess = 4.0
    while True:
        traj = integrate_u(space, d, s_guess, tol, samples=int(800 * s_guess) + 1)
        if len(curvature_minima(traj)) >= 2:
            break
        s_guess *= 2.0
    per = measure_period(traj)
    Y, _, _ = _run(space.rho, d, (prof.beta, 0.0, 0.0, 0.0), [per], tol)
    return float(Y[0, 3])


def el_residual(space: SpaceForm, traj: CurvatureTrajectory, relative: bool = False) -> float:
    """Max of ``|kappa^{3/4} (kappa^{-3/4})'' - 3 kappa^2 + rho|`` along ``traj``.

    With kappa = u^2 the second derivative expands to
    ``15/4 u_s^2 / u^2 - 3/2 u_ss / u``.  ``relative`` divides by ``rho``,
    which makes the value invariant under rescaling the sphere.
    """
    u, v, a = traj.u, traj.u_s, traj.u_ss
    res = float(np.max(np.abs(3.75 * v * v / (u * u) - 1.5 * a / u - 3.0 * u**4 + space.rho)))
    return res / space.rho if relative else res


def constant_trajectory_residual(space: SpaceForm) -> float:
    """Euler-Lagrange residual of the constant solution ``kappa^2 = rho/3``."""
    u = (space.rho / 3.0) ** 0.25
    return abs(-3.0 * u**4 + space.rho)


def profile_point(rho: float, d: float, u, psi, phi=0.0) -> np.ndarray:
    """Point ``x(s, phi)`` of the rotational surface from ``(u, psi)``."""
    u = np.asarray(u, dtype=float)
    denom = 4.0 * math.sqrt(rho * d) * u**1.5
    a = math.sqrt(rho) / denom
    r = np.sqrt(16.0 * d * u**3 - rho) / denom
    return np.stack([a * np.cos(phi), a * np.sin(phi), r * np.sin(psi), r * np.cos(psi)],
                    axis=-1)


@dataclass(frozen=True)
class ProfileCurve:
    pair: object
    d_mn: float
    rho: float
    period: float
    s: np.ndarray
    kappa: np.ndarray
    psi: np.ndarray
    points: np.ndarray
    trajectory: CurvatureTrajectory

    @property
    def total_length(self) -> float:
        return self.pair.m * self.period

    @property
    def closure_gap(self) -> float:
        return float(np.linalg.norm(self.points[-1] - self.points[0]))

    @property
    def psi_gap(self) -> float:
        return float(self.psi[-1] - self.psi[0] + 2.0 * math.pi * self.pair.n)

    @property
    def sphere_defect(self) -> float:
        return float(np.max(np.abs((self.points**2).sum(axis=1) * self.rho - 1.0)))

    def sub_arc(self, s0: float, s1: float) -> np.ndarray:
        keep = (self.s >= s0) & (self.s <= s1)
        return self.points[keep]


def build_profile_curve(space: SpaceForm, solution, samples: int | None = None,
                        tol: Tolerances = DEFAULT_TOLERANCES) -> ProfileCurve:
    """Closed profile curve for a solved pair, sampled on ``[0, m period]``."""
    m, n = solution.pair.m, solution.pair.n
    length = m * solution.period
    samples = samples or m * SAMPLES_PER_PERIOD + 1
    traj = integrate_u(space, solution.d_mn, length, tol, samples=samples)
    psi = integrate_psi(space, solution.d_mn, traj)
    pts = profile_point(space.rho, solution.d_mn, traj.u, psi)
    curve = ProfileCurve(solution.pair, solution.d_mn, space.rho, solution.period,
                         traj.s, traj.kappa, psi, pts, traj)
    limit = tol.curve_closure / math.sqrt(space.rho)
    if curve.closure_gap >= limit or abs(curve.psi_gap) >= tol.curve_closure:
        raise NumericError("profile curve does not close within tolerance",
                           closure_gap=curve.closure_gap, psi_gap=curve.psi_gap,
                           limit=limit)
    return curve


def count_minima_cyclic(values: np.ndarray, band: float) -> int:
    """Number of local minima of a periodic sequence, with hysteresis ``band``."""
    vals = np.asarray(values, dtype=float)
    start = int(np.argmax(vals))
    seq = np.roll(vals, -start)
    count = 0
    descending = True
    run_min = run_max = seq[0]
    for x in np.r_[seq, seq[:1]]:
        if descending:
            if x < run_min:
                run_min = x
            elif x > run_min + band:
                count += 1
                descending = False
                run_max = x
        else:
            if x > run_max:
                run_max = x
            elif x < run_max - band:
                descending = True
                run_min = x
    return count


def _gnomonic(points: np.ndarray) -> np.ndarray:
    # the profile curve lies in the great sphere x2 = 0 with x1 > 0; the
    # central projection onto x1 = 1 keeps crossings and maps arcs to near-lines
    return points[:, 2:4] / points[:, :1]


def count_self_intersections(points: np.ndarray, closed: bool) -> int:
    """Proper crossings between non-adjacent segments of a polyline in S^2."""
    xy = _gnomonic(np.asarray(points))
    if closed:
        xy = np.vstack([xy, xy[:1]]) if np.linalg.norm(xy[-1] - xy[0]) > 0 else xy
    p, q = xy[:-1], xy[1:]
    nseg = len(p)
    lo = np.minimum(p, q)
    hi = np.maximum(p, q)
    crossings = 0

    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - \
               (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])

    for i in range(nseg - 2):
        j = np.arange(i + 2, nseg)
        if closed and i == 0:
            j = j[j != nseg - 1]
        if j.size == 0:
            continue
        box = ((lo[j, 0] <= hi[i, 0]) & (hi[j, 0] >= lo[i, 0])
               & (lo[j, 1] <= hi[i, 1]) & (hi[j, 1] >= lo[i, 1]))
        j = j[box]
        if j.size == 0:
            continue
        d1 = orient(p[i], q[i], p[j])
        d2 = orient(p[i], q[i], q[j])
        d3 = orient(p[j], q[j], p[i])
        d4 = orient(p[j], q[j], q[i])
        crossings += int(np.count_nonzero((d1 * d2 < 0) & (d3 * d4 < 0)))
    return crossings


def simplicity_diagnostics(curve: ProfileCurve) -> dict:
    """Winding, lobe count and self-intersection witnesses of a closed curve."""
    q = solve_extremal_curvatures(curve.rho, curve.d_mn)
    band = 1e-9 * (q.alpha**2 - q.beta**2)
    pts = curve.points[:-1] if curve.closure_gap < 1e-3 * np.ptp(curve.points) else curve.points
    lobes = count_minima_cyclic(curve.kappa[: len(pts)], band)
    winding_raw = -(curve.psi[-1] - curve.psi[0]) / (2.0 * math.pi)
    crossings = count_self_intersections(pts, closed=True)
    first_period = curve.sub_arc(0.0, curve.period)
    period_crossings = count_self_intersections(first_period, closed=False)
    # distance between points at least a quarter period apart along one lobe
    gap = max(1, int(0.25 * len(first_period) / 1.0))
    sep = [float(np.min(np.linalg.norm(first_period[i + gap:] - first_period[i], axis=1)))
           for i in range(0, len(first_period) - gap, max(1, len(first_period) // 200))]
    return {
        "winding": int(round(winding_raw)), "winding_raw": float(winding_raw),
        "lobes": lobes, "self_intersections": crossings,
        "self_intersecting": crossings > 0,
        "single_period_self_intersections": period_crossings,
        "single_period_min_separation": min(sep) if sep else float("nan"),
    }


def write_curve_csv(curve: ProfileCurve, fh) -> None:
    """Rows ``s, kappa, psi, x1..x4`` with round-trippable 17-digit floats."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["s", "kappa", "psi", "x1", "x2", "x3", "x4"])
    for s, k, p, x in zip(curve.s, curve.kappa, curve.psi, curve.points):
        w.writerow([f"{v:.17g}" for v in (s, k, p, *x)])
