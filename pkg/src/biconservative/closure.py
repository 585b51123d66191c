"""Closure condition ``I(d) = 2 n pi / m`` and checks of the closure function.

I(d) decreases strictly from sqrt(2) pi (as d -> d_star) to pi (d -> inf),
so every admissible pair has exactly one solution ``d_mn``; on flat and
hyperbolic ambients Lambda cannot vanish and no closed solution exists.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import BiconservativeError, DomainError, NumericError
from .quadrature import (SQRT2_PI, ClosureFunctionSample, closure_sample,
                         dirac_limit_value, i_of_d, period_of_d)
from .spaceform import (AdmissiblePair, QuarticProfile, SpaceForm, critical_d,
                        solve_extremal_curvatures)

D_CAP_FACTOR = 1e12


@dataclass(frozen=True)
class ClosureSolution:
    pair: AdmissiblePair
    d_mn: float
    target: float
    residual: float
    quartic: QuarticProfile
    period: float
    rho: float
    bracket: tuple = ()
    i_evaluations: int = 0

    @property
    def total_length(self) -> float:
        return self.pair.m * self.period

    def to_dict(self) -> dict:
        q = self.quartic
        return {
            "m": self.pair.m, "n": self.pair.n, "rho": self.rho,
            "d_mn": self.d_mn, "target": self.target, "residual": self.residual,
            "period": self.period, "total_length": self.total_length,
            "beta": q.beta, "alpha": q.alpha, "p": q.p, "q": q.q,
            "bracket": list(self.bracket), "i_evaluations": self.i_evaluations,
        }


def _as_pair(pair) -> AdmissiblePair:
    if isinstance(pair, AdmissiblePair):
        return pair
    m, n = pair
    return AdmissiblePair(int(m), int(n))


def _bracket_up(f, d_star, target):
    # walk upward from just above d_star, doubling the distance each time
    for offset in (1e-6, 1e-9, 1e-12):
        lo = d_star * (1.0 + offset)
        if f(lo) > 0:
            break
    else:
        raise NumericError("closure target too close to sqrt(2) pi to bracket",
                           target=target)
    hi = 2.0 * lo
    while f(hi) > 0:
        lo, hi = hi, 2.0 * hi
        if hi > D_CAP_FACTOR * d_star:
            raise NumericError("no bracket found below the d cap", target=target,
                               d_cap=D_CAP_FACTOR * d_star)
    return lo, hi


def _bracket_down(f, d_star, target, start=1e3):
    # walk downward from a large d, halving the distance to d_star
    hi = d_star * (1.0 + start)
    while f(hi) > 0:
        hi *= 10.0
        if hi > D_CAP_FACTOR * d_star:
            raise NumericError("no bracket found below the d cap", target=target)
    lo = hi
    while f(lo) <= 0:
        hi = lo
        lo = d_star + 0.5 * (lo - d_star)
        if lo - d_star < 1e-12 * d_star:
            raise NumericError("closure target too close to sqrt(2) pi to bracket",
                               target=target)
    return lo, hi


def solve_pair(space: SpaceForm, pair, tol: Tolerances = DEFAULT_TOLERANCES,
               strategy: str = "up", bracket: tuple | None = None) -> ClosureSolution:
    """Find the unique ``d_mn > d_star`` with ``I(d_mn) = 2 n pi / m``.

    ``strategy`` selects how the initial bracket is found: ``"up"`` doubles
    outward from ``d_star (1 + 1e-6)``, ``"down"`` halves inward from a large
    d.  An explicit ``bracket`` skips the search.
    """
    if space.rho <= 0:
        raise DomainError("closed solutions exist only for rho > 0; "
                          "see nonexistence_report")
    m, n = (pair.m, pair.n) if isinstance(pair, AdmissiblePair) else pair
    target = 2.0 * n * math.pi / m
    if not math.pi < target < SQRT2_PI:
        raise DomainError(f"pair not admissible: target 2n pi/m = {target!r} "
                          "lies outside (pi, sqrt(2) pi)")
    pair = _as_pair((m, n))
    d_star = critical_d(space)
    calls = [0]

    def f(d):
        calls[0] += 1
        return i_of_d(space, d, tol) - target

    if bracket is None:
        bracket = (_bracket_up if strategy == "up" else _bracket_down)(f, d_star, target)
    lo, hi = bracket
    d_mn = brentq(f, lo, hi, xtol=1e-300, rtol=max(tol.closure_rtol_d, 4.5e-16),
                  maxiter=200)
    residual = f(d_mn)
    if not abs(residual) < tol.closure_residual:
        raise NumericError("closure residual above tolerance", d=d_mn, residual=residual)
    return ClosureSolution(pair, d_mn, target, residual,
                           solve_extremal_curvatures(space, d_mn, tol),
                           period_of_d(space, d_mn, tol), space.rho,
                           (lo, hi), calls[0])


def scan_i(space: SpaceForm, d_grid, tol: Tolerances = DEFAULT_TOLERANCES):
    """Sample the closure function on ``d_grid`` in input order.

    Failures are recorded per point (``error`` entries) instead of raised.
    """
    out: list = []
    for d in d_grid:
        try:
            out.append(closure_sample(space, float(d), tol))
        except BiconservativeError as exc:
            out.append(ScanFailure(float(d), f"{type(exc).__name__}: {exc}"))
    return out


@dataclass(frozen=True)
class ScanFailure:
    d: float
    error: str

    def to_dict(self) -> dict:
        return {"d": self.d, "error": self.error}


def geometric_grid(d_star: float, lo_factor: float, hi_factor: float, points: int):
    return list(d_star * np.geomspace(lo_factor, hi_factor, points))


@dataclass
class LemmaReport:
    rho: float
    grid: list
    i_values: list
    monotone: bool
    bound_violations: list
    near_d_star: float
    large_d: float
    dirac_limit: float
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.monotone and not self.bound_violations and not self.failures
                and abs(self.dirac_limit - SQRT2_PI) < 1e-12)

    def to_dict(self) -> dict:
        return {"rho": self.rho, "passed": self.passed, "monotone": self.monotone,
                "bound_violations": self.bound_violations,
                "near_d_star": self.near_d_star, "near_d_star_gap": SQRT2_PI - self.near_d_star,
                "large_d": self.large_d, "large_d_gap": self.large_d - math.pi,
                "dirac_limit": self.dirac_limit, "failures": self.failures,
                "grid": self.grid, "i_values": self.i_values}


def verify_lemma(space: SpaceForm, points: int = 64, lo_factor: float = 1.0001,
                 hi_factor: float = 1e4, tol: Tolerances = DEFAULT_TOLERANCES,
                 grid=None) -> LemmaReport:
    """Check monotonicity and the (pi, sqrt(2) pi) bounds of I on a grid."""
    d_star = critical_d(space)
    grid = list(grid) if grid is not None else geometric_grid(
        d_star, lo_factor, hi_factor, points)
    samples = scan_i(space, grid, tol)
    failures = [s.to_dict() for s in samples if isinstance(s, ScanFailure)]
    ok = [s for s in samples if isinstance(s, ClosureFunctionSample)]
    vals = [s.i_value for s in ok]
    monotone = all(b < a for a, b in zip(vals, vals[1:]))
    violations = [{"d": s.d, "i_value": s.i_value} for s in ok
                  if not math.pi < s.i_value < SQRT2_PI]
    return LemmaReport(space.rho, [s.d for s in ok], vals, monotone, violations,
                       i_of_d(space, d_star * (1 + 1e-8), tol),
                       i_of_d(space, d_star * 1e6, tol),
                       dirac_limit_value(space), failures)


def nonexistence_report(space: SpaceForm, d_samples, kappa_grid=None) -> dict:
    """Sampled positivity of the closure integrand when ``rho <= 0``.

    For rho <= 0 the denominator ``16 d kappa^{3/2} - rho`` is at least
    ``16 d kappa^{3/2} > 0``, so ``kappa^{7/4} / (16 d kappa^{3/2} - rho)``
    is positive and Lambda can never vanish: no profile curve closes.
    """
    rho = space.rho
    if rho > 0:
        raise DomainError("rho > 0 admits closed solutions; use solve_pair")
    kappa = np.geomspace(1e-6, 1e6, 241) if kappa_grid is None else np.asarray(kappa_grid)
    rows = []
    for d in d_samples:
        if not d > 0:
            raise DomainError(f"d must be positive, got {d!r}")
        vals = kappa**1.75 / (16.0 * d * kappa**1.5 - rho)
        i = int(np.argmin(vals))
        rows.append({"d": float(d), "min_integrand": float(vals[i]),
                     "argmin_kappa": float(kappa[i]), "positive": bool(np.all(vals > 0))})
    closed_possible = not all(r["positive"] for r in rows)
    return {
        "rho": rho,
        "closed_solutions": closed_possible,
        "conclusion": ("integrand not positive on samples" if closed_possible
                       else "no closed solutions; min integrand > 0"),
        "kappa_range": [float(kappa.min()), float(kappa.max())],
        "samples": rows,
    }
