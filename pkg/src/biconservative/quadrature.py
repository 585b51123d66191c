"""Closure integral Lambda(d), closure function I(d) and curvature period.

Both integrals run over ``u = sqrt(kappa)`` between the roots of Q and have
inverse-square-root singularities at the endpoints.  Writing
``Q = 9 (alpha - u)(u - beta) C(u)`` and ``u = beta + (alpha - beta) sin^2 t``
turns ``du / sqrt((alpha - u)(u - beta))`` into ``2 dt``, leaving smooth
integrands on ``[0, pi/2]``:

    Lambda = 24 int_0^{pi/2} u^{5/2} / ((16 d u^3 - rho) sqrt(C(u))) dt
    period =  2 int_0^{pi/2} 1 / (u sqrt(C(u))) dt
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import kernels
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NumericError
from .spaceform import SpaceForm, check_regime, solve_extremal_curvatures

SQRT2_PI = math.sqrt(2.0) * math.pi

LAMBDA, PERIOD = 0, 1

_GL_ORDER = 16
_GL_NODES, _GL_WEIGHTS = leggauss(_GL_ORDER)


@dataclass(frozen=True)
class ClosureFunctionSample:
    d: float
    lambda_value: float
    i_value: float
    period: float
    est_abs_error: float

    def to_dict(self) -> dict:
        return {"d": self.d, "lambda_value": self.lambda_value,
                "i_value": self.i_value, "period": self.period,
                "est_abs_error": self.est_abs_error}


def _gl_on(panels: np.ndarray, f) -> np.ndarray:
    """Gauss-Legendre estimate on each row ``(a, b)`` of ``panels``."""
    a = panels[:, :1]
    half = 0.5 * (panels[:, 1:] - a)
    x = a + half * (_GL_NODES + 1.0)
    return (f(x) * _GL_WEIGHTS).sum(axis=1) * half[:, 0]


def adaptive_gauss_legendre(f, a: float, b: float, rtol: float, atol: float,
                            breakpoints=(), max_panels: int = 200_000):
    """Integrate a smooth vectorized ``f`` over ``[a, b]``.

    Each panel is compared against the sum over its two halves; panels whose
    discrepancy exceeds their width share of the tolerance get bisected.
    Returns ``(value, error_estimate)``; the refined (halved) estimates are
    the ones summed.
    """
    edges = np.unique(np.clip(np.r_[a, np.asarray(breakpoints, float), b], a, b))
    todo = np.column_stack([edges[:-1], edges[1:]])
    span = b - a
    done_val = 0.0
    done_err = 0.0
    coarse = _gl_on(todo, f)
    total_guess = None
    while todo.shape[0]:
        mid = 0.5 * (todo[:, 0] + todo[:, 1])
        left = np.column_stack([todo[:, 0], mid])
        right = np.column_stack([mid, todo[:, 1]])
        lv = _gl_on(left, f)
        rv = _gl_on(right, f)
        fine = lv + rv
        err = np.abs(fine - coarse)
        if total_guess is None:
            total_guess = abs(fine.sum())
        tol = max(rtol * max(total_guess, abs(done_val + fine.sum())), atol)
        share = tol * (todo[:, 1] - todo[:, 0]) / span
        ok = (err <= share) | ((todo[:, 1] - todo[:, 0]) <= 1e-15 * span)
        done_val += fine[ok].sum()
        done_err += err[ok].sum()
        bad = ~ok
        if not bad.any():
            break
        if 2 * bad.sum() > max_panels:
            raise NumericError("adaptive quadrature exceeded its panel budget",
                               estimate=done_val + fine[bad].sum(),
                               error=done_err + err[bad].sum())
        todo = np.concatenate([left[bad], right[bad]])
        coarse = np.concatenate([lv[bad], rv[bad]])
    return float(done_val), float(done_err)


def _breakpoints(prof) -> list[float]:
    # For large d the integrand develops structure of width ~3 beta^2 / (16 d)
    # (the near-zero of 16 d u^3 - rho) and ~sqrt(q) (the complex cofactor
    # roots) right next to u = beta; panels graded geometrically toward t = 0
    # make sure the first Gauss nodes do not step over it.
    width = prof.alpha - prof.beta
    scales = [3.0 * prof.beta**2 / (16.0 * prof.d), prof.beta, math.sqrt(prof.q)]
    t0 = min(math.asin(math.sqrt(min(1.0, s / width))) for s in scales)
    if t0 > 0.05:
        return []
    pts = []
    t = t0 / 64.0
    while t < 0.5 * math.pi:
        pts.append(t)
        t *= 2.0
    return pts


def _integrate(kind: int, space: SpaceForm, d: float, tol: Tolerances, prof=None):
    check_regime(space, d)
    prof = prof or solve_extremal_curvatures(space, d, tol)
    rho = space.rho
    width = prof.alpha - prof.beta

    def f(t):
        return kernels.subst_integrand(kind, rho, d, prof.beta, width, prof.p, prof.q, t)

    val, err = adaptive_gauss_legendre(f, 0.0, 0.5 * math.pi, tol.quad_rtol,
                                       tol.quad_atol, _breakpoints(prof))
    if not err <= max(tol.quad_rtol * abs(val), tol.quad_atol) * 10:
        raise NumericError("quadrature tolerance not reached", estimate=val, error=err)
    return val, err


def lambda_of_d(space: SpaceForm, d: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``Lambda(d) = 36 int_beta^alpha u^{5/2} / ((16 d u^3 - rho) sqrt(Q)) du``."""
    return _integrate(LAMBDA, space, d, tol)[0]


def i_of_d(space: SpaceForm, d: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Closure function ``I(d) = sqrt(rho d) Lambda(d)``, in (pi, sqrt(2) pi)."""
    lam = lambda_of_d(space, d, tol)
    return math.sqrt(space.rho * d) * lam


def period_of_d(space: SpaceForm, d: float, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Arc-length period of the curvature, ``3 int_beta^alpha du / (u sqrt(Q))``."""
    return _integrate(PERIOD, space, d, tol)[0]


def delta_psi_per_period(space: SpaceForm, d: float,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """Advance of the rotation angle psi over one curvature period: ``-I(d)``."""
    return -i_of_d(space, d, tol)


def closure_sample(space: SpaceForm, d: float,
                   tol: Tolerances = DEFAULT_TOLERANCES) -> ClosureFunctionSample:
    prof = solve_extremal_curvatures(space, d, tol)
    lam, lam_err = _integrate(LAMBDA, space, d, tol, prof)
    per, _ = _integrate(PERIOD, space, d, tol, prof)
    srd = math.sqrt(space.rho * d)
    return ClosureFunctionSample(float(d), lam, srd * lam, per, lam_err)


def dirac_limit_value(space: SpaceForm) -> float:
    """Closed form of ``lim I(d)`` as d decreases to d_star.

    Evaluated literally: with ``u0 = (rho/3)^{1/4}`` the double root of Q at
    ``d = d_star``,
    ``36 sqrt(rho d*) u0^{5/2} pi / ((16 d* u0^3 - rho) sqrt(-Q''(u0) / 2))``.
    """
    from .spaceform import critical_d

    rho = space.rho
    d_star = critical_d(space)
    u0 = (rho / 3.0) ** 0.25
    q2 = 96.0 * d_star * u0 - 108.0 * u0 * u0
    return (36.0 * math.sqrt(rho * d_star) * (rho / 3.0) ** 0.625 * math.pi
            / ((16.0 * d_star * (rho / 3.0) ** 0.75 - rho) * math.sqrt(-0.5 * q2)))
