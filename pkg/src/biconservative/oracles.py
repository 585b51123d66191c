"""Independent reference integrators used to cross-check ``quadrature``.

Nothing here uses the cofactor of Q or the trigonometric substitution: the
integrands are the raw ``du`` forms and the rule is tanh-sinh, whose node
clustering absorbs the endpoint singularities.  Q is evaluated near each
endpoint through its exact Taylor expansion about that root, so that
``Q(beta + delta)`` keeps full relative accuracy for tiny ``delta``; only the
two roots are shared with the main path.
"""
from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import NumericError
from .spaceform import SpaceForm, check_regime, solve_extremal_curvatures


def _q_near(root: float, delta, d: float, sign: float):
    # Q(root + sign*delta) assuming Q(root) = 0
    q1 = root * root * (48.0 * d - 36.0 * root)
    q2 = 96.0 * d * root - 108.0 * root * root
    q3 = 96.0 * d - 216.0 * root
    x = sign * delta
    return x * (q1 + x * (0.5 * q2 + x * (q3 / 6.0 - 9.0 * x)))


def tanh_sinh(f_of_offsets, a: float, b: float, rtol: float = 1e-12,
              max_level: int = 12, inset: float = 1e-250):
    """Tanh-sinh rule on ``[a, b]`` for an integrand given in offset form.

    ``f_of_offsets(x, da, db)`` receives the abscissae together with their
    distances to ``a`` and ``b`` computed without cancellation.  Nodes closer
    than ``inset * (b - a)`` to an endpoint are dropped; the default only
    removes nodes where the integrand would underflow, their mass being far
    below double precision for integrable endpoint singularities.  Returns
    ``(value, estimated_error)``.
    """
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    t_max = 6.5

    def level_sum(t):
        z = 0.5 * math.pi * np.sinh(t)
        e = np.exp(-2.0 * np.abs(z))
        comp = 2.0 * e / (1.0 + e)            # 1 - tanh|z|
        sech2 = 4.0 * e / (1.0 + e) ** 2
        w = half * 0.5 * math.pi * np.cosh(t) * sech2
        near_a = z < 0
        da = np.where(near_a, half * comp, 2 * half - half * comp)
        db = np.where(near_a, 2 * half - half * comp, half * comp)
        x = np.where(near_a, a + da, b - db)
        keep = (w > 0) & (np.minimum(da, db) > inset * (b - a)) & (np.minimum(da, db) > 0)
        return float(np.sum(w[keep] * f_of_offsets(x[keep], da[keep], db[keep])))

    h = 1.0
    t = np.arange(-t_max, t_max + 0.5 * h, h)
    total = level_sum(t)
    est = h * total
    for _ in range(max_level):
        h *= 0.5
        t = np.arange(-t_max + h, t_max, 2 * h)
        total += level_sum(t)
        new = h * total
        err = abs(new - est)
        est = new
        if err <= rtol * abs(est):
            return est, err
    raise NumericError("tanh-sinh did not converge", estimate=est, error=err)


def _raw_sqrtQ(prof, x, da, db):
    d = prof.d
    near_beta = da <= db
    Qv = np.where(near_beta, _q_near(prof.beta, da, d, 1.0),
                  _q_near(prof.alpha, db, d, -1.0))
    return np.sqrt(Qv)


def lambda_tanh_sinh(space: SpaceForm, d: float, tol: Tolerances = DEFAULT_TOLERANCES,
                     rtol: float = 1e-12, inset: float = 1e-250) -> float:
    """``36 int u^{5/2} / ((16 d u^3 - rho) sqrt(Q)) du`` by tanh-sinh."""
    check_regime(space, d)
    prof = solve_extremal_curvatures(space, d, tol)
    rho = space.rho

    def f(x, da, db):
        return 36.0 * x**2.5 / ((16.0 * d * x**3 - rho) * _raw_sqrtQ(prof, x, da, db))

    return tanh_sinh(f, prof.beta, prof.alpha, rtol=rtol, inset=inset)[0]


def period_tanh_sinh(space: SpaceForm, d: float, tol: Tolerances = DEFAULT_TOLERANCES,
                     rtol: float = 1e-12) -> float:
    """``3 int du / (u sqrt(Q))`` by tanh-sinh."""
    check_regime(space, d)
    prof = solve_extremal_curvatures(space, d, tol)

    def f(x, da, db):
        return 3.0 / (x * _raw_sqrtQ(prof, x, da, db))

    return tanh_sinh(f, prof.beta, prof.alpha, rtol=rtol)[0]
