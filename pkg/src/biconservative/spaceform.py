"""Ambient space form, the curvature quartic Q(u) and admissible (m, n) pairs.

With u = sqrt(kappa) the first integral of the Euler-Lagrange equation reads
``u_s**2 = 4/9 * u**2 * Q(u)`` where ``Q(u) = 16 d u**3 - 9 u**4 - rho``.
Oscillating (periodic-curvature) solutions exist on the sphere only when
``d > d_star = (27 rho)**(1/4) / 4``; the curvature then oscillates between
the two positive roots ``beta < alpha`` of Q.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import DomainError, NumericError


@dataclass(frozen=True)
class SpaceForm:
    """Simply connected 3-space form of constant sectional curvature ``rho``."""

    rho: float

    def __post_init__(self):
        if not math.isfinite(self.rho):
            raise DomainError(f"rho must be finite, got {self.rho!r}")

    @property
    def radius(self) -> float:
        if self.rho <= 0:
            raise DomainError("radius is defined only for spherical ambient (rho > 0)")
        return 1.0 / math.sqrt(self.rho)

    @property
    def is_spherical(self) -> bool:
        return self.rho > 0


@dataclass(frozen=True)
class EnergyParameter:
    """First-integral constant ``d`` together with its threshold."""

    d: float
    d_star: float

    @classmethod
    def for_space(cls, space: SpaceForm, d: float) -> "EnergyParameter":
        if not d > 0:
            raise DomainError(f"d must be positive, got {d!r}")
        return cls(float(d), critical_d(space) if space.rho > 0 else 0.0)

    @property
    def in_regime(self) -> bool:
        return self.d > self.d_star


@dataclass(frozen=True)
class QuarticProfile:
    """Real roots ``beta < alpha`` of Q and its cofactor ``u**2 + p u + q``.

    ``Q(u) = 9 (alpha - u)(u - beta)(u**2 + p u + q)``.
    """

    rho: float
    d: float
    beta: float
    alpha: float
    p: float
    q: float

    def Q(self, u):
        return eval_Q(u, self.rho, self.d)

    def factored(self, u):
        return 9.0 * (self.alpha - u) * (u - self.beta) * (u * u + self.p * u + self.q)

    def cofactor(self, u):
        return u * u + self.p * u + self.q

    @property
    def discriminant(self) -> float:
        return self.p * self.p - 4.0 * self.q

    @property
    def kappa_min(self) -> float:
        return self.beta * self.beta

    @property
    def kappa_max(self) -> float:
        return self.alpha * self.alpha


@dataclass(frozen=True, order=True)
class AdmissiblePair:
    """Lobe count ``m`` and winding count ``n`` of a closed profile curve."""

    m: int
    n: int

    def __post_init__(self):
        if not is_admissible(self.m, self.n):
            raise DomainError(
                f"pair not admissible: (m, n) = ({self.m}, {self.n}) needs "
                "gcd(m, n) = 1 and m < 2n < sqrt(2) m"
            )

    @property
    def target(self) -> float:
        """Value the closure function must take: ``2 n pi / m``."""
        return 2.0 * self.n * math.pi / self.m


def _rho(space) -> float:
    return space.rho if isinstance(space, SpaceForm) else float(space)


def critical_d(space: SpaceForm) -> float:
    """Threshold ``(27 rho)**(1/4) / 4`` below which Q has no positive part."""
    rho = _rho(space)
    if rho <= 0:
        raise DomainError("threshold defined only for spherical ambient (rho > 0)")
    return (27.0 * rho) ** 0.25 / 4.0


def eval_Q(u, space, d):
    """``16 d u**3 - 9 u**4 - rho``; works elementwise on arrays."""
    rho = _rho(space)
    d = d.d if isinstance(d, EnergyParameter) else d
    return u * u * u * (16.0 * d - 9.0 * u) - rho


def eval_dQ(u, d):
    return u * u * (48.0 * d - 36.0 * u)


def check_regime(space: SpaceForm, d: float) -> float:
    """Return ``d_star`` after checking ``rho > 0`` and ``d > d_star``."""
    rho = _rho(space)
    if rho <= 0:
        raise DomainError("no oscillatory regime: closure machinery needs rho > 0")
    d_star = critical_d(rho)
    # 256 d^4 / 27 - rho = Q(4d/3) is the exact regime test
    if not (d > d_star and 256.0 * d**4 / 27.0 - rho > 0):
        raise DomainError(f"no oscillatory regime: d = {d!r} <= d_star = {d_star!r}")
    return d_star


def _root_in(lo: float, hi: float, rho: float, d: float, rising: bool,
             tol: Tolerances) -> float:
    # Q(lo), Q(hi) have opposite signs; ``rising`` means Q(lo) < 0 < Q(hi).
    width = tol.root_bisect_width * max(1.0, hi)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if (eval_Q(mid, rho, d) < 0) == rising:
            lo = mid
        else:
            hi = mid
    scale = max(1.0, abs(rho), d**4)
    # safeguarded Newton: every iterate tightens the bracket, steps leaving
    # it fall back to bisection
    u = 0.5 * (lo + hi)
    for _ in range(200):
        fu = eval_Q(u, rho, d)
        if fu == 0.0:
            break
        if (fu < 0) == rising:
            lo = u
        else:
            hi = u
        nxt = u - fu / eval_dQ(u, d)
        if not lo <= nxt <= hi:
            nxt = 0.5 * (lo + hi)
        if nxt == u or hi - lo <= 4e-16 * hi:
            break
        u = nxt
    u = min((u, lo, hi), key=lambda x: abs(eval_Q(x, rho, d)))
    res = abs(eval_Q(u, rho, d))
    if res >= tol.root_residual * scale:
        raise NumericError("quartic root did not converge", root=u, residual=res,
                           bracket=(lo, hi))
    return u


def solve_extremal_curvatures(space: SpaceForm, d: float,
                              tol: Tolerances = DEFAULT_TOLERANCES) -> QuarticProfile:
    """Roots of Q bracketing the oscillation of ``u = sqrt(kappa)``.

    Q is increasing on (0, 4d/3) and decreasing on (4d/3, inf) with
    Q(0) = Q(16d/9) = -rho, so both brackets are valid by construction.
    The cofactor comes from matching the two lowest coefficients of
    ``-9 (u - alpha)(u - beta)(u**2 + p u + q)`` against Q; both are
    products, so no cancellation occurs.
    """
    rho = _rho(space)
    d = d.d if isinstance(d, EnergyParameter) else float(d)
    check_regime(rho, d)
    peak = 4.0 * d / 3.0
    if not eval_Q(peak, rho, d) > 0:
        raise DomainError(f"no oscillatory regime: Q(4d/3) <= 0 at d = {d!r}")
    beta = _root_in(0.0, peak, rho, d, rising=True, tol=tol)
    alpha = _root_in(peak, 16.0 * d / 9.0, rho, d, rising=False, tol=tol)
    prod = alpha * beta
    q = rho / (9.0 * prod)
    p = q * (alpha + beta) / prod
    prof = QuarticProfile(rho, d, beta, alpha, p, q)
    # alpha may round onto 16d/9 once rho / (9 alpha^3) drops below an ulp
    if not (0 < beta < peak < alpha <= 16.0 * d / 9.0) or prof.discriminant >= 0:
        raise NumericError("quartic factorization violates its invariants",
                           beta=beta, alpha=alpha, p=p, q=q)
    return prof


def constant_curvature_solution(space: SpaceForm) -> float:
    """Curvature ``sqrt(rho/3)`` of the constant-curvature critical curve.

    It generates a flat isoparametric torus, which is CMC and therefore
    excluded from the surface construction.
    """
    rho = _rho(space)
    if rho <= 0:
        raise DomainError("constant-curvature critical curves are only possible "
                          "in the case of the round 2-sphere (rho > 0)")
    return math.sqrt(rho / 3.0)


def is_admissible(m: int, n: int) -> bool:
    # m < 2n < sqrt(2) m  <=>  m < 2n and 4n^2 < 2m^2, exact in integers
    return (m >= 1 and n >= 1 and math.gcd(m, n) == 1
            and m < 2 * n and 2 * n * n < m * m)


def enumerate_pairs(m_max: int) -> list[AdmissiblePair]:
    """All admissible pairs with ``m <= m_max`` sorted by (m, n)."""
    out = []
    for m in range(1, m_max + 1):
        for n in range(m // 2 + 1, m):
            if is_admissible(m, n):
                out.append(AdmissiblePair(m, n))
    return out
