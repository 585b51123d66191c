"""Pure-Python reference kernels.

``_kernels.pyx`` mirrors these functions operation for operation; keep the
two in sync.  The state vector of the curvature system is
``(u, u_s, psi, lam)`` with ``u = sqrt(kappa)``:

    u'   = u_s
    u_s' = 2/9 u (2 Q(u) + u Q'(u))
    psi' = -12 sqrt(rho d) u**3.5 / (16 d u**3 - rho)
    lam' =  12 u**3.5 / (16 d u**3 - rho)
"""
import math

import numpy as np

BACKEND = "python"

# Dormand-Prince 5(4) tableau
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

OK, UNDERFLOW, MAX_STEPS, LEFT_REGIME = 0, 1, 2, 3


def subst_integrand(kind, rho, d, beta, width, p, q, theta):
    """Integrand in the variable ``theta`` with ``u = beta + width sin^2 theta``.

    kind 0 -> closure integrand (integrates to Lambda over [0, pi/2]);
    kind 1 -> period integrand (integrates to the curvature period).
    The denominator ``16 d u^3 - rho`` is evaluated as
    ``16 d (u - beta)(u^2 + u beta + beta^2) + 9 beta^4``, exact because
    ``Q(beta) = 0``; the direct form cancels catastrophically for large d.
    """
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)
    du = width * s * s
    u = beta + du
    cof = np.sqrt(u * u + p * u + q)
    if kind == 0:
        den = 16.0 * d * du * (u * u + u * beta + beta * beta) + 9.0 * beta**4
        return 24.0 * u * u * np.sqrt(u) / (den * cof)
    return 2.0 / (u * cof)


def _rhs(u, v, rho, d, srd):
    uu = u * u
    Q = uu * u * (16.0 * d - 9.0 * u) - rho
    dQ = uu * (48.0 * d - 36.0 * u)
    acc = (2.0 / 9.0) * u * (2.0 * Q + u * dQ)
    den = 16.0 * d * uu * u - rho
    w = uu * u * math.sqrt(u) / den
    return v, acc, -12.0 * srd * w, 12.0 * w, den


def first_integral_defect(u, v, rho, d):
    uu = u * u
    Q = uu * u * (16.0 * d - 9.0 * u) - rho
    return v * v - (4.0 / 9.0) * uu * Q


def integrate_curvature(rho, d, y0, s_out, rtol, atol, h0, max_steps):
    """Adaptive DP5(4) integration landing exactly on every ``s_out`` point.

    ``s_out`` must be non-decreasing and start at or after 0; integration
    starts at s = 0 from ``y0``.  Returns ``(Y, nsteps, status, max_defect,
    s_fail)`` where ``Y[i]`` is the state at ``s_out[i]`` and ``max_defect``
    is the largest first-integral defect divided by ``u**2`` over accepted
    steps.  The error norm covers the four components plus the first
    integral.
    """
    s_out = np.asarray(s_out, dtype=float)
    nout = s_out.shape[0]
    Y = np.full((nout, 4), np.nan)
    srd = math.sqrt(rho * d)
    u, v, psi, lam = float(y0[0]), float(y0[1]), float(y0[2]), float(y0[3])
    s = 0.0
    h = h0
    nsteps = 0
    status = OK
    shrunk_for_regime = False
    max_def = abs(first_integral_defect(u, v, rho, d)) / (u * u)
    k1 = _rhs(u, v, rho, d, srd)
    cu = cv = cp = cl = 0.0
    j = 0
    while j < nout and s_out[j] <= s:
        Y[j] = (u, v, psi, lam)
        j += 1
    while j < nout:
        target = s_out[j]
        if nsteps >= max_steps:
            status = MAX_STEPS
            break
        h_try = h
        hit = False
        if s + h >= target:
            h = target - s
            hit = True
        if h <= 1e-15 * max(1.0, abs(s)):
            status = LEFT_REGIME if shrunk_for_regime else UNDERFLOW
            break
        nsteps += 1
        ku1, kv1, kp1, kl1 = k1[0], k1[1], k1[2], k1[3]
        ku2, kv2, kp2, kl2, den = _rhs(u + h * A21 * ku1, v + h * A21 * kv1, rho, d, srd)
        ku3, kv3, kp3, kl3, den3 = _rhs(u + h * (A31 * ku1 + A32 * ku2),
                                        v + h * (A31 * kv1 + A32 * kv2), rho, d, srd)
        ku4, kv4, kp4, kl4, den4 = _rhs(u + h * (A41 * ku1 + A42 * ku2 + A43 * ku3),
                                        v + h * (A41 * kv1 + A42 * kv2 + A43 * kv3),
                                        rho, d, srd)
        ku5, kv5, kp5, kl5, den5 = _rhs(
            u + h * (A51 * ku1 + A52 * ku2 + A53 * ku3 + A54 * ku4),
            v + h * (A51 * kv1 + A52 * kv2 + A53 * kv3 + A54 * kv4), rho, d, srd)
        ku6, kv6, kp6, kl6, den6 = _rhs(
            u + h * (A61 * ku1 + A62 * ku2 + A63 * ku3 + A64 * ku4 + A65 * ku5),
            v + h * (A61 * kv1 + A62 * kv2 + A63 * kv3 + A64 * kv4 + A65 * kv5),
            rho, d, srd)
        # compensated update: the carried low parts keep the first integral
        # from drifting by roundoff over long runs
        iu = cu + h * (B1 * ku1 + B3 * ku3 + B4 * ku4 + B5 * ku5 + B6 * ku6)
        iv = cv + h * (B1 * kv1 + B3 * kv3 + B4 * kv4 + B5 * kv5 + B6 * kv6)
        ip = cp + h * (B1 * kp1 + B3 * kp3 + B4 * kp4 + B5 * kp5 + B6 * kp6)
        il = cl + h * (B1 * kl1 + B3 * kl3 + B4 * kl4 + B5 * kl5 + B6 * kl6)
        un = u + iu
        vn = v + iv
        pn = psi + ip
        ln = lam + il
        if not (un > 0.0) or min(den, den3, den4, den5, den6) <= 0.0:
            # stage left the regime: shrink and retry
            h *= 0.25
            shrunk_for_regime = True
            continue
        k7 = _rhs(un, vn, rho, d, srd)
        if k7[4] <= 0.0:
            h *= 0.25
            shrunk_for_regime = True
            continue
        ku7, kv7, kp7, kl7 = k7[0], k7[1], k7[2], k7[3]
        eu = h * (E1 * ku1 + E3 * ku3 + E4 * ku4 + E5 * ku5 + E6 * ku6 + E7 * ku7)
        ev = h * (E1 * kv1 + E3 * kv3 + E4 * kv4 + E5 * kv5 + E6 * kv6 + E7 * kv7)
        ep = h * (E1 * kp1 + E3 * kp3 + E4 * kp4 + E5 * kp5 + E6 * kp6 + E7 * kp7)
        el = h * (E1 * kl1 + E3 * kl3 + E4 * kl4 + E5 * kl5 + E6 * kl6 + E7 * kl7)
        su = atol + rtol * max(abs(u), abs(un))
        sv = atol + rtol * max(abs(v), abs(vn))
        sp = atol + rtol * max(abs(psi), abs(pn))
        sl = atol + rtol * max(abs(lam), abs(ln))
        # linearized first-integral error of the local error estimate, weighted
        # by rho u^2 (the scale that bounds the Euler-Lagrange residual)
        uu = un * un
        eE = 2.0 * vn * ev - (4.0 / 9.0) * un * (
            2.0 * (uu * un * (16.0 * d - 9.0 * un) - rho) + un * uu * (48.0 * d - 36.0 * un)) * eu
        sE = atol + rtol * rho * uu
        err = math.sqrt(0.2 * ((eu / su) ** 2 + (ev / sv) ** 2 + (ep / sp) ** 2
                               + (el / sl) ** 2 + (eE / sE) ** 2))
        if err <= 1.0:
            shrunk_for_regime = False
            s = target if hit else s + h
            cu = iu - (un - u)
            cv = iv - (vn - v)
            cp = ip - (pn - psi)
            cl = il - (ln - lam)
            u, v, psi, lam = un, vn, pn, ln
            k1 = k7
            dfi = abs(first_integral_defect(u, v, rho, d)) / (u * u)
            if dfi > max_def:
                max_def = dfi
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
            hn = h * fac
            while j < nout and s_out[j] <= s:
                Y[j, 0] = u
                Y[j, 1] = v
                Y[j, 2] = psi
                Y[j, 3] = lam
                j += 1
            if hit and fac >= 1.0:
                # a clipped step says nothing about the controller's size
                h = max(h_try, hn)
            else:
                h = hn
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
    return Y, nsteps, status, max_def, s
