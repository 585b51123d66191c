# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; a line-for-line mirror of ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, sqrt, fabs, pow

cnp.import_array()

BACKEND = "compiled"

cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40

OK, UNDERFLOW, MAX_STEPS, LEFT_REGIME = 0, 1, 2, 3


def subst_integrand(int kind, double rho, double d, double beta, double width,
                    double p, double q, theta):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(
        np.atleast_1d(np.asarray(theta, dtype=np.float64)).ravel())
    cdef Py_ssize_t n = th.shape[0], i
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double s, du, u, cof, den, b4 = pow(beta, 4.0)
    for i in range(n):
        s = sin(th[i])
        du = width * s * s
        u = beta + du
        cof = sqrt(u * u + p * u + q)
        if kind == 0:
            den = 16.0 * d * du * (u * u + u * beta + beta * beta) + 9.0 * b4
            out[i] = 24.0 * u * u * sqrt(u) / (den * cof)
        else:
            out[i] = 2.0 / (u * cof)
    return out.reshape(np.shape(theta))


cdef inline void _rhs(double u, double v, double rho, double d, double srd,
                      double* k) nogil:
    cdef double uu = u * u
    cdef double Q = uu * u * (16.0 * d - 9.0 * u) - rho
    cdef double dQ = uu * (48.0 * d - 36.0 * u)
    cdef double den = 16.0 * d * uu * u - rho
    cdef double w = uu * u * sqrt(u) / den
    k[0] = v
    k[1] = (2.0 / 9.0) * u * (2.0 * Q + u * dQ)
    k[2] = -12.0 * srd * w
    k[3] = 12.0 * w
    k[4] = den


cdef inline double _defect(double u, double v, double rho, double d) nogil:
    cdef double uu = u * u
    cdef double Q = uu * u * (16.0 * d - 9.0 * u) - rho
    return v * v - (4.0 / 9.0) * uu * Q


def first_integral_defect(double u, double v, double rho, double d):
    return _defect(u, v, rho, d)


def integrate_curvature(double rho, double d, y0, s_out_in, double rtol,
                        double atol, double h0, long max_steps):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] s_out = np.ascontiguousarray(
        s_out_in, dtype=np.float64)
    cdef Py_ssize_t nout = s_out.shape[0], j = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=2] Y = np.full((nout, 4), np.nan)
    cdef double srd = sqrt(rho * d)
    cdef double u = y0[0], v = y0[1], psi = y0[2], lam = y0[3]
    cdef double s = 0.0, h = h0, h_try, target, err, fac, hn, dfi, mind
    cdef double un, vn, pn, ln, eu, ev, ep, el, su, sv, sp, sl, uu, eE, sE
    cdef double iu, iv, ip, il, cu = 0.0, cv = 0.0, cp = 0.0, cl = 0.0
    cdef long nsteps = 0
    cdef int status = 0, hit, shrunk = 0, i
    cdef double k1[5]
    cdef double k2[5]
    cdef double k3[5]
    cdef double k4[5]
    cdef double k5[5]
    cdef double k6[5]
    cdef double k7[5]
    cdef double max_def = fabs(_defect(u, v, rho, d)) / (u * u)
    _rhs(u, v, rho, d, srd, k1)
    while j < nout and s_out[j] <= s:
        Y[j, 0] = u
        Y[j, 1] = v
        Y[j, 2] = psi
        Y[j, 3] = lam
        j += 1
    while j < nout:
        target = s_out[j]
        if nsteps >= max_steps:
            status = 2
            break
        h_try = h
        hit = 0
        if s + h >= target:
            h = target - s
            hit = 1
        if h <= 1e-15 * (fabs(s) if fabs(s) > 1.0 else 1.0):
            status = 3 if shrunk else 1
            break
        nsteps += 1
        _rhs(u + h * A21 * k1[0], v + h * A21 * k1[1], rho, d, srd, k2)
        _rhs(u + h * (A31 * k1[0] + A32 * k2[0]),
             v + h * (A31 * k1[1] + A32 * k2[1]), rho, d, srd, k3)
        _rhs(u + h * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]),
             v + h * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1]), rho, d, srd, k4)
        _rhs(u + h * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]),
             v + h * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1]),
             rho, d, srd, k5)
        _rhs(u + h * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0]),
             v + h * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1]),
             rho, d, srd, k6)
        iu = cu + h * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0])
        iv = cv + h * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1])
        ip = cp + h * (B1 * k1[2] + B3 * k3[2] + B4 * k4[2] + B5 * k5[2] + B6 * k6[2])
        il = cl + h * (B1 * k1[3] + B3 * k3[3] + B4 * k4[3] + B5 * k5[3] + B6 * k6[3])
        un = u + iu
        vn = v + iv
        pn = psi + ip
        ln = lam + il
        mind = k2[4]
        if k3[4] < mind: mind = k3[4]
        if k4[4] < mind: mind = k4[4]
        if k5[4] < mind: mind = k5[4]
        if k6[4] < mind: mind = k6[4]
        if not (un > 0.0) or mind <= 0.0:
            h *= 0.25
            shrunk = 1
            continue
        _rhs(un, vn, rho, d, srd, k7)
        if k7[4] <= 0.0:
            h *= 0.25
            shrunk = 1
            continue
        eu = h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0])
        ev = h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1])
        ep = h * (E1 * k1[2] + E3 * k3[2] + E4 * k4[2] + E5 * k5[2] + E6 * k6[2] + E7 * k7[2])
        el = h * (E1 * k1[3] + E3 * k3[3] + E4 * k4[3] + E5 * k5[3] + E6 * k6[3] + E7 * k7[3])
        su = atol + rtol * (fabs(u) if fabs(u) > fabs(un) else fabs(un))
        sv = atol + rtol * (fabs(v) if fabs(v) > fabs(vn) else fabs(vn))
        sp = atol + rtol * (fabs(psi) if fabs(psi) > fabs(pn) else fabs(pn))
        sl = atol + rtol * (fabs(lam) if fabs(lam) > fabs(ln) else fabs(ln))
        uu = un * un
        eE = 2.0 * vn * ev - (4.0 / 9.0) * un * (
            2.0 * (uu * un * (16.0 * d - 9.0 * un) - rho) + un * uu * (48.0 * d - 36.0 * un)) * eu
        sE = atol + rtol * rho * uu
        err = sqrt(0.2 * ((eu / su) ** 2 + (ev / sv) ** 2 + (ep / sp) ** 2
                          + (el / sl) ** 2 + (eE / sE) ** 2))
        if err <= 1.0:
            shrunk = 0
            s = target if hit else s + h
            cu = iu - (un - u)
            cv = iv - (vn - v)
            cp = ip - (pn - psi)
            cl = il - (ln - lam)
            u = un
            v = vn
            psi = pn
            lam = ln
            for i in range(5):
                k1[i] = k7[i]
            dfi = fabs(_defect(u, v, rho, d)) / (u * u)
            if dfi > max_def:
                max_def = dfi
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac < 0.2: fac = 0.2
                if fac > 5.0: fac = 5.0
            hn = h * fac
            while j < nout and s_out[j] <= s:
                Y[j, 0] = u
                Y[j, 1] = v
                Y[j, 2] = psi
                Y[j, 3] = lam
                j += 1
            if hit and fac >= 1.0:
                h = h_try if h_try > hn else hn
            else:
                h = hn
        else:
            fac = 0.9 * pow(err, -0.2)
            h *= fac if fac > 0.2 else 0.2
    return Y, nsteps, status, max_def, s
