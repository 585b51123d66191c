"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Times the substituted closure integrand on a batch of nodes and one
curvature integration over three periods, checks that both backends give
the same numbers, and prints the speed-up.
"""
import argparse
import timeit

import numpy as np

from biconservative import _kernels_py, kernels
from biconservative.quadrature import period_of_d
from biconservative.spaceform import SpaceForm, critical_d, solve_extremal_curvatures


def cases(rho=1.0, factor=2.0):
    space = SpaceForm(rho)
    d = factor * critical_d(space)
    prof = solve_extremal_curvatures(space, d)
    theta = np.linspace(0.0, np.pi / 2, 4096)
    integrand_args = (0, rho, d, prof.beta, prof.alpha - prof.beta, prof.p, prof.q, theta)
    s_out = np.linspace(0.0, 3 * period_of_d(space, d), 601)
    ode_args = (rho, d, (prof.beta, 0.0, 0.0, 0.0), s_out, 1e-14, 1e-15, 1e-3, 10**7)
    return {"integrand": ("subst_integrand", integrand_args),
            "integrator": ("integrate_curvature", ode_args)}


def best_time(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--factor", type=float, default=2.0, help="d in units of d_star")
    args = ap.parse_args(argv)
    compiled = kernels.compiled
    if compiled is None:
        print("compiled extension not built; only the Python kernels are available")
    print(f"{'kernel':<12} {'python [s]':>12} {'compiled [s]':>13} {'speed-up':>9}  agree")
    for name, (fn_name, fargs) in cases(factor=args.factor).items():
        py_fn = getattr(_kernels_py, fn_name)
        t_py = best_time(py_fn, fargs, max(1, args.repeat // 2))
        if compiled is None:
            print(f"{name:<12} {t_py:12.4g} {'-':>13} {'-':>9}  -")
            continue
        c_fn = getattr(compiled, fn_name)
        t_c = best_time(c_fn, fargs, args.repeat)
        a, b = py_fn(*fargs), c_fn(*fargs)
        if name == "integrator":
            same = a[1] == b[1] and np.allclose(a[0], b[0], rtol=1e-13, atol=1e-15)
        else:
            same = np.allclose(a, b, rtol=4e-16, atol=0)
        print(f"{name:<12} {t_py:12.4g} {t_c:13.4g} {t_py / t_c:9.1f}  {same}")


if __name__ == "__main__":
    main()
