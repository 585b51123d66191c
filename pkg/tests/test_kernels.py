import os
import subprocess
import sys

import numpy as np
import pytest

from biconservative import _kernels_py, kernels
from biconservative.quadrature import i_of_d
from biconservative.spaceform import SpaceForm, solve_extremal_curvatures

compiled = kernels.compiled
needs_ext = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


@needs_ext
def test_active_backend_is_compiled():
    if not os.environ.get("BICONSERVATIVE_PURE_PYTHON"):
        assert kernels.BACKEND == "compiled"


@needs_ext
@pytest.mark.parametrize("kind", [0, 1])
@pytest.mark.parametrize("d", [0.6, 1.0, 40.0])
def test_integrand_backends_agree(kind, d):
    prof = solve_extremal_curvatures(SpaceForm(1.0), d)
    args = (kind, 1.0, d, prof.beta, prof.alpha - prof.beta, prof.p, prof.q)
    t = np.linspace(0, np.pi / 2, 257)
    a = compiled.subst_integrand(*args, t)
    b = _kernels_py.subst_integrand(*args, t)
    assert np.allclose(a, b, rtol=4e-16, atol=0)


@needs_ext
@pytest.mark.parametrize("d", [0.7, 1.0, 3.0])
def test_integrator_backends_agree(d):
    prof = solve_extremal_curvatures(SpaceForm(1.0), d)
    s_out = np.linspace(0, 6, 37)
    ya, na, sa, fa, _ = compiled.integrate_curvature(1.0, d, (prof.beta, 0, 0, 0), s_out,
                                                      1e-12, 1e-14, 1e-3, 10**6)
    yb, nb, sb, fb, _ = _kernels_py.integrate_curvature(1.0, d, (prof.beta, 0, 0, 0), s_out,
                                                        1e-12, 1e-14, 1e-3, 10**6)
    assert sa == sb == kernels.OK
    assert na == nb
    assert np.allclose(ya, yb, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("backend", ["python", "compiled"])
def test_left_regime_status(backend):
    mod = _kernels_py if backend == "python" else compiled
    if mod is None:
        pytest.skip("compiled extension not built")
    # start where 16 d u^3 < rho: every stage sees a non-positive denominator
    _, _, status, _, _ = mod.integrate_curvature(1.0, 1.0, (0.3, 0.5, 0, 0),
                                                 np.array([0.0, 1.0]), 1e-12, 1e-14,
                                                 1e-3, 10**5)
    assert status == kernels.LEFT_REGIME


def test_step_budget_status():
    _, n, status, _, _ = _kernels_py.integrate_curvature(
        1.0, 1.0, (0.43585645127789363, 0, 0, 0), np.array([0.0, 10.0]),
        1e-12, 1e-14, 1e-3, 5)
    assert status == kernels.MAX_STEPS and n == 5


def test_pure_python_switch():
    code = ("from biconservative import kernels; from biconservative.quadrature import i_of_d;"
            "from biconservative.spaceform import SpaceForm;"
            "print(kernels.BACKEND, repr(i_of_d(SpaceForm(1.0), 1.0)))")
    env = dict(os.environ, BICONSERVATIVE_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    assert out[0] == "python"
    assert float(out[1]) == pytest.approx(i_of_d(SpaceForm(1.0), 1.0), rel=1e-15)


def test_first_integral_defect_zero_at_root():
    prof = solve_extremal_curvatures(SpaceForm(1.0), 1.0)
    assert abs(kernels.first_integral_defect(prof.beta, 0.0, 1.0, 1.0)) < 1e-15
