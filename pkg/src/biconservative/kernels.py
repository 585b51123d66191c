"""Kernel backend chosen at import time.

The compiled extension is used when it was built; setting
``BICONSERVATIVE_PURE_PYTHON=1`` forces the reference implementation.
Both expose ``subst_integrand``, ``integrate_curvature`` and
``first_integral_defect`` with identical signatures.
"""
import os

from . import _kernels_py as python

try:
    from . import _kernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and not os.environ.get("BICONSERVATIVE_PURE_PYTHON"):
    active = compiled
else:
    active = python

BACKEND = active.BACKEND
subst_integrand = active.subst_integrand
integrate_curvature = active.integrate_curvature
first_integral_defect = active.first_integral_defect
OK, UNDERFLOW, MAX_STEPS, LEFT_REGIME = (python.OK, python.UNDERFLOW,
                                         python.MAX_STEPS, python.LEFT_REGIME)
