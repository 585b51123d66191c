import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biconservative.config import DEFAULT_TOLERANCES
from biconservative.errors import DomainError
from biconservative.spaceform import (AdmissiblePair, EnergyParameter, SpaceForm,
                                      check_regime, constant_curvature_solution,
                                      critical_d, enumerate_pairs, eval_Q,
                                      is_admissible, solve_extremal_curvatures)


@pytest.mark.parametrize("rho, expected", [
    (1.0, 27 ** 0.25 / 4),
    (3.0, 0.75),
    (27.0 / 256.0 * 16.0, 27 ** 0.25 / 4 * (27 / 16) ** 0.25),
])
def test_critical_d(rho, expected):
    assert critical_d(SpaceForm(rho)) == pytest.approx(expected, rel=1e-15)


def test_critical_d_is_double_root():
    # at d_star the maximum of Q vanishes at u = 4 d_star / 3
    for rho in (0.3, 1.0, 7.0):
        ds = critical_d(SpaceForm(rho))
        assert abs(eval_Q(4 * ds / 3, rho, ds)) < 1e-13 * max(1.0, rho)


@pytest.mark.parametrize("rho", [0.0, -1.0])
def test_threshold_needs_sphere(rho):
    with pytest.raises(DomainError):
        critical_d(SpaceForm(rho))
    with pytest.raises(DomainError):
        SpaceForm(rho).radius


def test_nonfinite_rho():
    with pytest.raises(DomainError):
        SpaceForm(float("nan"))


def test_roots_regression():
    prof = solve_extremal_curvatures(SpaceForm(1.0), 1.0)
    assert prof.beta == pytest.approx(0.43585645127789363, rel=1e-14)
    assert prof.alpha == pytest.approx(1.7573030809792145, rel=1e-14)
    assert prof.p == pytest.approx(0.4153817544793305, rel=1e-12)
    assert prof.q == pytest.approx(0.1450665696667159, rel=1e-12)


@pytest.mark.parametrize("rho", [0.5, 1.0, 4.0])
@pytest.mark.parametrize("factor", [1.0001, 1.3, 5.0, 80.0, 1e3])
def test_roots_match_numpy(rho, factor):
    # independent oracle: companion-matrix roots of -9u^4 + 16du^3 - rho
    space = SpaceForm(rho)
    d = factor * critical_d(space)
    prof = solve_extremal_curvatures(space, d)
    r = np.roots([-9.0, 16.0 * d, 0.0, 0.0, -rho])
    real = np.sort(r[np.abs(r.imag) < 1e-9].real)
    real = real[real > 0]
    assert len(real) == 2
    assert prof.beta == pytest.approx(real[0], rel=1e-8)
    assert prof.alpha == pytest.approx(real[1], rel=1e-8)
    assert prof.discriminant < 0


@settings(max_examples=60, deadline=None)
@given(rho=st.floats(0.05, 20.0), factor=st.floats(1.001, 500.0),
       t=st.floats(0.0, 1.0))
def test_factorization_identity(rho, factor, t):
    space = SpaceForm(rho)
    d = factor * critical_d(space)
    prof = solve_extremal_curvatures(space, d)
    u = prof.beta + t * (prof.alpha - prof.beta)
    scale = 9 * prof.alpha**4 + rho
    assert abs(prof.Q(u) - prof.factored(u)) < 1e-11 * scale
    assert prof.cofactor(u) > 0
    assert 0 < prof.beta < 4 * d / 3 < prof.alpha <= 16 * d / 9


@pytest.mark.parametrize("d", [0.5, 27 ** 0.25 / 4])
def test_regime_boundary(d):
    with pytest.raises(DomainError, match="no oscillatory regime"):
        solve_extremal_curvatures(SpaceForm(1.0), d)


def test_regime_rejects_nonpositive_rho():
    with pytest.raises(DomainError):
        check_regime(SpaceForm(-1.0), 1.0)


def test_large_d_roots():
    space = SpaceForm(1.0)
    d = 1e4 * critical_d(space)
    prof = solve_extremal_curvatures(space, d)
    assert abs(prof.Q(prof.beta)) < DEFAULT_TOLERANCES.root_residual * d**4
    assert prof.alpha == pytest.approx(16 * d / 9, rel=1e-12)


def test_energy_parameter():
    e = EnergyParameter.for_space(SpaceForm(1.0), 1.0)
    assert e.in_regime and e.d_star == pytest.approx(0.5698767642386944)
    assert not EnergyParameter.for_space(SpaceForm(1.0), 0.5).in_regime
    with pytest.raises(DomainError):
        EnergyParameter.for_space(SpaceForm(1.0), -1.0)


@pytest.mark.parametrize("rho", [0.5, 1.0, 3.0])
def test_constant_curvature(rho):
    k0 = constant_curvature_solution(SpaceForm(rho))
    assert 3 * k0**2 == pytest.approx(rho, rel=1e-15)


def test_constant_curvature_needs_sphere():
    with pytest.raises(DomainError):
        constant_curvature_solution(SpaceForm(0.0))


@pytest.mark.parametrize("m, n, ok", [
    (3, 2, True), (5, 3, True), (7, 4, True), (8, 5, True),
    (2, 1, False), (3, 1, False), (4, 3, False), (6, 4, False), (10, 7, True),
])
def test_is_admissible(m, n, ok):
    assert is_admissible(m, n) is ok


def test_pair_validation():
    with pytest.raises(DomainError, match="pair not admissible"):
        AdmissiblePair(3, 1)
    assert AdmissiblePair(3, 2).target == pytest.approx(4 * math.pi / 3)


def test_enumerate_sorted_and_bounded():
    pairs = enumerate_pairs(30)
    assert pairs == sorted(pairs)
    assert all(math.pi < p.target < math.sqrt(2) * math.pi for p in pairs)
    assert [(p.m, p.n) for p in enumerate_pairs(8)] == [(3, 2), (5, 3), (7, 4), (8, 5)]
