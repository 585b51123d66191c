import math

import numpy as np
import pytest

from biconservative.closure import (ScanFailure, geometric_grid, nonexistence_report,
                                    scan_i, solve_pair, verify_lemma)
from biconservative.errors import DomainError
from biconservative.quadrature import ClosureFunctionSample, i_of_d
from biconservative.spaceform import AdmissiblePair, SpaceForm, critical_d, enumerate_pairs

PINNED = {
    (3, 2): (0.7898517471480201, 3.678433334825075),
    (5, 3): (1.5390740659182396, 3.4084836547312545),
    (7, 4): (2.3443065415183804, 3.303013946144998),
    (8, 5): (1.160292344662593, 3.507178801502497),
}


@pytest.mark.parametrize("pair", sorted(PINNED))
def test_solve_regression(sphere, pair):
    sol = solve_pair(sphere, pair)
    d_mn, period = PINNED[pair]
    assert sol.d_mn == pytest.approx(d_mn, rel=1e-11)
    assert sol.period == pytest.approx(period, rel=1e-11)
    assert abs(i_of_d(sphere, sol.d_mn) - 2 * pair[1] * math.pi / pair[0]) < 1e-10
    assert sol.total_length == pytest.approx(pair[0] * period, rel=1e-11)


@pytest.mark.parametrize("pair", [(3, 2), (5, 3), (10, 7), (11, 6)])
def test_bracket_strategies_agree(sphere, pair):
    up = solve_pair(sphere, pair, strategy="up")
    down = solve_pair(sphere, pair, strategy="down")
    assert up.bracket != down.bracket
    assert abs(up.d_mn - down.d_mn) < 1e-9 * up.d_mn


def test_explicit_bracket(sphere):
    sol = solve_pair(sphere, (3, 2), bracket=(0.6, 1.0))
    assert sol.d_mn == pytest.approx(PINNED[(3, 2)][0], rel=1e-12)


def test_order_follows_target(sphere):
    sols = [solve_pair(sphere, p) for p in enumerate_pairs(9)]
    by_target = sorted(sols, key=lambda s: -s.target)
    assert [s.d_mn for s in by_target] == sorted(s.d_mn for s in sols)


@pytest.mark.parametrize("rho", [0.5, 2.0, 9.0])
def test_scaling_of_roots(rho):
    # d_mn scales like d_star
    base = solve_pair(SpaceForm(1.0), (3, 2)).d_mn / critical_d(SpaceForm(1.0))
    sol = solve_pair(SpaceForm(rho), (3, 2))
    assert sol.d_mn / critical_d(SpaceForm(rho)) == pytest.approx(base, rel=1e-10)


@pytest.mark.parametrize("pair", [(3, 1), (2, 1), (4, 3)])
def test_inadmissible(sphere, pair):
    with pytest.raises(DomainError, match="pair not admissible"):
        solve_pair(sphere, pair)


@pytest.mark.parametrize("rho", [0.0, -0.1, -1.0])
def test_solve_refuses_nonpositive(rho):
    with pytest.raises(DomainError):
        solve_pair(SpaceForm(rho), (3, 2))


def test_to_dict_keys(sol32):
    d = sol32.to_dict()
    assert {"m", "n", "d_mn", "residual", "period", "beta", "alpha"} <= set(d)


def test_scan_records_failures(sphere):
    ds = critical_d(sphere)
    out = scan_i(sphere, [0.5, 2 * ds, 0.1])
    assert isinstance(out[0], ScanFailure) and "DomainError" in out[0].error
    assert isinstance(out[1], ClosureFunctionSample)
    assert [o.d for o in out] == [0.5, 2 * ds, 0.1]


def test_verify_lemma_small(sphere):
    rep = verify_lemma(sphere, points=16)
    assert rep.passed
    assert len(rep.grid) == 16
    assert rep.to_dict()["near_d_star_gap"] < 1e-6


def test_verify_lemma_detects_bad_grid(sphere):
    grid = geometric_grid(critical_d(sphere), 1.01, 100, 8)[::-1]
    assert not verify_lemma(sphere, grid=grid).monotone


@pytest.mark.parametrize("rho", [-1.0, -0.1, 0.0])
def test_nonexistence(rho):
    rep = nonexistence_report(SpaceForm(rho), np.geomspace(1e-3, 1e3, 7))
    assert not rep["closed_solutions"]
    assert all(r["min_integrand"] > 0 for r in rep["samples"])


def test_nonexistence_refuses_sphere(sphere):
    with pytest.raises(DomainError):
        nonexistence_report(sphere, [1.0])
