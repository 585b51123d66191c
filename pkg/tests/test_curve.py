import csv
import io
import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from biconservative.closure import solve_pair
from biconservative.curve import (build_profile_curve, constant_trajectory_residual,
                                  count_minima_cyclic, count_self_intersections,
                                  curvature_maxima, el_residual, integrate_psi,
                                  integrate_u, lambda_along_path, measure_period,
                                  profile_point, simplicity_diagnostics, write_curve_csv)
from biconservative.errors import DomainError, NumericError
from biconservative.quadrature import i_of_d, lambda_of_d, period_of_d
from biconservative.spaceform import SpaceForm, critical_d


@pytest.mark.parametrize("rho, factor", [(1.0, 1.75), (0.5, 1.2), (4.0, 6.0)])
def test_period_matches_quadrature(rho, factor):
    space = SpaceForm(rho)
    d = factor * critical_d(space)
    per = period_of_d(space, d)
    traj = integrate_u(space, d, 3 * per)
    assert measure_period(traj) == pytest.approx(per, rel=1e-7)


def test_two_periods_exactly(sphere):
    per = period_of_d(sphere, 1.0)
    traj = integrate_u(sphere, 1.0, 2 * per, samples=1601)
    assert measure_period(traj) == pytest.approx(per, rel=1e-9)
    assert curvature_maxima(traj) == pytest.approx([0.5 * per, 1.5 * per], rel=1e-8)


def test_short_trajectory_has_no_period(sphere):
    traj = integrate_u(sphere, 1.0, 1.0)
    with pytest.raises(NumericError, match="fewer than two"):
        measure_period(traj)


def test_zero_length(sphere):
    traj = integrate_u(sphere, 1.0, 0.0)
    assert traj.s.shape == (1,)
    assert traj.u[0] == traj.beta and traj.psi[0] == 0.0


def test_against_scipy_dop853(sphere):
    # independent integrator on the same first-order system
    traj = integrate_u(sphere, 1.0, 12.0, samples=241)
    d, rho = 1.0, 1.0

    def rhs(s, y):
        u, v = y[0], y[1]
        Q = u**3 * (16 * d - 9 * u) - rho
        dQ = u * u * (48 * d - 36 * u)
        return [v, 2 / 9 * u * (2 * Q + u * dQ),
                -12 * math.sqrt(rho * d) * u**3.5 / (16 * d * u**3 - rho)]

    ref = solve_ivp(rhs, (0, 12), [traj.beta, 0.0, 0.0], method="DOP853",
                    t_eval=traj.s, rtol=1e-13, atol=1e-15)
    assert np.max(np.abs(ref.y[0] - traj.u)) < 1e-8
    assert np.max(np.abs(ref.y[2] - traj.psi)) < 1e-8


@pytest.mark.parametrize("rho, factor", [(1.0, 1.0001), (1.0, 2.0), (1.0, 10.0),
                                         (0.5, 3.0), (4.0, 1.5), (25.0, 6.0)])
def test_conservation(rho, factor):
    space = SpaceForm(rho)
    d = factor * critical_d(space)
    traj = integrate_u(space, d, 3 * period_of_d(space, d))
    assert traj.relative_defect().max() < 1e-8
    assert traj.max_defect < 1e-8
    assert el_residual(space, traj, relative=True) < 1e-8
    # the residual is 15/4 rho times the relative first-integral defect
    assert el_residual(space, traj, relative=True) == pytest.approx(
        3.75 * traj.relative_defect().max(), rel=1e-3, abs=1e-14)


def test_conservation_is_scale_invariant():
    a, b = SpaceForm(1.0), SpaceForm(16.0)
    ta = integrate_u(a, 3 * critical_d(a), 4.0, samples=81)
    # rho -> 16 rho doubles d and u and quarters arc length
    tb = integrate_u(b, 3 * critical_d(b), 1.0, samples=81)
    assert tb.u == pytest.approx(2.0 * ta.u, rel=1e-9)


@pytest.mark.parametrize("rho", [1.0, 4.0])
def test_large_d_refused(rho):
    # far past the accurate range the guard raises instead of returning drift
    space = SpaceForm(rho)
    d = 50 * critical_d(space)
    with pytest.raises(NumericError, match="residual above tolerance") as info:
        integrate_u(space, d, 3 * period_of_d(space, d))
    assert info.value.details["d_over_d_star"] == pytest.approx(50.0)


def test_perturbed_trajectory_detected(sphere):
    traj = integrate_u(sphere, 1.0, 8.0)
    assert el_residual(sphere, traj) < 1e-8
    assert el_residual(sphere, replace(traj, u=traj.u + 1e-3)) > 1e-4


def test_constant_solution_residual(sphere):
    assert constant_trajectory_residual(sphere) < 1e-15


def test_first_integral_guard(sphere):
    from biconservative.config import Tolerances
    with pytest.raises(NumericError, match="first-integral"):
        integrate_u(sphere, 1.0, 10.0, Tolerances(ode_rtol=1e-5, ode_atol=1e-7,
                                                  first_integral=1e-14))


@pytest.mark.parametrize("d", [0.5, 0.56])
def test_below_regime(sphere, d):
    with pytest.raises(DomainError):
        integrate_u(sphere, d, 1.0)


def test_psi_decreases_by_i_per_period(sphere):
    per = period_of_d(sphere, 1.3)
    traj = integrate_u(sphere, 1.3, per, samples=501)
    psi = integrate_psi(sphere, 1.3, traj)
    assert np.all(np.diff(psi) < 0)
    assert psi[-1] == pytest.approx(-i_of_d(sphere, 1.3), rel=1e-9)


@pytest.mark.parametrize("rho, factor", [(1.0, 1.2), (2.0, 4.0), (0.5, 8.0)])
def test_lambda_along_path(rho, factor):
    space = SpaceForm(rho)
    d = factor * critical_d(space)
    assert lambda_along_path(space, d) == pytest.approx(lambda_of_d(space, d), rel=1e-8)


def test_profile_point_on_sphere():
    rho, d = 2.0, 1.0
    u = np.linspace(0.6, 1.4, 9)
    pts = profile_point(rho, d, u, np.linspace(0, -3, 9), phi=0.3)
    assert np.allclose((pts**2).sum(axis=1) * rho, 1.0, atol=1e-14)


@pytest.mark.parametrize("pair", [(3, 2), (5, 3), (7, 4), (8, 5)])
def test_closed_curve_topology(sphere, pair):
    sol = solve_pair(sphere, pair)
    curve = build_profile_curve(sphere, sol)
    assert curve.closure_gap < 1e-6
    assert abs(curve.psi_gap) < 1e-6
    assert curve.sphere_defect < 1e-12
    diag = simplicity_diagnostics(curve)
    assert diag["lobes"] == pair[0]
    assert diag["winding"] == pair[1]
    assert diag["self_intersecting"]
    assert diag["single_period_self_intersections"] == 0
    assert diag["single_period_min_separation"] > 1e-3


def test_curve_closure_guard(sphere, sol32):
    bad = replace(sol32, period=sol32.period * (1 + 1e-4))
    with pytest.raises(NumericError, match="does not close"):
        build_profile_curve(sphere, bad)


@pytest.mark.parametrize("values, expected", [
    ([3, 2, 1, 2, 3, 2, 1, 2], 2),
    ([1, 2, 3, 2], 1),
    ([0, 1, 0, 1, 0, 1], 3),
    ([1, 1 + 1e-12, 1, 1 + 1e-12, 2], 1),
])
def test_count_minima_cyclic(values, expected):
    assert count_minima_cyclic(np.array(values, float), 1e-9) == expected


def _on_sphere(xy):
    # lift planar points onto the gnomonic chart x1 = 1
    pts = np.column_stack([np.ones(len(xy)), np.zeros(len(xy)), xy])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def test_self_intersection_counter():
    # offset so no sample lands exactly on the figure-eight crossing
    t = np.linspace(0, 2 * np.pi, 400, endpoint=False) + 0.01
    circle = _on_sphere(np.column_stack([np.cos(t), np.sin(t)]) * 0.5)
    eight = _on_sphere(np.column_stack([np.sin(t), np.sin(t) * np.cos(t)]) * 0.5)
    assert count_self_intersections(circle, closed=True) == 0
    assert count_self_intersections(eight, closed=True) == 1


def test_csv_round_trip(curve32):
    buf = io.StringIO()
    write_curve_csv(curve32, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == ["s", "kappa", "psi", "x1", "x2", "x3", "x4"]
    data = np.array([[float(v) for v in r] for r in rows[1:]])
    assert np.array_equal(data[:, 0], curve32.s)
    assert np.array_equal(data[:, 1], curve32.kappa)
    assert np.array_equal(data[:, 3:], curve32.points)
