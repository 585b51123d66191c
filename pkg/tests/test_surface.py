import math
from dataclasses import replace

import numpy as np
import pytest

from biconservative.errors import DomainError
from biconservative.spaceform import SpaceForm
from biconservative.closure import solve_pair
from biconservative.surface import (build_mesh, curvature_diagnostics, geodesic_orbit_check,
                                    killing_norm_check, periodic_derivative,
                                    stereographic_project, surface_derivatives, unit_normal)


@pytest.mark.parametrize("order", [2, 4, 6])
def test_periodic_derivative_order(order):
    def err(n):
        x = 2 * np.pi * np.arange(n) / n
        return np.max(np.abs(periodic_derivative(np.sin(3 * x), x[1], order)
                             - 3 * np.cos(3 * x)))
    assert math.log2(err(64) / err(128)) == pytest.approx(order, abs=0.2)


def test_sphere_defect(mesh32, sphere, sol53):
    assert mesh32.sphere_defect < 1e-10
    assert mesh32.seam_gap < 1e-6
    mesh53 = build_mesh(sphere, sol53, 1000, 120)
    assert mesh53.sphere_defect < 1e-10


def test_sphere_defect_other_radius():
    space = SpaceForm(4.0)
    mesh = build_mesh(space, solve_pair(space, (3, 2)), 200, 16)
    assert mesh.sphere_defect < 1e-10
    assert np.allclose(np.linalg.norm(mesh.points, axis=-1), 0.5, atol=1e-14)


@pytest.mark.parametrize("n_s, n_phi", [(11, 120), (600, 4)])
def test_coarse_grid_refused(sphere, sol32, n_s, n_phi):
    with pytest.raises(DomainError, match="grid too coarse"):
        build_mesh(sphere, sol32, n_s, n_phi)


def test_surface_identities(mesh32, diag32, sphere):
    assert diag32.weingarten_residual() < 1e-4
    assert diag32.gauss_residual(sphere.rho) < 1e-4
    assert diag32.mean_vs_kappa(mesh32) < 1e-4
    assert np.max(np.abs(diag32.kappa1 + mesh32.kappa)) < 1e-4
    assert np.max(np.abs(diag32.kappa2 - 3 * mesh32.kappa)) < 1e-4
    assert np.max(np.abs(diag32.F) / np.sqrt(diag32.E * diag32.G)) < 1e-12


def test_intrinsic_and_extrinsic_gauss(diag32, sphere):
    # K built from kappa1 kappa2 + rho equals K + 3 H^2 = rho
    assert np.max(np.abs(diag32.K_extrinsic - diag32.kappa1 * diag32.kappa2)) < 1e-12
    assert np.max(np.abs(diag32.K + 3 * diag32.H**2 - sphere.rho)) < 1e-4


def test_convergence_order(sphere, sol32):
    levels = [150, 300, 600]
    diags = [curvature_diagnostics(build_mesh(sphere, sol32, n, 16)) for n in levels]
    w = [d.weingarten_residual() for d in diags]
    g = [d.gauss_residual(sphere.rho) for d in diags]
    for seq in (w, g):
        assert all(math.log2(a / b) >= 2.0 for a, b in zip(seq, seq[1:]))


def test_rotational_symmetry(diag32):
    for name in ("E", "G", "H", "K", "kappa1", "kappa2"):
        arr = getattr(diag32, name)
        spread = np.max(np.abs(arr - arr[:, :1]))
        assert spread < 1e-12 * max(1.0, np.max(np.abs(arr))), name


def test_unit_normal_is_orthonormal(mesh32):
    der = surface_derivatives(mesh32)
    nu = unit_normal(mesh32.points, der["x_s"], der["x_phi"])
    for other in (mesh32.points, der["x_s"], der["x_phi"]):
        assert np.max(np.abs((nu * other).sum(axis=-1))) < 1e-12
    assert np.allclose((nu * nu).sum(axis=-1), 1.0, atol=1e-14)


def test_killing_norm(mesh32):
    rep = killing_norm_check(mesh32)
    assert rep["passed"]
    assert rep["norm_defect"] < 1e-10
    assert rep["derivative_defect"] < 1e-10
    assert rep["extremal_v_s"] < 1e-8


def test_killing_detects_perturbed_mesh(mesh32):
    rng = np.random.default_rng(7)
    bad = replace(mesh32, points=mesh32.points * (1 + 1e-6 * rng.standard_normal((600, 120, 1))))
    rep = killing_norm_check(bad)
    assert rep["norm_defect"] > 1e-7
    assert not rep["passed"]


def test_geodesic_orbits(mesh32, diag32):
    rep = geodesic_orbit_check(mesh32, diag32)
    assert rep["passed"] and not rep["flags"]
    assert rep["extremal_max"] < 1e-3
    assert rep["generic_min"] > 0.1
    assert len(rep["extremal_s"]) == 2 * mesh32.m


def test_geodesic_flags_coarse_grid(sphere, sol32):
    mesh = build_mesh(sphere, sol32, 4 * 3, 8)
    rep = geodesic_orbit_check(mesh)
    assert not rep["passed"]
    assert any("insufficient resolution" in f for f in rep["flags"])


def test_stereographic_antipode_to_origin(mesh32):
    pole = np.array([0.3, -0.5, 0.1, 0.8])
    proj = stereographic_project(mesh32, pole=pole)
    assert proj.pole_index is None
    # every point maps by the same formula; check it against the axis version
    ax = stereographic_project(mesh32, 4, 1)
    assert ax.points.shape == (600, 120, 3)
    assert ax.metadata()["pole"] == [0.0, 0.0, 0.0, 1.0]
    # an artificial mesh containing the antipode maps it to the origin
    pts = mesh32.points.copy()
    pts[0, 0] = -pole / np.linalg.norm(pole)
    proj2 = stereographic_project(replace(mesh32, points=pts), pole=pole)
    assert np.allclose(proj2.points[0, 0], 0.0, atol=1e-15)


def test_stereographic_is_conformal_inverse(mesh32):
    proj = stereographic_project(mesh32, 2, -1)
    y = proj.points
    r2 = (y * y).sum(axis=-1)
    # inverse map back to the sphere reproduces the mesh
    back = np.empty(mesh32.points.shape)
    back[..., [0, 2, 3]] = 2 * y / (1 + r2)[..., None]
    back[..., 1] = -(r2 - 1) / (r2 + 1)
    assert np.max(np.abs(back - mesh32.points)) < 1e-12


def test_pole_on_surface_refused(mesh32):
    with pytest.raises(DomainError, match="choose another pole"):
        stereographic_project(mesh32, pole=mesh32.points[10, 3])


@pytest.mark.parametrize("index, sign", [(0, 1), (5, 1), (4, 0), (4, 2)])
def test_invalid_pole(mesh32, index, sign):
    with pytest.raises(DomainError):
        stereographic_project(mesh32, index, sign)
