"""Rotational surface meshes in the 3-sphere and their discrete geometry.

The surface is ``x(s, phi) = (a cos phi, a sin phi, r sin psi, r cos psi)``
with ``a(s), r(s), psi(s)`` taken from the solved profile curve.  Every
phi-derivative and every first s-derivative is analytic.  Second
s-derivatives are only needed for the scalar factors ``a, r, psi``; they
come from a sixth-order periodic centred difference of the analytic first
derivatives.
"""
from __future__ import annotations

import contextlib
import csv
import importlib.resources
import json
import math
import platform
from dataclasses import dataclass

import numpy as np

from . import __version__, kernels
from .config import DEFAULT_TOLERANCES, Tolerances
from .curve import integrate_u
from .errors import DomainError, NumericError
from .quadrature import lambda_of_d
from .spaceform import SpaceForm

SPHERE_DEFECT = 1e-10


def _profile_factors(rho, d, u, u_s):
    """``a, r, psi_s`` and the analytic s-derivatives ``a_s, r_s``."""
    den = 16.0 * d * u**3 - rho
    a = 1.0 / (4.0 * math.sqrt(d) * u**1.5)
    r = np.sqrt(den) / (4.0 * math.sqrt(rho * d) * u**1.5)
    psi_s = -12.0 * math.sqrt(rho * d) * u**3.5 / den
    a_s = -1.5 * a * u_s / u
    r_s = r * u_s * (24.0 * d * u * u / den - 1.5 / u)
    return a, r, psi_s, a_s, r_s


_STENCILS = {
    2: (np.array([1.0]), 2.0),
    4: (np.array([8.0, -1.0]), 12.0),
    6: (np.array([45.0, -9.0, 1.0]), 60.0),
}


def periodic_derivative(f: np.ndarray, h: float, order: int = 6) -> np.ndarray:
    """Centred difference of samples of a periodic function (order 2, 4 or 6)."""
    coef, norm = _STENCILS[order]
    out = np.zeros_like(f)
    for k, c in enumerate(coef, start=1):
        out += c * (np.roll(f, -k) - np.roll(f, k))
    return out / (norm * h)


@dataclass(frozen=True)
class SurfaceMesh:
    rho: float
    d: float
    m: int
    n: int
    period: float
    lambda_value: float
    i_value: float
    s_grid: np.ndarray
    phi_grid: np.ndarray
    u: np.ndarray
    u_s: np.ndarray
    psi: np.ndarray
    points: np.ndarray

    @property
    def n_s(self) -> int:
        return len(self.s_grid)

    @property
    def n_phi(self) -> int:
        return len(self.phi_grid)

    @property
    def kappa(self) -> np.ndarray:
        """Per-vertex curvature of the profile curve through each vertex."""
        return np.broadcast_to((self.u * self.u)[:, None], (self.n_s, self.n_phi))

    @property
    def kappa_rows(self) -> np.ndarray:
        return self.u * self.u

    @property
    def sphere_defect(self) -> float:
        return float(np.max(np.abs((self.points**2).sum(axis=-1) - 1.0 / self.rho))
                     * self.rho)

    @property
    def seam_gap(self) -> float:
        return float(np.max(np.linalg.norm(self.points[-1] - self.points[0], axis=-1)))

    def metadata(self) -> dict:
        return {"rho": self.rho, "d": self.d, "m": self.m, "n": self.n,
                "period": self.period, "lambda_value": self.lambda_value,
                "i_value": self.i_value, "n_s": self.n_s, "n_phi": self.n_phi}


def build_mesh(space: SpaceForm, solution, n_s: int = 600, n_phi: int = 120,
               tol: Tolerances = DEFAULT_TOLERANCES) -> SurfaceMesh:
    """Evaluate the surface on ``n_s x n_phi`` points over ``[0, m period] x [0, 2 pi)``."""
    m, n = solution.pair.m, solution.pair.n
    if n_s < 4 * m or n_phi < 8:
        raise DomainError(f"grid too coarse: need n_s >= 4m = {4 * m} and n_phi >= 8, "
                          f"got n_s = {n_s}, n_phi = {n_phi}")
    rho, d = space.rho, solution.d_mn
    traj = integrate_u(space, d, m * solution.period, tol, samples=n_s)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    a, r, _, _, _ = _profile_factors(rho, d, traj.u, traj.u_s)
    cphi, sphi = np.cos(phi), np.sin(phi)
    points = np.empty((n_s, n_phi, 4))
    points[..., 0] = a[:, None] * cphi
    points[..., 1] = a[:, None] * sphi
    points[..., 2] = (r * np.sin(traj.psi))[:, None]
    points[..., 3] = (r * np.cos(traj.psi))[:, None]
    lam = lambda_of_d(space, d, tol)
    mesh = SurfaceMesh(rho, d, m, n, solution.period, lam, math.sqrt(rho * d) * lam,
                       traj.s, phi, traj.u, traj.u_s, traj.psi, points)
    if mesh.sphere_defect >= SPHERE_DEFECT:
        raise NumericError("mesh points leave the sphere", defect=mesh.sphere_defect)
    if mesh.seam_gap >= tol.curve_closure / math.sqrt(rho):
        raise NumericError("mesh seam does not close", seam_gap=mesh.seam_gap)
    return mesh


@dataclass(frozen=True)
class CurvatureDiagnostics:
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    H: np.ndarray
    K: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    K_extrinsic: np.ndarray
    orientation: int

    def weingarten_residual(self) -> float:
        return float(np.max(np.abs(3.0 * self.kappa1 + self.kappa2)))

    def gauss_residual(self, rho: float) -> float:
        return float(np.max(np.abs(self.K + 3.0 * self.H**2 - rho)))

    def mean_vs_kappa(self, mesh: SurfaceMesh) -> float:
        """Max ``|H - kappa|`` along the profile row ``phi = 0``."""
        return float(np.max(np.abs(self.H[:, 0] - mesh.kappa_rows)))

    def summary(self, mesh: SurfaceMesh) -> dict:
        return {"weingarten_residual": self.weingarten_residual(),
                "gauss_residual": self.gauss_residual(mesh.rho),
                "mean_vs_kappa": self.mean_vs_kappa(mesh),
                "sphere_defect": mesh.sphere_defect,
                "orientation": self.orientation}


def _cross4(a, b, c):
    """Vector orthogonal to ``a, b, c`` in R^4 (generalized cross product)."""
    def minor(i, j, k):
        return (a[..., i] * (b[..., j] * c[..., k] - b[..., k] * c[..., j])
                - a[..., j] * (b[..., i] * c[..., k] - b[..., k] * c[..., i])
                + a[..., k] * (b[..., i] * c[..., j] - b[..., j] * c[..., i]))
    return np.stack([minor(1, 2, 3), -minor(0, 2, 3), minor(0, 1, 3), -minor(0, 1, 2)],
                    axis=-1)


def _dot(a, b):
    return np.einsum("...i,...i->...", a, b)


def surface_derivatives(mesh: SurfaceMesh) -> dict:
    """``x_s, x_phi`` analytic; ``x_ss`` from differenced scalar factors."""
    rho, d = mesh.rho, mesh.d
    a, r, psi_s, a_s, r_s = _profile_factors(rho, d, mesh.u, mesh.u_s)
    h = mesh.s_grid[1] - mesh.s_grid[0]
    core = slice(0, mesh.n_s - 1)   # last row duplicates the first

    def d_s(f):
        out = np.empty_like(f)
        out[core] = periodic_derivative(f[core], h)
        out[-1] = out[0]
        return out

    a_ss, r_ss, psi_ss = d_s(a_s), d_s(r_s), d_s(psi_s)
    sp, cp = np.sin(mesh.psi), np.cos(mesh.psi)
    cphi, sphi = np.cos(mesh.phi_grid), np.sin(mesh.phi_grid)
    shape = (mesh.n_s, mesh.n_phi, 4)

    def rotational(f_rows, g3, g4, c1, c2):
        out = np.empty(shape)
        out[..., 0] = f_rows[:, None] * c1
        out[..., 1] = f_rows[:, None] * c2
        out[..., 2] = g3[:, None]
        out[..., 3] = g4[:, None]
        return out

    zero = np.zeros(mesh.n_s)
    x_s = rotational(a_s, r_s * sp + r * psi_s * cp, r_s * cp - r * psi_s * sp, cphi, sphi)
    radial = r_ss - r * psi_s**2
    tangential = 2.0 * r_s * psi_s + r * psi_ss
    x_ss = rotational(a_ss, radial * sp + tangential * cp, radial * cp - tangential * sp,
                      cphi, sphi)
    x_phi = rotational(a, zero, zero, -sphi, cphi)
    x_sphi = rotational(a_s, zero, zero, -sphi, cphi)
    x_phiphi = rotational(a, zero, zero, -cphi, -sphi)
    return {"x_s": x_s, "x_phi": x_phi, "x_ss": x_ss, "x_sphi": x_sphi,
            "x_phiphi": x_phiphi}


def unit_normal(x, x_s, x_phi):
    """Unit normal inside ``T_x S^3``: cross product cleaned by Gram-Schmidt."""
    basis = []
    for v in (x, x_s, x_phi):
        w = v.copy()
        for b in basis:
            w -= _dot(w, b)[..., None] * b
        basis.append(w / np.linalg.norm(w, axis=-1, keepdims=True))
    nrm = _cross4(x, x_s, x_phi)
    for b in basis:
        nrm -= _dot(nrm, b)[..., None] * b
    return nrm / np.linalg.norm(nrm, axis=-1, keepdims=True)


def curvature_diagnostics(mesh: SurfaceMesh) -> CurvatureDiagnostics:
    """First and second fundamental forms, principal, mean and Gauss curvature.

    The normal is oriented so that the mean curvature is positive on
    average.  The principal curvature whose eigendirection is closer to
    ``d/ds`` (the meridian) is reported as ``kappa1``.
    """
    der = surface_derivatives(mesh)
    x_s, x_phi = der["x_s"], der["x_phi"]
    E, F, G = _dot(x_s, x_s), _dot(x_s, x_phi), _dot(x_phi, x_phi)
    det = E * G - F * F
    if np.any(det <= 0):
        raise NumericError("degenerate first fundamental form (EG - F^2 <= 0)")
    N = unit_normal(mesh.points, x_s, x_phi)
    e, f, g = _dot(der["x_ss"], N), _dot(der["x_sphi"], N), _dot(der["x_phiphi"], N)
    H = (e * G - 2.0 * f * F + g * E) / (2.0 * det)
    orientation = 1 if H.sum() >= 0 else -1
    e, f, g, H = orientation * e, orientation * f, orientation * g, orientation * H
    K_ext = (e * g - f * f) / det
    # shape operator I^{-1} II per vertex
    S = np.empty(E.shape + (2, 2))
    S[..., 0, 0] = (G * e - F * f) / det
    S[..., 0, 1] = (G * f - F * g) / det
    S[..., 1, 0] = (E * f - F * e) / det
    S[..., 1, 1] = (E * g - F * f) / det
    vals, vecs = np.linalg.eig(S)
    vals, vecs = vals.real, vecs.real
    # cosine (in the metric) between each eigenvector and d/ds
    metric_s = vecs[..., 0, :] * E[..., None] + vecs[..., 1, :] * F[..., None]
    norm_v = np.sqrt(E[..., None] * vecs[..., 0, :]**2
                     + 2 * F[..., None] * vecs[..., 0, :] * vecs[..., 1, :]
                     + G[..., None] * vecs[..., 1, :]**2)
    align = np.abs(metric_s) / (norm_v * np.sqrt(E)[..., None])
    idx = np.argmax(align, axis=-1)
    k1 = np.take_along_axis(vals, idx[..., None], axis=-1)[..., 0]
    k2 = np.take_along_axis(vals, (1 - idx)[..., None], axis=-1)[..., 0]
    return CurvatureDiagnostics(E, F, G, e, f, g, H, k1 * k2 + mesh.rho, k1, k2,
                                K_ext, orientation)


def killing_norm_check(mesh: SurfaceMesh, tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """Norm and derivative of the rotation Killing field along the surface.

    ``V = sqrt(d) |x_phi|`` is read from the mesh points; the identity
    ``V = 1 / (4 kappa^{3/4})`` is checked per vertex in relative form.
    ``V_s = sqrt(d) <x_phi, x_sphi> / |x_phi|`` is compared against
    ``-3 kappa_s / (16 kappa^{7/4})``, both on the mesh and on the rows at
    exact curvature extrema (re-integrated), where it must vanish.
    """
    rho, d = mesh.rho, mesh.d
    x1, x2 = mesh.points[..., 0], mesh.points[..., 1]
    norm_phi = np.sqrt(x1 * x1 + x2 * x2)          # |(-x2, x1, 0, 0)|
    u = mesh.u[:, None]
    norm_defect = float(np.max(np.abs(math.sqrt(d) * norm_phi * 4.0 * u**1.5 - 1.0)))
    der = surface_derivatives(mesh)
    x_phi = np.stack([-x2, x1, np.zeros_like(x1), np.zeros_like(x1)], axis=-1)
    v_s = math.sqrt(d) * _dot(x_phi, der["x_sphi"]) / norm_phi
    kappa = mesh.kappa_rows
    kappa_s = 2.0 * mesh.u * mesh.u_s
    expected = (-3.0 * kappa_s / (16.0 * kappa**1.75))[:, None]
    scale = float(np.max(np.abs(expected))) or 1.0
    deriv_defect = float(np.max(np.abs(v_s - expected))) / scale
    s_ext = 0.5 * mesh.period * np.arange(1, 2 * mesh.m + 1)
    traj = integrate_u(SpaceForm(rho), d, float(s_ext[-1]), tol,
                       s_grid=np.r_[0.0, s_ext])
    _, _, _, a_s_ext, _ = _profile_factors(rho, d, traj.u[1:], traj.u_s[1:])
    extremal_vs = float(np.max(np.abs(math.sqrt(d) * a_s_ext)))
    return {"norm_defect": norm_defect, "derivative_defect": deriv_defect,
            "extremal_v_s": extremal_vs, "extremal_s": s_ext.tolist(),
            "passed": bool(norm_defect < 1e-10 and deriv_defect < 1e-10
                           and extremal_vs < 1e-8)}


def _orbit_curvature(E, F, G, G_s):
    # |k_g| of the phi-circle, from Gamma^s_phiphi = -G G_s / (2 (EG - F^2))
    # (F_phi = G_phi = 0 by rotational symmetry)
    det = E * G - F * F
    gamma = -G * G_s / (2.0 * det)
    return np.abs(gamma) * np.sqrt(det) / G**1.5


def geodesic_orbit_check(mesh: SurfaceMesh, diagnostics: CurvatureDiagnostics | None = None,
                         tol: Tolerances = DEFAULT_TOLERANCES) -> dict:
    """Geodesic curvature of rotation orbits at curvature extrema and elsewhere.

    The first fundamental form is sampled on re-integrated rows
    ``s0 + j h`` (``j = -2..2``, ``h`` the mesh spacing) around each
    extremal ``s0 = k period / 2`` and around generic rows
    ``s0 = period / 4 + k period / 2``; G_s is the five-point difference.
    """
    diagnostics = diagnostics or curvature_diagnostics(mesh)
    rho, d = mesh.rho, mesh.d
    h = mesh.s_grid[1] - mesh.s_grid[0]
    flags = []
    rows_per_period = mesh.period / h
    if rows_per_period < 16:
        flags.append("insufficient resolution: fewer than 16 rows per curvature period")
    k = np.arange(1, 2 * mesh.m + 1)
    centres = {"extremal": 0.5 * mesh.period * k,
               "generic": 0.25 * mesh.period + 0.5 * mesh.period * (k - 1)}
    offsets = h * np.arange(-2, 3)
    out = {}
    for name, s0 in centres.items():
        grid = (s0[:, None] + offsets).ravel()
        # u has period ``period``: fold stencil points below 0 forward
        grid = np.where(grid < 0.0, grid + mesh.period, grid)
        order = np.argsort(grid)
        traj = integrate_u(SpaceForm(rho), d, float(grid.max()), tol,
                           s_grid=np.r_[0.0, grid[order]])
        u = np.empty_like(grid)
        u_s = np.empty_like(grid)
        u[order], u_s[order] = traj.u[1:], traj.u_s[1:]
        a, r, psi_s, a_s, r_s = _profile_factors(rho, d, u, u_s)
        G = (a * a).reshape(-1, 5)
        E = (a_s**2 + r_s**2 + (r * psi_s) ** 2).reshape(-1, 5)
        G_s = (G[:, 0] - 8 * G[:, 1] + 8 * G[:, 3] - G[:, 4]) / (12.0 * h)
        out[name] = _orbit_curvature(E[:, 2], 0.0, G[:, 2], G_s)
    # the same quantity straight from the mesh's fundamental form
    G_rows = diagnostics.G[:-1, 0]
    mesh_kg = _orbit_curvature(diagnostics.E[:-1, 0], diagnostics.F[:-1, 0], G_rows,
                               periodic_derivative(G_rows, h))
    extremal_max = float(out["extremal"].max())
    generic_min = float(out["generic"].min())
    if not generic_min > 10.0 * max(extremal_max, 1e-12):
        flags.append("insufficient resolution: generic and extremal orbits not separated")
    return {"extremal_max": extremal_max, "generic_min": generic_min,
            "extremal_s": centres["extremal"].tolist(),
            "mesh_row_max": float(mesh_kg.max()),
            "rows_per_period": float(rows_per_period), "flags": flags,
            "passed": bool(extremal_max < 1e-3 and not flags)}


@dataclass(frozen=True)
class ProjectedMesh:
    source: SurfaceMesh
    points: np.ndarray
    pole: tuple
    pole_index: int | None
    pole_sign: int | None

    def metadata(self) -> dict:
        meta = self.source.metadata()
        meta.update({"pole": list(self.pole), "pole_index": self.pole_index,
                     "pole_sign": self.pole_sign})
        return meta


def stereographic_project(mesh: SurfaceMesh, pole_index: int = 4, pole_sign: int = 1,
                          pole=None) -> ProjectedMesh:
    """Project ``S^3(rho)`` minus a pole onto R^3.

    The pole is ``pole_sign / sqrt(rho)`` on axis ``pole_index`` (1..4)
    unless an explicit unit vector ``pole`` is given.  With ``P`` the unit
    pole and ``y = sqrt(rho) x``, the image is
    ``(y - <y, P> P) / (1 - <y, P>)`` written in an orthonormal basis of
    ``P``'s complement; for an axis pole this is the other three
    coordinates over ``1 - sqrt(rho) x_pole pole_sign`` (times 1/sqrt(rho)).
    """
    rho = mesh.rho
    if pole is None:
        if pole_index not in (1, 2, 3, 4) or pole_sign not in (1, -1):
            raise DomainError("pole_index must be 1..4 and pole_sign +1 or -1")
        P = np.zeros(4)
        P[pole_index - 1] = float(pole_sign)
    else:
        P = np.asarray(pole, dtype=float)
        P = P / np.linalg.norm(P)
        pole_index = pole_sign = None
    y = mesh.points * math.sqrt(rho)
    dist = np.linalg.norm(y - P, axis=-1) / math.sqrt(rho)
    if dist.min() < 1e-6 / math.sqrt(rho):
        raise DomainError(f"mesh passes within {dist.min():.3g} of the projection pole; "
                          "choose another pole axis or sign")
    if pole_index is not None:
        keep = [i for i in range(4) if i != pole_index - 1]
        comp = np.eye(4)[keep]
    else:
        # orthonormal basis of P's complement via QR on [P | I]
        qmat, _ = np.linalg.qr(np.column_stack([P, np.eye(4)]))
        comp = qmat[:, 1:4].T
    t = _dot(y, P)
    proj = (y @ comp.T) / (1.0 - t)[..., None] / math.sqrt(rho)
    return ProjectedMesh(mesh, proj, tuple(float(v) for v in P), pole_index, pole_sign)


def _faces(n_rows: int, n_phi: int) -> np.ndarray:
    i = np.arange(n_rows)[:, None]
    j = np.arange(n_phi)[None, :]
    i1, j1 = (i + 1) % n_rows, (j + 1) % n_phi
    quad = np.stack([i * n_phi + j, i1 * n_phi + j, i1 * n_phi + j1, i * n_phi + j1],
                    axis=-1)
    return quad.reshape(-1, 4)


def _signed_volume(verts: np.ndarray, faces: np.ndarray) -> float:
    a, b, c, d = (verts[faces[:, k]] for k in range(4))
    return float((np.einsum("ij,ij->i", a, np.cross(b, c))
                  + np.einsum("ij,ij->i", a, np.cross(c, d))).sum() / 6.0)


def obj_geometry(projected: ProjectedMesh):
    """Seam-welded vertices (s-major) and quad faces with positive volume."""
    src = projected.source
    n_rows = src.n_s - 1
    verts = projected.points[:n_rows].reshape(-1, 3)
    faces = _faces(n_rows, src.n_phi)
    if _signed_volume(verts, faces) < 0:
        faces = faces[:, ::-1]
    return verts, faces


def _versions() -> dict:
    import scipy
    return {"biconservative": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__, "python": platform.python_version(),
            "backend": kernels.BACKEND}


def mesh_document(obj, tolerances: Tolerances = DEFAULT_TOLERANCES,
                  config: dict | None = None, diagnostics: CurvatureDiagnostics | None = None
                  ) -> dict:
    """JSON-ready description of a mesh or projected mesh."""
    projected = isinstance(obj, ProjectedMesh)
    mesh = obj.source if projected else obj
    doc = {"kind": "projected_mesh" if projected else "mesh",
           "metadata": obj.metadata(), "tolerances": tolerances.to_dict(),
           "config": config or {}, "versions": _versions(),
           "s_grid": mesh.s_grid.tolist(), "phi_grid": mesh.phi_grid.tolist(),
           "kappa": mesh.kappa_rows.tolist(), "psi": mesh.psi.tolist(),
           "points": obj.points.tolist()}
    if diagnostics is not None:
        doc["diagnostics"] = diagnostics.summary(mesh)
    return doc


def mesh_schema() -> dict:
    """JSON Schema that every JSON mesh export satisfies."""
    text = importlib.resources.files(__package__).joinpath("schema/mesh.schema.json").read_text()
    return json.loads(text)


@contextlib.contextmanager
def _sink(target, newline=None):
    # a path is opened (errors propagate unchanged); file objects pass through
    if hasattr(target, "write"):
        yield target
    else:
        with open(target, "w", encoding="utf-8", newline=newline) as fh:
            yield fh


def export(obj, fmt: str, path, tolerances: Tolerances = DEFAULT_TOLERANCES,
           config: dict | None = None, diagnostics: CurvatureDiagnostics | None = None
           ) -> None:
    """Write ``obj`` (SurfaceMesh or ProjectedMesh) as OBJ, CSV or JSON.

    ``path`` may be a filesystem path or an open text file.
    """
    fmt = fmt.lower()
    projected = isinstance(obj, ProjectedMesh)
    mesh = obj.source if projected else obj
    if fmt == "obj":
        if not projected:
            raise DomainError("OBJ export needs a projected (R^3) mesh; "
                              "use stereographic_project first")
        verts, faces = obj_geometry(obj)
        with _sink(path, newline="\n") as fh:
            fh.write(f"# biconservative surface m={mesh.m} n={mesh.n} rho={mesh.rho!r} "
                     f"d={mesh.d!r} pole={list(obj.pole)}\n")
            fh.writelines(f"v {x:.17g} {y:.17g} {z:.17g}\n" for x, y, z in verts)
            fh.writelines(f"f {a + 1} {b + 1} {c + 1} {e + 1}\n" for a, b, c, e in faces)
    elif fmt == "csv":
        diagnostics = diagnostics or curvature_diagnostics(mesh)
        dim = obj.points.shape[-1]
        coords = [f"y{i + 1}" for i in range(dim)] if projected else \
                 [f"x{i + 1}" for i in range(dim)]
        with _sink(path, newline="") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["s", "phi", *coords, "kappa", "H", "K", "kappa1", "kappa2"])
            kap = mesh.kappa
            for i in range(mesh.n_s):
                for j in range(mesh.n_phi):
                    vals = (mesh.s_grid[i], mesh.phi_grid[j], *obj.points[i, j],
                            kap[i, j], diagnostics.H[i, j], diagnostics.K[i, j],
                            diagnostics.kappa1[i, j], diagnostics.kappa2[i, j])
                    w.writerow([f"{v:.17g}" for v in vals])
    elif fmt == "json":
        doc = mesh_document(obj, tolerances, config, diagnostics)
        with _sink(path) as fh:
            json.dump(doc, fh, sort_keys=True)
            fh.write("\n")
    else:
        raise DomainError(f"unknown export format {fmt!r}; use obj, csv or json")
