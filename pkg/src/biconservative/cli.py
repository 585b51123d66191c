"""Command-line front end.

Exit codes: 0 success, 1 a ``verify`` check failed, 2 domain error (bad
parameters, outside the oscillatory regime), 3 numeric failure, 64 usage
error, 74 I/O error.  Machine-readable output goes to stdout (or
``--out``); a short human summary goes to stderr.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import platform
import sys

import numpy as np

from . import __version__, kernels
from .closure import nonexistence_report, solve_pair, verify_lemma
from .config import RunConfig, load_config
from .curve import (build_profile_curve, el_residual, lambda_along_path,
                    simplicity_diagnostics, write_curve_csv)
from .errors import DomainError, NumericError
from .oracles import lambda_tanh_sinh
from .quadrature import SQRT2_PI, closure_sample, dirac_limit_value
from .spaceform import (AdmissiblePair, SpaceForm, check_regime, critical_d,
                        enumerate_pairs, solve_extremal_curvatures)
from . import surface

EXIT_OK, EXIT_FAILED, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3, 64, 74

EPILOG = ("exit codes: 0 ok, 1 verify failure, 2 domain error, 3 numeric failure, "
          "64 usage error, 74 I/O error")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _versions() -> dict:
    import scipy
    return {"biconservative": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__, "python": platform.python_version(),
            "backend": kernels.BACKEND}


def _envelope(command: str, cfg: RunConfig, result) -> dict:
    return {"command": command, "config": cfg.to_dict(),
            "tolerances": cfg.tolerances.to_dict(), "versions": _versions(),
            "result": result}


def _emit_json(doc, cfg: RunConfig, stdout) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _say(stderr, *lines) -> None:
    for line in lines:
        print(line, file=stderr)


def _need(cfg: RunConfig, *names) -> None:
    missing = [n for n in names if getattr(cfg, n) is None]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join("--" + n.replace("_", "-") for n in missing))


def _pair(cfg: RunConfig) -> AdmissiblePair:
    _need(cfg, "m", "n")
    return AdmissiblePair(cfg.m, cfg.n)


# commands -----------------------------------------------------------------

def cmd_analyze(cfg: RunConfig, stdout, stderr) -> int:
    _need(cfg, "d")
    space = SpaceForm(cfg.rho)
    d_star = check_regime(space, cfg.d)
    prof = solve_extremal_curvatures(space, cfg.d, cfg.tolerances)
    sample = closure_sample(space, cfg.d, cfg.tolerances)
    result = {"rho": cfg.rho, "d": cfg.d, "d_star": d_star, "regime": "oscillatory",
              "beta": prof.beta, "alpha": prof.alpha, "p": prof.p, "q": prof.q,
              "kappa_min": prof.kappa_min, "kappa_max": prof.kappa_max,
              "period": sample.period, "lambda_value": sample.lambda_value,
              "i_value": sample.i_value, "est_abs_error": sample.est_abs_error,
              "i_in_bounds": bool(math.pi < sample.i_value < SQRT2_PI)}
    _emit_json(_envelope("analyze", cfg, result), cfg, stdout)
    _say(stderr, f"d_star = {d_star:.12g}; kappa in [{prof.kappa_min:.12g}, "
                 f"{prof.kappa_max:.12g}]; I(d) = {sample.i_value:.15g}")
    return EXIT_OK


def cmd_pairs(cfg: RunConfig, stdout, stderr) -> int:
    if cfg.max_m < 1:
        raise DomainError("--max-m must be at least 1")
    pairs = [{"m": p.m, "n": p.n, "target": p.target} for p in enumerate_pairs(cfg.max_m)]
    _emit_json(_envelope("pairs", cfg, {"max_m": cfg.max_m, "pairs": pairs}), cfg, stdout)
    _say(stderr, f"{len(pairs)} admissible pairs with m <= {cfg.max_m}",
         *(f"  ({p['m']}, {p['n']})  2n pi/m = {p['target']:.12f}" for p in pairs[:20]))
    if len(pairs) > 20:
        _say(stderr, "  ...")
    return EXIT_OK


def cmd_solve(cfg: RunConfig, stdout, stderr) -> int:
    pair = _pair(cfg)
    space = SpaceForm(cfg.rho)
    sol = solve_pair(space, pair, cfg.tolerances, strategy="up")
    alt = solve_pair(space, pair, cfg.tolerances, strategy="down")
    result = sol.to_dict()
    result["d_mn_alternate_bracket"] = alt.d_mn
    result["bracket_agreement"] = abs(alt.d_mn - sol.d_mn) / sol.d_mn
    _emit_json(_envelope("solve", cfg, result), cfg, stdout)
    _say(stderr, f"d_{pair.m},{pair.n} = {sol.d_mn:.15g}  residual {sol.residual:.2e}  "
                 f"period {sol.period:.12g}")
    return EXIT_OK


def cmd_scan(cfg: RunConfig, stdout, stderr) -> int:
    from .closure import geometric_grid, scan_i
    space = SpaceForm(cfg.rho)
    if cfg.points < 2 or not cfg.dmax > 1.0001:
        raise DomainError("scan needs --points >= 2 and --dmax > 1.0001 (units of d_star)")
    d_star = critical_d(space)
    grid = geometric_grid(d_star, 1.0001, cfg.dmax, cfg.points)
    rows = [s.to_dict() for s in scan_i(space, grid, cfg.tolerances)]
    vals = [r["i_value"] for r in rows if "i_value" in r]
    result = {"rho": cfg.rho, "d_star": d_star, "samples": rows,
              "monotone_decreasing": all(b < a for a, b in zip(vals, vals[1:])),
              "within_bounds": all(math.pi < v < SQRT2_PI for v in vals),
              "failures": sum("error" in r for r in rows)}
    _emit_json(_envelope("scan", cfg, result), cfg, stdout)
    _say(stderr, f"{len(rows)} samples on [1.0001, {cfg.dmax:g}] d_star; "
                 f"monotone {result['monotone_decreasing']}, "
                 f"bounds {result['within_bounds']}, failures {result['failures']}")
    return EXIT_OK


def cmd_trace(cfg: RunConfig, stdout, stderr) -> int:
    pair = _pair(cfg)
    space = SpaceForm(cfg.rho)
    sol = solve_pair(space, pair, cfg.tolerances)
    samples = max(cfg.samples, 8 * pair.m)
    curve = build_profile_curve(space, sol, samples, cfg.tolerances)
    diag = simplicity_diagnostics(curve)
    summary = {"solution": sol.to_dict(), "closure_gap": curve.closure_gap,
               "psi_gap": curve.psi_gap, "sphere_defect": curve.sphere_defect,
               "el_residual": el_residual(space, curve.trajectory, relative=True),
               "first_integral_max": curve.trajectory.max_defect, **diag}
    if cfg.format == "csv":
        buf = io.StringIO()
        write_curve_csv(curve, buf)
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        else:
            stdout.write(buf.getvalue())
    elif cfg.format == "json":
        summary.update({"s": curve.s.tolist(), "kappa": curve.kappa.tolist(),
                        "psi": curve.psi.tolist(), "points": curve.points.tolist()})
        _emit_json(_envelope("trace", cfg, summary), cfg, stdout)
    else:
        raise DomainError(f"trace supports --format json or csv, not {cfg.format!r}")
    _say(stderr, f"({pair.m},{pair.n}) curve: closure gap {curve.closure_gap:.2e}, "
                 f"winding {diag['winding']}, lobes {diag['lobes']}, "
                 f"self-intersections {diag['self_intersections']}")
    return EXIT_OK


def cmd_mesh(cfg: RunConfig, stdout, stderr) -> int:
    pair = _pair(cfg)
    space = SpaceForm(cfg.rho)
    fmt = cfg.format.lower()
    if fmt == "obj" and not cfg.project:
        raise DomainError("OBJ output needs --project (OBJ holds R^3 meshes only)")
    sol = solve_pair(space, pair, cfg.tolerances)
    mesh = surface.build_mesh(space, sol, cfg.ns, cfg.nphi, cfg.tolerances)
    diag = surface.curvature_diagnostics(mesh)
    obj = (surface.stereographic_project(mesh, cfg.pole_axis, cfg.pole_sign)
           if cfg.project else mesh)
    target = cfg.out if cfg.out else stdout
    if fmt == "json":
        doc = surface.mesh_document(obj, cfg.tolerances, cfg.to_dict(), diag)
        doc["command"] = "mesh"
        if cfg.out:
            with open(cfg.out, "w", encoding="utf-8") as fh:
                json.dump(doc, fh, sort_keys=True)
                fh.write("\n")
        else:
            json.dump(doc, stdout, sort_keys=True)
            stdout.write("\n")
    else:
        surface.export(obj, fmt, target, cfg.tolerances, cfg.to_dict(), diag)
    s = diag.summary(mesh)
    _say(stderr, f"({pair.m},{pair.n}) mesh {cfg.ns}x{cfg.nphi}: "
                 f"max|3k1+k2| {s['weingarten_residual']:.2e}, "
                 f"max|K+3H^2-rho| {s['gauss_residual']:.2e}, "
                 f"sphere defect {s['sphere_defect']:.2e}"
                 + (f", projected from pole axis {cfg.pole_axis} sign {cfg.pole_sign:+d}"
                    if cfg.project else ""))
    return EXIT_OK


def _check(name, value, limit, passed=None) -> dict:
    ok = bool(value < limit) if passed is None else bool(passed)
    return {"name": name, "value": value, "limit": limit, "passed": ok}


def _verify_lemma(space, cfg):
    rep = verify_lemma(space, cfg.points, 1.0001, 1e4, cfg.tolerances)
    return [
        _check("lemma_monotone", float(rep.monotone), None, rep.monotone),
        _check("lemma_bounds_violations", len(rep.bound_violations), 1),
        _check("lemma_scan_failures", len(rep.failures), 1),
        _check("near_d_star_gap", abs(SQRT2_PI - rep.near_d_star), 1e-3),
        _check("large_d_gap", abs(rep.large_d - math.pi), 1e-2),
        _check("dirac_limit_error", abs(dirac_limit_value(space) - SQRT2_PI), 1e-12),
    ]


def _verify_curve(space, cfg, pair):
    tol = cfg.tolerances
    sol = solve_pair(space, pair, tol)
    alt = solve_pair(space, pair, tol, strategy="down")
    curve = build_profile_curve(space, sol, tol=tol)
    diag = simplicity_diagnostics(curve)
    traj = curve.trajectory
    lam_quad = sol.target / math.sqrt(space.rho * sol.d_mn)
    lam_ode = lambda_along_path(space, sol.d_mn, tol)
    lam_ts = lambda_tanh_sinh(space, sol.d_mn, tol)
    return [
        _check("closure_residual", abs(sol.residual), tol.closure_residual),
        _check("bracket_agreement", abs(alt.d_mn - sol.d_mn) / sol.d_mn, 1e-9),
        _check("curve_closure_gap", curve.closure_gap, tol.curve_closure / math.sqrt(space.rho)),
        _check("psi_total_gap", abs(curve.psi_gap), tol.curve_closure),
        _check("lobes", diag["lobes"], None, diag["lobes"] == pair.m),
        _check("winding", diag["winding"], None, diag["winding"] == pair.n),
        _check("self_intersections", diag["self_intersections"], None,
               diag["self_intersections"] > 0),
        _check("first_integral", traj.max_defect, tol.first_integral),
        _check("euler_lagrange", el_residual(space, traj, relative=True),
               tol.euler_lagrange),
        _check("lambda_ode_vs_quadrature", abs(lam_ode / lam_quad - 1.0), 1e-7),
        _check("lambda_oracle_vs_quadrature", abs(lam_ts / lam_quad - 1.0), 1e-7),
    ]


def _verify_surface(space, cfg, pair):
    tol = cfg.tolerances
    sol = solve_pair(space, pair, tol)
    mesh = surface.build_mesh(space, sol, cfg.ns, cfg.nphi, tol)
    diag = surface.curvature_diagnostics(mesh)
    kill = surface.killing_norm_check(mesh, tol)
    geo = surface.geodesic_orbit_check(mesh, diag, tol)
    return [
        _check("sphere_defect", mesh.sphere_defect, 1e-10),
        _check("weingarten_residual", diag.weingarten_residual(), 1e-4),
        _check("gauss_residual", diag.gauss_residual(space.rho), 1e-4),
        _check("mean_vs_kappa", diag.mean_vs_kappa(mesh), 1e-4),
        _check("killing_norm", kill["norm_defect"], 1e-10),
        _check("killing_derivative", kill["derivative_defect"], 1e-10),
        _check("extremal_orbit_geodesic_curvature", geo["extremal_max"], 1e-3),
        _check("generic_orbit_geodesic_curvature", geo["generic_min"], None,
               not geo["flags"]),
    ]


def cmd_verify(cfg: RunConfig, stdout, stderr) -> int:
    space = SpaceForm(cfg.rho)
    suites = ("lemma", "curve", "surface") if cfg.suite == "all" else (cfg.suite,)
    for s in suites:
        if s not in ("lemma", "curve", "surface"):
            raise UsageError(f"unknown suite {s!r}; use lemma, curve, surface or all")
    pair = AdmissiblePair(cfg.m, cfg.n) if cfg.m is not None and cfg.n is not None \
        else AdmissiblePair(3, 2)
    checks = {}
    for s in suites:
        if s == "lemma":
            checks[s] = _verify_lemma(space, cfg)
        elif s == "curve":
            checks[s] = _verify_curve(space, cfg, pair)
        else:
            checks[s] = _verify_surface(space, cfg, pair)
    passed = all(c["passed"] for rows in checks.values() for c in rows)
    result = {"rho": cfg.rho, "pair": [pair.m, pair.n], "passed": passed, "suites": checks}
    _emit_json(_envelope("verify", cfg, result), cfg, stdout)
    for s, rows in checks.items():
        for c in rows:
            _say(stderr, f"{'PASS' if c['passed'] else 'FAIL'} {s}.{c['name']}: {c['value']!r}")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_nonexist(cfg: RunConfig, stdout, stderr) -> int:
    space = SpaceForm(cfg.rho)
    d_samples = [float(v) for v in np.geomspace(1e-3, 1e3, 13)]
    rep = nonexistence_report(space, d_samples)
    try:
        solve_pair(space, (3, 2), cfg.tolerances)
        refused = False
    except DomainError:
        refused = True
    rep["solve_refused"] = refused
    rep["min_integrand"] = min(r["min_integrand"] for r in rep["samples"])
    _emit_json(_envelope("nonexist", cfg, rep), cfg, stdout)
    _say(stderr, f"rho = {cfg.rho:g}: {rep['conclusion']} "
                 f"(min sampled integrand {rep['min_integrand']:.3e})")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "pairs": cmd_pairs, "solve": cmd_solve,
            "scan": cmd_scan, "trace": cmd_trace, "mesh": cmd_mesh,
            "verify": cmd_verify, "nonexist": cmd_nonexist}


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="FILE",
                        help="key=value file; command-line flags override it")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--rho", type=float, help="ambient curvature (default 1)")

    parser = _Parser(prog="biconservative", epilog=EPILOG,
                     description="Closed biconservative surfaces of the 3-sphere.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, epilog=EPILOG)

    p = add("analyze", "roots of Q, period, Lambda(d) and I(d) for one d")
    p.add_argument("--d", type=float, required=True)
    p = add("pairs", "admissible (m, n) pairs")
    p.add_argument("--max-m", type=int, dest="max_m")
    for name, text in (("solve", "solve I(d) = 2 n pi / m"),
                       ("trace", "closed profile curve of a pair"),
                       ("mesh", "surface mesh of a pair")):
        p = add(name, text)
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        if name == "trace":
            p.add_argument("--samples", type=int)
            p.add_argument("--format", choices=["json", "csv"])
        if name == "mesh":
            p.add_argument("--ns", type=int)
            p.add_argument("--nphi", type=int)
            p.add_argument("--project", action="store_const", const=True,
                           help="stereographic projection to R^3")
            p.add_argument("--pole-axis", type=int, dest="pole_axis", choices=[1, 2, 3, 4])
            p.add_argument("--pole-sign", type=int, dest="pole_sign", choices=[1, -1])
            p.add_argument("--format", choices=["json", "csv", "obj"])
    p = add("scan", "sample I(d) on a geometric grid")
    p.add_argument("--points", type=int)
    p.add_argument("--dmax", type=float, help="upper end of the grid in units of d_star")
    p = add("verify", "run invariant checks; exits 1 on any failure")
    p.add_argument("--suite", choices=["lemma", "surface", "curve", "all"])
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--ns", type=int)
    p.add_argument("--nphi", type=int)
    p.add_argument("--points", type=int)
    add("nonexist", "positivity of the closure integrand for rho <= 0")
    return parser


def _config_from(args) -> RunConfig:
    flags = {k: v for k, v in vars(args).items() if k not in ("config", "command")}
    try:
        return load_config(args.config, **flags)
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"bad configuration: {exc}") from exc


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        cfg = _config_from(args)
        return COMMANDS[args.command](cfg, stdout, stderr)
    except UsageError as exc:
        _say(stderr, f"biconservative {args.command}: usage error: {exc}")
        return EXIT_USAGE
    except DomainError as exc:
        _say(stderr, f"biconservative {args.command}: domain error: {exc}")
        return EXIT_DOMAIN
    except NumericError as exc:
        _say(stderr, f"biconservative {args.command}: numeric failure: {exc} "
                     f"{getattr(exc, 'details', {})}")
        return EXIT_NUMERIC
    except OSError as exc:
        _say(stderr, f"biconservative {args.command}: {exc}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
