"""Command-line front end.

Subcommands: gen (write a mesh), check-mesh (per-element shape report),
solve (Poisson solve against a manufactured solution), converge
(refinement study), error-eq (discrete error identity residual), ineq
(inequality suite).  Every output file embeds the fully resolved
configuration; runs with the same configuration and seed are
byte-identical except for the timestamp line.

Exit codes: 0 success, 1 invalid configuration (single-line error on
stderr), 2 numerical failure.
"""
from __future__ import annotations

import argparse
import datetime
import io
import json
import sys

import numpy as np

from . import analysis, ineq
from .core import backend_name
from .errors import DegenerateElement, ParseError, SolverStalled, ValidationError
from .geometry import check_assumptions, mesh_conv_counts
from .meshgen import CutLine, read_mesh, write_mesh
from .system import solve_poisson
from .vem import StabKind


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); config errors are exit 1
        raise _ConfigError(message)


def _parse_cut(text: str) -> CutLine:
    parts = text.split(",")
    if len(parts) != 4:
        raise _ConfigError(f"--cut needs x0,y0,x1,y1 (got {text!r})")
    try:
        x0, y0, x1, y1 = map(float, parts)
    except ValueError as exc:
        raise _ConfigError(f"--cut: {exc}") from exc
    return CutLine((x0, y0), (x1, y1))


def _parse_levels(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = map(int, text.split("..", 1))
            levels = analysis.default_levels(lo, hi)
            if levels[-1] != hi:
                raise _ConfigError(f"--levels {text}: end must be start times a power of 2")
            return levels
        return [int(p) for p in text.split(",")]
    except ValueError as exc:
        raise _ConfigError(f"--levels: {exc}") from exc


def _solution(name: str) -> analysis.ManufacturedSolution:
    if name not in analysis.SOLUTIONS:
        known = ", ".join(sorted(analysis.SOLUTIONS))
        raise _ConfigError(f"unknown solution {name!r} (known: {known})")
    return analysis.SOLUTIONS[name]


def _stab(name: str) -> StabKind:
    try:
        return StabKind.parse(name)
    except ValueError as exc:
        raise _ConfigError(str(exc)) from exc


def _mesh_from_args(args) -> tuple:
    if getattr(args, "infile", None):
        mesh = read_mesh(args.infile)
        return mesh, {"in": args.infile}
    if args.family is None:
        raise _ConfigError("give either --in or --family")
    cut = _parse_cut(args.cut) if args.cut else None
    if args.family == "cut" and cut is None:
        raise _ConfigError("--family cut needs --cut x0,y0,x1,y1")
    mesh = analysis.build_family_mesh(args.family, args.n, cut, args.fraction)
    cfg = {"family": args.family, "n": args.n}
    if cut:
        cfg["cut"] = args.cut
    if args.family == "short_edge":
        cfg["fraction"] = args.fraction
    return mesh, cfg


def _emit(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _timestamp() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def build_parser() -> _Parser:
    parser = _Parser(prog="vemcut", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a mesh file")
    p_gen.add_argument("--family", required=True, choices=["uniform", "cut", "short_edge"])
    p_gen.add_argument("--n", type=int, required=True, help="cells per side")
    p_gen.add_argument("--cut", help="cut line x0,y0,x1,y1 (family cut)")
    p_gen.add_argument("--fraction", type=float, default=0.01, help="short-edge position")
    p_gen.add_argument("--out", required=True, help="output mesh JSON path")

    p_chk = sub.add_parser("check-mesh", help="per-element shape diagnostics")
    p_chk.add_argument("--in", dest="infile", required=True, help="mesh JSON path")
    p_chk.add_argument("--gamma", type=float, default=0.5, help="inward-height ratio bound")
    p_chk.add_argument("--max-edges", type=int, default=8, help="edge count bound")
    p_chk.add_argument("--conv", action="store_true", help="also count hull overlaps")
    p_chk.add_argument("--format", choices=["csv", "json"], default="csv")
    p_chk.add_argument("--out", help="output path (default stdout)")

    p_sol = sub.add_parser("solve", help="solve against a manufactured solution")
    p_sol.add_argument("--in", dest="infile", help="mesh JSON path")
    p_sol.add_argument("--family", choices=["uniform", "cut", "short_edge"])
    p_sol.add_argument("--n", type=int, default=8)
    p_sol.add_argument("--cut", help="cut line x0,y0,x1,y1")
    p_sol.add_argument("--fraction", type=float, default=0.01)
    p_sol.add_argument("--solution", default="sinsin")
    p_sol.add_argument("--stab", default="half")
    p_sol.add_argument("--quad-degree", type=int, default=4)
    p_sol.add_argument("--tol", type=float, default=1e-12)
    p_sol.add_argument("--max-iter", type=int, default=None)
    p_sol.add_argument("--out", help="output path (default stdout)")

    p_cvg = sub.add_parser("converge", help="refinement study")
    p_cvg.add_argument("--family", required=True, choices=["uniform", "cut", "short_edge"])
    p_cvg.add_argument("--levels", default="8..128", help="start..end (n doubling) or list")
    p_cvg.add_argument("--solution", default="sinsin")
    p_cvg.add_argument("--stab", default="half")
    p_cvg.add_argument("--cut", help="cut line x0,y0,x1,y1")
    p_cvg.add_argument("--fraction", type=float, default=0.01)
    p_cvg.add_argument("--quad-degree", type=int, default=4)
    p_cvg.add_argument("--format", choices=["csv", "json"], default="csv")
    p_cvg.add_argument("--out", help="output path (default stdout)")

    p_eeq = sub.add_parser("error-eq", help="discrete error identity residual")
    p_eeq.add_argument("--in", dest="infile", help="mesh JSON path")
    p_eeq.add_argument("--family", choices=["uniform", "cut", "short_edge"], default="uniform")
    p_eeq.add_argument("--n", type=int, default=4)
    p_eeq.add_argument("--cut", help="cut line x0,y0,x1,y1")
    p_eeq.add_argument("--fraction", type=float, default=0.01)
    p_eeq.add_argument("--solution", default="saddle")
    p_eeq.add_argument("--stab", default="half")
    p_eeq.add_argument("--probes", type=int, default=20)
    p_eeq.add_argument("--seed", type=int, default=42)
    p_eeq.add_argument("--out", help="output path (default stdout)")

    p_ineq = sub.add_parser("ineq", help="trace/Poincare inequality suite")
    p_ineq.add_argument("--suite", default="all", help="'all' or comma-separated names")
    p_ineq.add_argument("--samples", type=int, default=1000)
    p_ineq.add_argument("--seed", type=int, default=42)
    p_ineq.add_argument("--out", help="output path (default stdout)")
    return parser


def _cmd_gen(args) -> int:
    cut = _parse_cut(args.cut) if args.cut else None
    if args.family == "cut" and cut is None:
        raise _ConfigError("--family cut needs --cut x0,y0,x1,y1")
    mesh = analysis.build_family_mesh(args.family, args.n, cut, args.fraction)
    write_mesh(args.out, mesh)
    for note in mesh.notes:
        print(f"note: {note}", file=sys.stderr)
    print(f"wrote {args.out}: {mesh.n_vertices} vertices, {mesh.n_cells} cells")
    return 0


def _cmd_check_mesh(args) -> int:
    mesh = read_mesh(args.infile)
    conv = mesh_conv_counts(mesh) if args.conv else None
    rows = []
    for ci in range(mesh.n_cells):
        rep = check_assumptions(mesh.cell_polygon(ci), args.gamma, args.max_edges)
        rows.append(
            {
                "cell": ci,
                "n_edges": rep.n_edges,
                "gamma_min": rep.gamma_min,
                "isotropic": rep.isotropic,
                "area_bounds_ok": rep.area_bounds_ok,
                "n_conv": int(conv[ci]) if conv is not None else None,
            }
        )
    config = {
        "command": "check-mesh",
        "in": args.infile,
        "gamma": args.gamma,
        "max_edges": args.max_edges,
        "backend": backend_name(),
    }
    n_iso = sum(r["isotropic"] for r in rows)
    if args.format == "json":
        text = json.dumps(
            {"config": config, "timestamp": _timestamp(), "elements": rows,
             "isotropic_count": n_iso}, indent=1) + "\n"
    else:
        buf = io.StringIO()
        for key in sorted(config):
            buf.write(f"# {key}={config[key]}\n")
        buf.write(f"# timestamp={_timestamp()}\n")
        buf.write("cell,n_edges,gamma_min,isotropic,area_bounds_ok,n_conv\n")
        for r in rows:
            nconv = "" if r["n_conv"] is None else r["n_conv"]
            buf.write(
                f"{r['cell']},{r['n_edges']},{r['gamma_min']!r},"
                f"{int(r['isotropic'])},{int(r['area_bounds_ok'])},{nconv}\n"
            )
        text = buf.getvalue()
    _emit(text, args.out)
    print(f"{n_iso}/{mesh.n_cells} elements isotropic at gamma={args.gamma}", file=sys.stderr)
    return 0


def _cmd_solve(args) -> int:
    mesh, mesh_cfg = _mesh_from_args(args)
    sol = _solution(args.solution)
    kind = _stab(args.stab)
    u, report, _ = solve_poisson(
        mesh, sol.f, sol.u, kind, args.quad_degree, tol=args.tol, max_iter=args.max_iter
    )
    err = analysis.pi_errors(mesh, u, sol, args.quad_degree)
    config = {
        "command": "solve",
        **mesh_cfg,
        "solution": args.solution,
        "stab": kind.value,
        "quad_degree": args.quad_degree,
        "tol": args.tol,
        "backend": backend_name(),
    }
    payload = {
        "config": config,
        "timestamp": _timestamp(),
        "dofs": err.dofs,
        "h": err.h,
        "iterations": report.iterations,
        "residual": report.residual,
        "wall_time": report.wall_time,
        "errors": {
            "e_H1_pi": err.e_h1_proj,
            "e_tnorm": err.e_energy,
            "e_stab": err.e_stab,
            "e_L2_pi": err.e_l2_proj,
            "max_nodal": float(np.abs(u - sol.u(mesh.vertices)).max()),
        },
        "solution_values": [float(x) for x in u],
    }
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    return 0


def _cmd_converge(args) -> int:
    levels = _parse_levels(args.levels)
    sol = _solution(args.solution)
    kind = _stab(args.stab)
    cut = _parse_cut(args.cut) if args.cut else None
    if args.family == "cut" and cut is None:
        raise _ConfigError("--family cut needs --cut x0,y0,x1,y1")
    table = analysis.convergence_study(
        args.family, levels, sol, kind, args.quad_degree, cut, args.fraction
    )
    config = {
        "command": "converge",
        "family": args.family,
        "levels": ",".join(map(str, levels)),
        "solution": args.solution,
        "stab": kind.value,
        "quad_degree": args.quad_degree,
        "backend": backend_name(),
    }
    if cut:
        config["cut"] = args.cut
    if args.family == "short_edge":
        config["fraction"] = args.fraction
    if args.format == "json":
        text = table.to_json(config) + "\n"
    else:
        header = "".join(
            [f"# {k}={config[k]}\n" for k in sorted(config)] + [f"# timestamp={_timestamp()}\n"]
        )
        text = header + table.to_csv()
    _emit(text, args.out)
    return 0


def _cmd_error_eq(args) -> int:
    mesh, mesh_cfg = _mesh_from_args(args)
    sol = _solution(args.solution)
    kind = _stab(args.stab)
    residual = analysis.error_equation_check(
        mesh, sol, kind, n_probes=args.probes, seed=args.seed
    )
    config = {
        "command": "error-eq",
        **mesh_cfg,
        "solution": args.solution,
        "stab": kind.value,
        "probes": args.probes,
        "seed": args.seed,
        "backend": backend_name(),
    }
    payload = {"config": config, "timestamp": _timestamp(), "max_relative_residual": residual}
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    return 0


def _cmd_ineq(args) -> int:
    names = None if args.suite == "all" else [s.strip() for s in args.suite.split(",")]
    if names is not None:
        unknown = [n for n in names if n not in ineq.SUITE]
        if unknown:
            known = ", ".join(sorted(ineq.SUITE))
            raise _ConfigError(f"unknown inequality checks {unknown} (known: {known})")
    results = ineq.run_suite(names, n_samples=args.samples, seed=args.seed)
    config = {
        "command": "ineq",
        "suite": args.suite,
        "samples": args.samples,
        "seed": args.seed,
        "backend": backend_name(),
    }
    payload = json.loads(ineq.report_json(results, config))
    payload["timestamp"] = _timestamp()
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    ok = all(r.satisfied for r in results)
    print(
        f"{sum(r.satisfied for r in results)}/{len(results)} checks satisfied",
        file=sys.stderr,
    )
    return 0 if ok else 2


_COMMANDS = {
    "gen": _cmd_gen,
    "check-mesh": _cmd_check_mesh,
    "solve": _cmd_solve,
    "converge": _cmd_converge,
    "error-eq": _cmd_error_eq,
    "ineq": _cmd_ineq,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return 1
    except (ParseError, ValidationError, OSError) as exc:
        print(f"error: input: {exc}", file=sys.stderr)
        return 1
    except (SolverStalled, DegenerateElement) as exc:
        print(f"error: numerical: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
