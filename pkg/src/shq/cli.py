"""The shq command: verification sweeps, solves, and estimate probes.

Usage:
    shq verify|solve|probe [--config PATH] [--key=value ...]
                           [--out PATH] [--format json|csv] [--figures DIR]

Configuration is a flat key-value text file (``key = value`` per line,
``#`` comments); any key can be overridden on the command line with
``--key=value``.  Precedence: command line, then config file, then the
SHQ_SEED environment variable (seed only), then built-in defaults.
Reports embed the resolved configuration and a content hash of the
inputs; given the same seed and configuration the output bytes are
identical run to run.
"""

from __future__ import annotations

import argparse
import os
import re
import sys

import numpy as np

from .errors import ConfigurationError, ShqError
from .figures import figure_path, probe_figure, solve_figure, verify_figure
from .presets import (
    bump_rhs,
    constant_rhs,
    quadratic_case,
    radial_quartic_case,
    seed_constant,
)
from .probes import (
    InteriorProbeConfig,
    PogorelovProbeConfig,
    interior_probe,
    merge_reports,
    pogorelov_probe,
    rescale_to_unit_ball,
)
from .report import build_report, content_hash, verify_rows, write_report
from .solver import DomainSpec, SolveOptions, load_snapshot, save_snapshot, solve
from .symfunc import OperatorSpec
from .verify import SweepGrid, Tolerances, check_names, run_sweep

__all__ = ["main", "resolve_config", "run_verify", "run_solve", "run_probe"]


def _int_list(text: str) -> tuple:
    return tuple(int(p) for p in str(text).split(",") if p != "")

def _float_list(text: str) -> tuple:
    return tuple(float(p) for p in str(text).split(",") if p != "")

def _str_list(text: str) -> tuple:
    return tuple(p.strip() for p in str(text).split(",") if p.strip())

def _opt_float(text):
    return None if text in (None, "") else float(text)

def _opt_str(text):
    return None if text in (None, "") else str(text)


# key -> (parser, default, commands that accept it)
_KEYS = {
    "seed": (int, 0, ("verify", "solve", "probe")),
    "format": (str, "json", ("verify", "solve", "probe")),
    "samples": (int, 10_000, ("verify",)),
    "ns": (_int_list, (2, 3, 4, 5, 6), ("verify",)),
    "alphas": (_float_list, (0.0, 0.5, 3.0), ("verify",)),
    "checks": (_str_list, (), ("verify",)),
    "rel_identity": (float, Tolerances.rel_identity, ("verify",)),
    "ineq_floor": (float, Tolerances.ineq_floor, ("verify",)),
    "fd_rel": (float, Tolerances.fd_rel, ("verify",)),
    "fd_degenerate": (float, Tolerances.fd_degenerate, ("verify",)),
    "n": (int, 3, ("solve", "probe")),
    "k": (int, 2, ("solve", "probe")),
    "l": (int, 0, ("solve", "probe")),
    "alpha": (float, 1.0, ("solve", "probe")),
    "domain": (str, "ball", ("solve", "probe")),
    "mesh": (int, 17, ("solve", "probe")),
    "meshes": (_int_list, (), ("solve", "probe")),
    "size": (float, 1.0, ("solve", "probe")),
    "rhs": (str, "quadratic", ("solve", "probe")),
    "rhs_value": (_opt_float, None, ("solve", "probe")),
    "amplitude": (float, 0.25, ("solve", "probe")),
    "tol": (float, 1e-8, ("solve", "probe")),
    "max_newton": (int, 40, ("solve", "probe")),
    "snapshot": (_opt_str, None, ("solve", "probe")),
    "probe": (str, "both", ("probe",)),
    "betas": (_float_list, (1.0, 1.5, 2.0, 3.0, 5.0), ("probe",)),
    "pog_a": (float, 1.0, ("probe",)),
    "pog_A": (float, 1.0, ("probe",)),
    "cap": (_opt_float, None, ("probe",)),
}


def _parse_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, _, value = line.partition("=")
            else:
                key, _, value = line.partition(" ")
            key, value = key.strip(), value.strip()
            if not key or value == "":
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}"
                )
            out[key] = value
    return out


def resolve_config(command: str, file_pairs: dict, overrides: dict) -> dict:
    """Merge defaults, config file, env seed, and overrides; coerce types."""
    cfg = {"command": command}
    for key, (parse, default, cmds) in _KEYS.items():
        if command in cmds:
            cfg[key] = default
    env_seed = os.environ.get("SHQ_SEED")
    if env_seed is not None and "seed" not in file_pairs and "seed" not in overrides:
        cfg["seed"] = int(env_seed)
    for source, pairs in (("config file", file_pairs), ("override", overrides)):
        for key, raw in pairs.items():
            if key not in _KEYS:
                known = ", ".join(sorted(_KEYS))
                raise ConfigurationError(f"unknown {source} key {key!r}; known: {known}")
            parse, _, cmds = _KEYS[key]
            if command not in cmds:
                raise ConfigurationError(
                    f"key {key!r} does not apply to the {command!r} command"
                )
            try:
                cfg[key] = parse(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"bad value for {key!r}: {raw!r} ({exc})")
    if cfg.get("format") not in ("json", "csv"):
        raise ConfigurationError("format must be json or csv")
    return cfg


def run_verify(cfg: dict):
    names = list(cfg["checks"]) or None
    grid = SweepGrid(ns=cfg["ns"], alphas=cfg["alphas"])
    tol = Tolerances(
        rel_identity=cfg["rel_identity"],
        ineq_floor=cfg["ineq_floor"],
        fd_rel=cfg["fd_rel"],
        fd_degenerate=cfg["fd_degenerate"],
    )
    results = run_sweep(
        samples=cfg["samples"], seed=cfg["seed"], grid=grid, names=names, tol=tol
    )
    failures = sum(r.failures for r in results)
    timing = {
        "unit": "deterministic effort counters",
        "checks": len(results),
        "samples_drawn": int(sum(r.samples for r in results)),
    }
    return results, verify_rows(results), failures, timing


def _build_problem(cfg: dict):
    spec = OperatorSpec(n=cfg["n"], k=cfg["k"], l=cfg["l"], alpha=cfg["alpha"])
    kind = cfg["rhs"]
    if kind == "quadratic":
        make = lambda domain: quadratic_case(spec, domain)
    elif kind == "quartic":
        make = lambda domain: radial_quartic_case(spec, domain)
    elif kind == "constant":
        value = cfg["rhs_value"]
        if value is None:
            value = seed_constant(spec)
        make = lambda domain, v=value: (constant_rhs(v), None, None)
    elif kind == "bump":
        make = lambda domain: (bump_rhs(spec, cfg["amplitude"]), None, None)
    else:
        raise ConfigurationError(
            f"unknown rhs {kind!r}; use quadratic, quartic, constant, or bump"
        )

    def build(mesh: int):
        domain = DomainSpec(kind=cfg["domain"], n=cfg["n"], mesh=mesh, size=cfg["size"])
        made = make(domain)
        if hasattr(made, "rhs"):  # manufactured case
            return domain, made.rhs, made.boundary, made.exact
        rhs, boundary, exact = made
        return domain, rhs, boundary, exact

    return spec, build


def _solve_one(spec, build, mesh, cfg):
    domain, rhs, boundary, exact = build(mesh)
    opts = SolveOptions(tol=cfg["tol"], max_newton=cfg["max_newton"])
    sol = solve(domain, rhs, spec, opts, boundary=boundary)
    row = {
        "mesh": mesh,
        "h": float(sol.grid.h[0]),
        "residual_norm": float(sol.residual_norm),
        "newton_iterations": int(sol.newton_iterations),
        "continuation_steps": int(sol.continuation_steps),
        "continuation_path": ";".join(repr(float(t)) for t in sol.continuation_path),
        "admissible": int(bool(sol.admissible)),
        "interior_nodes": int(sol.grid.num_interior),
    }
    if exact is not None:
        row["max_error"] = float(np.abs(sol.u - exact(sol.grid.x)).max())
    return sol, row


def run_solve(cfg: dict):
    spec, build = _build_problem(cfg)
    meshes = list(cfg["meshes"]) or [cfg["mesh"]]
    rows, sols = [], []
    for mesh in meshes:
        sol, row = _solve_one(spec, build, mesh, cfg)
        rows.append(row)
        sols.append(sol)
    for prev, cur in zip(rows, rows[1:]):
        if "max_error" in prev and prev["max_error"] > 0 and cur.get("max_error", 0) > 0:
            ratio = (cur["h"] / prev["h"]) or 1.0
            cur["richardson_order"] = float(
                np.log(prev["max_error"] / cur["max_error"]) / -np.log(ratio)
            )
    if cfg["snapshot"]:
        save_snapshot(sols[-1], cfg["snapshot"])
        rows[-1]["snapshot"] = cfg["snapshot"]
    timing = {
        "unit": "deterministic effort counters",
        "newton_iterations": sum(r["newton_iterations"] for r in rows),
        "continuation_steps": sum(r["continuation_steps"] for r in rows),
        "interior_nodes": sum(r["interior_nodes"] for r in rows),
    }
    return sols, rows, 0, timing


def _probe_solution(sol, cfg):
    reports = []
    wanted = cfg["probe"]
    if wanted not in ("both", "interior", "pogorelov"):
        raise ConfigurationError("probe must be interior, pogorelov, or both")
    if wanted in ("both", "interior"):
        target = sol
        if sol.grid.domain.kind == "ball" and abs(sol.grid.domain.radius - 1.0) > 1e-12:
            target = rescale_to_unit_ball(sol)
        icfg = None if cfg["cap"] is None else InteriorProbeConfig(A_cap=cfg["cap"])
        reports.append(interior_probe(target, icfg))
    if wanted in ("both", "pogorelov"):
        betas = cfg["betas"]
        pcfg = PogorelovProbeConfig(
            beta=betas[0], a=cfg["pog_a"], A=cfg["pog_A"], sweep=betas
        )
        reports.append(pogorelov_probe(sol, pcfg))
    return reports


def run_probe(cfg: dict):
    if cfg["snapshot"]:
        if cfg["meshes"]:
            raise ConfigurationError("give either snapshot or meshes, not both")
        sols = [load_snapshot(cfg["snapshot"])]
    else:
        spec, build = _build_problem(cfg)
        meshes = list(cfg["meshes"]) or [cfg["mesh"]]
        sols = [_solve_one(spec, build, mesh, cfg)[0] for mesh in meshes]
    by_kind = {}
    for sol in sols:
        for rep in _probe_solution(sol, cfg):
            by_kind.setdefault(rep.kind, []).append(rep)
    merged = {kind: merge_reports(reps) for kind, reps in sorted(by_kind.items())}
    rows = []
    for kind, rep in merged.items():
        for row in rep.to_csv_rows():
            rows.append(row)
        seq = rep.mesh_sequence
        if len(seq) >= 2 and seq[-2][1] not in (None, 0.0):
            change = abs(seq[-1][1] - seq[-2][1]) / abs(seq[-2][1])
            rows.append(
                {
                    "kind": f"{kind}_stability",
                    "h": seq[-1][0],
                    "value": float(100.0 * change),
                    "argmax_is_deep": None,
                }
            )
    timing = {
        "unit": "deterministic effort counters",
        "solutions": len(sols),
        "interior_nodes": int(sum(s.grid.num_interior for s in sols)),
    }
    return merged, rows, 0, timing


def _split_overrides(tokens: list) -> dict:
    out = {}
    pat = re.compile(r"^--([A-Za-z_][A-Za-z0-9_]*)=(.*)$")
    for tok in tokens:
        m = pat.match(tok)
        if not m:
            raise ConfigurationError(
                f"unrecognized argument {tok!r}; overrides look like --key=value"
            )
        out[m.group(1)] = m.group(2)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="shq",
        description="verification sweeps, Dirichlet solves, and estimate probes",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "solve", "probe"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="flat key-value config file")
        p.add_argument("--out", default=None, help="report file (stdout when absent)")
        p.add_argument("--format", default=None, choices=("json", "csv"))
        p.add_argument("--figures", default=None, help="directory for PNG companions")
    args, extra = parser.parse_known_args(argv)

    try:
        overrides = _split_overrides(extra)
        if args.format is not None:
            overrides["format"] = args.format
        file_pairs = _parse_file(args.config) if args.config else {}
        hash_parts = [("command", args.command.encode())]
        if args.config:
            with open(args.config, "rb") as fh:
                hash_parts.append(("config_file", fh.read()))
        for key in sorted(overrides):
            hash_parts.append((f"override:{key}", str(overrides[key]).encode()))
        cfg = resolve_config(args.command, file_pairs, overrides)

        if args.command == "verify":
            results, rows, failures, timing = run_verify(cfg)
        elif args.command == "solve":
            sols, rows, failures, timing = run_solve(cfg)
        else:
            if cfg["snapshot"]:
                with open(cfg["snapshot"], "rb") as fh:
                    hash_parts.append(("snapshot", fh.read()))
            merged, rows, failures, timing = run_probe(cfg)

        embedded = dict(cfg)
        for key in ("ns", "alphas", "checks", "betas", "meshes"):
            if key in embedded:
                embedded[key] = ",".join(repr(v) for v in embedded[key])
        embedded["content_hash"] = content_hash(hash_parts)
        report = build_report(embedded, rows, failures, timing)
        data = write_report(report, cfg["format"], args.out)
        if args.out is None:
            sys.stdout.buffer.write(data)
        else:
            print(f"wrote {args.out} ({failures} failures)")

        if args.figures:
            if args.command == "verify":
                verify_figure(results, figure_path(args.figures, "verify_margins.png"))
            elif args.command == "solve":
                solve_figure(sols[-1], figure_path(args.figures, "solve_u.png"))
            else:
                for kind, rep in merged.items():
                    probe_figure(rep, figure_path(args.figures, f"probe_{kind}.png"))
        return 1 if failures else 0
    except ShqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
