"""Command-line runner: execute check suites, explain a check, list the
registry, print the conventions manifest.

Exit codes: 0 all executed checks passed (skips are counted separately),
1 at least one check failed, 2 configuration or I/O error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

from . import checks as ck
from .catalog import RunOptions
from .conventions import manifest_hash, manifest_json
from .errors import ConfigError
from .report import format_table, write_csv, write_json

DEFAULT_FIXTURES = ("FLAT2", "PERT2", "RIEM4", "KAH4", "FS")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kahlercheck",
                                description="residual-gated identity verification")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run check suites and write reports")
    run.add_argument("--config", type=Path, help="JSON configuration file")
    run.add_argument("--suite", help="comma list: identity,variation,soliton,obstruction,all")
    run.add_argument("--fixture", help="comma list of fixture names")
    run.add_argument("--check", help="comma list of explicit check ids")
    run.add_argument("--seed", type=int, help="base seed")
    run.add_argument("--out", type=Path, help="output directory")
    run.add_argument("--jobs", type=int, help="parallel worker processes")
    run.add_argument("--tolerance-scale", type=float, dest="tolerance_scale")
    run.add_argument("--quiet", action="store_true")

    exp = sub.add_parser("explain", help="describe a check")
    exp.add_argument("check_id")

    sub.add_parser("list", help="list all checks")
    sub.add_parser("conventions", help="print the conventions manifest")
    return p


def load_config(args) -> dict:
    cfg = {
        "suites": list(ck.SUITES),
        "fixtures": list(DEFAULT_FIXTURES),
        "checks": None,
        "seed": 0,
        "jobs": 1,
        "tolerance_scale": 1.0,
        "tolerances": {},
        "fd": {"base_step": 1e-2, "richardson_levels": 2},
        "node_count": 120,
        "out": "reports",
    }
    if args.config:
        try:
            user = json.loads(Path(args.config).read_text())
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON (line {exc.lineno}): {exc.msg}") from exc
        unknown = set(user) - set(cfg)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(user)
    if args.suite:
        cfg["suites"] = args.suite.split(",")
    if args.fixture:
        cfg["fixtures"] = args.fixture.split(",")
    if getattr(args, "check", None):
        cfg["checks"] = args.check.split(",")
    for key in ("seed", "jobs", "tolerance_scale"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.out:
        cfg["out"] = str(args.out)
    _validate(cfg)
    return cfg


def _validate(cfg):
    suites = cfg["suites"]
    if suites == ["all"] or suites == "all":
        cfg["suites"] = list(ck.SUITES)
    for s in cfg["suites"]:
        if s not in ck.SUITES:
            raise ConfigError(f"unknown suite {s!r}; choose from {ck.SUITES}")
    for f in cfg["fixtures"]:
        if f not in DEFAULT_FIXTURES:
            raise ConfigError(f"unknown fixture {f!r}")
    if cfg["checks"]:
        for c in cfg["checks"]:
            if c not in ck.REGISTRY:
                raise ConfigError(f"unknown check id {c!r}")
    if cfg["tolerance_scale"] <= 0:
        raise ConfigError("tolerance scale must be positive")
    for suite, scale in cfg["tolerances"].items():
        if suite not in ck.SUITES:
            raise ConfigError(f"tolerances key {suite!r} is not a suite")
        if scale <= 0:
            raise ConfigError(f"tolerance scale for {suite!r} must be positive")
    if cfg["fd"]["base_step"] <= 0:
        raise ConfigError("finite-difference base step must be positive")


def _task_list(cfg):
    if cfg["checks"]:
        pairs = []
        for cid in cfg["checks"]:
            d = ck.REGISTRY[cid]
            for fx in d.fixtures:
                if fx in cfg["fixtures"]:
                    pairs.append((cid, fx))
    else:
        pairs = ck.checks_for(cfg["suites"], cfg["fixtures"])
    tasks = []
    for cid, fx in pairs:
        suite = ck.REGISTRY[cid].suite
        scale = cfg["tolerance_scale"] * cfg["tolerances"].get(suite, 1.0)
        tasks.append((cid, fx, cfg["seed"], scale, cfg["fd"]["base_step"],
                      cfg["fd"]["richardson_levels"], cfg["node_count"]))
    return tasks


def _run_task(task) -> dict:
    cid, fx, seed, tol_scale, base_step, rich, node_count = task
    opts = RunOptions(base_step=base_step, richardson=rich,
                      node_count=node_count, tolerance_scale=tol_scale)
    return ck.run_check(cid, fx, seed, opts).to_record()


def cmd_run(args) -> int:
    cfg = load_config(args)
    tasks = _task_list(cfg)
    if not tasks:
        raise ConfigError("no checks selected")
    if cfg["jobs"] and cfg["jobs"] > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg["jobs"]) as ex:
            records = list(ex.map(_run_task, tasks))
    else:
        records = [_run_task(t) for t in tasks]
    outdir = Path(cfg["out"])
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        rep = write_json(records, outdir / "report.json")
        write_csv(records, outdir / "summary.csv")
    except OSError as exc:
        print(f"io-error: cannot write reports: {exc}", file=sys.stderr)
        return 2
    table = format_table(records)
    if not args.quiet:
        print(table, end="")
        print(f"reports written to {outdir}")
    return 1 if rep["summary"].get("fail", 0) else 0


def cmd_explain(args) -> int:
    cid = args.check_id
    if cid not in ck.REGISTRY:
        print(f"not-found: unknown check id {cid!r}", file=sys.stderr)
        return 2
    d = ck.REGISTRY[cid]
    print(f"{d.id}  [{d.suite}]")
    print(f"  identity: {d.formula}")
    print(f"  tag: {d.tag}")
    print(f"  fixtures: {', '.join(d.fixtures)}")
    print(f"  tolerance: {d.tolerance:g}"
          + (f" (flat fixtures: {d.flat_tolerance:g})" if d.flat_tolerance else ""))
    if d.notes:
        print(f"  notes: {d.notes}")
    print(f"  conventions: manifest {manifest_hash()} (see `kahlercheck conventions`)")
    return 0


def cmd_list(_args) -> int:
    by_suite: dict = {}
    for d in ck.REGISTRY.values():
        by_suite.setdefault(d.suite, []).append(d)
    for suite in ck.SUITES:
        print(f"[{suite}]")
        for d in sorted(by_suite.get(suite, []), key=lambda x: x.id):
            print(f"  {d.id:14s} {', '.join(d.fixtures)}")
    return 0


def cmd_conventions(_args) -> int:
    print(manifest_json())
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "explain":
            return cmd_explain(args)
        if args.command == "list":
            return cmd_list(args)
        if args.command == "conventions":
            return cmd_conventions(args)
    except ConfigError as exc:
        print(f"config-error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
