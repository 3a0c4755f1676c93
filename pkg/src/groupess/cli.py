"""Command line entry point: solve, sweep, verify and figures."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import mac as macmod
from .config import ConfigError, ScenarioConfig, load
from .game import GroupProfile
from .oracle import InvasionGrid, verify_conditions, verify_gess_definition, verify_random_mutants
from .report import dump_json, figure_data, rows_to_csv, run_scenario, sweep, write_files

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ORACLE = 3

log = logging.getLogger("groupess")


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="bracket equality tolerance (default 1e-9)")
    common.add_argument("--grid", type=float, help="oracle deviation grid resolution")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for randomized mutant sampling in verify")
    common.add_argument("-v", "--verbose", action="store_true")

    ap = argparse.ArgumentParser(prog="groupess", description="Group equilibrium stable strategies.")
    sub = ap.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="solve one scenario and write a JSON report")
    s.add_argument("config")
    s = sub.add_parser("sweep", parents=[common], help="sweep alpha or gamma and write CSV")
    s.add_argument("config")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    s = sub.add_parser("verify", parents=[common], help="check a given profile with the oracle")
    s.add_argument("config")
    s.add_argument("--profile", type=float, nargs="+", required=True, metavar="Q")
    s = sub.add_parser("figures", parents=[common], help="regenerate preset figure datasets")
    s.add_argument("preset", choices=["hawk-dove", "stag-hunt", "prisoners-dilemma", "mac"])
    return ap


def _overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    if args.tol is not None:
        if args.tol <= 0:
            raise ConfigError("--tol must be positive")
        cfg = replace(cfg, tolerance=args.tol)
    if args.grid is not None:
        try:
            cfg = replace(cfg, grid=InvasionGrid(cfg.grid.eps_values, args.grid))
        except ValueError as exc:
            raise ConfigError(f"--grid: {exc}") from None
    if args.out is not None:
        cfg = replace(cfg, out_dir=args.out)
    return cfg


def _solve(cfg: ScenarioConfig) -> int:
    if cfg.sweep is not None:
        raise ConfigError("field sweep: solve needs a single instance; use the sweep command")
    rep = run_scenario(cfg)
    (path,) = write_files({cfg.report_name: dump_json(rep)}, cfg.out_dir)
    for e in rep["equilibria"]:
        q = ", ".join(f"{x:.6g}" for x in e["profile"])
        print(f"{e['support']:<6} {e['kind']:<24} q = ({q})  oracle {'pass' if e['oracle']['passed'] else 'FAIL'}")
    if not rep["equilibria"]:
        print("no GESS")
    flagged = [c for c in rep.get("reference_claims", []) if c["status"] == "discrepancy"]
    for c in flagged:
        print(f"discrepancy: {c['claim']}")
    print(f"report: {path}")
    return EXIT_OK if rep["all_verified"] else EXIT_ORACLE


def _sweep(cfg: ScenarioConfig, jobs: int) -> int:
    if cfg.sweep is None:
        raise ConfigError("field sweep: required for the sweep command")
    rows = sweep(cfg, jobs=jobs)
    n = len(cfg.weights) if cfg.weights is not None else 2
    (path,) = write_files({cfg.csv_name: rows_to_csv(rows, n)}, cfg.out_dir)
    print(f"{len(rows)} rows -> {path}")
    return EXIT_ORACLE if any(r.kind.endswith("discrepancy") for r in rows) else EXIT_OK


def _verify(cfg: ScenarioConfig, profile, seed) -> int:
    if cfg.sweep is not None:
        raise ConfigError("field sweep: verify needs a single instance")
    q = np.asarray(profile, dtype=float)
    n = len(cfg.weights)
    if q.shape != (n,) or np.any((q < 0) | (q > 1)):
        raise ConfigError(f"--profile: need {n} probabilities in [0, 1]")
    if cfg.is_mac:
        margin = macmod.mac_verify_conditions(q, cfg.mac_params(), cfg.grid.deviation_resolution)
        ok = margin > -1e-7
        print(f"conditions margin {margin:.6g}: {'pass' if ok else 'FAIL'}")
        return EXIT_OK if ok else EXIT_ORACLE
    g = cfg.group_game()
    prof = GroupProfile.from_first(q)
    verdicts = {
        "definition": verify_gess_definition(prof, g, cfg.grid),
        "conditions": verify_conditions(prof, g, cfg.grid),
    }
    if seed is not None:
        verdicts["random"] = verify_random_mutants(prof, g, np.random.default_rng(seed))
    for name, v in verdicts.items():
        w = "" if v.witness is None else f"  witness group {v.witness.group + 1}, mutant {v.witness.mutant[0]:.4g}"
        print(f"{name:<11} margin {v.worst_violation:.6g}: {'pass' if v.passed else 'FAIL'}{w}")
    return EXIT_OK if all(v.passed for v in verdicts.values()) else EXIT_ORACLE


def _figures(preset: str, args) -> int:
    grid = InvasionGrid()
    if args.grid is not None:
        try:
            grid = InvasionGrid(grid.eps_values, args.grid)
        except ValueError as exc:
            raise ConfigError(f"--grid: {exc}") from None
    files = figure_data(preset, args.tol if args.tol is not None else 1e-9, grid)
    for path in write_files(files, args.out or "figures"):
        print(path)
    bad = [name for name, text in files.items() if name.endswith(".csv") and "discrepancy" in text]
    return EXIT_ORACLE if bad else EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "figures":
            return _figures(args.preset, args)
        cfg = _overrides(load(args.config), args)
        if args.command == "solve":
            return _solve(cfg)
        if args.command == "sweep":
            return _sweep(cfg, args.jobs)
        return _verify(cfg, args.profile, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
