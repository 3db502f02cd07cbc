#!/usr/bin/env python3
"""
Order sweep over the built-in benchmarks.

For every system and order runs the AC hierarchy and, where the system
allows it, the singular hierarchy plus a support comparison against the
seeded reference cloud. Everything lands in <out>/summary.json.

Run: python scripts/run_benchmarks.py --systems henon,koda5 --orders 4,6,8
"""
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import typer
from tqdm import tqdm

from benchmarks import BENCHMARKS, get_benchmark
from commands import cmd_ac, cmd_compare, cmd_simulate, cmd_singular
from commands.common import EXIT_OK
from config import configure_logging, get_settings
from schemas.run_config import RunConfig, SolverSettings
from services.formatting import write_json

logger = logging.getLogger("run_benchmarks")

# rho^r may only grow by solver noise between consecutive orders
MONOTONE_TOL = 1e-6


def _read_report(path: Path) -> Dict[str, Any]:
    if not path.exists():
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


def _ac_entry(name: str, r: int, norm: str, grid: int, out: Path, solver: SolverSettings) -> Dict[str, Any]:
    run_dir = out / name / f"ac_r{r}"
    code = cmd_ac(RunConfig(system=name, mode="ac", order=r, norm=norm, grid=grid, out=run_dir, solver=solver))
    report = _read_report(run_dir / "report.json")
    density = report.get("density") or {}
    return {
        "order": r,
        "exit_code": code,
        "status": report.get("status"),
        "objective": (report.get("solver") or {}).get("objective"),
        "sup_error": density.get("sup_error"),
        "l2_error": density.get("l2_error"),
        "verdict": report.get("verdict"),
    }


def _singular_entry(name: str, r: int, grid: int, rule: str, out: Path, solver: SolverSettings,
                    attractor: Optional[Path]) -> Dict[str, Any]:
    run_dir = out / name / f"singular_r{r}"
    code = cmd_singular(RunConfig(system=name, mode="singular", order=r, grid=grid, out=run_dir, solver=solver,
                                  threshold_rule=rule))
    report = _read_report(run_dir / "report.json")
    entry: Dict[str, Any] = {
        "order": r,
        "exit_code": code,
        "status": report.get("status"),
        "objective": (report.get("solver") or {}).get("objective"),
        "v_mass": report.get("v_mass"),
        "threshold": (report.get("support") or {}).get("threshold"),
        "below_floor": (report.get("support") or {}).get("below_floor"),
    }
    grid_path = run_dir / "support_grid.csv"
    if attractor is not None and grid_path.exists():
        cmp_code = cmd_compare(RunConfig(system="-", mode="compare", out=run_dir,
                                         support_grid=grid_path, attractor=attractor))
        cmp = _read_report(run_dir / "compare.json")
        entry.update(compare_exit_code=cmp_code, support_distance=cmp.get("support_distance"),
                     coverage=cmp.get("coverage"))
    return entry


def _monotone(objectives: List[Optional[float]]) -> bool:
    vals = [v for v in objectives if v is not None]
    return all(b <= a + MONOTONE_TOL * (1.0 + abs(a)) for a, b in zip(vals, vals[1:]))


def main(
    systems: str = typer.Option(",".join(sorted(BENCHMARKS)), "--systems", help="Comma separated benchmark names"),
    orders: str = typer.Option("4,6,8", "--orders", help="Comma separated relaxation orders"),
    norm: str = typer.Option("inf", "--norm"),
    grid: int = typer.Option(101, "--grid"),
    threshold_rule: str = typer.Option("mass", "--threshold-rule", help="Sublevel threshold rule: assumption or mass"),
    out: Path = typer.Option(Path("out/sweep"), "--out"),
):
    settings = get_settings()
    configure_logging(settings.log_level)
    solver = SolverSettings(gap_tol=settings.gap_tol, feas_tol=settings.feas_tol, max_iter=settings.max_iter)
    names = [get_benchmark(s.strip()).name for s in systems.split(",") if s.strip()]
    rs = sorted({int(r) for r in orders.split(",") if r.strip()})

    summary: Dict[str, Any] = {"orders": rs, "norm": norm, "threshold_rule": threshold_rule, "systems": {}}
    jobs = [(name, r) for name in names for r in rs]
    attractors: Dict[str, Optional[Path]] = {}
    results: Dict[str, Dict[str, list]] = {name: {"ac": [], "singular": []} for name in names}

    for name, r in tqdm(jobs, desc="sweep", unit="run"):
        spec = get_benchmark(name)
        results[name]["ac"].append(_ac_entry(name, r, norm, grid, out, solver))
        if spec.system.is_lifted or len(spec.system.cells) > 1:
            continue
        if name not in attractors:
            attractors[name] = None
            if spec.attractor is not None:
                sim_dir = out / name / "simulate"
                cfg = RunConfig(system=name, mode="simulate", out=sim_dir, seed=settings.seed)
                if cmd_simulate(cfg) == EXIT_OK:
                    attractors[name] = sim_dir / "attractor.csv"
        results[name]["singular"].append(_singular_entry(name, r, grid, threshold_rule, out, solver, attractors[name]))

    failures = 0
    for name in names:
        ac_runs = results[name]["ac"]
        failures += sum(1 for e in ac_runs if e["exit_code"] != EXIT_OK)
        summary["systems"][name] = {
            "ac": ac_runs,
            "ac_monotone": _monotone([e["objective"] for e in ac_runs]),
            "singular": results[name]["singular"],
        }
        if not summary["systems"][name]["ac_monotone"]:
            logger.warning("%s: AC objectives are not monotone in r: %s", name,
                           [e["objective"] for e in ac_runs])

    path = write_json(out / "summary.json", summary)
    print(f"{'✅' if failures == 0 else '❌'} wrote {path} ({failures} failed AC runs)")
    raise typer.Exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    typer.run(main)
