# main.py
import json
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError

from benchmarks import BENCHMARKS, get_benchmark
from commands import cmd_ac, cmd_compare, cmd_simulate, cmd_singular
from commands.common import EXIT_USAGE
from config import ConfigError, configure_logging, get_settings
from schemas.run_config import RunConfig, SolverSettings
from schemas.system_definition import SystemDefinition

app = typer.Typer(add_completion=False, help="Moment-SOS approximation of invariant measures.")

COMMANDS = {
    "ac": cmd_ac,
    "singular": cmd_singular,
    "simulate": cmd_simulate,
    "compare": cmd_compare,
}


def _run(mode: str, system: str, order: Optional[int], norm: str, grid: Optional[int], out: Optional[Path],
         seed: Optional[int], gap_tol: Optional[float], feas_tol: Optional[float], diam: float, vol: float,
         extraction_degree: str = "r", support_grid: Optional[Path] = None,
         attractor: Optional[Path] = None, threshold_rule: str = "assumption",
         mass_level: float = 0.95) -> None:
    try:
        settings = get_settings()
    except ConfigError as exc:
        typer.echo(f"configuration error: {exc}", err=True)
        raise typer.Exit(EXIT_USAGE)
    configure_logging(settings.log_level)
    try:
        config = RunConfig(
            system=system,
            mode=mode,
            order=order,
            norm=norm,
            grid=grid if grid is not None else settings.grid,
            out=out if out is not None else Path(settings.out_dir),
            seed=seed if seed is not None else settings.seed,
            solver=SolverSettings(
                gap_tol=gap_tol if gap_tol is not None else settings.gap_tol,
                feas_tol=feas_tol if feas_tol is not None else settings.feas_tol,
                max_iter=settings.max_iter,
            ),
            diam=diam,
            vol=vol,
            threshold_rule=threshold_rule,
            mass_level=mass_level,
            extraction_degree=extraction_degree,
            support_grid=support_grid,
            attractor=attractor,
        )
    except ValidationError as exc:
        typer.echo(f"invalid arguments:\n{exc}", err=True)
        raise typer.Exit(EXIT_USAGE)
    code = COMMANDS[config.mode](config)
    raise typer.Exit(code)


@app.command()
def run(
    system: str = typer.Option(..., "--system", help="Built-in name or system-definition JSON file"),
    mode: str = typer.Option(..., "--mode", help="ac | singular | simulate | compare"),
    order: Optional[int] = typer.Option(None, "--order", help="Relaxation order r"),
    norm: str = typer.Option("inf", "--norm", help="Density norm bound: 2 or inf"),
    grid: Optional[int] = typer.Option(None, "--grid", help="Grid points per axis"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    seed: Optional[int] = typer.Option(None, "--seed"),
    gap_tol: Optional[float] = typer.Option(None, "--gap-tol"),
    feas_tol: Optional[float] = typer.Option(None, "--feas-tol"),
    diam: float = typer.Option(1.0, "--diam", help="Diameter bound of the support (scaled units)"),
    vol: float = typer.Option(1.0, "--vol", help="Volume bound of the support (scaled units)"),
    threshold_rule: str = typer.Option("assumption", "--threshold-rule", help="assumption | mass"),
    mass_level: float = typer.Option(0.95, "--mass-level", help="Share of u kept by the mass rule"),
    extraction_degree: str = typer.Option("r", "--extraction-degree", help="r or 2r"),
    support_grid: Optional[Path] = typer.Option(None, "--support-grid"),
    attractor: Optional[Path] = typer.Option(None, "--attractor"),
):
    """Run any mode with the full flag set."""
    _run(mode, system, order, norm, grid, out, seed, gap_tol, feas_tol, diam, vol, extraction_degree,
         support_grid, attractor, threshold_rule, mass_level)


@app.command()
def ac(
    system: str = typer.Option(..., "--system"),
    order: int = typer.Option(..., "--order"),
    norm: str = typer.Option("inf", "--norm"),
    grid: Optional[int] = typer.Option(None, "--grid"),
    out: Optional[Path] = typer.Option(None, "--out"),
    gap_tol: Optional[float] = typer.Option(None, "--gap-tol"),
    feas_tol: Optional[float] = typer.Option(None, "--feas-tol"),
    extraction_degree: str = typer.Option("r", "--extraction-degree"),
):
    """Absolutely continuous hierarchy and density extraction."""
    _run("ac", system, order, norm, grid, out, None, gap_tol, feas_tol, 1.0, 1.0, extraction_degree)


@app.command()
def singular(
    system: str = typer.Option(..., "--system"),
    order: int = typer.Option(..., "--order"),
    grid: Optional[int] = typer.Option(None, "--grid"),
    out: Optional[Path] = typer.Option(None, "--out"),
    gap_tol: Optional[float] = typer.Option(None, "--gap-tol"),
    feas_tol: Optional[float] = typer.Option(None, "--feas-tol"),
    diam: float = typer.Option(1.0, "--diam"),
    vol: float = typer.Option(1.0, "--vol"),
    threshold_rule: str = typer.Option("assumption", "--threshold-rule"),
    mass_level: float = typer.Option(0.95, "--mass-level"),
):
    """Singular hierarchy and Christoffel support estimate."""
    _run("singular", system, order, "inf", grid, out, None, gap_tol, feas_tol, diam, vol,
         threshold_rule=threshold_rule, mass_level=mass_level)


@app.command()
def simulate(
    system: str = typer.Option(..., "--system"),
    out: Optional[Path] = typer.Option(None, "--out"),
    seed: Optional[int] = typer.Option(None, "--seed"),
):
    """Seeded reference point cloud."""
    _run("simulate", system, None, "inf", None, out, seed, None, None, 1.0, 1.0)


@app.command()
def compare(
    support_grid: Path = typer.Option(..., "--support-grid"),
    attractor: Path = typer.Option(..., "--attractor"),
    out: Optional[Path] = typer.Option(None, "--out"),
):
    """Support distance and coverage of a support grid against a point cloud."""
    _run("compare", "-", None, "inf", None, out, None, None, None, 1.0, 1.0,
         support_grid=support_grid, attractor=attractor)


@app.command("list-systems")
def list_systems():
    """Built-in benchmark names."""
    for name in sorted(BENCHMARKS):
        typer.echo(name)


@app.command("export-system")
def export_system(name: str = typer.Argument(..., help="Built-in benchmark name")):
    """Print a built-in system in the system-definition format."""
    try:
        spec = get_benchmark(name)
    except ValueError as exc:
        typer.echo(str(exc), err=True)
        raise typer.Exit(EXIT_USAGE)
    doc = SystemDefinition.from_system(spec.original)
    typer.echo(json.dumps(doc.model_dump(mode="json"), indent=2))


if __name__ == "__main__":
    app()
