# commands/singular.py
from __future__ import annotations

import logging

import numpy as np

from schemas.reports import RunReport, ThresholdReport
from schemas.run_config import RunConfig
from sdp import solve
from services.christoffel import (
    ThresholdUnreachableError,
    below_floor,
    sublevel_grid,
    support_model,
    threshold_floor,
    write_grid,
)
from services.formatting import write_moments_csv
from services.relaxation import build_singular

from .common import (
    EXIT_DEGENERATE,
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_THRESHOLD,
    EXIT_USAGE,
    failure_report,
    moment_rows,
    prepare_out,
    resolve_system,
    solver_report,
    to_original,
    write_report,
)

logger = logging.getLogger(__name__)


def cmd_singular(config: RunConfig) -> int:
    """Singular hierarchy plus Christoffel support grid."""
    out = prepare_out(config)
    try:
        spec = resolve_system(config)
        relax = build_singular(spec.system, config.order)
    except ValueError as exc:
        logger.error("singular: %s", exc)
        write_report(out, failure_report("singular", config, "usage_error", str(exc)))
        return EXIT_USAGE

    r = config.order
    sol = solve(relax.problem, config.solver.to_options())
    report = RunReport(
        command="singular",
        system=spec.name,
        status=sol.status,
        config=config.model_dump(mode="json"),
        solver=solver_report(sol),
        problem=relax.problem.describe(),
    )
    if not sol.ok:
        report.error = sol.message or f"solver finished with status {sol.status}"
        logger.error("singular %s r=%d: %s", spec.name, r, report.error)
        write_report(out, report)
        return EXIT_SOLVER

    u = relax.sequence(sol.x, "u")
    v = relax.sequence(sol.x, "v")
    y = relax.sequence(sol.x, "y")
    res_split, res_ref = relax.decomposition_residuals(sol.x)
    report.v_mass = v.mass
    report.v_norm = float(np.linalg.norm(v.values))
    report.decomposition_residuals = {"v_plus_y_minus_u": res_split, "v_plus_v_hat_minus_z": res_ref}

    u_orig = to_original(u, spec)
    report.moments = moment_rows(u_orig)
    artifacts = [
        write_moments_csv(out / "u_moments.csv", u_orig),
        write_moments_csv(out / "v_moments.csv", to_original(v, spec)),
        write_moments_csv(out / "y_moments.csv", to_original(y, spec)),
    ]

    try:
        model = support_model(u, r, config.diam, config.vol, config.threshold_rule, config.mass_level)
    except ThresholdUnreachableError as exc:
        report.status = "threshold_unreachable"
        report.error = str(exc)
        report.artifacts = [str(p) for p in artifacts]
        logger.error("singular %s r=%d: %s", spec.name, r, exc)
        write_report(out, report)
        return EXIT_THRESHOLD

    grid = sublevel_grid(model, spec.state_box, config.grid, scaling=spec.state_scaling)
    artifacts.append(write_grid(grid, model, out / "support_grid.csv"))
    inside = int(grid.mask.sum())
    floor = threshold_floor(u)
    report.support = ThresholdReport(d=model.d, alpha=model.alpha, delta=model.delta, threshold=model.threshold,
                                     floored_eigs=model.floored_eigs, in_set_points=inside, rule=model.rule,
                                     floor=floor, below_floor=below_floor(model, u))
    report.artifacts = [str(p) for p in artifacts]
    exit_code = EXIT_OK
    if report.support.below_floor:
        report.status = "threshold_below_floor"
        report.error = (f"threshold {model.threshold:.6g} is below 1/u0 = {floor:.6g}; the sublevel set is empty "
                        f"for any moment sequence (use --threshold-rule mass or a smaller --diam)")
        logger.error("singular %s r=%d: %s", spec.name, r, report.error)
        exit_code = EXIT_THRESHOLD
    elif inside == 0:
        report.degenerate = True
        logger.warning("singular %s r=%d: support estimate is empty on the grid", spec.name, r)
        exit_code = EXIT_DEGENERATE
    write_report(out, report)
    logger.info("singular %s r=%d: v0 = %.6g, threshold %.6g, %d grid points in set",
                spec.name, r, v.mass, model.threshold, inside)
    return exit_code
