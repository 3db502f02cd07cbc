# commands/ac.py
from __future__ import annotations

import logging

import numpy as np

from schemas.reports import DensityReport, RunReport
from schemas.run_config import RunConfig
from sdp import solve
from services.formatting import write_csv, write_moments_csv
from services.moment_algebra import reference_moments
from services.relaxation import (
    ac_verdict,
    build_ac,
    density_l2_compare,
    extract_density,
)

from .common import (
    EXIT_OK,
    EXIT_SOLVER,
    EXIT_USAGE,
    failure_report,
    grid_points,
    moment_rows,
    prepare_out,
    resolve_system,
    solver_report,
    to_original,
    write_report,
)

logger = logging.getLogger(__name__)


def cmd_ac(config: RunConfig) -> int:
    """AC hierarchy: moments.csv, density_grid.csv and report.json in config.out."""
    out = prepare_out(config)
    try:
        spec = resolve_system(config)
        relax = build_ac(spec.system, config.order, config.norm)
    except ValueError as exc:
        logger.error("ac: %s", exc)
        write_report(out, failure_report("ac", config, "usage_error", str(exc)))
        return EXIT_USAGE

    sol = solve(relax.problem, config.solver.to_options())
    report = RunReport(
        command="ac",
        system=spec.name,
        status=sol.status,
        config=config.model_dump(mode="json"),
        solver=solver_report(sol),
        problem=relax.problem.describe(),
    )
    if not sol.ok:
        report.error = sol.message or f"solver finished with status {sol.status}"
        logger.error("ac %s r=%d: %s", spec.name, config.order, report.error)
        write_report(out, report)
        return EXIT_SOLVER

    r = config.order
    y = relax.state_moments(sol.x)
    mass = y.mass
    report.verdict = ac_verdict(sol.objective_value, r)
    artifacts = []

    if mass > 0:
        y_orig = to_original(y.normalized(), spec)
        report.moments = moment_rows(y_orig)
        if spec.exact_moment is not None:
            report.exact_moments = moment_rows(y_orig, spec.exact_moment)
        artifacts.append(write_moments_csv(out / "moments.csv", y_orig, spec.exact_moment))

        degree = r if config.extraction_degree == "r" else 2 * r
        z = reference_moments(spec.system, 2 * degree)
        density = extract_density(y, z, r, config.norm, degree)
        h = density.in_original(spec.state_scaling, mass)

        axes, pts = grid_points(spec.state_box, config.grid)
        h_vals = h.evaluate(pts)
        cols = [pts, h_vals[:, None]]
        header = [f"x{i + 1}" for i in range(pts.shape[1])] + ["h"]
        if spec.exact_density is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                exact = np.asarray(spec.exact_density(pts), dtype=float)
            cols.append(exact[:, None])
            header.append("exact")
            usable = np.isfinite(exact)
            if spec.system.reference == "ball":
                usable &= np.sum(spec.state_scaling.scale(pts) ** 2, axis=1) <= 1.0
            cell = float(np.prod([(a[-1] - a[0]) / (a.shape[0] - 1) for a in axes])) / spec.original.reference_volume()
            errs = density_l2_compare(h, spec.exact_density, pts[usable], cell)
            report.density = DensityReport(degree=degree, sup_error=errs.sup_error, l2_error=errs.l2_error,
                                           grid_points=int(usable.sum()))
        else:
            report.density = DensityReport(degree=degree, grid_points=pts.shape[0])
        artifacts.append(write_csv(out / "density_grid.csv", header, np.hstack(cols)))
    else:
        logger.warning("ac %s r=%d: zero total mass, no moments or density to report", spec.name, r)

    if report.verdict:
        logger.warning("ac %s r=%d: %s", spec.name, r, report.verdict)
    report.artifacts = [str(p) for p in artifacts]
    write_report(out, report)
    logger.info("ac %s r=%d p=%s: objective %.8g, status %s", spec.name, r, config.norm,
                sol.objective_value, sol.status)
    return EXIT_OK
