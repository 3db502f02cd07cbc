# commands/compare.py
from __future__ import annotations

import logging

from schemas.reports import CompareReport
from schemas.run_config import RunConfig
from services.compare_service import compare_files
from services.formatting import write_json

from .common import EXIT_DEGENERATE, EXIT_OK, EXIT_USAGE, prepare_out

logger = logging.getLogger(__name__)


def cmd_compare(config: RunConfig) -> int:
    """compare.json: one-sided support distance and attractor coverage."""
    out = prepare_out(config)
    try:
        result = compare_files(config.support_grid, config.attractor)
    except (OSError, ValueError) as exc:
        logger.error("compare: %s", exc)
        report = CompareReport(
            support_grid=str(config.support_grid),
            attractor=str(config.attractor),
            status="usage_error",
            error=str(exc),
        )
        write_json(out / "compare.json", report.model_dump(mode="python"))
        return EXIT_USAGE
    report = CompareReport(
        support_grid=str(config.support_grid),
        attractor=str(config.attractor),
        status="degenerate" if result["degenerate"] else "ok",
        **result,
    )
    write_json(out / "compare.json", report.model_dump(mode="python"))
    logger.info("compare: distance %.6g, coverage %.4f", report.support_distance, report.coverage)
    return EXIT_DEGENERATE if report.degenerate else EXIT_OK
