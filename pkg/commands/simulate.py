# commands/simulate.py
from __future__ import annotations

import logging

from schemas.run_config import RunConfig
from services.formatting import write_csv
from services.simulation import DivergenceError, simulate

from .common import EXIT_OK, EXIT_USAGE, prepare_out, resolve_system

logger = logging.getLogger(__name__)


def cmd_simulate(config: RunConfig) -> int:
    """attractor.csv: seeded reference cloud of a benchmark."""
    out = prepare_out(config)
    try:
        spec = resolve_system(config)
        cloud = simulate(spec, seed=config.seed)
    except (ValueError, DivergenceError) as exc:
        logger.error("simulate: %s", exc)
        return EXIT_USAGE
    header = [f"x{i + 1}" for i in range(cloud.points.shape[1])]
    path = write_csv(out / "attractor.csv", header, cloud.points)
    logger.info("wrote %s (%d points)", path, cloud.size)
    return EXIT_OK
