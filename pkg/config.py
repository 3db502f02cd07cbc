# config.py
import logging
import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

# Force .env from project root (same folder as this config.py)
ENV_PATH = Path(__file__).resolve().parent / ".env"
load_dotenv(dotenv_path=ENV_PATH)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class ConfigError(RuntimeError):
    pass


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be a number, got {raw!r} (loaded env from {ENV_PATH})") from exc


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r} (loaded env from {ENV_PATH})") from exc


@dataclass(frozen=True)
class Settings:
    gap_tol: float = 1e-7
    feas_tol: float = 1e-7
    max_iter: int = 200
    out_dir: str = "out"
    seed: int = 42
    grid: int = 101
    log_level: str = "INFO"
    run_slow: bool = False


def get_settings() -> Settings:
    level = os.getenv("INVMEAS_LOG_LEVEL", "INFO").strip().upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"INVMEAS_LOG_LEVEL must be a logging level name, got {level!r}")
    return Settings(
        gap_tol=_env_float("INVMEAS_GAP_TOL", 1e-7),
        feas_tol=_env_float("INVMEAS_FEAS_TOL", 1e-7),
        max_iter=_env_int("INVMEAS_MAX_ITER", 200),
        out_dir=os.getenv("INVMEAS_OUT_DIR", "out") or "out",
        seed=_env_int("INVMEAS_SEED", 42),
        grid=_env_int("INVMEAS_GRID", 101),
        log_level=level,
        run_slow=os.getenv("INVMEAS_RUN_SLOW", "").strip().lower() in ("1", "true", "yes"),
    )


def configure_logging(level: str = "INFO") -> None:
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level.upper())
