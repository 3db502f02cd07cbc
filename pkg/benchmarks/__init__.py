# benchmarks/__init__.py
from typing import Callable, Dict

from .base import AttractorSeed, BenchmarkSpec
from .circle_rotation import DEFAULT_ROTATION, make_circle_rotation
from .flows import make_arneodo, make_rotational_flow, make_vanderpol
from .henon import make_henon
from .koda import make_koda, make_koda2, make_logistic


class UnknownBenchmarkError(ValueError):
    pass


BENCHMARKS: Dict[str, Callable[[], BenchmarkSpec]] = {
    "rotational_flow": make_rotational_flow,
    "circle_rotation": make_circle_rotation,
    "koda2": make_koda2,
    "koda3": lambda: make_koda(3),
    "koda4": lambda: make_koda(4),
    "koda5": lambda: make_koda(5),
    "logistic": make_logistic,
    "henon": make_henon,
    "vanderpol": make_vanderpol,
    "arneodo": make_arneodo,
}


def get_benchmark(name: str) -> BenchmarkSpec:
    key = name.strip().lower().replace("-", "_")
    if key not in BENCHMARKS:
        raise UnknownBenchmarkError(f"unknown system {name!r}; built-ins are {', '.join(sorted(BENCHMARKS))}")
    return BENCHMARKS[key]()


__all__ = [
    "AttractorSeed",
    "BenchmarkSpec",
    "BENCHMARKS",
    "DEFAULT_ROTATION",
    "UnknownBenchmarkError",
    "get_benchmark",
    "make_arneodo",
    "make_circle_rotation",
    "make_henon",
    "make_koda",
    "make_koda2",
    "make_logistic",
    "make_rotational_flow",
    "make_vanderpol",
]
