"""Two-dimensional benchmark objectives and their default domains.

Every objective accepts an array whose last axis has length 2 and returns
one value per point, so a whole swarm (or a batch of swarms) is evaluated
in one call.

Trigonometric terms can be evaluated with the angle read in degrees
(``degrees=True``). That convention smooths Rastrigin, Griewank and
Schaffer into wide bowls and is what the experiment presets default to;
plain :func:`eval` uses radians.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

_DEG = math.pi / 180.0


class BenchmarkId(str, enum.Enum):
    SPHERICAL = "f0"
    ROSENBROCK = "f1"
    RASTRIGIN = "f2"
    GRIEWANK = "f3"
    SCHAFFER = "f6"

    @property
    def label(self) -> str:
        return _LABELS[self]

    @classmethod
    def parse(cls, text: str) -> "BenchmarkId":
        key = text.strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower(), _LABELS[member].lower()):
                return member
        valid = ", ".join(m.value for m in cls)
        raise ValueError(f"unknown benchmark {text!r} (expected one of {valid})")


_LABELS = {
    BenchmarkId.SPHERICAL: "Spherical",
    BenchmarkId.ROSENBROCK: "Rosenbrock",
    BenchmarkId.RASTRIGIN: "Rastrigin",
    BenchmarkId.GRIEWANK: "Griewank",
    BenchmarkId.SCHAFFER: "Schaffer",
}

ALL_BENCHMARKS = tuple(BenchmarkId)


class Study(str, enum.Enum):
    UNIFORM = "uniform"  # half_side 100 and goal 0.01 for every function
    PER_FUNCTION = "per-function"


@dataclass(frozen=True)
class BenchmarkSpec:
    id: BenchmarkId
    half_side: float
    goal: float
    optimum_value: float = 0.0
    optimum_point: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not self.half_side > 0:
            raise ValueError("half_side must be positive")
        if not self.goal > 0:
            raise ValueError("goal must be positive")

    @property
    def side(self) -> float:
        return 2.0 * self.half_side


def spherical(x: np.ndarray, degrees: bool = False) -> np.ndarray:
    return x[..., 0] ** 2 + x[..., 1] ** 2


def rosenbrock(x: np.ndarray, degrees: bool = False) -> np.ndarray:
    x1 = x[..., 0]
    x2 = x[..., 1]
    return 100.0 * (x2 - x1**2) ** 2 + (x1 - 1.0) ** 2


def rastrigin(x: np.ndarray, degrees: bool = False) -> np.ndarray:
    k = 2.0 * math.pi * (_DEG if degrees else 1.0)
    x1 = x[..., 0]
    x2 = x[..., 1]
    return (x1**2 - 10.0 * np.cos(k * x1) + 10.0) + (x2**2 - 10.0 * np.cos(k * x2) + 10.0)


def griewank(x: np.ndarray, degrees: bool = False) -> np.ndarray:
    k = _DEG if degrees else 1.0
    x1 = x[..., 0]
    x2 = x[..., 1]
    return (x1**2 + x2**2) / 4000.0 - np.cos(k * x1) * np.cos(k * x2 / math.sqrt(2.0)) + 1.0


def schaffer_f6(x: np.ndarray, degrees: bool = False) -> np.ndarray:
    k = _DEG if degrees else 1.0
    r2 = x[..., 0] ** 2 + x[..., 1] ** 2
    return 0.5 + (np.sin(k * np.sqrt(r2)) ** 2 - 0.5) / (1.0 + 0.001 * r2) ** 2


_FUNCTIONS = {
    BenchmarkId.SPHERICAL: spherical,
    BenchmarkId.ROSENBROCK: rosenbrock,
    BenchmarkId.RASTRIGIN: rastrigin,
    BenchmarkId.GRIEWANK: griewank,
    BenchmarkId.SCHAFFER: schaffer_f6,
}

_OPTIMA = {
    BenchmarkId.SPHERICAL: (0.0, 0.0),
    BenchmarkId.ROSENBROCK: (1.0, 1.0),
    BenchmarkId.RASTRIGIN: (0.0, 0.0),
    BenchmarkId.GRIEWANK: (0.0, 0.0),
    BenchmarkId.SCHAFFER: (0.0, 0.0),
}

# half-sides of the per-function boards and the usual success thresholds
_PER_FUNCTION = {
    BenchmarkId.SPHERICAL: (100.0, 0.01),
    BenchmarkId.ROSENBROCK: (30.0, 100.0),
    BenchmarkId.RASTRIGIN: (5.12, 100.0),
    BenchmarkId.GRIEWANK: (600.0, 0.1),
    BenchmarkId.SCHAFFER: (100.0, 1e-5),
}


def evaluate(id: BenchmarkId, x, degrees: bool = False) -> np.ndarray:
    """Vectorized objective: ``x`` has shape ``(..., 2)``."""
    return _FUNCTIONS[BenchmarkId(id)](np.asarray(x, dtype=np.float64), degrees)


def eval(id: BenchmarkId, x, degrees: bool = False) -> float:
    """Value of benchmark ``id`` at the single point ``x``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite point")
    return float(evaluate(id, x, degrees))


def optimum_point(id: BenchmarkId) -> tuple[float, float]:
    return _OPTIMA[BenchmarkId(id)]


def default_spec(id: BenchmarkId, study: Study = Study.UNIFORM) -> BenchmarkSpec:
    id = BenchmarkId(id)
    if Study(study) is Study.UNIFORM:
        half_side, goal = 100.0, 0.01
    else:
        half_side, goal = _PER_FUNCTION[id]
    return BenchmarkSpec(id, half_side, goal, 0.0, _OPTIMA[id])
