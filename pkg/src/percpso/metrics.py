"""Summary statistics over run results and Pearson correlation tables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .swarm import RunResult


@dataclass(frozen=True)
class SweepSummary:
    key: Hashable
    goal_percent: float
    mean_best_global: float
    mean_steps_goal: Optional[float]
    mean_steps_all: float
    mean_social_best: float
    mean_personal_best: float
    run_count: int


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def summarize(key: Hashable, results: Sequence[RunResult]) -> SweepSummary:
    if not results:
        raise ValueError("cannot summarize an empty result list")
    won = [r.steps for r in results if r.success]
    return SweepSummary(
        key=key,
        goal_percent=100.0 * len(won) / len(results),
        mean_best_global=_mean([r.best_global_val for r in results]),
        mean_steps_goal=_mean(won) if won else None,
        mean_steps_all=_mean([r.steps for r in results]),
        mean_social_best=_mean([r.mean_social_best for r in results]),
        mean_personal_best=_mean([r.mean_personal_best for r in results]),
        run_count=len(results),
    )


def aggregate(
    results: Iterable[RunResult],
    group_by: Callable[[RunResult], Hashable] = lambda r: None,
) -> list[SweepSummary]:
    """One summary per group, groups ordered by first appearance.

    ``math.fsum`` makes every mean independent of input order.
    """
    groups: dict[Hashable, list[RunResult]] = {}
    for r in results:
        groups.setdefault(group_by(r), []).append(r)
    if not groups:
        raise ValueError("cannot aggregate an empty result list")
    return [summarize(k, rs) for k, rs in groups.items()]


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"series lengths differ: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise ValueError("need at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("undefined correlation: constant series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def correlation_matrix(series: Mapping[str, Sequence[float]]) -> tuple[list[str], np.ndarray]:
    names = list(series)
    n = len(names)
    m = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = pearson(series[names[i]], series[names[j]])
    if n == 1:
        # still validate the single series
        pearson(series[names[0]], series[names[0]])
    return names, m
