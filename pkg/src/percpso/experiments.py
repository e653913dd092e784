"""Declarative parameter sweeps and their orchestration.

Every run in a sweep is identified by ``(function, grid_index, run_index)``
and seeded from a keyed hash of that triple and the master seed, so the
outcome of a cell never depends on scheduling, worker count, or on which
other cells are part of the sweep.
"""

from __future__ import annotations

import csv
import hashlib
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .bench import ALL_BENCHMARKS, BenchmarkId, Study, default_spec
from .geom import BoardSpec, degree_from_radius, radius_from_degree
from .metrics import SweepSummary, correlation_matrix, summarize
from .swarm import PARAMETER_PRESETS, ParameterSet, RunResult, SwarmConfig, run_batch

THREADS_ENV = "PERC_PSO_THREADS"


@dataclass(frozen=True)
class SweepSpec:
    name: str
    grid: tuple[float, ...]
    grid_kind: str = "degree"  # or "radius"
    functions: tuple[BenchmarkId, ...] = ALL_BENCHMARKS
    runs_per_cell: int = 20
    parameter_set: ParameterSet = ParameterSet.CLERC
    domain_mode: Study = Study.UNIFORM
    master_seed: int = 0
    population: int = 30
    max_steps: int = 900
    # extra SwarmConfig fields applied to every cell
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "grid", tuple(float(g) for g in self.grid))
        object.__setattr__(self, "functions", tuple(BenchmarkId(f) for f in self.functions))
        object.__setattr__(self, "parameter_set", ParameterSet(self.parameter_set))
        object.__setattr__(self, "domain_mode", Study(self.domain_mode))
        if not self.grid:
            raise ValueError("grid must not be empty")
        if any(g < 0 for g in self.grid):
            raise ValueError("grid values must be non-negative")
        if self.grid_kind not in ("degree", "radius"):
            raise ValueError(f"grid_kind must be 'degree' or 'radius', got {self.grid_kind!r}")
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be at least 1")
        valid = {f.name for f in fields(SwarmConfig)}
        bad = set(self.overrides) - valid
        if bad:
            raise ValueError(f"unknown config override(s): {sorted(bad)}")

    @property
    def total_runs(self) -> int:
        return len(self.grid) * len(self.functions) * self.runs_per_cell

    def board(self, fn: BenchmarkId) -> BoardSpec:
        return BoardSpec(default_spec(fn, self.domain_mode).side, self.population)

    def cell_geometry(self, fn: BenchmarkId, grid_index: int) -> tuple[float, float]:
        """``(expected_degree, radius)`` of a grid point for ``fn``'s board."""
        g = self.grid[grid_index]
        board = self.board(fn)
        if self.grid_kind == "degree":
            return g, radius_from_degree(g, board)
        return degree_from_radius(g, board), g

    def cell_config(self, fn: BenchmarkId, grid_index: int) -> SwarmConfig:
        bench = default_spec(fn, self.domain_mode)
        _, radius = self.cell_geometry(fn, grid_index)
        w, c1, c2 = PARAMETER_PRESETS[self.parameter_set]
        base = dict(
            benchmark=fn,
            population=self.population,
            board_side=bench.side,
            inertia=w,
            personal_coeff=c1,
            social_coeff=c2,
            radius=radius,
            v_max=bench.half_side,
            goal=bench.goal,
            max_steps=self.max_steps,
        )
        base.update(self.overrides)
        return SwarmConfig(**base)

    def with_(self, **changes) -> "SweepSpec":
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        kw.update(changes)
        return SweepSpec(**kw)


def stable_seed(master_seed: int, fn: BenchmarkId, grid_index: int, run_index: int) -> int:
    """64-bit seed from a BLAKE2b digest of the cell coordinates."""
    key = f"{int(master_seed)}|{BenchmarkId(fn).value}|{int(grid_index)}|{int(run_index)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


def _frange(start: float, stop: float, step: float, ndigits: int) -> tuple[float, ...]:
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + k * step, ndigits) for k in range(n))


def dataset_a_spec(seed: int = 0) -> SweepSpec:
    return SweepSpec("a", _frange(0.0, 0.9, 0.1, 10), master_seed=seed)


def dataset_b_spec(seed: int = 0) -> SweepSpec:
    return SweepSpec("b", tuple(float(a) for a in range(1, 31)), master_seed=seed)


def critical_sweep_spec(seed: int = 0) -> SweepSpec:
    return SweepSpec("critical", _frange(4.370, 4.515, 0.001, 10), master_seed=seed)


def small_r_sweep_spec(seed: int = 0) -> SweepSpec:
    return SweepSpec("small-r", _frange(0.0, 0.9, 0.01, 10), grid_kind="radius", master_seed=seed)


def cross_domain_spec(seed: int = 0) -> SweepSpec:
    return SweepSpec(
        "cross",
        (0.00151, 0.8, 4.512, 29.0),
        runs_per_cell=100,
        parameter_set=ParameterSet.TRELEA,
        domain_mode=Study.PER_FUNCTION,
        master_seed=seed,
    )


DATASETS = {
    "a": dataset_a_spec,
    "b": dataset_b_spec,
    "critical": critical_sweep_spec,
    "small-r": small_r_sweep_spec,
    "cross": cross_domain_spec,
}

# goal-percentage intervals of the small-radius breakdown (both ends inclusive)
SMALL_R_INTERVALS = ((0.0, 0.25), (0.26, 0.50), (0.51, 0.75), (0.75, 0.90))


@dataclass(frozen=True)
class RunRecord:
    fn: BenchmarkId
    grid_index: int
    run_index: int
    a: float
    radius: float
    result: RunResult


@dataclass
class SweepResult:
    spec: SweepSpec
    records: list[RunRecord]
    version: str = __version__

    def cell(self, fn: BenchmarkId, grid_index: int) -> list[RunResult]:
        return [r.result for r in self.records if r.fn == fn and r.grid_index == grid_index]

    def cell_summaries(self) -> list[SweepSummary]:
        groups: dict[tuple, list[RunResult]] = {}
        for r in self.records:
            groups.setdefault((r.fn, r.grid_index), []).append(r.result)
        return [summarize(k, v) for k, v in groups.items()]

    def function_totals(self) -> list[SweepSummary]:
        return [summarize(fn, [r.result for r in self.records if r.fn == fn]) for fn in self.spec.functions]

    def grid_totals(self) -> list[SweepSummary]:
        """Per grid point, pooled over functions."""
        return [
            summarize(k, [r.result for r in self.records if r.grid_index == k])
            for k in range(len(self.spec.grid))
        ]

    def total(self, select=None) -> SweepSummary:
        rs = [r.result for r in self.records if select is None or select(r)]
        return summarize("all", rs)

    def interval_totals(self, intervals=SMALL_R_INTERVALS, fn: Optional[BenchmarkId] = None) -> list[SweepSummary]:
        """Summaries over ranges of the grid value, optionally for one function."""
        out = []
        for lo, hi in intervals:
            def sel(r, lo=lo, hi=hi):
                g = self.spec.grid[r.grid_index]
                return lo - 1e-9 <= g <= hi + 1e-9 and (fn is None or r.fn == fn)
            out.append(summarize((lo, hi), [r.result for r in self.records if sel(r)]))
        return out

    def correlation_series(self) -> dict[str, list[float]]:
        rows = self.grid_totals()
        return {
            "R": [self.spec.cell_geometry(self.spec.functions[0], k)[1] for k in range(len(rows))],
            "social_best": [s.mean_social_best for s in rows],
            "personal_best": [s.mean_personal_best for s in rows],
            "global_best": [s.mean_best_global for s in rows],
            "goals": [s.goal_percent for s in rows],
            "steps": [s.mean_steps_all for s in rows],
        }

    def correlations(self):
        return correlation_matrix(self.correlation_series())


def resolve_workers(workers: Optional[int] = None) -> int:
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        workers = int(raw) if raw else 0
    if workers < 0:
        raise ValueError("worker count must be non-negative")
    return workers or (os.cpu_count() or 1)


def _jobs(spec: SweepSpec):
    for fn in spec.functions:
        for gi in range(len(spec.grid)):
            cfg = spec.cell_config(fn, gi)
            for ri in range(spec.runs_per_cell):
                yield (fn, gi, ri), cfg, stable_seed(spec.master_seed, fn, gi, ri)


def _run_chunk(chunk):
    keys, cfgs, seeds = zip(*chunk)
    return list(zip(keys, run_batch(list(cfgs), list(seeds))))


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> SweepResult:
    """Execute every run of ``spec``; results are ordered by cell key."""
    workers = resolve_workers(workers)
    jobs = list(_jobs(spec))
    done: list = []
    if workers == 1:
        by_fn: dict = {}
        for job in jobs:
            by_fn.setdefault(job[0][0], []).append(job)
        for chunk in by_fn.values():
            done.extend(_run_chunk(chunk))
    else:
        n_chunks = max(workers * 2, 1)
        chunks = [jobs[k::n_chunks] for k in range(n_chunks)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, [c for c in chunks if c]):
                done.extend(part)
    done.sort(key=lambda kr: (spec.functions.index(kr[0][0]), kr[0][1], kr[0][2]))
    records = []
    for (fn, gi, ri), res in done:
        a, radius = spec.cell_geometry(fn, gi)
        records.append(RunRecord(fn, gi, ri, a, radius, res))
    return SweepResult(spec, records)


# ------------------------------------------------------------------ output


def fmt(x) -> str:
    """Round-trip decimal text; booleans as 0/1, missing values empty."""
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


RUN_COLUMNS = ("fn", "a", "R", "seed", "success", "steps", "best_global_val", "mean_social_best", "mean_personal_best")
SUMMARY_COLUMNS = (
    "fn", "a", "R", "runs", "goal_percent", "mean_best_global", "mean_steps_goal",
    "mean_steps_all", "mean_social_best", "mean_personal_best",
)


def _summary_row(fn: str, a, radius, s: SweepSummary) -> list[str]:
    return [
        fn, fmt(a), fmt(radius), fmt(s.run_count), fmt(s.goal_percent), fmt(s.mean_best_global),
        fmt(s.mean_steps_goal), fmt(s.mean_steps_all), fmt(s.mean_social_best), fmt(s.mean_personal_best),
    ]


def _csv_text(header_comment: str, columns: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    buf.write(header_comment.rstrip("\n") + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def runs_csv(result: SweepResult, header_comment: str) -> str:
    rows = (
        [r.fn.value, fmt(r.a), fmt(r.radius), fmt(r.result.seed), fmt(r.result.success), fmt(r.result.steps),
         fmt(r.result.best_global_val), fmt(r.result.mean_social_best), fmt(r.result.mean_personal_best)]
        for r in result.records
    )
    return _csv_text(header_comment, RUN_COLUMNS, rows)


def summary_csv(result: SweepResult, header_comment: str) -> str:
    spec = result.spec
    rows = []
    for s in result.cell_summaries():
        fn, gi = s.key
        a, radius = spec.cell_geometry(fn, gi)
        rows.append(_summary_row(fn.value, a, radius, s))
    for s in result.function_totals():
        rows.append(_summary_row(s.key.value, None, None, s))
    rows.append(_summary_row("all", None, None, result.total()))
    return _csv_text(header_comment, SUMMARY_COLUMNS, rows)


def plotdata_csvs(result: SweepResult, header_comment: str) -> dict[str, str]:
    """Per-radius curves: pooled over functions, then one file per function."""
    spec = result.spec
    out = {}
    pooled = []
    for k, s in enumerate(result.grid_totals()):
        a, radius = spec.cell_geometry(spec.functions[0], k)
        pooled.append(_summary_row("all", a, radius, s))
    out["plotdata_all.csv"] = _csv_text(header_comment, SUMMARY_COLUMNS, pooled)
    cells = {s.key: s for s in result.cell_summaries()}
    for fn in spec.functions:
        rows = []
        for k in range(len(spec.grid)):
            a, radius = spec.cell_geometry(fn, k)
            rows.append(_summary_row(fn.value, a, radius, cells[(fn, k)]))
        out[f"plotdata_{fn.value}.csv"] = _csv_text(header_comment, SUMMARY_COLUMNS, rows)
    return out


def write_outputs(result: SweepResult, out_dir, header_comment: str) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {"runs.csv": runs_csv(result, header_comment), "summary.csv": summary_csv(result, header_comment)}
    files.update(plotdata_csvs(result, header_comment))
    written = []
    for name, text in files.items():
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
