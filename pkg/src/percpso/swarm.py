"""Particle swarm engine with radius-limited social information.

Each particle is attracted to its own best position and to the best
position remembered by the particles currently within distance ``R`` of
it. All particles move synchronously from the start-of-step state.

The array kernels below work on arbitrary leading batch axes, so
:func:`run` and :func:`run_batch` execute the very same floating point
operations per run and produce bit-identical results.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .bench import BenchmarkId, evaluate


class VelocityInit(str, enum.Enum):
    ZERO = "zero"
    UNIFORM = "uniform"


class ParameterSet(str, enum.Enum):
    CLERC = "clerc"
    TRELEA = "trelea"


# (inertia, personal, social)
PARAMETER_PRESETS = {
    ParameterSet.CLERC: (0.729, 1.49445, 1.49445),
    ParameterSet.TRELEA: (0.6, 0.7, 0.7),
}


@dataclass(frozen=True)
class SwarmConfig:
    benchmark: BenchmarkId = BenchmarkId.SPHERICAL
    population: int = 30
    board_side: float = 200.0
    inertia: float = 0.729
    personal_coeff: float = 1.49445
    social_coeff: float = 1.49445
    radius: float = 0.0
    v_max: float = 100.0
    goal: float = 0.01
    max_steps: int = 900
    velocity_init: VelocityInit = VelocityInit.UNIFORM
    include_self_in_neighborhood: bool = False
    # trig terms of the objectives read their argument in degrees
    trig_degrees: bool = True

    def __post_init__(self):
        object.__setattr__(self, "benchmark", BenchmarkId(self.benchmark))
        object.__setattr__(self, "velocity_init", VelocityInit(self.velocity_init))
        if self.population < 1:
            raise ValueError("population must be at least 1")
        if not self.board_side > 0:
            raise ValueError("board_side must be positive")
        if not self.v_max > 0:
            raise ValueError("v_max must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.radius < 0:
            raise ValueError("radius must be non-negative")
        if not 0.0 <= self.inertia <= 1.0:
            raise ValueError("inertia must lie in [0, 1]")
        if self.personal_coeff < 0 or self.social_coeff < 0:
            raise ValueError("attraction coefficients must be non-negative")
        if not self.goal > 0:
            raise ValueError("goal must be positive")

    @classmethod
    def preset(cls, parameter_set: ParameterSet = ParameterSet.CLERC, **overrides) -> "SwarmConfig":
        w, c1, c2 = PARAMETER_PRESETS[ParameterSet(parameter_set)]
        base = dict(inertia=w, personal_coeff=c1, social_coeff=c2)
        base.update(overrides)
        return cls(**base)

    def with_(self, **changes) -> "SwarmConfig":
        return replace(self, **changes)


class Particle(NamedTuple):
    position: np.ndarray
    velocity: np.ndarray
    personal_best_pos: np.ndarray
    personal_best_val: float


@dataclass
class SwarmState:
    """Swarm snapshot; rows of every array are particles."""

    positions: np.ndarray
    velocities: np.ndarray
    best_positions: np.ndarray
    best_values: np.ndarray
    step: int = 0
    best_global_val: float = field(init=False)
    best_global_pos: np.ndarray = field(init=False)

    def __post_init__(self):
        k = int(np.argmin(self.best_values))
        self.best_global_val = float(self.best_values[k])
        self.best_global_pos = self.best_positions[k].copy()

    @property
    def particles(self) -> list[Particle]:
        return [
            Particle(self.positions[i], self.velocities[i], self.best_positions[i], float(self.best_values[i]))
            for i in range(len(self.positions))
        ]

    def copy(self) -> "SwarmState":
        return SwarmState(
            self.positions.copy(),
            self.velocities.copy(),
            self.best_positions.copy(),
            self.best_values.copy(),
            self.step,
        )


@dataclass(frozen=True)
class RunResult:
    success: bool
    steps: int
    best_global_val: float
    mean_social_best: float
    mean_personal_best: float
    seed: Optional[int] = None


# ---------------------------------------------------------------- kernels


def _clamp(v: np.ndarray, v_max) -> np.ndarray:
    norm = np.sqrt(v[..., 0] ** 2 + v[..., 1] ** 2)[..., None]
    over = norm > v_max
    return np.where(over, v * (v_max / np.where(over, norm, 1.0)), v)


def _neighbour_best(x: np.ndarray, values: np.ndarray, radius, include_self: bool):
    """Index of the best neighbour of every particle and whether it has one."""
    dx = x[..., :, None, 0] - x[..., None, :, 0]
    dy = x[..., :, None, 1] - x[..., None, :, 1]
    within = np.sqrt(dx * dx + dy * dy) <= radius
    if not include_self:
        n = x.shape[-2]
        within &= ~np.eye(n, dtype=bool)
    masked = np.where(within, values[..., None, :], np.inf)
    # argmin keeps the first minimum: ties go to the lowest index
    return masked.argmin(axis=-1), within.any(axis=-1)


def _move(x, v, p, j, has, draws, w, c1, c2, v_max):
    g = np.take_along_axis(p, j[..., None], axis=-2)
    base = w * v + c1 * draws[..., 0, :, :] * (p - x)
    social = base + c2 * draws[..., 1, :, :] * (g - x)
    v_new = _clamp(np.where(has[..., None], social, base), v_max)
    return x + v_new, v_new


def _remember(x, p, pv, fx):
    better = fx < pv
    return np.where(better[..., None], x, p), np.where(better, fx, pv)


def _social_summary(x, p, pv, radius, include_self):
    j, has = _neighbour_best(x, pv, radius, include_self)
    vals = np.where(has, np.take_along_axis(pv, j, axis=-1), 0.0)
    return vals.mean(axis=-1)


# ------------------------------------------------------------- public API


def clamp_velocity(v, v_max: float) -> np.ndarray:
    """Rescale ``v`` onto the ``v_max`` circle when it is longer than that."""
    return _clamp(np.asarray(v, dtype=np.float64), v_max)


def init_swarm(config: SwarmConfig, rng: np.random.Generator) -> SwarmState:
    """Uniform positions on the board; personal bests start at the positions."""
    h = config.board_side / 2.0
    x = rng.uniform(-h, h, size=(config.population, 2))
    if config.velocity_init is VelocityInit.UNIFORM:
        v = _clamp(rng.uniform(-config.v_max, config.v_max, size=(config.population, 2)), config.v_max)
    else:
        v = np.zeros((config.population, 2))
    fx = evaluate(config.benchmark, x, config.trig_degrees)
    return SwarmState(x, v, x.copy(), fx)


def social_best(state: SwarmState, i: int, radius: float, include_self: bool = False):
    """``(position, value)`` of the best memory among neighbours of ``i``, or None."""
    x = state.positions
    d = np.sqrt((x[:, 0] - x[i, 0]) ** 2 + (x[:, 1] - x[i, 1]) ** 2)
    within = d <= radius
    if not include_self:
        within[i] = False
    if not within.any():
        return None
    j = int(np.argmin(np.where(within, state.best_values, np.inf)))
    return state.best_positions[j].copy(), float(state.best_values[j])


def step(state: SwarmState, config: SwarmConfig, rng) -> SwarmState:
    """Advance every particle once; returns a new state.

    ``rng`` only needs ``random(shape)``; each step consumes one array of
    shape ``(2, P, 2)``: cognitive draws first, then social draws.
    """
    P = config.population
    draws = np.asarray(rng.random((2, P, 2)), dtype=np.float64)
    j, has = _neighbour_best(state.positions, state.best_values, config.radius, config.include_self_in_neighborhood)
    x, v = _move(
        state.positions, state.velocities, state.best_positions, j, has, draws,
        config.inertia, config.personal_coeff, config.social_coeff, config.v_max,
    )
    fx = evaluate(config.benchmark, x, config.trig_degrees)
    p, pv = _remember(x, state.best_positions, state.best_values, fx)
    return SwarmState(x, v, p, pv, state.step + 1)


def finish(state: SwarmState, config: SwarmConfig, seed: Optional[int] = None) -> RunResult:
    social = _social_summary(
        state.positions, state.best_positions, state.best_values, config.radius, config.include_self_in_neighborhood
    )
    return RunResult(
        success=bool(state.best_global_val <= config.goal),
        steps=state.step,
        best_global_val=state.best_global_val,
        mean_social_best=float(social),
        mean_personal_best=float(state.best_values.mean()),
        seed=seed,
    )


def run(config: SwarmConfig, rng, seed: Optional[int] = None) -> RunResult:
    """Step until the best memory reaches the goal or ``max_steps`` is hit."""
    if isinstance(rng, (int, np.integer)):
        seed, rng = int(rng), np.random.default_rng(int(rng))
    state = init_swarm(config, rng)
    while state.best_global_val > config.goal and state.step < config.max_steps:
        state = step(state, config, rng)
    return finish(state, config, seed)


def _group_key(c: SwarmConfig):
    return (c.benchmark, c.population, c.include_self_in_neighborhood, c.trig_degrees)


def run_batch(configs: Sequence[SwarmConfig], seeds: Sequence[int]) -> list[RunResult]:
    """Run many independent swarms at once, each seeded with its own stream.

    Results equal ``[run(c, s) for c, s in zip(configs, seeds)]`` bit for
    bit; batching only amortizes interpreter overhead.
    """
    if len(configs) != len(seeds):
        raise ValueError("configs and seeds differ in length")
    out: list[Optional[RunResult]] = [None] * len(configs)
    groups: dict[tuple, list[int]] = {}
    for k, c in enumerate(configs):
        groups.setdefault(_group_key(c), []).append(k)
    for idx in groups.values():
        for k, res in zip(idx, _run_group([configs[k] for k in idx], [seeds[k] for k in idx])):
            out[k] = res
    return out  # type: ignore[return-value]


def _col(configs, name):
    return np.array([getattr(c, name) for c in configs], dtype=np.float64)


def _run_group(configs: list[SwarmConfig], seeds: list[int]) -> list[RunResult]:
    c0 = configs[0]
    fn, deg, inc, P = c0.benchmark, c0.trig_degrees, c0.include_self_in_neighborhood, c0.population
    rngs = [np.random.default_rng(s) for s in seeds]
    states = [init_swarm(c, r) for c, r in zip(configs, rngs)]
    x = np.stack([s.positions for s in states])
    v = np.stack([s.velocities for s in states])
    p = x.copy()
    pv = np.stack([s.best_values for s in states])
    del states

    w = _col(configs, "inertia")[:, None, None]
    c1 = _col(configs, "personal_coeff")[:, None, None]
    c2 = _col(configs, "social_coeff")[:, None, None]
    vmax = _col(configs, "v_max")[:, None, None]
    radius = _col(configs, "radius")[:, None, None]
    goal = _col(configs, "goal")
    limit = np.array([c.max_steps for c in configs])

    results: list[Optional[RunResult]] = [None] * len(configs)
    active = np.arange(len(configs))
    t = 0

    def retire(done_mask):
        nonlocal x, v, p, pv, w, c1, c2, vmax, radius, goal, limit, active
        done = np.nonzero(done_mask)[0]
        if len(done) == 0:
            return
        social = _social_summary(x[done], p[done], pv[done], radius[done], inc)
        for k, d in enumerate(done):
            run_id = active[d]
            best = float(pv[d].min())
            results[run_id] = RunResult(
                success=bool(best <= goal[d]),
                steps=t,
                best_global_val=best,
                mean_social_best=float(social[k]),
                mean_personal_best=float(pv[d].mean()),
                seed=seeds[run_id],
            )
        keep = ~done_mask
        x, v, p, pv = x[keep], v[keep], p[keep], pv[keep]
        w, c1, c2, vmax, radius = w[keep], c1[keep], c2[keep], vmax[keep], radius[keep]
        goal, limit, active = goal[keep], limit[keep], active[keep]

    retire(pv.min(axis=1) <= goal)
    draws = np.empty((len(active), 2, P, 2))
    while len(active):
        draws = draws[: len(active)]
        for k, run_id in enumerate(active):
            rngs[run_id].random(out=draws[k])
        j, has = _neighbour_best(x, pv, radius, inc)
        x, v = _move(x, v, p, j, has, draws, w, c1, c2, vmax)
        fx = evaluate(fn, x, deg)
        p, pv = _remember(x, p, pv, fx)
        t += 1
        retire((pv.min(axis=1) <= goal) | (limit <= t))
    return results  # type: ignore[return-value]
