"""Random geometric graphs on a square board and disk-percolation tools.

The board is the axis-aligned square of side ``S`` centred at the origin.
A radius ``R`` and a population ``P`` are tied to the expected number of
neighbours ``a`` through ``R = sqrt(a * S**2 / (pi * P))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoardSpec:
    side: float = 200.0
    population: int = 30

    def __post_init__(self):
        if not self.side > 0:
            raise ValueError("board side must be positive")
        if self.population < 1:
            raise ValueError("population must be at least 1")


def radius_from_degree(a: float, board: BoardSpec) -> float:
    """Neighbourhood radius giving an expected degree ``a``."""
    if a < 0:
        raise ValueError(f"expected degree must be non-negative, got {a}")
    return math.sqrt(a * board.side**2 / (math.pi * board.population))


def degree_from_radius(radius: float, board: BoardSpec) -> float:
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    return math.pi * board.population * radius**2 / board.side**2


def sample_positions(board: BoardSpec, rng: np.random.Generator) -> np.ndarray:
    """``P`` points i.i.d. uniform on the board, shape ``(P, 2)``."""
    h = board.side / 2.0
    return rng.uniform(-h, h, size=(board.population, 2))


@dataclass(frozen=True)
class GeometricGraph:
    positions: np.ndarray
    radius: float
    adjacency: tuple[frozenset, ...]

    @property
    def n_nodes(self) -> int:
        return len(self.adjacency)

    def edges(self):
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                if i < j:
                    yield i, j


def _edge_pairs(positions: np.ndarray, radius: float) -> np.ndarray:
    n = len(positions)
    if n < 2:
        return np.empty((0, 2), dtype=np.intp)
    if n > 512:
        from scipy.spatial import cKDTree

        # over-query slightly, then apply the exact rule used below
        pairs = cKDTree(positions).query_pairs(radius * (1 + 1e-9) + 1e-300, output_type="ndarray")
        if len(pairs) == 0:
            return np.empty((0, 2), dtype=np.intp)
        d = positions[pairs[:, 0]] - positions[pairs[:, 1]]
        keep = np.sqrt(d[:, 0] ** 2 + d[:, 1] ** 2) <= radius
        return pairs[keep]
    i, j = np.triu_indices(n, k=1)
    d = positions[i] - positions[j]
    keep = np.sqrt(d[:, 0] ** 2 + d[:, 1] ** 2) <= radius
    return np.stack([i[keep], j[keep]], axis=1)


def build_graph(positions, radius: float) -> GeometricGraph:
    """Connect every pair of distinct nodes at distance ``<= radius``."""
    if radius < 0:
        raise ValueError(f"radius must be non-negative, got {radius}")
    positions = np.asarray(positions, dtype=np.float64).reshape(-1, 2)
    nbrs: list[set] = [set() for _ in range(len(positions))]
    for i, j in _edge_pairs(positions, radius).tolist():
        nbrs[i].add(j)
        nbrs[j].add(i)
    return GeometricGraph(positions, float(radius), tuple(frozenset(s) for s in nbrs))


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.count -= 1


@dataclass(frozen=True)
class ComponentLabeling:
    labels: tuple[int, ...]
    count: int
    largest: int


def _label_edges(n: int, edges) -> ComponentLabeling:
    uf = UnionFind(n)
    for i, j in edges:
        uf.union(i, j)
    # relabel roots densely, in order of first appearance
    dense: dict[int, int] = {}
    labels = tuple(dense.setdefault(uf.find(i), len(dense)) for i in range(n))
    largest = max((uf.size[r] for r in dense), default=0)
    return ComponentLabeling(labels, uf.count, largest)


def connected_components(g: GeometricGraph) -> ComponentLabeling:
    return _label_edges(g.n_nodes, g.edges())


def giant_fraction(g: GeometricGraph) -> float:
    """Share of nodes in the largest connected component."""
    if g.n_nodes < 1:
        raise ValueError("graph has no nodes")
    return connected_components(g).largest / g.n_nodes


def empirical_mean_degree(g: GeometricGraph) -> float:
    if g.n_nodes < 1:
        raise ValueError("graph has no nodes")
    return sum(len(s) for s in g.adjacency) / g.n_nodes


@dataclass(frozen=True)
class GridPoint:
    a: float
    radius: float
    mean_giant_fraction: float
    stderr: float


@dataclass(frozen=True)
class ThresholdEstimate:
    threshold: float
    ci_low: float
    ci_high: float
    grid: tuple[GridPoint, ...]


def _crossing(a_grid: np.ndarray, means: np.ndarray, level: float = 0.5) -> float:
    above = np.nonzero(means >= level)[0]
    if len(above) == 0 or above[0] == 0:
        raise ValueError("grid does not bracket threshold")
    k = above[0]
    a0, a1 = a_grid[k - 1], a_grid[k]
    m0, m1 = means[k - 1], means[k]
    return float(a0 + (level - m0) * (a1 - a0) / (m1 - m0))


def estimate_percolation_threshold(
    n_nodes: int,
    board_side: float,
    a_grid,
    trials_per_point: int,
    rng: np.random.Generator,
    n_boot: int = 1000,
    confidence: float = 0.95,
) -> ThresholdEstimate:
    """Expected degree at which the mean giant fraction first reaches 1/2.

    For every grid value, ``trials_per_point`` independent graphs are drawn
    with ``R = radius_from_degree(a)``. The crossing is linearly
    interpolated between grid points; the confidence interval comes from
    resampling trials within each grid point.
    """
    a_grid = np.asarray(a_grid, dtype=np.float64)
    if n_nodes < 100:
        raise ValueError("n_nodes must be at least 100")
    if trials_per_point < 10:
        raise ValueError("trials_per_point must be at least 10")
    if len(a_grid) == 0 or np.any(np.diff(a_grid) <= 0):
        raise ValueError("a_grid must be strictly increasing")
    board = BoardSpec(board_side, n_nodes)

    fractions = np.empty((len(a_grid), trials_per_point))
    radii = [radius_from_degree(a, board) for a in a_grid]
    for t in range(trials_per_point):
        # one point set per trial, shared across the grid, so each trial is monotone in a
        pts = sample_positions(board, rng)
        for k, r in enumerate(radii):
            lab = _label_edges(n_nodes, _edge_pairs(pts, r).tolist())
            fractions[k, t] = lab.largest / n_nodes
    means = fractions.mean(axis=1)
    stderr = fractions.std(axis=1, ddof=1) / math.sqrt(trials_per_point)
    estimate = _crossing(a_grid, means)

    boot = []
    for _ in range(n_boot):
        idx = rng.integers(0, trials_per_point, size=trials_per_point)
        try:
            boot.append(_crossing(a_grid, fractions[:, idx].mean(axis=1)))
        except ValueError:
            continue
    alpha = (1.0 - confidence) / 2.0
    lo, hi = np.quantile(boot, [alpha, 1.0 - alpha]) if boot else (estimate, estimate)
    grid = tuple(
        GridPoint(float(a), r, float(m), float(s))
        for a, r, m, s in zip(a_grid, radii, means, stderr)
    )
    return ThresholdEstimate(estimate, float(lo), float(hi), grid)
