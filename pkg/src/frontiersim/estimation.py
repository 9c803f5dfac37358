"""Ground-truth frontier property estimation.

For each frontier this module computes the navigable area hidden behind it
and the timesteps needed to sweep that region and come back out, priced as a
tour over the free-space skeleton. A pluggable estimator interface lets the
planner run from exact values or deterministically perturbed ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from . import kernels
from .grid import Cell, GroundTruthMap, ObservedMap
from .frontiers import Frontier

# Snap tolerance for ceil() after the cell-distance -> timestep multiply;
# absorbs float representation error without ever crossing a true boundary
# (distinct grid path costs differ by far more than 1e-9).
_CEIL_EPS = 1e-9


def to_timesteps(cell_distance: float, step_ratio: float) -> int:
    """Convert a grid path cost to timesteps, rounding up."""
    if cell_distance <= 0:
        return 0
    return math.ceil(cell_distance * step_ratio - _CEIL_EPS)


@dataclass(frozen=True)
class FrontierEstimate:
    """Estimated properties of the space behind one frontier.

    area: free cells in the hidden region; explore_steps: timesteps to sweep
    the region; exit_steps: timesteps to come back out to the frontier.
    Oracle values are exact integers; noisy estimators produce floats.
    """

    area: float
    explore_steps: float
    exit_steps: float

    def __post_init__(self):
        if self.area < 0 or self.explore_steps < 0 or self.exit_steps < 0:
            raise ValueError("estimates must be non-negative")
        if self.area == 0 and (self.explore_steps != 0 or self.exit_steps != 0):
            raise ValueError("zero-area estimates must have zero step costs")


@dataclass(frozen=True)
class SkeletonGraph:
    """Thinned free-space raster as a graph: 8-adjacent cells, unit/sqrt2 edges."""

    nodes: tuple[Cell, ...]
    edges: tuple[tuple[Cell, Cell, float], ...]
    mask: np.ndarray


class DisconnectedGraphError(ValueError):
    pass


def skeletonize(free_mask: np.ndarray) -> SkeletonGraph:
    """Thin a free-space mask to a skeleton graph.

    Iteratively removes boundary pixels while preserving topology, so the
    skeleton has exactly as many 8-connected components as the input mask.
    """
    if free_mask.size == 0:
        raise ValueError("free mask must be non-empty")
    thin = kernels.thin_mask(free_mask.astype(bool))
    ys, xs = np.nonzero(thin)
    nodes = tuple(Cell(int(x), int(y)) for y, x in sorted(zip(ys.tolist(), xs.tolist())))
    edges = []
    node_set = set(nodes)
    for c in nodes:
        for dx, dy in ((1, -1), (1, 0), (1, 1), (0, 1)):
            nb = Cell(c.x + dx, c.y + dy)
            if nb in node_set:
                weight = kernels.SQRT2 if dx != 0 and dy != 0 else 1.0
                edges.append((c, nb, weight))
    return SkeletonGraph(nodes, tuple(edges), thin)


def region_mask_beyond(
    gt: GroundTruthMap, observed: ObservedMap, frontier: Frontier
) -> np.ndarray:
    """Mask of the unexplored navigable region behind a frontier.

    Union of 4-connected components of {unknown in observed, free in ground
    truth} that contain a frontier cell or touch the frontier 4-adjacently.
    """
    hidden_free = observed.unknown_mask & gt.free_mask
    seeds_y = []
    seeds_x = []
    h, w = hidden_free.shape
    for c in frontier.cells:
        if hidden_free[c.y, c.x]:
            seeds_y.append(c.y)
            seeds_x.append(c.x)
        for nx, ny in ((c.x, c.y - 1), (c.x - 1, c.y), (c.x + 1, c.y), (c.x, c.y + 1)):
            if 0 <= nx < w and 0 <= ny < h and hidden_free[ny, nx]:
                seeds_y.append(ny)
                seeds_x.append(nx)
    if not seeds_y:
        return np.zeros_like(hidden_free)
    return kernels.flood_fill(
        hidden_free,
        np.asarray(seeds_y, dtype=np.int64),
        np.asarray(seeds_x, dtype=np.int64),
        False,
    )


def region_beyond(gt: GroundTruthMap, observed: ObservedMap, frontier: Frontier) -> set[Cell]:
    mask = region_mask_beyond(gt, observed, frontier)
    ys, xs = np.nonzero(mask)
    return {Cell(int(x), int(y)) for x, y in zip(xs, ys)}


def oracle_area(gt: GroundTruthMap, observed: ObservedMap, frontier: Frontier) -> int:
    """Free-cell count of the region behind the frontier."""
    return int(region_mask_beyond(gt, observed, frontier).sum())


def _nearest_node(mask: np.ndarray, target: Cell) -> Cell | None:
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return None
    d2 = (xs - target.x) ** 2 + (ys - target.y) ** 2
    order = np.lexsort((xs, ys, d2))
    i = order[0]
    return Cell(int(xs[i]), int(ys[i]))


def skeleton_subgraph(
    skeleton: SkeletonGraph, region_mask: np.ndarray, anchor: Cell
) -> tuple[list[Cell], np.ndarray]:
    """Skeleton cells inside the region, made connected for touring.

    The tour anchor is the skeleton node nearest ``anchor``; region skeleton
    components that are disconnected from it are joined by their shortest
    connecting paths in the full skeleton. Components with no skeleton path
    from the anchor at all (free space split by walls) are dropped since no
    tour can reach them.
    """
    sub_mask = skeleton.mask & region_mask
    start = _nearest_node(skeleton.mask, anchor)
    if start is None or not sub_mask.any():
        return [], np.zeros_like(sub_mask)
    aug = sub_mask.copy()
    aug[start.y, start.x] = True
    labels, count = kernels.label_components(sub_mask, True)
    if count > 0:
        fs, fd = kernels.distance_field(skeleton.mask, start.y, start.x, False)
        for lbl in range(1, count + 1):
            comp = labels == lbl
            if comp[start.y, start.x]:
                continue
            reach = (fs >= 0) & comp
            if not reach.any():
                continue
            ys, xs = np.nonzero(reach)
            dist = fs[ys, xs] + fd[ys, xs] * kernels.SQRT2
            order = np.lexsort((xs, ys, dist))
            entry = Cell(int(xs[order[0]]), int(ys[order[0]]))
            for py, px in kernels.descend_path(fs, fd, entry.y, entry.x):
                aug[py, px] = True
        # Drop anything that never got connected to the anchor.
        connected = kernels.flood_fill(
            aug,
            np.array([start.y], dtype=np.int64),
            np.array([start.x], dtype=np.int64),
            True,
        )
        aug = connected
    ys, xs = np.nonzero(aug)
    nodes = [Cell(int(x), int(y)) for y, x in sorted(zip(ys.tolist(), xs.tolist()))]
    return nodes, aug


EXACT_TOUR_MAX_NODES = 12


def tour_costs(graph: SkeletonGraph, start: Cell) -> tuple[float, float]:
    """Cost in cell units of sweeping all graph nodes and of returning.

    Solves the closed tour over the metric closure (exact dynamic program up
    to EXACT_TOUR_MAX_NODES nodes, nearest-neighbor + 2-opt beyond), then
    splits it: first element is the visiting path cost, second the
    shortest-path cost from the tour's last node back to the start.
    """
    if not graph.nodes:
        return 0.0, 0.0
    if start not in set(graph.nodes):
        snapped = _nearest_node(graph.mask, start)
        assert snapped is not None
        start = snapped
    nodes = list(graph.nodes)
    if len(nodes) == 1:
        return 0.0, 0.0
    dist = _metric_closure(graph.mask, nodes)
    if np.isinf(dist).any():
        raise DisconnectedGraphError("skeleton graph is not connected")
    start_idx = nodes.index(start)
    if len(nodes) <= EXACT_TOUR_MAX_NODES:
        path_cost, last = kernels.held_karp_closed(dist, start_idx)
    else:
        path_cost, last = kernels.nn_two_opt_closed(dist, start_idx)
    return float(path_cost), float(dist[last, start_idx])


def _metric_closure(mask: np.ndarray, nodes: list[Cell]) -> np.ndarray:
    ys = np.array([c.y for c in nodes])
    xs = np.array([c.x for c in nodes])
    y0, y1 = int(ys.min()), int(ys.max())
    x0, x1 = int(xs.min()), int(xs.max())
    crop = mask[y0 : y1 + 1, x0 : x1 + 1]
    n = len(nodes)
    dist = np.empty((n, n), dtype=np.float64)
    for i, c in enumerate(nodes):
        fs, fd = kernels.distance_field(crop, c.y - y0, c.x - x0, False)
        for j, o in enumerate(nodes):
            s = fs[o.y - y0, o.x - x0]
            d = fd[o.y - y0, o.x - x0]
            dist[i, j] = math.inf if s < 0 else s + d * kernels.SQRT2
    return dist


def oracle_estimate(
    gt: GroundTruthMap,
    observed: ObservedMap,
    frontier: Frontier,
    step_ratio: float = 1.7,
    skeleton: SkeletonGraph | None = None,
) -> FrontierEstimate:
    """Exact frontier properties from the ground-truth map."""
    region = region_mask_beyond(gt, observed, frontier)
    area = int(region.sum())
    if area == 0:
        return FrontierEstimate(0, 0, 0)
    if skeleton is None:
        skeleton = skeletonize(gt.free_mask)
    nodes, aug_mask = skeleton_subgraph(skeleton, region, frontier.centroid)
    if not nodes:
        return FrontierEstimate(area, 0, 0)
    sub = SkeletonGraph(tuple(nodes), (), aug_mask)
    anchor = _nearest_node(skeleton.mask, frontier.centroid)
    sweep_cells, exit_cells = tour_costs(sub, anchor)  # type: ignore[arg-type]
    return FrontierEstimate(
        area,
        to_timesteps(sweep_cells, step_ratio),
        to_timesteps(exit_cells, step_ratio),
    )


class Estimator(Protocol):
    """Estimates frontier properties; the oracle variant needs ground truth."""

    def estimate(
        self, frontier: Frontier, observed: ObservedMap, gt: GroundTruthMap | None = None
    ) -> FrontierEstimate: ...


class OracleEstimator:
    """Exact estimates from the ground-truth map; caches its skeleton."""

    def __init__(self, step_ratio: float = 1.7):
        self.step_ratio = step_ratio
        self._skeleton_cache: dict[int, SkeletonGraph] = {}

    def estimate(
        self, frontier: Frontier, observed: ObservedMap, gt: GroundTruthMap | None = None
    ) -> FrontierEstimate:
        if gt is None:
            raise ValueError("the oracle estimator requires the ground-truth map")
        skeleton = self._skeleton_cache.get(id(gt))
        if skeleton is None:
            skeleton = skeletonize(gt.free_mask)
            self._skeleton_cache[id(gt)] = skeleton
        return oracle_estimate(gt, observed, frontier, self.step_ratio, skeleton)


class NoisyEstimator:
    """Wraps an estimator with deterministic log-normal multiplicative noise.

    Each field gets an independent factor drawn from lognormal(0, rel_sigma),
    reproducible per (seed, frontier id, step). The episode loop advances
    ``step`` before each planning cycle.
    """

    def __init__(self, inner: Estimator, seed: int, rel_sigma: float):
        if rel_sigma < 0:
            raise ValueError("rel_sigma must be >= 0")
        self.inner = inner
        self.seed = seed
        self.rel_sigma = rel_sigma
        self.step = 0

    def estimate(
        self, frontier: Frontier, observed: ObservedMap, gt: GroundTruthMap | None = None
    ) -> FrontierEstimate:
        base = self.inner.estimate(frontier, observed, gt)
        if self.rel_sigma == 0:
            return base
        values = []
        for idx, value in enumerate((base.area, base.explore_steps, base.exit_steps)):
            rng = np.random.default_rng((self.seed, frontier.id, self.step, idx))
            values.append(max(0.0, value * float(rng.lognormal(0.0, self.rel_sigma))))
        if values[0] == 0.0:
            return FrontierEstimate(0.0, 0.0, 0.0)
        return FrontierEstimate(values[0], values[1], values[2])


def make_estimator(name: str, seed: int = 0, step_ratio: float = 1.7) -> Estimator:
    """Build an estimator from its config name: oracle | oracle-noisy=SIGMA."""
    if name == "oracle":
        return OracleEstimator(step_ratio)
    if name.startswith("oracle-noisy"):
        _, _, arg = name.partition("=")
        sigma = float(arg) if arg else 0.2
        return NoisyEstimator(OracleEstimator(step_ratio), seed, sigma)
    raise ValueError(f"unknown estimator {name!r}")
