"""Frontier selection policies.

The lookahead planner evaluates each candidate frontier by recursing over the
orders in which the remaining frontiers could be visited, crediting each
region's area in full when the budget allows finishing it and pro-rata when
it does not. Travel costs between frontiers are recomputed from each
successor position on a frozen map snapshot. Nearest-frontier and greedy
max-area baselines share the same belief structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import kernels
from .estimation import FrontierEstimate, to_timesteps
from .frontiers import Frontier
from .grid import Cell, ObservedMap

DEFAULT_STEP_RATIO = 1.7
DEFAULT_PRUNE_WIDTH = 6


class BeliefAction(NamedTuple):
    frontier: Frontier
    estimate: FrontierEstimate
    travel_steps: int  # timesteps through known space from the agent


@dataclass
class PlannerBelief:
    """Planning snapshot: observed map, agent cell, budget, candidate actions.

    Actions carry finite travel costs only; unreachable frontiers are
    filtered out during construction. ``step_ratio`` converts grid distances
    to timesteps when travel costs are recomputed inside the recursion.
    """

    observed: ObservedMap
    agent_pos: Cell
    remaining: int
    actions: tuple[BeliefAction, ...]
    step_ratio: float = DEFAULT_STEP_RATIO
    _cache: "_DistanceCache | None" = field(default=None, repr=False, compare=False)

    def cache(self) -> "_DistanceCache":
        if self._cache is None:
            self._cache = _DistanceCache(self.observed, self.step_ratio)
        return self._cache


@dataclass(frozen=True)
class PlanResult:
    chosen: int | None  # frontier id
    q_values: dict[int, float]
    visit_order: tuple[int, ...]


class _DistanceCache:
    """Lazy shortest-path fields over the frozen observed map.

    One field per source cell, reused across the recursion; distances stay
    exact via (straight, diagonal) step pairs.
    """

    def __init__(self, observed: ObservedMap, step_ratio: float):
        self.free = observed.free_mask
        self.step_ratio = step_ratio
        self._fields: dict[Cell, tuple[np.ndarray, np.ndarray]] = {}

    def field(self, src: Cell) -> tuple[np.ndarray, np.ndarray]:
        got = self._fields.get(src)
        if got is None:
            got = kernels.distance_field(self.free, src.y, src.x, True)
            self._fields[src] = got
        return got

    def goal_cells(self, frontier: Frontier) -> list[Cell]:
        """Free 4-neighbors of the frontier centroid, in (y, x) order."""
        c = frontier.centroid
        h, w = self.free.shape
        out = []
        for nx, ny in ((c.x, c.y - 1), (c.x - 1, c.y), (c.x + 1, c.y), (c.x, c.y + 1)):
            if 0 <= nx < w and 0 <= ny < h and self.free[ny, nx]:
                out.append(Cell(nx, ny))
        out.sort(key=lambda cell: (cell.y, cell.x))
        return out

    def approach(self, src: Cell, frontier: Frontier) -> tuple[int, Cell] | None:
        """(timesteps, landing cell) to the nearest goal cell, or None."""
        fs, fd = self.field(src)
        best: tuple[float, Cell] | None = None
        for cell in self.goal_cells(frontier):
            s = int(fs[cell.y, cell.x])
            if s < 0:
                continue
            dist = s + int(fd[cell.y, cell.x]) * kernels.SQRT2
            if best is None or dist < best[0]:
                best = (dist, cell)
        if best is None:
            return None
        return to_timesteps(best[0], self.step_ratio), best[1]


def known_space_distance(
    observed: ObservedMap,
    from_cell: Cell,
    frontier: Frontier,
    step_ratio: float = DEFAULT_STEP_RATIO,
) -> float:
    """Timesteps through known free space to a frontier's nearest goal cell.

    Infinity when no goal cell is reachable.
    """
    if not observed.is_free(from_cell):
        raise ValueError("from_cell must be free in the observed map")
    cache = _DistanceCache(observed, step_ratio)
    got = cache.approach(from_cell, frontier)
    return math.inf if got is None else float(got[0])


def build_belief(
    observed: ObservedMap,
    agent_pos: Cell,
    remaining: int,
    frontiers: list[Frontier],
    estimates: dict[int, FrontierEstimate],
    step_ratio: float = DEFAULT_STEP_RATIO,
) -> PlannerBelief:
    """Assemble a belief, dropping frontiers with no reachable goal cell."""
    belief = PlannerBelief(observed, agent_pos, remaining, (), step_ratio)
    cache = belief.cache()
    actions = []
    for f in frontiers:
        got = cache.approach(agent_pos, f)
        if got is None:
            continue
        actions.append(BeliefAction(f, estimates[f.id], got[0]))
    belief.actions = tuple(actions)
    return belief


def partial_reward(area: float, explore_steps: float, budget: float) -> float:
    """Area credit for exploring a region with ``budget`` timesteps left.

    Full credit when the budget covers the sweep, a proportional share when
    it does not, nothing when no time remains.
    """
    if budget <= 0:
        return 0.0
    if explore_steps <= 0 or budget > explore_steps:
        return float(area)
    return float(area) * (float(budget) / float(explore_steps))


def q_value(belief: PlannerBelief, action_index: int) -> float:
    """Expected area revealed by taking one action and then playing optimally.

    The successor state moves the agent to the chosen frontier's landing
    cell, charges travel + sweep + exit time, removes the action from the
    set, and recomputes travel costs from the new position; the map is never
    updated during the recursion.
    """
    q, _ = _q_with_order(belief, action_index)
    return q


def _q_with_order(belief: PlannerBelief, action_index: int) -> tuple[float, tuple[int, ...]]:
    cache = belief.cache()
    remaining_ids = frozenset(range(len(belief.actions)))
    landing: dict[tuple[Cell, int], tuple[int, Cell] | None] = {}

    def approach_from(src: Cell, idx: int) -> tuple[int, Cell] | None:
        key = (src, idx)
        if key not in landing:
            landing[key] = cache.approach(src, belief.actions[idx].frontier)
        return landing[key]

    def recurse(src: Cell, sigma: int, ids: frozenset[int], idx: int) -> tuple[float, tuple[int, ...]]:
        action = belief.actions[idx]
        got = approach_from(src, idx)
        if got is None:
            # Unreachable from here (cannot happen from the agent cell, but a
            # successor evaluation keeps the action priced at zero).
            return 0.0, (action.frontier.id,)
        travel, land = got
        reward = partial_reward(action.estimate.area, action.estimate.explore_steps, sigma - travel)
        sigma_next = sigma - travel - action.estimate.explore_steps - action.estimate.exit_steps
        rest = ids - {idx}
        best_tail: tuple[float, tuple[int, ...]] = (0.0, ())
        if rest and sigma_next > 0:
            for nxt in sorted(rest):
                tail_q, tail_order = recurse(land, sigma_next, rest, nxt)
                if tail_q > best_tail[0]:
                    best_tail = (tail_q, tail_order)
        return reward + best_tail[0], (action.frontier.id,) + best_tail[1]

    return recurse(belief.agent_pos, belief.remaining, remaining_ids, action_index)


def _restricted(belief: PlannerBelief, k: int) -> tuple[PlannerBelief, list[int]]:
    order = sorted(
        range(len(belief.actions)),
        key=lambda i: (-belief.actions[i].estimate.area, belief.actions[i].frontier.id),
    )
    keep = sorted(order[:k])
    sub = PlannerBelief(
        belief.observed,
        belief.agent_pos,
        belief.remaining,
        tuple(belief.actions[i] for i in keep),
        belief.step_ratio,
        belief._cache,
    )
    return sub, keep


def select_lfe(belief: PlannerBelief, k: int = DEFAULT_PRUNE_WIDTH) -> PlanResult:
    """Budget-aware lookahead selection over the k largest-area frontiers.

    Q ties break toward the action whose completion leaves the most
    timesteps, then toward the smallest frontier id.
    """
    if k < 1:
        raise ValueError("pruning width must be >= 1")
    if not belief.actions:
        return PlanResult(None, {}, ())
    sub, _ = _restricted(belief, k)
    q_values: dict[int, float] = {}
    best: tuple[float, int, int] | None = None  # (q, residual, -id) to maximize
    best_order: tuple[int, ...] = ()
    for i, action in enumerate(sub.actions):
        q, order = _q_with_order(sub, i)
        q_values[action.frontier.id] = q
        residual = sub.remaining - action.travel_steps - action.estimate.explore_steps
        residual -= action.estimate.exit_steps
        key = (q, residual, -action.frontier.id)
        if best is None or key > best:
            best = key
            best_order = order
    assert best is not None
    return PlanResult(-best[2], q_values, best_order)


def select_nearest(belief: PlannerBelief) -> PlanResult:
    """Closest frontier by known-space travel time; ties to the smallest id."""
    if not belief.actions:
        return PlanResult(None, {}, ())
    scores = {a.frontier.id: -float(a.travel_steps) for a in belief.actions}
    chosen = min(belief.actions, key=lambda a: (a.travel_steps, a.frontier.id))
    return PlanResult(chosen.frontier.id, scores, (chosen.frontier.id,))


def select_greedy(belief: PlannerBelief) -> PlanResult:
    """Largest estimated area; ties to the smallest id."""
    if not belief.actions:
        return PlanResult(None, {}, ())
    scores = {a.frontier.id: float(a.estimate.area) for a in belief.actions}
    chosen = min(belief.actions, key=lambda a: (-a.estimate.area, a.frontier.id))
    return PlanResult(chosen.frontier.id, scores, (chosen.frontier.id,))


PlannerFn = Callable[[PlannerBelief], PlanResult]


def make_planner(name: str, k: int = DEFAULT_PRUNE_WIDTH) -> PlannerFn:
    """Planner factory for the CLI names lfe | nearest | greedy."""
    if name == "lfe":
        return lambda belief: select_lfe(belief, k)
    if name == "nearest":
        return select_nearest
    if name == "greedy":
        return select_greedy
    raise ValueError(f"unknown planner {name!r}")
