"""Low-level navigation: grid paths to frontier goals, primitive actions,
and the per-step episode advance with event-driven replanning."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .estimation import Estimator
from .frontiers import Frontier, extract_frontiers, filter_reachable, frontier_cell_mask
from .grid import Cell, CellState, GroundTruthMap, ObservedMap
from .planner import PlannerBelief, PlanResult, PlannerFn, build_belief
from .sensing import Action, AgentState, SensorConfig, apply_action, visible_mask


class PathNotFoundError(RuntimeError):
    pass


def plan_path(observed: ObservedMap, from_cell: Cell, goal: Cell) -> list[Cell]:
    """Minimal-cost 8-connected path over observed free cells.

    Unit/sqrt2 step costs; diagonal steps require both orthogonal neighbors
    free (same motion rule the agent executes).
    """
    if not observed.is_free(from_cell):
        raise PathNotFoundError(f"start {from_cell} is not free")
    if not observed.is_free(goal):
        raise PathNotFoundError(f"goal {goal} is not free")
    if from_cell == goal:
        return [from_cell]
    free = observed.free_mask
    fs, fd = kernels.distance_field(free, from_cell.y, from_cell.x, True)
    if fs[goal.y, goal.x] < 0:
        raise PathNotFoundError(f"no path from {from_cell} to {goal}")
    return [Cell(x, y) for y, x in kernels.descend_path(fs, fd, goal.y, goal.x, free, True)]


def next_primitive(agent: AgentState, path: list[Cell]) -> Action:
    """The single action that best advances along the path.

    Forward when already facing the next cell, otherwise the turn with the
    smaller rotation (left on the 180-degree tie).
    """
    target = path[1]
    dx, dy = target.x - agent.pos.x, target.y - agent.pos.y
    target_heading = _heading_index(dx, dy)
    diff = (target_heading - int(agent.heading)) % 8
    if diff == 0:
        return Action.FORWARD
    if 1 <= diff <= 3:
        return Action.TURN_RIGHT
    return Action.TURN_LEFT


_VECTOR_TO_HEADING = {
    (0, -1): 0,
    (1, -1): 1,
    (1, 0): 2,
    (1, 1): 3,
    (0, 1): 4,
    (-1, 1): 5,
    (-1, 0): 6,
    (-1, -1): 7,
}


def _heading_index(dx: int, dy: int) -> int:
    try:
        return _VECTOR_TO_HEADING[(dx, dy)]
    except KeyError:
        raise ValueError(f"cells are not 8-adjacent (delta {dx},{dy})") from None


@dataclass
class Goal:
    frontier: Frontier
    goal_cell: Cell
    path: list[Cell]


@dataclass
class ReplayRecord:
    step: int
    pos: Cell
    heading: str
    action: str
    coverage: float
    chosen_frontier: int | None


@dataclass
class EpisodeState:
    """Everything one exploration episode mutates step by step."""

    gt: GroundTruthMap
    observed: ObservedMap
    agent: AgentState
    sensor: SensorConfig
    planner: PlannerFn
    estimator: Estimator
    step_ratio: float
    reachable: np.ndarray  # start-reachable free mask (coverage denominator)
    revealed_reachable: int = 0
    steps_used: int = 0
    goal: Goal | None = None
    coverage_trace: list[float] = field(default_factory=list)
    replay: list[ReplayRecord] = field(default_factory=list)
    visited_frontiers: list[Cell] = field(default_factory=list)
    planning_cycles: int = 0
    no_frontiers_left: bool = False

    @property
    def coverage(self) -> float:
        return self.revealed_reachable / int(self.reachable.sum())

    def sense(self) -> int:
        known = self.observed.cells != CellState.UNKNOWN
        vis = visible_mask(self.gt, self.agent, self.sensor, skip=known)
        newly = vis & ~known
        self.observed.cells[newly] = self.gt.cells[newly]
        gained = int((newly & self.reachable).sum())
        self.revealed_reachable += gained
        return int(newly.sum())


def ensure_goal(state: EpisodeState) -> bool:
    """Re-select a frontier when there is no valid committed goal.

    Returns False when no reachable frontier remains (episode over).
    """
    if state.goal is not None and _goal_alive(state):
        return True
    state.goal = None
    state.planning_cycles += 1
    if hasattr(state.estimator, "step"):
        state.estimator.step = state.steps_used  # noisy-estimator stream key
    frontiers = filter_reachable(extract_frontiers(state.observed), state.observed, state.agent)
    if not frontiers:
        state.no_frontiers_left = True
        return False
    estimates = {
        f.id: state.estimator.estimate(f, state.observed, state.gt) for f in frontiers
    }
    belief = build_belief(
        state.observed,
        state.agent.pos,
        state.agent.remaining_budget,
        frontiers,
        estimates,
        state.step_ratio,
    )
    by_id = {f.id: f for f in frontiers}
    while belief.actions:
        result: PlanResult = state.planner(belief)
        if result.chosen is None:
            break
        frontier = by_id[result.chosen]
        approach = belief.cache().approach(state.agent.pos, frontier)
        if approach is not None:
            try:
                path = plan_path(state.observed, state.agent.pos, approach[1])
            except PathNotFoundError:
                path = None
            if path is not None:
                state.goal = Goal(frontier, approach[1], path)
                if (
                    not state.visited_frontiers
                    or state.visited_frontiers[-1] != frontier.centroid
                ):
                    state.visited_frontiers.append(frontier.centroid)
                return True
        # Unplannable despite a finite travel estimate: drop it and re-select.
        belief.actions = tuple(a for a in belief.actions if a.frontier.id != result.chosen)
    state.no_frontiers_left = True
    return False


def _goal_alive(state: EpisodeState) -> bool:
    goal = state.goal
    assert goal is not None
    c = goal.frontier.centroid
    # Dissolved: the targeted centroid is no longer an unknown boundary cell.
    if state.observed.cells[c.y, c.x] != CellState.UNKNOWN:
        return False
    if not _touches_free(state.observed, c):
        return False
    # Reached: standing on any free 4-neighbor of the centroid.
    if abs(state.agent.pos.x - c.x) + abs(state.agent.pos.y - c.y) == 1:
        return False
    if len(goal.path) < 2:
        return False
    if goal.path[0] != state.agent.pos:
        return _replan_path(state)
    if not state.observed.is_free(goal.path[1]):
        return _replan_path(state)
    return True


def _touches_free(observed: ObservedMap, cell: Cell) -> bool:
    h, w = observed.cells.shape
    for nx, ny in ((cell.x, cell.y - 1), (cell.x - 1, cell.y), (cell.x + 1, cell.y), (cell.x, cell.y + 1)):
        if 0 <= nx < w and 0 <= ny < h and observed.cells[ny, nx] == CellState.FREE:
            return True
    return False


def _replan_path(state: EpisodeState) -> bool:
    goal = state.goal
    assert goal is not None
    try:
        goal.path = plan_path(state.observed, state.agent.pos, goal.goal_cell)
    except PathNotFoundError:
        return False
    return len(goal.path) >= 2


def navigate_step(state: EpisodeState) -> None:
    """Apply one primitive, fire the sensor, and invalidate stale goals."""
    assert state.goal is not None and state.agent.remaining_budget > 0
    if len(state.goal.path) > 1:
        action = next_primitive(state.agent, state.goal.path)
    else:
        # Standing on the goal cell with the centroid still unseen (possible
        # with a narrow FoV): turn toward it so the next sweep reveals it.
        action = next_primitive(state.agent, [state.agent.pos, state.goal.frontier.centroid])
    before = state.agent.pos
    state.agent = apply_action(state.agent, action, state.observed)
    if action is Action.FORWARD:
        if state.agent.pos == state.goal.path[1]:
            state.goal.path.pop(0)
        elif state.agent.pos == before:
            # Blocked forward; force a replan on the next cycle.
            state.goal.path = [state.agent.pos]
    state.sense()
    state.steps_used += 1
    state.coverage_trace.append(state.coverage)
    state.replay.append(
        ReplayRecord(
            step=state.steps_used,
            pos=state.agent.pos,
            heading=state.agent.heading.name,
            action=action.value,
            coverage=state.coverage,
            chosen_frontier=state.goal.frontier.id,
        )
    )


def remaining_frontier_count(state: EpisodeState) -> int:
    return int(frontier_cell_mask(state.observed).sum())
