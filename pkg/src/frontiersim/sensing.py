"""Agent pose/motion model and the raycast sensor."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum, IntEnum

import numpy as np

from . import kernels
from .grid import Cell, CellState, GroundTruthMap, ObservedMap


class Heading(IntEnum):
    """Eight compass directions, 45 degrees apart; y grows downward."""

    N = 0
    NE = 1
    E = 2
    SE = 3
    S = 4
    SW = 5
    W = 6
    NW = 7

    @property
    def vector(self) -> tuple[int, int]:
        return _HEADING_VECTORS[self]

    def turned_left(self) -> "Heading":
        return Heading((self - 1) % 8)

    def turned_right(self) -> "Heading":
        return Heading((self + 1) % 8)


_HEADING_VECTORS: dict[Heading, tuple[int, int]] = {
    Heading.N: (0, -1),
    Heading.NE: (1, -1),
    Heading.E: (1, 0),
    Heading.SE: (1, 1),
    Heading.S: (0, 1),
    Heading.SW: (-1, 1),
    Heading.W: (-1, 0),
    Heading.NW: (-1, -1),
}


class Action(Enum):
    FORWARD = "F"
    TURN_LEFT = "L"
    TURN_RIGHT = "R"
    STOP = "S"


@dataclass(frozen=True)
class AgentState:
    pos: Cell
    heading: Heading
    remaining_budget: int


@dataclass(frozen=True)
class SensorConfig:
    fov_degrees: int = 360
    range_cells: int = 40

    def __post_init__(self):
        if self.fov_degrees not in (90, 360):
            raise ValueError("fov_degrees must be 90 or 360")
        if self.range_cells < 1:
            raise ValueError("range_cells must be >= 1")


class BudgetExhaustedError(RuntimeError):
    pass


def visible_cells(gt: GroundTruthMap, agent: AgentState, sensor: SensorConfig) -> set[Cell]:
    """Cells within range and FoV with a clear supercover line of sight.

    Rays stop at (and include) the first occupied cell they hit.
    """
    if not gt.is_free(agent.pos):
        raise ValueError("agent position must be free in the ground-truth map")
    mask = visible_mask(gt, agent, sensor)
    ys, xs = np.nonzero(mask)
    return {Cell(int(x), int(y)) for x, y in zip(xs, ys)}


def visible_mask(
    gt: GroundTruthMap,
    agent: AgentState,
    sensor: SensorConfig,
    skip: np.ndarray | None = None,
) -> np.ndarray:
    """Array form of visible_cells; ``skip`` cells are excluded untested."""
    if skip is None:
        skip = np.zeros(gt.cells.shape, dtype=bool)
    return kernels.visible_mask(
        gt.occupied_mask,
        agent.pos.y,
        agent.pos.x,
        int(agent.heading),
        sensor.fov_degrees,
        sensor.range_cells,
        skip,
    )


def reveal(observed: ObservedMap, gt: GroundTruthMap, cells) -> ObservedMap:
    """Write the ground-truth value of each given cell into the observed map."""
    for cell in cells:
        observed.cells[cell.y, cell.x] = gt.cells[cell.y, cell.x]
    return observed


def reveal_mask(observed: ObservedMap, gt: GroundTruthMap, mask: np.ndarray) -> int:
    """Bulk reveal; returns the number of newly revealed cells."""
    new = mask & (observed.cells == CellState.UNKNOWN)
    observed.cells[new] = gt.cells[new]
    return int(new.sum())


def apply_action(agent: AgentState, action: Action, observed: ObservedMap) -> AgentState:
    """One primitive step.

    Forward moves one cell along the heading iff the target is free in the
    observed map (diagonals also need both orthogonal neighbors free); a
    blocked forward still costs the step. Turns rotate 45 degrees. Every
    non-stop action costs one timestep.
    """
    if agent.remaining_budget <= 0:
        raise BudgetExhaustedError("remaining budget is zero")
    if action is Action.STOP:
        return agent
    budget = agent.remaining_budget - 1
    if action is Action.TURN_LEFT:
        return replace(agent, heading=agent.heading.turned_left(), remaining_budget=budget)
    if action is Action.TURN_RIGHT:
        return replace(agent, heading=agent.heading.turned_right(), remaining_budget=budget)
    dx, dy = agent.heading.vector
    target = Cell(agent.pos.x + dx, agent.pos.y + dy)
    if _can_step(observed, agent.pos, target):
        return replace(agent, pos=target, remaining_budget=budget)
    return replace(agent, remaining_budget=budget)


def _can_step(observed: ObservedMap, src: Cell, dst: Cell) -> bool:
    if not (0 <= dst.x < observed.width and 0 <= dst.y < observed.height):
        return False
    if not observed.is_free(dst):
        return False
    dx, dy = dst.x - src.x, dst.y - src.y
    if dx != 0 and dy != 0:
        # No squeezing through diagonal wall gaps.
        if not observed.is_free(Cell(src.x + dx, src.y)):
            return False
        if not observed.is_free(Cell(src.x, src.y + dy)):
            return False
    return True
