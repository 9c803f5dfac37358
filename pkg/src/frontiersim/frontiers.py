"""Frontier extraction: unknown cells on the boundary of observed free space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .grid import Cell, CellState, ObservedMap
from .sensing import AgentState


@dataclass(frozen=True)
class Frontier:
    """One 8-connected group of unknown cells that touch free space.

    ``id`` is stable within a single planning step (index in extraction
    order); ``centroid`` is the member cell nearest the group mean.
    """

    id: int
    cells: tuple[Cell, ...]
    centroid: Cell

    @property
    def size(self) -> int:
        return len(self.cells)


def frontier_cell_mask(observed: ObservedMap) -> np.ndarray:
    """Unknown cells with at least one free 4-neighbor."""
    free = observed.free_mask
    near_free = np.zeros_like(free)
    near_free[1:, :] |= free[:-1, :]
    near_free[:-1, :] |= free[1:, :]
    near_free[:, 1:] |= free[:, :-1]
    near_free[:, :-1] |= free[:, 1:]
    return observed.unknown_mask & near_free


def extract_frontiers(observed: ObservedMap) -> list[Frontier]:
    """All frontiers as maximal 8-connected groups, in raster order."""
    mask = frontier_cell_mask(observed)
    labels, count = kernels.label_components(mask, True)
    frontiers = []
    for lbl in range(1, count + 1):
        ys, xs = np.nonzero(labels == lbl)
        cells = tuple(Cell(int(x), int(y)) for y, x in sorted(zip(ys.tolist(), xs.tolist())))
        frontiers.append(Frontier(lbl - 1, cells, _centroid_of(cells)))
    return frontiers


def _centroid_of(cells: tuple[Cell, ...]) -> Cell:
    # Member cell minimizing distance to the mean; exact integer arithmetic
    # by scaling the mean with the cell count. Ties break on (y, x).
    n = len(cells)
    sum_x = sum(c.x for c in cells)
    sum_y = sum(c.y for c in cells)
    return min(
        cells,
        key=lambda c: ((n * c.x - sum_x) ** 2 + (n * c.y - sum_y) ** 2, c.y, c.x),
    )


def centroid(frontier: Frontier) -> Cell:
    return _centroid_of(frontier.cells)


def filter_reachable(
    frontiers: list[Frontier], observed: ObservedMap, agent: AgentState
) -> list[Frontier]:
    """Keep frontiers whose centroid touches the agent's free component."""
    if not observed.is_free(agent.pos):
        raise ValueError("agent position must be free in the observed map")
    component = kernels.flood_fill(
        observed.free_mask,
        np.array([agent.pos.y], dtype=np.int64),
        np.array([agent.pos.x], dtype=np.int64),
        False,
    )
    kept = []
    for f in frontiers:
        for nx, ny in _four_neighbors(f.centroid):
            if 0 <= nx < observed.width and 0 <= ny < observed.height and component[ny, nx]:
                kept.append(f)
                break
    return kept


def _four_neighbors(cell: Cell):
    return (
        (cell.x, cell.y - 1),
        (cell.x - 1, cell.y),
        (cell.x + 1, cell.y),
        (cell.x, cell.y + 1),
    )
