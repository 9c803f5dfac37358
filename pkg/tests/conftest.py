import numpy as np
import pytest

from frontiersim.grid import Cell, CellState, GroundTruthMap, ObservedMap


def gt_from_rows(rows, cell_size=0.05):
    """Build a ground-truth map from '#'/'.' strings."""
    h, w = len(rows), len(rows[0])
    cells = np.empty((h, w), dtype=np.uint8)
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            cells[y, x] = CellState.OCCUPIED if ch == "#" else CellState.FREE
    return GroundTruthMap(cells, cell_size)


def observed_from_rows(rows, cell_size=0.05):
    """Build an observed map from '#'/'.'/'?' strings."""
    h, w = len(rows), len(rows[0])
    cells = np.empty((h, w), dtype=np.uint8)
    lut = {"#": CellState.OCCUPIED, ".": CellState.FREE, "?": CellState.UNKNOWN}
    for y, row in enumerate(rows):
        for x, ch in enumerate(row):
            cells[y, x] = lut[ch]
    return ObservedMap(cells, cell_size)


def random_observed(rng, h, w, p_unknown=0.4, p_occupied=0.2):
    """Random observed map with the three states mixed."""
    draw = rng.random((h, w))
    cells = np.full((h, w), CellState.FREE, dtype=np.uint8)
    cells[draw < p_unknown + p_occupied] = CellState.OCCUPIED
    cells[draw < p_unknown] = CellState.UNKNOWN
    return ObservedMap(cells)


@pytest.fixture
def open_room_11():
    rows = ["#" * 11] + ["#" + "." * 9 + "#" for _ in range(9)] + ["#" * 11]
    return gt_from_rows(rows)
