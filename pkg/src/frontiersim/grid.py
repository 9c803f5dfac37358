"""Occupancy-grid data model, map file I/O, map generation, coverage metric."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple

import numpy as np

from . import kernels


class CellState(IntEnum):
    UNKNOWN = 0
    OCCUPIED = 1
    FREE = 2


class Cell(NamedTuple):
    x: int
    y: int


class MapFormatError(ValueError):
    """Raised for malformed map files; message names line and column."""


class MapGenerationError(ValueError):
    """Raised when generator parameters cannot produce a valid map."""


_CHAR_TO_STATE = {"#": CellState.OCCUPIED, ".": CellState.FREE, "?": CellState.UNKNOWN}
_STATE_TO_CHAR = {v: k for k, v in _CHAR_TO_STATE.items()}

DEFAULT_CELL_SIZE = 0.05


@dataclass(frozen=True)
class GroundTruthMap:
    """Fully-known environment grid; cells are OCCUPIED or FREE only."""

    cells: np.ndarray  # uint8 [height, width]
    cell_size: float = DEFAULT_CELL_SIZE

    def __post_init__(self):
        if self.cells.ndim != 2 or self.cells.size == 0:
            raise ValueError("map must be a non-empty 2-D grid")
        if (self.cells == CellState.UNKNOWN).any():
            raise ValueError("ground-truth maps cannot contain unknown cells")

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def free_mask(self) -> np.ndarray:
        return self.cells == CellState.FREE

    @property
    def occupied_mask(self) -> np.ndarray:
        return self.cells == CellState.OCCUPIED

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell.x < self.width and 0 <= cell.y < self.height

    def state(self, cell: Cell) -> CellState:
        return CellState(self.cells[cell.y, cell.x])

    def is_free(self, cell: Cell) -> bool:
        return self.cells[cell.y, cell.x] == CellState.FREE


@dataclass
class ObservedMap:
    """Partially revealed view of a ground-truth map.

    Cells start UNKNOWN and only ever move to the ground-truth value
    (monotone, consistent). Mutated solely by the owning episode loop.
    """

    cells: np.ndarray
    cell_size: float = DEFAULT_CELL_SIZE

    @classmethod
    def unknown_like(cls, gt: GroundTruthMap) -> "ObservedMap":
        return cls(
            np.full((gt.height, gt.width), CellState.UNKNOWN, dtype=np.uint8),
            gt.cell_size,
        )

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def free_mask(self) -> np.ndarray:
        return self.cells == CellState.FREE

    @property
    def unknown_mask(self) -> np.ndarray:
        return self.cells == CellState.UNKNOWN

    def state(self, cell: Cell) -> CellState:
        return CellState(self.cells[cell.y, cell.x])

    def is_free(self, cell: Cell) -> bool:
        return self.cells[cell.y, cell.x] == CellState.FREE

    def snapshot(self) -> "ObservedMap":
        return ObservedMap(self.cells.copy(), self.cell_size)


def load_map(text: str) -> GroundTruthMap:
    """Parse the text map format (header ``W H cell_size``, then rows)."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MapFormatError("line 1: empty file")
    header = lines[0].split()
    if len(header) != 3:
        raise MapFormatError("line 1: header must be 'WIDTH HEIGHT CELL_SIZE'")
    try:
        width, height = int(header[0]), int(header[1])
        cell_size = float(header[2])
    except ValueError as exc:
        raise MapFormatError(f"line 1: bad header value ({exc})") from None
    if width < 1 or height < 1 or cell_size <= 0:
        raise MapFormatError("line 1: width, height and cell size must be positive")
    rows = lines[1:]
    if not rows:
        raise MapFormatError("line 2: zero rows (expected map body)")
    if len(rows) != height:
        raise MapFormatError(f"line {len(lines)}: expected {height} rows, got {len(rows)}")
    cells = np.empty((height, width), dtype=np.uint8)
    for y, row in enumerate(rows):
        line_no = y + 2
        if len(row) != width:
            raise MapFormatError(f"line {line_no}: row length {len(row)} != width {width}")
        for x, ch in enumerate(row):
            state = _CHAR_TO_STATE.get(ch)
            if state is None:
                raise MapFormatError(f"line {line_no}, column {x + 1}: illegal character {ch!r}")
            if state is CellState.UNKNOWN:
                raise MapFormatError(
                    f"line {line_no}, column {x + 1}: '?' is not allowed in ground-truth maps"
                )
            cells[y, x] = state
    return GroundTruthMap(cells, cell_size)


def format_map(grid: GroundTruthMap | ObservedMap) -> str:
    """Serialize a grid back to the text format ('?' legal for observed maps)."""
    lines = [f"{grid.width} {grid.height} {grid.cell_size:g}"]
    for y in range(grid.height):
        lines.append("".join(_STATE_TO_CHAR[CellState(v)] for v in grid.cells[y]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MapParams:
    width: int = 80
    height: int = 80
    room_count_range: tuple[int, int] = (5, 9)
    corridor_width: int = 2
    min_room_size: int = 5
    cell_size: float = DEFAULT_CELL_SIZE


@dataclass
class _Leaf:
    x: int
    y: int
    w: int
    h: int
    room: tuple[int, int, int, int] | None = None  # x, y, w, h
    children: "tuple[_Leaf, _Leaf] | None" = None
    depth: int = 0

    def leaves(self) -> "list[_Leaf]":
        if self.children is None:
            return [self]
        return self.children[0].leaves() + self.children[1].leaves()


def generate_map(seed: int, params: MapParams = MapParams()) -> GroundTruthMap:
    """Deterministic rooms-and-corridors environment.

    Recursive space partition carves one room per leaf, then connects sibling
    partitions with corridors, giving a single 4-connected free component
    inside a fully occupied boundary ring.
    """
    p = params
    if p.width < 16 or p.height < 16:
        raise MapGenerationError("width and height must be at least 16")
    if p.room_count_range[0] < 1 or p.room_count_range[0] > p.room_count_range[1]:
        raise MapGenerationError("room_count_range must be a non-empty range from >= 1")
    if p.corridor_width < 1 or p.min_room_size < 1:
        raise MapGenerationError("corridor_width and min_room_size must be >= 1")
    # A leaf needs the room plus a 1-cell margin on each side.
    min_leaf = p.min_room_size + 2
    if min_leaf > p.width - 2 or min_leaf > p.height - 2:
        raise MapGenerationError("min_room_size does not fit inside the map interior")

    rng = np.random.default_rng(seed)
    target_rooms = int(rng.integers(p.room_count_range[0], p.room_count_range[1] + 1))

    root = _Leaf(1, 1, p.width - 2, p.height - 2)
    leaves = [root]
    while len(leaves) < target_rooms:
        # Split the largest splittable leaf; stop when none can be split.
        order = sorted(range(len(leaves)), key=lambda i: (-leaves[i].w * leaves[i].h, i))
        split_done = False
        for idx in order:
            leaf = leaves[idx]
            horiz_ok = leaf.w >= 2 * min_leaf
            vert_ok = leaf.h >= 2 * min_leaf
            if not horiz_ok and not vert_ok:
                continue
            if horiz_ok and (not vert_ok or leaf.w >= leaf.h):
                cut = int(rng.integers(min_leaf, leaf.w - min_leaf + 1))
                a = _Leaf(leaf.x, leaf.y, cut, leaf.h, depth=leaf.depth + 1)
                b = _Leaf(leaf.x + cut, leaf.y, leaf.w - cut, leaf.h, depth=leaf.depth + 1)
            else:
                cut = int(rng.integers(min_leaf, leaf.h - min_leaf + 1))
                a = _Leaf(leaf.x, leaf.y, leaf.w, cut, depth=leaf.depth + 1)
                b = _Leaf(leaf.x, leaf.y + cut, leaf.w, leaf.h - cut, depth=leaf.depth + 1)
            leaf.children = (a, b)
            leaves[idx : idx + 1] = [a, b]
            split_done = True
            break
        if not split_done:
            break

    cells = np.full((p.height, p.width), CellState.OCCUPIED, dtype=np.uint8)
    for leaf in leaves:
        rw = int(rng.integers(p.min_room_size, leaf.w - 2 + 1))
        rh = int(rng.integers(p.min_room_size, leaf.h - 2 + 1))
        rx = leaf.x + 1 + int(rng.integers(0, leaf.w - 2 - rw + 1))
        ry = leaf.y + 1 + int(rng.integers(0, leaf.h - 2 - rh + 1))
        leaf.room = (rx, ry, rw, rh)
        cells[ry : ry + rh, rx : rx + rw] = CellState.FREE

    def room_center(leaf: _Leaf) -> tuple[int, int]:
        sub = leaf.leaves()[0]
        rx, ry, rw, rh = sub.room  # type: ignore[misc]
        return rx + rw // 2, ry + rh // 2

    def carve_corridor(ax: int, ay: int, bx: int, by: int) -> None:
        half_lo = (p.corridor_width - 1) // 2
        half_hi = p.corridor_width // 2

        def carve(x0: int, x1: int, y0: int, y1: int) -> None:
            x0, x1 = min(x0, x1), max(x0, x1)
            y0, y1 = min(y0, y1), max(y0, y1)
            x0 = max(1, x0 - half_lo)
            x1 = min(p.width - 2, x1 + half_hi)
            y0 = max(1, y0 - half_lo)
            y1 = min(p.height - 2, y1 + half_hi)
            cells[y0 : y1 + 1, x0 : x1 + 1] = CellState.FREE

        if rng.integers(0, 2) == 0:
            carve(ax, bx, ay, ay)
            carve(bx, bx, ay, by)
        else:
            carve(ax, ax, ay, by)
            carve(ax, bx, by, by)

    def connect(leaf: _Leaf) -> None:
        if leaf.children is None:
            return
        connect(leaf.children[0])
        connect(leaf.children[1])
        ax, ay = room_center(leaf.children[0])
        bx, by = room_center(leaf.children[1])
        carve_corridor(ax, ay, bx, by)

    connect(root)

    # The corridor tree makes the free space connected by construction;
    # verify, and bridge any residual components deterministically.
    free = cells == CellState.FREE
    labels, count = kernels.label_components(free, False)
    while count > 1:
        ys, xs = np.nonzero(labels == 2)
        ay, ax = int(ys[0]), int(xs[0])
        ys, xs = np.nonzero(labels == 1)
        by, bx = int(ys[0]), int(xs[0])
        carve_corridor(ax, ay, bx, by)
        free = cells == CellState.FREE
        labels, count = kernels.label_components(free, False)

    return GroundTruthMap(cells, p.cell_size)


def reachable_free_cells(gt: GroundTruthMap, start: Cell) -> set[Cell]:
    """The 4-connected free component containing ``start``."""
    mask = reachable_mask(gt, start)
    ys, xs = np.nonzero(mask)
    return {Cell(int(x), int(y)) for x, y in zip(xs, ys)}


def reachable_mask(gt: GroundTruthMap, start: Cell) -> np.ndarray:
    if not gt.in_bounds(start):
        raise ValueError(f"start {start} out of bounds")
    if not gt.is_free(start):
        raise ValueError(f"start {start} is not a free cell")
    return kernels.flood_fill(
        gt.free_mask,
        np.array([start.y], dtype=np.int64),
        np.array([start.x], dtype=np.int64),
        False,
    )


def coverage(observed: ObservedMap, gt: GroundTruthMap, start: Cell) -> float:
    """Fraction of start-reachable free cells that are revealed."""
    mask = reachable_mask(gt, start)
    denom = int(mask.sum())
    if denom == 0:
        raise ValueError("no reachable free cells from start")
    revealed = int((mask & (observed.cells != CellState.UNKNOWN)).sum())
    return revealed / denom
