import numpy as np
import pytest

from frontiersim.grid import (
    Cell,
    CellState,
    GroundTruthMap,
    MapFormatError,
    MapGenerationError,
    MapParams,
    ObservedMap,
    coverage,
    format_map,
    generate_map,
    load_map,
    reachable_free_cells,
)

from conftest import gt_from_rows, observed_from_rows
from oracles import bfs_component


class TestLoadMap:
    def test_two_by_two(self):
        gt = load_map("2 2 0.05\n#.\n.#\n")
        assert gt.state(Cell(0, 0)) is CellState.OCCUPIED
        assert gt.state(Cell(1, 0)) is CellState.FREE
        assert gt.state(Cell(0, 1)) is CellState.FREE
        assert gt.state(Cell(1, 1)) is CellState.OCCUPIED
        assert gt.cell_size == 0.05

    def test_zero_rows(self):
        with pytest.raises(MapFormatError, match="zero rows"):
            load_map("4 4 0.05\n")

    def test_ragged_row(self):
        with pytest.raises(MapFormatError, match="line 3"):
            load_map("4 2 0.05\n####\n###\n")

    def test_illegal_character(self):
        with pytest.raises(MapFormatError, match="column 2"):
            load_map("3 1 0.05\n#x#\n")

    def test_unknown_rejected_in_ground_truth(self):
        with pytest.raises(MapFormatError, match="'\\?'"):
            load_map("3 1 0.05\n#?#\n")

    def test_bad_header(self):
        with pytest.raises(MapFormatError, match="line 1"):
            load_map("not a header\n##\n")

    def test_round_trip(self):
        text = "3 2 0.1\n#.#\n...\n"
        assert format_map(load_map(text)) == text

    def test_observed_round_trip_with_unknown(self):
        obs = observed_from_rows(["#?.", "?.."])
        assert format_map(obs) == "3 2 0.05\n#?.\n?..\n"


class TestGenerateMap:
    def test_deterministic(self):
        params = MapParams(width=48, height=40)
        a = generate_map(7, params)
        b = generate_map(7, params)
        assert np.array_equal(a.cells, b.cells)
        assert format_map(a) == format_map(b)

    def test_different_seeds_differ(self):
        params = MapParams(width=48, height=40)
        assert not np.array_equal(generate_map(1, params).cells, generate_map(2, params).cells)

    @pytest.mark.parametrize("seed", range(8))
    def test_single_free_component(self, seed):
        gt = generate_map(seed, MapParams(width=64, height=48))
        free = gt.free_mask.tolist()
        ys, xs = np.nonzero(gt.free_mask)
        component = bfs_component(free, (int(ys[0]), int(xs[0])))
        assert len(component) == int(gt.free_mask.sum())

    @pytest.mark.parametrize("seed", range(4))
    def test_boundary_ring_occupied(self, seed):
        gt = generate_map(seed, MapParams(width=32, height=24))
        assert (gt.cells[0, :] == CellState.OCCUPIED).all()
        assert (gt.cells[-1, :] == CellState.OCCUPIED).all()
        assert (gt.cells[:, 0] == CellState.OCCUPIED).all()
        assert (gt.cells[:, -1] == CellState.OCCUPIED).all()

    def test_too_small_rejected(self):
        with pytest.raises(MapGenerationError):
            generate_map(0, MapParams(width=8, height=8))

    def test_room_cannot_fit_rejected(self):
        with pytest.raises(MapGenerationError):
            generate_map(0, MapParams(width=16, height=16, min_room_size=15))


class TestReachable:
    def test_single_room_interior(self):
        gt = gt_from_rows(["#####", "#...#", "#...#", "#...#", "#####"])
        cells = reachable_free_cells(gt, Cell(2, 2))
        assert len(cells) == 9
        assert Cell(1, 1) in cells and Cell(3, 3) in cells

    def test_sealed_pocket_excluded(self):
        gt = gt_from_rows(["######", "#..#.#", "#..#.#", "######"])
        cells = reachable_free_cells(gt, Cell(1, 1))
        assert Cell(4, 1) not in cells
        assert len(cells) == 4

    def test_start_occupied_rejected(self):
        gt = gt_from_rows(["###", "#.#", "###"])
        with pytest.raises(ValueError):
            reachable_free_cells(gt, Cell(0, 0))

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_bfs_oracle(self, seed):
        gt = generate_map(seed, MapParams(width=40, height=32))
        ys, xs = np.nonzero(gt.free_mask)
        start = Cell(int(xs[0]), int(ys[0]))
        got = {(c.y, c.x) for c in reachable_free_cells(gt, start)}
        want = bfs_component(gt.free_mask.tolist(), (start.y, start.x))
        assert got == want


class TestCoverage:
    def test_fully_unknown_is_zero(self):
        gt = gt_from_rows(["#####", "#...#", "#####"])
        obs = ObservedMap.unknown_like(gt)
        assert coverage(obs, gt, Cell(1, 1)) == 0.0

    def test_fully_revealed_is_one(self):
        gt = gt_from_rows(["#####", "#...#", "#####"])
        obs = ObservedMap(gt.cells.copy())
        assert coverage(obs, gt, Cell(1, 1)) == 1.0

    def test_half_revealed(self):
        gt = gt_from_rows(["######", "#....#", "######"])
        obs = ObservedMap.unknown_like(gt)
        obs.cells[1, 1] = CellState.FREE
        obs.cells[1, 2] = CellState.FREE
        assert coverage(obs, gt, Cell(1, 1)) == 0.5

    def test_unreachable_free_cells_not_in_denominator(self):
        gt = gt_from_rows(["######", "#..#.#", "######"])
        obs = ObservedMap(gt.cells.copy())
        assert coverage(obs, gt, Cell(1, 1)) == 1.0

    def test_empty_reachable_set_impossible_start_occupied(self):
        gt = gt_from_rows(["###", "#.#", "###"])
        obs = ObservedMap.unknown_like(gt)
        with pytest.raises(ValueError):
            coverage(obs, gt, Cell(0, 0))
