import math

import numpy as np
import pytest

from frontiersim.grid import Cell, CellState, ObservedMap
from frontiersim.frontiers import extract_frontiers
from frontiersim.estimation import (
    FrontierEstimate,
    NoisyEstimator,
    OracleEstimator,
    SkeletonGraph,
    make_estimator,
    oracle_area,
    oracle_estimate,
    region_beyond,
    skeletonize,
    to_timesteps,
    tour_costs,
)
from frontiersim import kernels

from conftest import gt_from_rows, observed_from_rows
from oracles import bfs_component, brute_force_open_tsp


def graph_from_cells(cells):
    mask = np.zeros((max(c[1] for c in cells) + 1, max(c[0] for c in cells) + 1), dtype=bool)
    for x, y in cells:
        mask[y, x] = True
    nodes = tuple(Cell(x, y) for y, x in sorted((y, x) for x, y in cells))
    return SkeletonGraph(nodes, (), mask)


class TestToTimesteps:
    def test_corridor_example(self):
        assert to_timesteps(10.0, 1.7) == 17

    def test_rounds_up(self):
        assert to_timesteps(10.1, 1.7) == 18
        assert to_timesteps(1.0, 1.0) == 1
        assert to_timesteps(math.sqrt(2.0), 1.0) == 2

    def test_zero(self):
        assert to_timesteps(0.0, 1.7) == 0


class TestRegionBeyond:
    def fixture_sealed_room(self):
        # Corridor on the left revealed; 3x3 room behind an open doorway is
        # still unknown.
        gt = gt_from_rows(
            [
                "#########",
                "#...#...#",
                "#...#...#",
                "#.......#",
                "#########",
            ]
        )
        obs = observed_from_rows(
            [
                "#########",
                "#...#????",
                "#...#????",
                "#...?????",
                "####?????",
            ]
        )
        return gt, obs

    def test_sealed_room_counted(self):
        gt, obs = self.fixture_sealed_room()
        fronts = extract_frontiers(obs)
        assert len(fronts) == 1
        region = region_beyond(gt, obs, fronts[0])
        want = {
            (y, x)
            for (y, x) in bfs_component(gt.free_mask.tolist(), (3, 4))
            if obs.cells[y, x] == CellState.UNKNOWN
        }
        assert {(c.y, c.x) for c in region} == want
        assert oracle_area(gt, obs, fronts[0]) == len(want)

    def test_wall_backed_frontier_empty(self):
        gt = gt_from_rows(["#####", "#...#", "#####"])
        obs = observed_from_rows(["?????", "#...?", "?????"])
        fronts = extract_frontiers(obs)
        assert fronts
        for f in fronts:
            if all(gt.cells[c.y, c.x] == CellState.OCCUPIED for c in f.cells):
                assert region_beyond(gt, obs, f) == set()
                assert oracle_area(gt, obs, f) == 0

    def test_two_frontiers_same_room_identical_regions(self):
        gt = gt_from_rows(
            [
                "#########",
                "#..###..#",
                "#..###..#",
                "#.......#",
                "#########",
            ]
        )
        obs = observed_from_rows(
            [
                "#########",
                "#..###..#",
                "#..###..#",
                "#.?????.#",
                "#########",
            ]
        )
        fronts = extract_frontiers(obs)
        assert len(fronts) == 1 or len(fronts) == 2
        if len(fronts) == 2:
            r1 = region_beyond(gt, obs, fronts[0])
            r2 = region_beyond(gt, obs, fronts[1])
            assert r1 == r2


class TestSkeletonize:
    def test_strip_unchanged(self):
        mask = np.zeros((3, 8), dtype=bool)
        mask[1, 1:7] = True
        graph = skeletonize(mask)
        assert np.array_equal(graph.mask, mask)

    def test_solid_block_connected_nonempty(self):
        mask = np.zeros((7, 7), dtype=bool)
        mask[1:6, 1:6] = True
        graph = skeletonize(mask)
        assert len(graph.nodes) >= 1
        _, count = kernels.label_components(graph.mask, True)
        assert count == 1

    def test_two_blobs_two_components(self):
        mask = np.zeros((6, 12), dtype=bool)
        mask[1:4, 1:4] = True
        mask[2:5, 7:11] = True
        graph = skeletonize(mask)
        _, count = kernels.label_components(graph.mask, True)
        assert count == 2

    @pytest.mark.parametrize("seed", range(20))
    def test_component_count_preserved(self, seed):
        rng = np.random.default_rng(seed)
        mask = rng.random((24, 24)) < rng.uniform(0.3, 0.7)
        _, before = kernels.label_components(mask, True)
        graph = skeletonize(mask)
        _, after = kernels.label_components(graph.mask, True)
        assert after == before

    def test_skeleton_subset_of_mask(self):
        rng = np.random.default_rng(77)
        mask = rng.random((20, 20)) < 0.55
        graph = skeletonize(mask)
        assert not (graph.mask & ~mask).any()

    def test_edges_connect_adjacent_nodes(self):
        rng = np.random.default_rng(78)
        mask = rng.random((15, 15)) < 0.6
        graph = skeletonize(mask)
        nodes = set(graph.nodes)
        for a, b, w in graph.edges:
            assert a in nodes and b in nodes
            assert max(abs(a.x - b.x), abs(a.y - b.y)) == 1
            want = kernels.SQRT2 if (a.x != b.x and a.y != b.y) else 1.0
            assert w == want


class TestTourCosts:
    def test_single_node(self):
        g = graph_from_cells([(2, 3)])
        assert tour_costs(g, Cell(2, 3)) == (0.0, 0.0)

    def test_three_node_path(self):
        g = graph_from_cells([(0, 0), (1, 0), (2, 0)])
        sweep, back = tour_costs(g, Cell(0, 0))
        assert sweep == 2.0
        assert back == 2.0

    @pytest.mark.parametrize("seed", range(15))
    def test_exact_matches_permutation_oracle(self, seed):
        rng = np.random.default_rng(200 + seed)
        while True:
            mask = rng.random((7, 7)) < 0.4
            labels, count = kernels.label_components(mask, True)
            if count == 0:
                continue
            sizes = [(labels == l).sum() for l in range(1, count + 1)]
            biggest = int(np.argmax(sizes)) + 1
            if 2 <= sizes[biggest - 1] <= 8:
                mask = labels == biggest
                break
        ys, xs = np.nonzero(mask)
        cells = [(int(x), int(y)) for y, x in zip(ys.tolist(), xs.tolist())]
        g = graph_from_cells(cells)
        start = g.nodes[int(rng.integers(len(g.nodes)))]
        sweep, back = tour_costs(g, start)
        # Independent metric closure via the reference Dijkstra.
        from oracles import dijkstra_grid

        idx = {c: i for i, c in enumerate(g.nodes)}
        n = len(g.nodes)
        dist = [[0.0] * n for _ in range(n)]
        for c in g.nodes:
            dmap = dijkstra_grid(g.mask.tolist(), (c.y, c.x), diag_needs_orthos=False)
            for o in g.nodes:
                dist[idx[c]][idx[o]] = dmap[(o.y, o.x)]
        want_path, want_back = brute_force_open_tsp(dist, idx[start])
        assert sweep + back == pytest.approx(want_path + want_back, rel=1e-9)

    def test_heuristic_not_below_exact(self):
        rng = np.random.default_rng(300)
        for _ in range(10):
            n = int(rng.integers(4, 11))
            pts = rng.random((n, 2)) * 20
            dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
            start = int(rng.integers(n))
            exact_path, exact_last = kernels.held_karp_closed(dist, start)
            heur_path, heur_last = kernels.nn_two_opt_closed(dist, start)
            exact_total = exact_path + dist[exact_last, start]
            heur_total = heur_path + dist[heur_last, start]
            assert heur_total >= exact_total - 1e-9


class TestOracleEstimate:
    def test_wall_backed_zero(self):
        gt = gt_from_rows(["#####", "#...#", "#####"])
        obs = observed_from_rows(["?????", "#...?", "?????"])
        for f in extract_frontiers(obs):
            if all(gt.cells[c.y, c.x] == CellState.OCCUPIED for c in f.cells):
                est = oracle_estimate(gt, obs, f)
                assert (est.area, est.explore_steps, est.exit_steps) == (0, 0, 0)

    def corridor_fixture(self):
        width = 16
        gt = gt_from_rows(["#" * width, "#" + "." * (width - 2) + "#", "#" * width])
        obs = observed_from_rows(
            ["#" * width, "#" + "." * 5 + "?" * (width - 7) + "#", "?" * width]
        )
        obs.cells[0, :7] = CellState.OCCUPIED
        obs.cells[2, :7] = CellState.OCCUPIED
        return gt, obs

    def test_dead_end_corridor_costs(self):
        gt, obs = self.corridor_fixture()
        fronts = [
            f
            for f in extract_frontiers(obs)
            if any(gt.cells[c.y, c.x] == CellState.FREE for c in f.cells)
        ]
        assert len(fronts) == 1
        est = oracle_estimate(gt, obs, fronts[0], step_ratio=1.7)
        region = region_beyond(gt, obs, fronts[0])
        assert est.area == len(region)
        # 1-wide corridor: the skeleton is the corridor, the tour is forced to
        # the dead end and straight back.
        length = len(region) - 1
        assert est.explore_steps == to_timesteps(float(length), 1.7)
        assert est.exit_steps == to_timesteps(float(length), 1.7)

    def test_ratio_scales_steps_not_area(self):
        gt, obs = self.corridor_fixture()
        f = [
            f
            for f in extract_frontiers(obs)
            if any(gt.cells[c.y, c.x] == CellState.FREE for c in f.cells)
        ][0]
        base = oracle_estimate(gt, obs, f, step_ratio=1.0)
        scaled = oracle_estimate(gt, obs, f, step_ratio=1.7)
        assert scaled.area == base.area
        assert scaled.explore_steps == math.ceil(base.explore_steps * 1.7 - 1e-9)
        assert scaled.exit_steps == math.ceil(base.exit_steps * 1.7 - 1e-9)

    def test_pure_function_of_inputs(self):
        gt, obs = self.corridor_fixture()
        f = extract_frontiers(obs)[0]
        assert oracle_estimate(gt, obs, f) == oracle_estimate(gt, obs, f)

    def test_estimator_interface_requires_gt(self):
        gt, obs = self.corridor_fixture()
        f = extract_frontiers(obs)[0]
        est = OracleEstimator()
        with pytest.raises(ValueError):
            est.estimate(f, obs, None)
        assert est.estimate(f, obs, gt) == oracle_estimate(gt, obs, f)


class TestNoisyEstimator:
    def fixture(self):
        gt = gt_from_rows(["######", "#....#", "######"])
        obs = observed_from_rows(["######", "#..??#", "######"])
        f = extract_frontiers(obs)[0]
        return gt, obs, f

    def test_sigma_zero_is_identity(self):
        gt, obs, f = self.fixture()
        inner = OracleEstimator()
        noisy = NoisyEstimator(inner, seed=1, rel_sigma=0.0)
        assert noisy.estimate(f, obs, gt) == inner.estimate(f, obs, gt)

    def test_reproducible(self):
        gt, obs, f = self.fixture()
        a = NoisyEstimator(OracleEstimator(), seed=42, rel_sigma=0.3)
        b = NoisyEstimator(OracleEstimator(), seed=42, rel_sigma=0.3)
        a.step = b.step = 17
        assert a.estimate(f, obs, gt) == b.estimate(f, obs, gt)
        c = NoisyEstimator(OracleEstimator(), seed=43, rel_sigma=0.3)
        c.step = 17
        assert c.estimate(f, obs, gt) != a.estimate(f, obs, gt)

    def test_factor_mean_matches_lognormal(self):
        gt, obs, f = self.fixture()
        inner = OracleEstimator()
        base = inner.estimate(f, obs, gt)
        noisy = NoisyEstimator(inner, seed=7, rel_sigma=0.2)
        factors = []
        for step in range(1000):
            noisy.step = step
            factors.append(noisy.estimate(f, obs, gt).area / base.area)
        mean = sum(factors) / len(factors)
        assert mean == pytest.approx(math.exp(0.2**2 / 2), rel=0.05)

    def test_make_estimator_parses_names(self):
        assert isinstance(make_estimator("oracle"), OracleEstimator)
        noisy = make_estimator("oracle-noisy=0.35", seed=3)
        assert isinstance(noisy, NoisyEstimator)
        assert noisy.rel_sigma == 0.35
        with pytest.raises(ValueError):
            make_estimator("resnet")


class TestInvariants:
    @pytest.mark.parametrize("seed", range(5))
    def test_regions_within_hidden_free(self, seed):
        from frontiersim.grid import MapParams, generate_map
        from frontiersim.sensing import AgentState, Heading, SensorConfig, visible_cells, reveal

        gt = generate_map(seed, MapParams(width=32, height=28))
        obs = ObservedMap.unknown_like(gt)
        ys, xs = np.nonzero(gt.free_mask)
        pos = Cell(int(xs[0]), int(ys[0]))
        reveal(obs, gt, visible_cells(gt, AgentState(pos, Heading.N, 1), SensorConfig(360, 8)))
        hidden_free = {
            (x, y)
            for y, x in zip(*np.nonzero((obs.cells == CellState.UNKNOWN) & gt.free_mask))
        }
        for f in extract_frontiers(obs):
            region = region_beyond(gt, obs, f)
            assert {(c.x, c.y) for c in region} <= hidden_free
