import numpy as np
import pytest

from frontiersim.grid import Cell, CellState, ObservedMap
from frontiersim.frontiers import (
    Frontier,
    centroid,
    extract_frontiers,
    filter_reachable,
    frontier_cell_mask,
)
from frontiersim.sensing import AgentState, Heading

from conftest import observed_from_rows, random_observed
from oracles import UnionFind, bfs_component


def brute_force_partition(observed):
    """Per-cell frontier definition grouped with an independent union-find."""
    h, w = observed.height, observed.width
    cells = observed.cells
    is_frontier = set()
    for y in range(h):
        for x in range(w):
            if cells[y, x] != CellState.UNKNOWN:
                continue
            for nx, ny in ((x, y - 1), (x - 1, y), (x + 1, y), (x, y + 1)):
                if 0 <= nx < w and 0 <= ny < h and cells[ny, nx] == CellState.FREE:
                    is_frontier.add((x, y))
                    break
    uf = UnionFind()
    for x, y in is_frontier:
        uf.find((x, y))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                if (x + dx, y + dy) in is_frontier:
                    uf.union((x, y), (x + dx, y + dy))
    groups = {}
    for cell in is_frontier:
        groups.setdefault(uf.find(cell), set()).add(cell)
    return is_frontier, {frozenset(g) for g in groups.values()}


class TestExtraction:
    def test_fully_revealed_no_frontiers(self):
        obs = observed_from_rows(["###", "#.#", "###"])
        assert extract_frontiers(obs) == []

    def test_single_free_cell_in_unknown(self):
        obs = observed_from_rows(["???", "?.?", "???"])
        fronts = extract_frontiers(obs)
        cells = set().union(*[set(f.cells) for f in fronts])
        assert cells == {Cell(1, 0), Cell(0, 1), Cell(2, 1), Cell(1, 2)}

    def test_two_pockets_split_by_wall(self):
        obs = observed_from_rows(["?..#..?", "?..#..?"])
        fronts = extract_frontiers(obs)
        assert len(fronts) == 2
        assert {(c.x, c.y) for c in fronts[0].cells} == {(0, 0), (0, 1)}
        assert {(c.x, c.y) for c in fronts[1].cells} == {(6, 0), (6, 1)}

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_bruteforce_partition(self, seed):
        rng = np.random.default_rng(seed)
        obs = random_observed(rng, 18, 22)
        fronts = extract_frontiers(obs)
        want_cells, want_groups = brute_force_partition(obs)
        got_cells = set()
        got_groups = set()
        for f in fronts:
            members = {(c.x, c.y) for c in f.cells}
            got_cells |= members
            got_groups.add(frozenset(members))
        assert got_cells == want_cells
        assert got_groups == want_groups

    def test_ids_and_order_deterministic(self):
        rng = np.random.default_rng(5)
        obs = random_observed(rng, 15, 15)
        a = extract_frontiers(obs)
        b = extract_frontiers(obs)
        assert [f.id for f in a] == list(range(len(a)))
        assert a == b
        mins = [min((c.y, c.x) for c in f.cells) for f in a]
        assert mins == sorted(mins)

    def test_every_cell_touches_free(self):
        rng = np.random.default_rng(6)
        obs = random_observed(rng, 20, 20)
        mask = frontier_cell_mask(obs)
        free = obs.free_mask
        ys, xs = np.nonzero(mask)
        for y, x in zip(ys, xs):
            neighbors = []
            if y > 0:
                neighbors.append(free[y - 1, x])
            if y < 19:
                neighbors.append(free[y + 1, x])
            if x > 0:
                neighbors.append(free[y, x - 1])
            if x < 19:
                neighbors.append(free[y, x + 1])
            assert any(neighbors)


class TestCentroid:
    def test_single_cell(self):
        f = Frontier(0, (Cell(3, 4),), Cell(3, 4))
        assert centroid(f) == Cell(3, 4)

    def test_three_collinear(self):
        cells = (Cell(2, 5), Cell(3, 5), Cell(4, 5))
        f = Frontier(0, cells, cells[1])
        assert centroid(f) == Cell(3, 5)

    def test_l_shape_matches_exhaustive_argmin(self):
        cells = tuple(Cell(x, 0) for x in range(5)) + tuple(Cell(0, y) for y in range(1, 4))
        f = Frontier(0, cells, cells[0])
        n = len(cells)
        mx = sum(c.x for c in cells) / n
        my = sum(c.y for c in cells) / n
        want = min(cells, key=lambda c: ((c.x - mx) ** 2 + (c.y - my) ** 2, c.y, c.x))
        assert centroid(f) == want

    def test_extraction_uses_member_centroid(self):
        rng = np.random.default_rng(7)
        obs = random_observed(rng, 16, 16)
        for f in extract_frontiers(obs):
            assert f.centroid in set(f.cells)
            assert centroid(f) == f.centroid


class TestFilterReachable:
    def test_adjacent_room_kept(self):
        obs = observed_from_rows(["??.", "#..", "..."])
        agent = AgentState(Cell(1, 1), Heading.N, 10)
        fronts = extract_frontiers(obs)
        assert filter_reachable(fronts, obs, agent) == fronts

    def test_sealed_pocket_dropped(self):
        # Right-hand free pocket is walled off from the agent on the left.
        obs = observed_from_rows(
            [
                "..#.?",
                "..#.?",
                "..#.?",
            ]
        )
        fronts = extract_frontiers(obs)
        assert len(fronts) == 1
        agent = AgentState(Cell(0, 0), Heading.N, 10)
        assert filter_reachable(fronts, obs, agent) == []

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_component_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        obs = random_observed(rng, 18, 18, p_unknown=0.35, p_occupied=0.25)
        free = obs.free_mask
        ys, xs = np.nonzero(free)
        if ys.size == 0:
            pytest.skip("no free cells")
        agent = AgentState(Cell(int(xs[0]), int(ys[0])), Heading.N, 10)
        component = bfs_component(free.tolist(), (agent.pos.y, agent.pos.x))
        fronts = extract_frontiers(obs)
        got = {f.id for f in filter_reachable(fronts, obs, agent)}
        want = set()
        for f in fronts:
            c = f.centroid
            for nx, ny in ((c.x, c.y - 1), (c.x - 1, c.y), (c.x + 1, c.y), (c.x, c.y + 1)):
                if (ny, nx) in component:
                    want.add(f.id)
                    break
        assert got == want
