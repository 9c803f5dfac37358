"""Pure-numpy fallback grid kernels.

Active when numba is unavailable or ``FRONTIERSIM_NUMBA=0``. Slower than the
compiled backend but produces bit-identical outputs; the parity tests and
``benchmarks/bench_kernels.py`` compare the two.
"""

import numpy as np

SQRT2 = np.sqrt(2.0)

NAME = "numpy"

_NEIGH8 = (
    (-1, -1, True),
    (-1, 0, False),
    (-1, 1, True),
    (0, -1, False),
    (0, 1, False),
    (1, -1, True),
    (1, 0, False),
    (1, 1, True),
)

_HEAD_X = (0, 1, 1, 1, 0, -1, -1, -1)
_HEAD_Y = (-1, -1, 0, 1, 1, 1, 0, -1)


def _shifted(arr, dy, dx, fill):
    """arr sampled at (y - dy, x - dx), padded with ``fill``."""
    h, w = arr.shape
    out = np.full_like(arr, fill)
    ys = slice(max(dy, 0), h + min(dy, 0))
    xs = slice(max(dx, 0), w + min(dx, 0))
    ys_src = slice(max(-dy, 0), h + min(-dy, 0))
    xs_src = slice(max(-dx, 0), w + min(-dx, 0))
    out[ys, xs] = arr[ys_src, xs_src]
    return out


def flood_fill(traversable, seed_ys, seed_xs, eight):
    reached = np.zeros_like(traversable, dtype=bool)
    seed_ok = traversable[seed_ys, seed_xs]
    reached[seed_ys[seed_ok], seed_xs[seed_ok]] = True
    frontier = reached.copy()
    while frontier.any():
        grown = np.zeros_like(reached)
        for dy, dx, diag in _NEIGH8:
            if diag and not eight:
                continue
            grown |= _shifted(frontier, dy, dx, False)
        frontier = grown & traversable & ~reached
        reached |= frontier
    return reached


def label_components(mask, eight):
    h, w = mask.shape
    big = np.int64(h * w)
    lab = np.where(mask, np.arange(h * w, dtype=np.int64).reshape(h, w), big)
    while True:
        new = lab.copy()
        for dy, dx, diag in _NEIGH8:
            if diag and not eight:
                continue
            new = np.minimum(new, _shifted(lab, dy, dx, big))
        new = np.where(mask, new, big)
        if np.array_equal(new, lab):
            break
        lab = new
    roots = np.unique(lab[mask])
    labels = np.zeros((h, w), dtype=np.int32)
    if roots.size:
        labels[mask] = np.searchsorted(roots, lab[mask]).astype(np.int32) + 1
    return labels, int(roots.size)


def distance_field(passable, start_y, start_x, diag_needs_orthos):
    """Shortest-path (straight, diag) step pairs; see the numba backend."""
    h, w = passable.shape
    straight = np.full((h, w), -1, dtype=np.int32)
    diag = np.full((h, w), -1, dtype=np.int32)
    if not (0 <= start_y < h and 0 <= start_x < w) or not passable[start_y, start_x]:
        return straight, diag
    cost = np.full((h, w), np.inf, dtype=np.float64)
    straight[start_y, start_x] = 0
    diag[start_y, start_x] = 0
    cost[start_y, start_x] = 0.0
    while True:
        updated = False
        for dy, dx, is_diag in _NEIGH8:
            src_s = _shifted(straight, dy, dx, np.int32(-1))
            src_d = _shifted(diag, dy, dx, np.int32(-1))
            ok = (src_s >= 0) & passable
            if is_diag and diag_needs_orthos:
                ok &= _shifted(passable, dy, 0, False) & _shifted(passable, 0, dx, False)
            cand_s = src_s + (0 if is_diag else 1)
            cand_d = src_d + (1 if is_diag else 0)
            cand_cost = cand_s + cand_d * SQRT2
            better = ok & (cand_cost < cost)
            if better.any():
                straight[better] = cand_s[better]
                diag[better] = cand_d[better]
                cost[better] = cand_cost[better]
                updated = True
        if not updated:
            return straight, diag


def _fov_mask(dx, dy, heading, fov_deg):
    if fov_deg >= 360:
        return np.ones_like(dx, dtype=bool)
    hx = _HEAD_X[heading]
    hy = _HEAD_Y[heading]
    dot = hx * dx + hy * dy
    d2 = dx * dx + dy * dy
    if hx == 0 or hy == 0:
        wedge = (dot >= 0) & (2 * dot * dot >= d2)
    else:
        wedge = (dot >= 0) & (dot * dot >= d2)
    return wedge | (d2 == 0)


def visible_mask(occupied, sy, sx, heading, fov_deg, range_cells, skip):
    """Occluder-sweep visibility; exact counterpart of the ray-walk kernel.

    A cell m blocks target c iff m lies on the supercover of the segment
    between the agent and c centers. Membership reduces to integer slab and
    cross-product bounds (Minkowski sum of the segment with a unit square),
    which vectorizes over all targets for each occupied cell.
    """
    h, w = occupied.shape
    ys, xs = np.mgrid[0:h, 0:w]
    dy = ys - sy
    dx = xs - sx
    cand = (dx * dx + dy * dy <= range_cells * range_cells) & ~skip
    cand &= _fov_mask(dx, dy, heading, fov_deg)
    if not cand.any():
        return cand
    occ_ys, occ_xs = np.nonzero(
        occupied
        & (np.abs(dy) <= range_cells)
        & (np.abs(dx) <= range_cells)
    )
    blocked = np.zeros((h, w), dtype=bool)
    adx = np.abs(dx)
    ady = np.abs(dy)
    for oy, ox in zip(occ_ys.tolist(), occ_xs.tolist()):
        uy = oy - sy
        ux = ox - sx
        if ux == 0 and uy == 0:
            continue
        cross = dx * uy - dy * ux
        on_ray = (
            (2 * np.abs(cross) <= adx + ady)
            & (np.minimum(0, dx) <= ux)
            & (ux <= np.maximum(0, dx))
            & (np.minimum(0, dy) <= uy)
            & (uy <= np.maximum(0, dy))
        )
        on_ray &= ~((dx == ux) & (dy == uy))
        blocked |= on_ray
    return cand & ~blocked


def _thin_conditions(img, y, x, sub):
    h, w = img.shape
    offs = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
    p = [
        1 if 0 <= y + oy < h and 0 <= x + ox < w and img[y + oy, x + ox] else 0
        for oy, ox in offs
    ]
    b = sum(p)
    if b < 2 or b > 6:
        return False
    a = sum(1 for k in range(8) if p[k] == 0 and p[(k + 1) % 8] == 1)
    if a != 1:
        return False
    if sub == 0:
        return p[0] * p[2] * p[4] == 0 and p[2] * p[4] * p[6] == 0
    return p[0] * p[2] * p[6] == 0 and p[0] * p[4] * p[6] == 0


def _thin_candidates(img, sub):
    p = [
        _shifted(img, -oy, -ox, False)
        for oy, ox in ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))
    ]
    b = sum(q.astype(np.int8) for q in p)
    a = sum((~p[k] & p[(k + 1) % 8]).astype(np.int8) for k in range(8))
    cond = img & (b >= 2) & (b <= 6) & (a == 1)
    if sub == 0:
        cond &= ~(p[0] & p[2] & p[4]) & ~(p[2] & p[4] & p[6])
    else:
        cond &= ~(p[0] & p[2] & p[6]) & ~(p[0] & p[4] & p[6])
    return cond


def thin_mask(mask):
    """Guarded thinning; see the numba backend for the contract."""
    img = mask.copy()
    changed = True
    while changed:
        changed = False
        for sub in range(2):
            cand = _thin_candidates(img, sub)
            for y, x in np.argwhere(cand).tolist():
                if _thin_conditions(img, y, x, sub):
                    img[y, x] = False
                    changed = True
    return img


def held_karp_closed(dist, start):
    """Exact closed-tour DP; mirrors the numba kernel (see its docstring)."""
    n = dist.shape[0]
    if n == 1:
        return 0.0, start
    full = (1 << n) - 1
    dp = np.full((1 << n, n), np.inf, dtype=np.float64)
    dp[1 << start, start] = 0.0
    for mask in range(1 << n):
        if mask & (1 << start) == 0:
            continue
        row = dp[mask]
        for last in range(n):
            if mask & (1 << last) == 0 or row[last] == np.inf:
                continue
            cand = row[last] + dist[last]
            for nxt in range(n):
                if mask & (1 << nxt) == 0 and cand[nxt] < dp[mask | (1 << nxt), nxt]:
                    dp[mask | (1 << nxt), nxt] = cand[nxt]
    best_total = np.inf
    best_last = -1
    best_path = np.inf
    for last in range(n):
        if last == start:
            continue
        path = dp[full, last]
        total = path + dist[last, start]
        if total < best_total or (total == best_total and path < best_path):
            best_total = total
            best_last = last
            best_path = path
    return float(best_path), int(best_last)


def nn_two_opt_closed(dist, start):
    """Nearest-neighbor + first-improvement 2-opt; mirrors the numba kernel."""
    n = dist.shape[0]
    if n == 1:
        return 0.0, start
    tour = np.empty(n, dtype=np.int64)
    used = np.zeros(n, dtype=bool)
    tour[0] = start
    used[start] = True
    for i in range(1, n):
        row = np.where(used, np.inf, dist[tour[i - 1]])
        best = int(np.argmin(row))
        tour[i] = best
        used[best] = True
    improved = True
    while improved:
        improved = False
        for i in range(1, n - 1):
            for j in range(i + 1, n):
                a = tour[i - 1]
                b = tour[i]
                c = tour[j]
                d = tour[(j + 1) % n] if j + 1 < n else start
                delta = dist[a, c] + dist[b, d] - dist[a, b] - dist[c, d]
                # Same zero-delta guard as the numba backend.
                if delta < -1e-9:
                    tour[i : j + 1] = tour[i : j + 1][::-1]
                    improved = True
                    break
            if improved:
                break
    path_cost = 0.0
    for i in range(n - 1):
        path_cost += dist[tour[i], tour[i + 1]]
    return float(path_cost), int(tour[n - 1])
