"""Numba-compiled grid kernels.

Same contracts as ``_numpy``; outputs must be bit-identical between the two
backends (enforced by the parity tests and the kernel benchmark).
"""

import numpy as np
from numba import njit

SQRT2 = np.sqrt(2.0)

NAME = "numba"

# Neighbor offsets (dy, dx, is_diagonal), fixed order shared with _numpy.
_NEIGH8 = np.array(
    [
        (-1, -1, 1),
        (-1, 0, 0),
        (-1, 1, 1),
        (0, -1, 0),
        (0, 1, 0),
        (1, -1, 1),
        (1, 0, 0),
        (1, 1, 1),
    ],
    dtype=np.int64,
)

# Heading unit vectors (hx, hy), index order N, NE, E, SE, S, SW, W, NW.
# y grows downward, so N is -y.
_HEAD_X = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)
_HEAD_Y = np.array([-1, -1, 0, 1, 1, 1, 0, -1], dtype=np.int64)


@njit(cache=True)
def flood_fill(traversable, seed_ys, seed_xs, eight):
    h, w = traversable.shape
    out = np.zeros((h, w), dtype=np.bool_)
    stack_y = np.empty(h * w, dtype=np.int64)
    stack_x = np.empty(h * w, dtype=np.int64)
    top = 0
    for i in range(seed_ys.shape[0]):
        sy, sx = seed_ys[i], seed_xs[i]
        if traversable[sy, sx] and not out[sy, sx]:
            out[sy, sx] = True
            stack_y[top] = sy
            stack_x[top] = sx
            top += 1
    while top > 0:
        top -= 1
        y = stack_y[top]
        x = stack_x[top]
        for k in range(8):
            if not eight and _NEIGH8[k, 2] == 1:
                continue
            ny = y + _NEIGH8[k, 0]
            nx = x + _NEIGH8[k, 1]
            if 0 <= ny < h and 0 <= nx < w and traversable[ny, nx] and not out[ny, nx]:
                out[ny, nx] = True
                stack_y[top] = ny
                stack_x[top] = nx
                top += 1
    return out


@njit(cache=True)
def label_components(mask, eight):
    """Label connected components 1..n in raster order of first encounter."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=np.int32)
    queue_y = np.empty(h * w, dtype=np.int64)
    queue_x = np.empty(h * w, dtype=np.int64)
    count = 0
    for y0 in range(h):
        for x0 in range(w):
            if not mask[y0, x0] or labels[y0, x0] != 0:
                continue
            count += 1
            labels[y0, x0] = count
            queue_y[0] = y0
            queue_x[0] = x0
            head, tail = 0, 1
            while head < tail:
                y = queue_y[head]
                x = queue_x[head]
                head += 1
                for k in range(8):
                    if not eight and _NEIGH8[k, 2] == 1:
                        continue
                    ny = y + _NEIGH8[k, 0]
                    nx = x + _NEIGH8[k, 1]
                    if 0 <= ny < h and 0 <= nx < w and mask[ny, nx] and labels[ny, nx] == 0:
                        labels[ny, nx] = count
                        queue_y[tail] = ny
                        queue_x[tail] = nx
                        tail += 1
    return labels, count


@njit(cache=True)
def _heap_push(heap_cost, heap_cell, size, cost, cell):
    i = size
    heap_cost[i] = cost
    heap_cell[i] = cell
    while i > 0:
        parent = (i - 1) // 2
        if heap_cost[parent] > heap_cost[i] or (
            heap_cost[parent] == heap_cost[i] and heap_cell[parent] > heap_cell[i]
        ):
            heap_cost[parent], heap_cost[i] = heap_cost[i], heap_cost[parent]
            heap_cell[parent], heap_cell[i] = heap_cell[i], heap_cell[parent]
            i = parent
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(heap_cost, heap_cell, size):
    top_cost = heap_cost[0]
    top_cell = heap_cell[0]
    size -= 1
    heap_cost[0] = heap_cost[size]
    heap_cell[0] = heap_cell[size]
    i = 0
    while True:
        left = 2 * i + 1
        right = left + 1
        best = i
        if left < size and (
            heap_cost[left] < heap_cost[best]
            or (heap_cost[left] == heap_cost[best] and heap_cell[left] < heap_cell[best])
        ):
            best = left
        if right < size and (
            heap_cost[right] < heap_cost[best]
            or (heap_cost[right] == heap_cost[best] and heap_cell[right] < heap_cell[best])
        ):
            best = right
        if best == i:
            break
        heap_cost[i], heap_cost[best] = heap_cost[best], heap_cost[i]
        heap_cell[i], heap_cell[best] = heap_cell[best], heap_cell[i]
        i = best
    return top_cost, top_cell, size


@njit(cache=True)
def distance_field(passable, start_y, start_x, diag_needs_orthos):
    """Shortest 8-connected path lengths from a start cell.

    Returns (straight, diag) int32 step-count arrays with -1 for unreachable
    cells; the path cost is straight + diag * sqrt(2). Tracking integer step
    pairs instead of accumulated floats keeps results exact and identical
    across backends. Diagonal moves can be restricted to require both
    orthogonal neighbors passable (agent motion rule).
    """
    h, w = passable.shape
    straight = np.full((h, w), -1, dtype=np.int32)
    diag = np.full((h, w), -1, dtype=np.int32)
    if not (0 <= start_y < h and 0 <= start_x < w) or not passable[start_y, start_x]:
        return straight, diag
    best = np.full((h, w), np.inf, dtype=np.float64)
    done = np.zeros((h, w), dtype=np.bool_)
    cap = 8 * h * w + 8
    heap_cost = np.empty(cap, dtype=np.float64)
    heap_cell = np.empty(cap, dtype=np.int64)
    straight[start_y, start_x] = 0
    diag[start_y, start_x] = 0
    best[start_y, start_x] = 0.0
    size = _heap_push(heap_cost, heap_cell, 0, 0.0, start_y * w + start_x)
    while size > 0:
        cost, cell, size = _heap_pop(heap_cost, heap_cell, size)
        y = cell // w
        x = cell % w
        if done[y, x] or cost > best[y, x]:
            continue
        done[y, x] = True
        for k in range(8):
            dy = _NEIGH8[k, 0]
            dx = _NEIGH8[k, 1]
            is_diag = _NEIGH8[k, 2] == 1
            ny = y + dy
            nx = x + dx
            if not (0 <= ny < h and 0 <= nx < w) or not passable[ny, nx]:
                continue
            if is_diag and diag_needs_orthos:
                if not (passable[y, nx] and passable[ny, x]):
                    continue
            if is_diag:
                cand_s = straight[y, x]
                cand_d = diag[y, x] + 1
            else:
                cand_s = straight[y, x] + 1
                cand_d = diag[y, x]
            cand_cost = cand_s + cand_d * SQRT2
            if cand_cost < best[ny, nx]:
                best[ny, nx] = cand_cost
                straight[ny, nx] = cand_s
                diag[ny, nx] = cand_d
                size = _heap_push(heap_cost, heap_cell, size, cand_cost, ny * w + nx)
    return straight, diag


@njit(cache=True)
def _in_fov(heading, fov_deg, dx, dy):
    if fov_deg >= 360:
        return True
    if dx == 0 and dy == 0:
        return True
    hx = _HEAD_X[heading]
    hy = _HEAD_Y[heading]
    dot = hx * dx + hy * dy
    if dot < 0:
        return False
    # 90-degree wedge, inclusive at the 45-degree edges. For axis headings
    # |h| = 1; for diagonal headings |h| = sqrt(2), which scales the bound.
    if hx == 0 or hy == 0:
        return 2 * dot * dot >= dx * dx + dy * dy
    return dot * dot >= dx * dx + dy * dy


@njit(cache=True)
def _ray_clear(occupied, sy, sx, ty, tx):
    """True if no occupied cell lies strictly between the two cell centers.

    Walks the supercover of the segment between centers: every cell whose
    closed unit square the segment touches. Corner crossings add both
    flanking cells (conservative occlusion).
    """
    dx = tx - sx
    dy = ty - sy
    nx = abs(dx)
    ny = abs(dy)
    step_x = 1 if dx > 0 else -1
    step_y = 1 if dy > 0 else -1
    x = sx
    y = sy
    ix = 0
    iy = 0
    while ix < nx or iy < ny:
        decide = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx
        if decide == 0:
            # Exact corner crossing: both flanking cells are interior.
            if occupied[y, x + step_x] or occupied[y + step_y, x]:
                return False
            x += step_x
            y += step_y
            ix += 1
            iy += 1
        elif decide < 0:
            x += step_x
            ix += 1
        else:
            y += step_y
            iy += 1
        if occupied[y, x] and not (y == ty and x == tx):
            return False
    return True


@njit(cache=True)
def visible_mask(occupied, sy, sx, heading, fov_deg, range_cells, skip):
    """Cells visible from (sy, sx): in range, in the FoV wedge, unoccluded.

    Cells flagged in ``skip`` are not tested (used to skip already-revealed
    cells in the episode loop); pass a zero mask for the exact full set.
    """
    h, w = occupied.shape
    out = np.zeros((h, w), dtype=np.bool_)
    r2 = range_cells * range_cells
    y_lo = max(0, sy - range_cells)
    y_hi = min(h - 1, sy + range_cells)
    x_lo = max(0, sx - range_cells)
    x_hi = min(w - 1, sx + range_cells)
    for ty in range(y_lo, y_hi + 1):
        for tx in range(x_lo, x_hi + 1):
            if skip[ty, tx]:
                continue
            dx = tx - sx
            dy = ty - sy
            if dx * dx + dy * dy > r2:
                continue
            if not _in_fov(heading, fov_deg, dx, dy):
                continue
            if dx == 0 and dy == 0:
                out[ty, tx] = True
                continue
            if _ray_clear(occupied, sy, sx, ty, tx):
                out[ty, tx] = True
    return out


@njit(cache=True)
def _thin_conditions(img, y, x, sub):
    h, w = img.shape
    # P2..P9 clockwise from north; out-of-bounds neighbors count as empty.
    p = np.zeros(8, dtype=np.uint8)
    offs_y = (-1, -1, 0, 1, 1, 1, 0, -1)
    offs_x = (0, 1, 1, 1, 0, -1, -1, -1)
    for k in range(8):
        ny = y + offs_y[k]
        nx = x + offs_x[k]
        if 0 <= ny < h and 0 <= nx < w and img[ny, nx]:
            p[k] = 1
    b = 0
    for k in range(8):
        b += p[k]
    if b < 2 or b > 6:
        return False
    a = 0
    for k in range(8):
        if p[k] == 0 and p[(k + 1) % 8] == 1:
            a += 1
    if a != 1:
        return False
    if sub == 0:
        return (p[0] * p[2] * p[4] == 0) and (p[2] * p[4] * p[6] == 0)
    return (p[0] * p[2] * p[6] == 0) and (p[0] * p[4] * p[6] == 0)


@njit(cache=True)
def thin_mask(mask):
    """Iterative boundary-removal thinning with a topology guard.

    Two alternating parallel marking sub-passes; marked pixels are then
    deleted sequentially in raster order, re-validating against the evolving
    image so no component is ever split or entirely removed.
    """
    h, w = mask.shape
    img = mask.copy()
    cand = np.zeros((h, w), dtype=np.bool_)
    changed = True
    while changed:
        changed = False
        for sub in range(2):
            for y in range(h):
                for x in range(w):
                    cand[y, x] = img[y, x] and _thin_conditions(img, y, x, sub)
            for y in range(h):
                for x in range(w):
                    if cand[y, x] and _thin_conditions(img, y, x, sub):
                        img[y, x] = False
                        changed = True
    return img


@njit(cache=True)
def held_karp_closed(dist, start):
    """Exact minimum closed tour from ``start`` over a full distance matrix.

    Returns (path_cost, last): the cost of the visiting path (tour minus the
    final return leg) and its last node. Equal-total tours resolve to the
    smaller path cost (the sweep finishes earlier), then the smaller last
    node index.
    """
    n = dist.shape[0]
    if n == 1:
        return 0.0, start
    full = (1 << n) - 1
    dp = np.full((1 << n, n), np.inf, dtype=np.float64)
    dp[1 << start, start] = 0.0
    for mask in range(1 << n):
        if mask & (1 << start) == 0:
            continue
        for last in range(n):
            if mask & (1 << last) == 0:
                continue
            cur = dp[mask, last]
            if cur == np.inf:
                continue
            for nxt in range(n):
                if mask & (1 << nxt) != 0:
                    continue
                nmask = mask | (1 << nxt)
                cand = cur + dist[last, nxt]
                if cand < dp[nmask, nxt]:
                    dp[nmask, nxt] = cand
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
    return best_path, best_last


@njit(cache=True)
def nn_two_opt_closed(dist, start):
    """Nearest-neighbor closed tour improved by first-improvement 2-opt."""
    n = dist.shape[0]
    if n == 1:
        return 0.0, start
    tour = np.empty(n, dtype=np.int64)
    used = np.zeros(n, dtype=np.bool_)
    tour[0] = start
    used[start] = True
    for i in range(1, n):
        prev = tour[i - 1]
        best = -1
        best_d = np.inf
        for v in range(n):
            if not used[v] and dist[prev, v] < best_d:
                best_d = dist[prev, v]
                best = v
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
                # Threshold keeps float noise on truly zero-delta moves (for
                # example reversing the whole segment) from cycling forever.
                if delta < -1e-9:
                    lo, hi = i, j
                    while lo < hi:
                        tour[lo], tour[hi] = tour[hi], tour[lo]
                        lo += 1
                        hi -= 1
                    improved = True
                    break
            if improved:
                break
    path_cost = 0.0
    for i in range(n - 1):
        path_cost += dist[tour[i], tour[i + 1]]
    return path_cost, tour[n - 1]
