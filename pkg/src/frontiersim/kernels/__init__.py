"""Grid kernels with a numba fast path and a pure-numpy fallback.

The backend is chosen once at import time: set ``FRONTIERSIM_NUMBA=0`` to
force the numpy fallback (it is also used automatically when numba cannot be
imported). Both backends implement the same contracts and return identical
arrays; ``benchmarks/bench_kernels.py`` measures the gap.
"""

import math
import os

_flag = os.environ.get("FRONTIERSIM_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "no", "off")

if _want_numba:
    try:
        from . import _numba as _backend
    except ImportError:  # pragma: no cover - exercised only without numba
        from . import _numpy as _backend
else:
    from . import _numpy as _backend

BACKEND = _backend.NAME
SQRT2 = math.sqrt(2.0)

flood_fill = _backend.flood_fill
label_components = _backend.label_components
distance_field = _backend.distance_field
visible_mask = _backend.visible_mask
thin_mask = _backend.thin_mask
held_karp_closed = _backend.held_karp_closed
nn_two_opt_closed = _backend.nn_two_opt_closed


def pair_distance(straight: int, diag: int) -> float:
    """Path cost for (straight, diag) step counts; -1 pairs are unreachable."""
    if straight < 0:
        return math.inf
    return straight + diag * SQRT2


def descend_path(straight, diag, goal_y, goal_x, passable=None, diag_needs_orthos=False):
    """Trace a shortest path from (goal_y, goal_x) back to the field start.

    Exact integer (straight, diag) predecessor matching makes the walk
    deterministic regardless of relaxation order. Pass the mask and flag the
    field was built with so only legal moves are taken. Returns a list of
    (y, x) pairs from the field's start cell to the goal.
    """
    h, w = straight.shape
    path = [(goal_y, goal_x)]
    y, x = goal_y, goal_x
    while straight[y, x] != 0 or diag[y, x] != 0:
        found = False
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                ny, nx = y + dy, x + dx
                if not (0 <= ny < h and 0 <= nx < w) or straight[ny, nx] < 0:
                    continue
                step_s = 1 if dy == 0 or dx == 0 else 0
                step_d = 1 - step_s
                if step_d and diag_needs_orthos and passable is not None:
                    if not (passable[y, nx] and passable[ny, x]):
                        continue
                if (
                    straight[ny, nx] + step_s == straight[y, x]
                    and diag[ny, nx] + step_d == diag[y, x]
                ):
                    y, x = ny, nx
                    path.append((y, x))
                    found = True
                    break
            if found:
                break
        if not found:  # pragma: no cover - would indicate a kernel bug
            raise RuntimeError("path descent failed: inconsistent distance field")
    path.reverse()
    return path
