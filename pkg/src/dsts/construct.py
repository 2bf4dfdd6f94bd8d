"""Constructive heuristics producing an initial feasible schedule.

All three are deterministic given the instance; ties break by smaller
trailer id, then smaller dock index. Trailers that cannot be appended
feasibly at the moment they are considered become unserved.
"""

from __future__ import annotations

from .core import Instance, Schedule, completion, earliest_start, make_schedule

ARRIVAL_VERTICAL = "ArrivalVertical"
ARRIVAL_HORIZONTAL = "ArrivalHorizontal"
MIN_ARRIVAL_VERTICAL = "MinArrivalVertical"

METHODS = (ARRIVAL_VERTICAL, ARRIVAL_HORIZONTAL, MIN_ARRIVAL_VERTICAL)


def construct(method: str, inst: Instance) -> Schedule:
    if method == ARRIVAL_VERTICAL:
        return _vertical(inst, list(range(1, inst.n + 1)))
    if method == MIN_ARRIVAL_VERTICAL:
        order = sorted(range(1, inst.n + 1), key=lambda j: (inst.trailer(j).r, j))
        return _vertical(inst, order)
    if method == ARRIVAL_HORIZONTAL:
        return _horizontal(inst)
    raise ValueError(f"unknown construction method {method!r}; expected one of {METHODS}")


def _vertical(inst: Instance, order: list[int]) -> Schedule:
    """Round-robin over docks, appending at the tail with earliest start."""
    runs: list[list[tuple[int, int]]] = [[] for _ in range(inst.docks)]
    free = [0] * inst.docks
    unserved = []
    for k, j in enumerate(order):
        d = k % inst.docks
        t = inst.trailer(j)
        start = earliest_start(free[d], t)
        if completion(start, t) <= inst.latest_completion(j):
            runs[d].append((j, start))
            free[d] = completion(start, t)
        else:
            unserved.append(j)
    return make_schedule(inst, runs, unserved)


def _horizontal(inst: Instance) -> Schedule:
    """Fill one dock at a time with the feasible trailer arriving closest to
    the run's current completion (the empty run counts as completing at 0)."""
    runs: list[list[tuple[int, int]]] = [[] for _ in range(inst.docks)]
    remaining = set(range(1, inst.n + 1))
    for d in range(inst.docks):
        free = 0
        while True:
            best = None
            for j in sorted(remaining):
                t = inst.trailer(j)
                start = earliest_start(free, t)
                if completion(start, t) > inst.latest_completion(j):
                    continue
                key = (abs(t.r - free), j)
                if best is None or key < best[0]:
                    best = (key, j, start)
            if best is None:
                break
            _, j, start = best
            runs[d].append((j, start))
            free = completion(start, inst.trailer(j))
            remaining.remove(j)
    return make_schedule(inst, runs, remaining)
