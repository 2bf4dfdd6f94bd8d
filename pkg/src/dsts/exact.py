"""Exhaustive optimizer for desk-scale instances.

Enumerates every partition of the trailers into an unserved set plus one
ordered run per dock, building each run left to right (so every permutation
of every subset is reached) and timing entries at their earliest starts,
which is optimal for a fixed partition. Docks are interchangeable, so only
dock-canonical assignments are enumerated: first trailer ids strictly
increase across nonempty docks and empty docks come last. Accumulated
waiting cost is a sound lower bound for pruning because appending never
re-times earlier entries.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .core import Instance, Schedule, completion, earliest_start, make_schedule


@dataclass(frozen=True)
class ExactLimits:
    max_trailers: int = 7
    max_docks: int = 3
    timeout: float = 60.0  # wall seconds


class ExactSearchTimeout(Exception):
    pass


def brute_force_optimum(inst: Instance, lim: ExactLimits = ExactLimits()) -> tuple[Schedule, int]:
    """Optimal schedule and its cost, with a deterministic canonical tie-break."""
    if inst.n > lim.max_trailers:
        raise ValueError(f"{inst.n} trailers exceeds limit {lim.max_trailers}")
    if inst.docks > lim.max_docks:
        raise ValueError(f"{inst.docks} docks exceeds limit {lim.max_docks}")
    deadline = time.monotonic() + lim.timeout
    docks = inst.docks
    best_cost = None
    best_key = None

    def leaf(runs: tuple, remaining: frozenset, wait: int):
        nonlocal best_cost, best_key
        cost = wait + sum(inst.trailer(j).g for j in remaining)
        key = (runs, tuple(sorted(remaining)))
        if best_cost is None or cost < best_cost or (cost == best_cost and key < best_key):
            best_cost = cost
            best_key = key

    def rec(d: int, runs: tuple, entries: tuple, free: int,
            remaining: frozenset, wait: int, prev_first: int):
        if time.monotonic() > deadline:
            raise ExactSearchTimeout(f"exceeded {lim.timeout}s")
        if best_cost is not None and wait > best_cost:
            return
        # close the current dock
        closed = runs + (entries,)
        if d == docks - 1:
            leaf(closed, remaining, wait)
        elif entries:
            rec(d + 1, closed, (), 0, remaining, wait, entries[0][0])
        else:
            # a closed empty dock makes every later dock empty (canonical form)
            leaf(closed + ((),) * (docks - 1 - d), remaining, wait)
        # or append one more trailer to it
        for j in sorted(remaining):
            if not entries and j <= prev_first:
                continue
            t = inst.trailer(j)
            start = earliest_start(free, t)
            done = completion(start, t)
            if done > inst.latest_completion(j):
                continue
            rec(d, runs, entries + ((j, start),), done,
                remaining - {j}, wait + t.f * (start - t.r), prev_first)

    rec(0, (), (), 0, frozenset(range(1, inst.n + 1)), 0, 0)
    runs, unserved = best_key
    schedule = make_schedule(inst, [list(r) for r in runs], unserved)
    return schedule, best_cost
