"""Adaptive destroy/repair/local-search metaheuristic.

Each iteration copies the working solution, applies one destruction, one
repair, and one local-search operator (selected from an operator-transition
weight matrix, argmax over the previous operator's row with epsilon-greedy
exploration), and accepts the result only if it strictly improves. The
matrix entry (previous op, applied op) is updated after every application
by tau' = tau - (f_out - f_in) / f_in, so improving applications gain
weight and worsening ones lose it; weights of either sign are allowed.

The run stops once no improvement was seen for n_max_noimp consecutive
iterations while the relative matrix change metric(T_prev, T_cur) /
metric(T_cur, 0) has dropped below epsilon, or at the hard iteration cap.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Optional

from .core import (Instance, Schedule, InfeasibleScheduleError, check_schedule,
                   completion, earliest_start, make_schedule, retime, try_insert)
from .prng import Rng

EXPLORATION = 0.1


class OperatorId(IntEnum):
    INTER_DOCK_RANDOM_REMOVAL = 0
    DOUBLY_RANDOM_REMOVAL = 1
    INTRA_DOCK_RANDOM_REMOVAL = 2
    WIPE_DOCK = 3
    INSERT_FROM_UNSERVEDS = 4
    INSERT_FROM_UNSERVEDS_WITH_LOOK_AHEAD = 5
    REPLACE_WITH_UNSERVED = 6
    SWAP_TRAILERS = 7

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    OperatorId.INTER_DOCK_RANDOM_REMOVAL: "InterDockRandomRemoval",
    OperatorId.DOUBLY_RANDOM_REMOVAL: "DoublyRandomRemoval",
    OperatorId.INTRA_DOCK_RANDOM_REMOVAL: "IntraDockRandomRemoval",
    OperatorId.WIPE_DOCK: "WipeDock",
    OperatorId.INSERT_FROM_UNSERVEDS: "InsertFromUnserveds",
    OperatorId.INSERT_FROM_UNSERVEDS_WITH_LOOK_AHEAD: "InsertFromUnservedsWithLookAhead",
    OperatorId.REPLACE_WITH_UNSERVED: "ReplaceWithUnserved",
    OperatorId.SWAP_TRAILERS: "SwapTrailers",
}

DESTRUCTION_OPS = (OperatorId.INTER_DOCK_RANDOM_REMOVAL, OperatorId.DOUBLY_RANDOM_REMOVAL,
                   OperatorId.INTRA_DOCK_RANDOM_REMOVAL, OperatorId.WIPE_DOCK)
REPAIR_OPS = (OperatorId.INSERT_FROM_UNSERVEDS, OperatorId.INSERT_FROM_UNSERVEDS_WITH_LOOK_AHEAD)
LOCAL_SEARCH_OPS = (OperatorId.REPLACE_WITH_UNSERVED, OperatorId.SWAP_TRAILERS)

METRICS = ("d1", "d2", "dinf", "dn")


@dataclass(frozen=True)
class TransitionMatrix:
    """Operator x operator weights; row = previous operator, column = candidate."""
    rows: tuple[tuple[float, ...], ...]

    @staticmethod
    def random(rng: Rng) -> "TransitionMatrix":
        n = len(OperatorId)
        return TransitionMatrix(tuple(tuple(rng.random() for _ in range(n)) for _ in range(n)))

    @staticmethod
    def zero() -> "TransitionMatrix":
        n = len(OperatorId)
        return TransitionMatrix(((0.0,) * n,) * n)


@dataclass(frozen=True)
class VnsConfig:
    alpha: float = 0.2      # removal fraction, inter-dock
    beta: float = 0.3       # removal fraction, doubly random
    gamma: float = 0.3      # removal fraction, intra-dock
    epsilon: float = 0.05   # relative matrix-change threshold
    n_max_noimp: Optional[int] = None  # default at solve time: n * docks + 1
    metric: str = "d1"
    seed: int = 0
    max_iters: int = 10 ** 6

    def validate(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must be in (0, 1]")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.metric not in METRICS:
            raise ValueError(f"metric must be one of {METRICS}")


@dataclass
class IterationRecord:
    iteration: int
    best_cost: int
    accepted: bool
    op_triple: str
    matrix_distance: float


@dataclass
class VnsStats:
    iterations: int = 0
    best_costs: list[int] = field(default_factory=list)
    op_counts: dict[OperatorId, int] = field(default_factory=dict)
    final_matrix: Optional[TransitionMatrix] = None
    wall_ms: float = 0.0
    records: list[IterationRecord] = field(default_factory=list)


def update_transition(matrix: TransitionMatrix, frm: OperatorId, to: OperatorId,
                      f_in, f_out) -> TransitionMatrix:
    """tau[frm][to] -= (f_out - f_in) / f_in; unchanged when f_in == 0 (optimum)."""
    if f_in < 0:
        raise ValueError("f_in must be nonnegative")
    if f_in == 0:
        return matrix
    rows = [list(r) for r in matrix.rows]
    rows[frm][to] -= (f_out - f_in) / f_in
    return TransitionMatrix(tuple(tuple(r) for r in rows))


def matrix_distance(a: TransitionMatrix, b: TransitionMatrix, metric: str = "d1") -> float:
    if len(a.rows) != len(b.rows) or any(len(x) != len(y) for x, y in zip(a.rows, b.rows)):
        raise ValueError("matrix dimensions differ")
    diff = [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a.rows, b.rows)]
    if metric == "d1":
        return sum(abs(v) for row in diff for v in row)
    if metric == "d2":
        return math.sqrt(sum(v * v for row in diff for v in row))
    if metric == "dinf":
        return max((abs(v) for row in diff for v in row), default=0.0)
    if metric == "dn":
        return _spectral_norm(diff)
    raise ValueError(f"unknown metric {metric!r}")


def _spectral_norm(m: list[list[float]], tol: float = 1e-10, max_iters: int = 10 ** 4) -> float:
    """Largest singular value via power iteration on M^T M."""
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if rows == 0 or cols == 0:
        return 0.0
    gram = [[sum(m[k][i] * m[k][j] for k in range(rows)) for j in range(cols)]
            for i in range(cols)]
    # deterministic start, slightly asymmetric so no eigenvector is missed
    v = [1.0 + 1e-3 * i for i in range(cols)]
    norm = math.sqrt(sum(x * x for x in v))
    v = [x / norm for x in v]
    lam = 0.0
    for _ in range(max_iters):
        w = [sum(gram[i][j] * v[j] for j in range(cols)) for i in range(cols)]
        norm = math.sqrt(sum(x * x for x in w))
        if norm == 0.0:
            return 0.0
        w = [x / norm for x in w]
        new_lam = sum(w[i] * sum(gram[i][j] * w[j] for j in range(cols)) for i in range(cols))
        if abs(new_lam - lam) <= tol:
            lam = new_lam
            break
        lam, v = new_lam, w
    return math.sqrt(max(lam, 0.0))


def select_operator(matrix: TransitionMatrix, last: OperatorId,
                    ops: tuple[OperatorId, ...], rng: Rng) -> OperatorId:
    """Argmax of the previous operator's row over `ops`, with epsilon-greedy
    exploration; ties (and explorations) resolved uniformly at random."""
    if not ops:
        raise ValueError("empty operator class")
    if rng.random() < EXPLORATION:
        return ops[rng.randint(0, len(ops) - 1)]
    row = matrix.rows[last]
    best = max(row[o] for o in ops)
    ties = [o for o in ops if row[o] == best]
    if len(ties) == 1:
        return ties[0]
    return ties[rng.randint(0, len(ties) - 1)]


# --- destruction ------------------------------------------------------------

def apply_destruction(op: OperatorId, inst: Instance, s: Schedule,
                      cfg: VnsConfig, rng: Rng) -> Schedule:
    """Move some served trailers to the unserved set; always feasible since the
    surviving entries are re-timed to (weakly earlier) earliest starts."""
    if op not in DESTRUCTION_OPS:
        raise ValueError(f"{op.label} is not a destruction operator")
    if op == OperatorId.INTER_DOCK_RANDOM_REMOVAL:
        served = s.served_ids()
        k = math.ceil(cfg.alpha * len(served))
        if k == 0:
            return s
        removed = {served[i] for i in rng.sample_indices(len(served), k)}
    elif op == OperatorId.WIPE_DOCK:
        d = rng.randint(0, inst.docks - 1)
        removed = {j for j, _ in s.runs[d].entries}
        if not removed:
            return s
    else:
        frac = cfg.beta if op == OperatorId.DOUBLY_RANDOM_REMOVAL else cfg.gamma
        d = rng.randint(0, inst.docks - 1)
        run = [j for j, _ in s.runs[d].entries]
        k = math.ceil(frac * len(run))
        if k == 0:
            return s
        removed = {run[i] for i in rng.sample_indices(len(run), k)}
    return _remove(inst, s, removed)


def _remove(inst: Instance, s: Schedule, removed: set[int]) -> Schedule:
    runs = []
    for run in s.runs:
        kept = [j for j, _ in run.entries if j not in removed]
        if len(kept) == len(run.entries):
            runs.append(list(run.entries))
        else:
            entries = retime(inst, kept)
            assert entries is not None  # removal can only move starts earlier
            runs.append(entries)
    return make_schedule(inst, runs, s.unserved | removed)


# --- repair -----------------------------------------------------------------

def apply_repair(op: OperatorId, inst: Instance, s: Schedule) -> Schedule:
    if op == OperatorId.INSERT_FROM_UNSERVEDS:
        return _insert_greedy(inst, s)
    if op == OperatorId.INSERT_FROM_UNSERVEDS_WITH_LOOK_AHEAD:
        return _insert_look_ahead(inst, s)
    raise ValueError(f"{op.label} is not a repair operator")


def _insert_greedy(inst: Instance, s: Schedule) -> Schedule:
    """First-fit: unserved by (arrival, id), slots in (dock, position) order."""
    cur = s
    for j in sorted(s.unserved, key=lambda j: (inst.trailer(j).r, j)):
        done = False
        for d in range(inst.docks):
            for pos in range(len(cur.runs[d].entries) + 1):
                cand = try_insert(inst, cur, d, pos, j)
                if cand is not None:
                    cur = cand
                    done = True
                    break
            if done:
                break
    return cur


def _insert_look_ahead(inst: Instance, s: Schedule) -> Schedule:
    """Fill idle gaps with one trailer or an ordered pair, without disturbing
    the existing entries; pick the filling that covers the most gap time."""
    order = sorted(s.unserved, key=lambda j: (inst.trailer(j).block, j))
    unserved = set(s.unserved)
    runs = []
    for run in s.runs:
        entries = list(run.entries)
        pos = 0
        while pos <= len(entries):
            gap_start = 0
            if pos > 0:
                pj, pstart = entries[pos - 1]
                gap_start = completion(pstart, inst.trailer(pj))
            cap = entries[pos][1] if pos < len(entries) else None  # None: open tail
            placed = _best_gap_fill(inst, order, gap_start, cap)
            if placed:
                entries[pos:pos] = placed
                for j, _ in placed:
                    unserved.discard(j)
                    order.remove(j)
                pos += len(placed) + 1
            else:
                pos += 1
        runs.append(entries)
    return make_schedule(inst, runs, unserved)


def _fit_after(inst: Instance, j: int, free: int, cap):
    """Earliest-start entry for j after `free`, or None if it cannot finish
    inside the gap (cap) and by its own latest completion."""
    t = inst.trailer(j)
    start = earliest_start(free, t)
    done = completion(start, t)
    if done > inst.latest_completion(j) or (cap is not None and done > cap):
        return None
    return (j, start), done


def _best_gap_fill(inst: Instance, order: list[int], gap_start: int, cap):
    best = None  # ((-filled, ids), entries)
    for u in order:
        one = _fit_after(inst, u, gap_start, cap)
        if one is None:
            continue
        entry_u, free_u = one
        key = (-inst.trailer(u).block, (u,))
        if best is None or key < best[0]:
            best = (key, [entry_u])
        for v in order:
            if v == u:
                continue
            two = _fit_after(inst, v, free_u, cap)
            if two is None:
                continue
            entry_v, _ = two
            filled = inst.trailer(u).block + inst.trailer(v).block
            key = (-filled, (u, v))
            if best is None or key < best[0]:
                best = (key, [entry_u, entry_v])
    return best[1] if best else None


# --- local search -----------------------------------------------------------

def apply_local_search(op: OperatorId, inst: Instance, s: Schedule) -> Schedule:
    if op == OperatorId.REPLACE_WITH_UNSERVED:
        return _replace_with_unserved(inst, s)
    if op == OperatorId.SWAP_TRAILERS:
        return _swap_trailers(inst, s)
    raise ValueError(f"{op.label} is not a local-search operator")


def _resequenced(inst: Instance, run_entries, pos: int, new_ids: list[int]):
    """Keep entries before pos, re-time new_ids from there; None if infeasible."""
    prefix = list(run_entries[:pos])
    prev = completion(prefix[-1][1], inst.trailer(prefix[-1][0])) if prefix else 0
    suffix = retime(inst, new_ids, prev)
    if suffix is None:
        return None
    return prefix + suffix


def _replace_with_unserved(inst: Instance, s: Schedule) -> Schedule:
    """Best improving move where an unserved trailer takes a served one's slot."""
    best = None  # (cost, schedule)
    for u in sorted(s.unserved):
        for d in range(inst.docks):
            entries = s.runs[d].entries
            for pos, (v, _) in enumerate(entries):
                ids = [u] + [j for j, _ in entries[pos + 1:]]
                new_entries = _resequenced(inst, entries, pos, ids)
                if new_entries is None:
                    continue
                runs = [list(r.entries) for r in s.runs]
                runs[d] = new_entries
                cand = make_schedule(inst, runs, (s.unserved - {u}) | {v})
                if cand.cost < s.cost and (best is None or cand.cost < best[0]):
                    best = (cand.cost, cand)
    return best[1] if best else s


def _swap_trailers(inst: Instance, s: Schedule) -> Schedule:
    """Best improving exchange of two served trailers across different docks."""
    best = None
    for d1 in range(inst.docks):
        for d2 in range(d1 + 1, inst.docks):
            e1, e2 = s.runs[d1].entries, s.runs[d2].entries
            for p1, (a, _) in enumerate(e1):
                for p2, (b, _) in enumerate(e2):
                    ids1 = [b] + [j for j, _ in e1[p1 + 1:]]
                    ids2 = [a] + [j for j, _ in e2[p2 + 1:]]
                    n1 = _resequenced(inst, e1, p1, ids1)
                    if n1 is None:
                        continue
                    n2 = _resequenced(inst, e2, p2, ids2)
                    if n2 is None:
                        continue
                    runs = [list(r.entries) for r in s.runs]
                    runs[d1], runs[d2] = n1, n2
                    cand = make_schedule(inst, runs, s.unserved)
                    if cand.cost < s.cost and (best is None or cand.cost < best[0]):
                        best = (cand.cost, cand)
    return best[1] if best else s


def apply_operator(op: OperatorId, inst: Instance, s: Schedule,
                   cfg: VnsConfig, rng: Rng) -> Schedule:
    if op in DESTRUCTION_OPS:
        return apply_destruction(op, inst, s, cfg, rng)
    if op in REPAIR_OPS:
        return apply_repair(op, inst, s)
    return apply_local_search(op, inst, s)


# --- main loop ---------------------------------------------------------------

def vns_solve(inst: Instance, initial: Schedule,
              cfg: VnsConfig = VnsConfig()) -> tuple[Schedule, VnsStats]:
    cfg.validate()
    violations = check_schedule(inst, initial)
    if violations:
        raise InfeasibleScheduleError(violations)
    t0 = time.perf_counter()
    rng = Rng(cfg.seed)
    matrix = TransitionMatrix.random(rng)
    zero = TransitionMatrix.zero()
    n_max = cfg.n_max_noimp if cfg.n_max_noimp is not None else inst.n * inst.docks + 1
    stats = VnsStats()
    best = s = initial
    stats.best_costs.append(best.cost)
    last = OperatorId.INTER_DOCK_RANDOM_REMOVAL  # row used for the first selection
    no_improvement = 0
    iteration = 0
    while iteration < cfg.max_iters:
        iteration += 1
        prev_matrix = matrix
        s0 = s
        ops = []
        for cls in (DESTRUCTION_OPS, REPAIR_OPS, LOCAL_SEARCH_OPS):
            op = select_operator(matrix, last, cls, rng)
            f_in = s0.cost
            s0 = apply_operator(op, inst, s0, cfg, rng)
            matrix = update_transition(matrix, last, op, f_in, s0.cost)
            stats.op_counts[op] = stats.op_counts.get(op, 0) + 1
            ops.append(op)
            last = op
        if s0.cost < best.cost:
            best = s0
            no_improvement = 0
        else:
            no_improvement += 1
        accepted = s0.cost < s.cost
        if accepted:
            s = s0
        dist = matrix_distance(prev_matrix, matrix, cfg.metric)
        norm = matrix_distance(matrix, zero, cfg.metric)
        if norm < 1e-12:
            norm = 1.0
        rel = dist / norm
        stats.best_costs.append(best.cost)
        stats.records.append(IterationRecord(
            iteration=iteration, best_cost=best.cost, accepted=accepted,
            op_triple="|".join(o.label for o in ops), matrix_distance=rel))
        if no_improvement >= n_max and rel < cfg.epsilon:
            break
    stats.iterations = iteration
    stats.final_matrix = matrix
    stats.wall_ms = (time.perf_counter() - t0) * 1000.0
    return best, stats


def stats_to_csv(stats: VnsStats) -> str:
    lines = ["iteration,best_cost,accepted,op_triple,matrix_distance"]
    for r in stats.records:
        lines.append(f"{r.iteration},{r.best_cost},{int(r.accepted)},{r.op_triple},{r.matrix_distance:.9f}")
    return "\n".join(lines) + "\n"
