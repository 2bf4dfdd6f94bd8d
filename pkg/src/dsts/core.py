"""Data model and timing semantics for dock scheduling / truck sequencing.

Time is a discrete period index 0..horizon-1. A trailer occupies a dock for
delta + p consecutive periods starting no earlier than its arrival, and must
complete by min(due, horizon - 1). A schedule partitions the trailers into
per-dock ordered runs (with explicit start times) plus an unserved set; its
cost is the waiting penalty of served trailers plus the flat penalty of
unserved ones, in exact integer arithmetic.

All types are immutable values; every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class Trailer:
    id: int
    r: int      # arrival period
    due: int    # latest departure period
    p: int      # processing periods
    delta: int  # docking/setup periods
    f: int      # waiting penalty per period
    g: int      # penalty if not served this horizon

    @property
    def block(self) -> int:
        """Periods the trailer occupies a dock once admitted."""
        return self.delta + self.p


@dataclass(frozen=True)
class Instance:
    name: str
    docks: int
    horizon: int
    trailers: tuple[Trailer, ...]

    def __post_init__(self):
        if self.docks < 1:
            raise ValueError("docks must be >= 1")
        if self.horizon < 2:
            raise ValueError("horizon must be >= 2")
        for k, t in enumerate(self.trailers, start=1):
            if t.id != k:
                raise ValueError(f"trailer ids must be contiguous 1..N, got {t.id} at position {k}")

    @property
    def n(self) -> int:
        return len(self.trailers)

    def trailer(self, j: int) -> Trailer:
        """Trailer by id; id 0 is the zero-duration dummy heading every run."""
        if j == 0:
            return Trailer(0, 0, self.horizon, 0, 0, 0, 0)
        return self.trailers[j - 1]

    def latest_completion(self, j: int) -> int:
        t = self.trailer(j)
        return min(t.due, self.horizon - 1)


@dataclass(frozen=True)
class DockRun:
    dock: int
    entries: tuple[tuple[int, int], ...]  # (trailer id, start), starts increasing


@dataclass(frozen=True)
class Schedule:
    runs: tuple[DockRun, ...]
    unserved: frozenset[int]
    cost: int

    def served_ids(self) -> list[int]:
        return [j for run in self.runs for j, _ in run.entries]


@dataclass(frozen=True)
class Violation:
    rule: str
    detail: str
    trailer: Optional[int] = None
    dock: Optional[int] = None

    def __str__(self) -> str:
        return f"{self.rule}: {self.detail}"


class InfeasibleScheduleError(Exception):
    def __init__(self, violations: list[Violation]):
        super().__init__("; ".join(str(v) for v in violations))
        self.violations = violations


class FormatError(ValueError):
    """Malformed instance or schedule text."""


def completion(start: int, t: Trailer) -> int:
    """Period at which the dock is free again: start + delta + p."""
    return start + t.delta + t.p


def waiting(start: int, t: Trailer) -> int:
    """Periods the trailer waited past its arrival before admission."""
    if start < t.r:
        raise ValueError(f"trailer {t.id} cannot start at {start} before arrival {t.r}")
    return start - t.r


def earliest_start(prev_completion: int, t: Trailer) -> int:
    """Dominant start under monotone waiting cost: max(arrival, dock free)."""
    return max(t.r, prev_completion)


def retime(inst: Instance, ids: Sequence[int], prev_completion: int = 0):
    """Chain earliest starts for `ids` after `prev_completion`.

    Returns the timed entry list, or None as soon as some trailer cannot
    complete by min(due, horizon - 1).
    """
    entries = []
    free = prev_completion
    for j in ids:
        t = inst.trailer(j)
        start = earliest_start(free, t)
        free = completion(start, t)
        if free > inst.latest_completion(j):
            return None
        entries.append((j, start))
    return entries


def make_schedule(inst: Instance, runs: Sequence[Sequence[tuple[int, int]]],
                  unserved: Iterable[int]) -> Schedule:
    """Assemble a Schedule with its cost cache filled in.

    Cost sums only ids known to the instance; structural problems are the
    job of check_schedule, not of construction.
    """
    cost = 0
    for entries in runs:
        for j, start in entries:
            if 1 <= j <= inst.n:
                t = inst.trailer(j)
                cost += t.f * (start - t.r)
    unserved = frozenset(unserved)
    for j in unserved:
        if 1 <= j <= inst.n:
            cost += inst.trailer(j).g
    return Schedule(
        runs=tuple(DockRun(d, tuple(entries)) for d, entries in enumerate(runs)),
        unserved=unserved,
        cost=cost,
    )


def check_schedule(inst: Instance, s: Schedule) -> list[Violation]:
    """All feasibility violations of `s`; empty list means feasible.

    Checks the partition property, per-run ordering, arrival respect, and
    completion within min(due, horizon - 1). Unknown or duplicated trailer
    ids are reported as structural violations, never raised.
    """
    out: list[Violation] = []
    if len(s.runs) != inst.docks:
        out.append(Violation("structure", f"{len(s.runs)} runs for {inst.docks} docks"))
    seen: dict[int, int] = {}

    def note(j: int) -> bool:
        if not 1 <= j <= inst.n:
            out.append(Violation("unknown-trailer", f"id {j} not in 1..{inst.n}", trailer=j))
            return False
        seen[j] = seen.get(j, 0) + 1
        return True

    for run in s.runs:
        prev_free = 0
        prev_start = -1
        for j, start in run.entries:
            if not note(j):
                continue
            t = inst.trailer(j)
            if start <= prev_start:
                out.append(Violation("ordering", f"start {start} does not increase", trailer=j, dock=run.dock))
            if start < prev_free:
                out.append(Violation("overlap", f"start {start} before dock free at {prev_free}",
                                     trailer=j, dock=run.dock))
            if start < t.r:
                out.append(Violation("arrival", f"start {start} before arrival {t.r}", trailer=j, dock=run.dock))
            done = completion(start, t)
            cap = inst.latest_completion(j)
            if done > cap:
                out.append(Violation("deadline", f"completes at {done} past {cap}", trailer=j, dock=run.dock))
            prev_free = max(prev_free, done)
            prev_start = start
    for j in s.unserved:
        note(j)
    for j in range(1, inst.n + 1):
        count = seen.get(j, 0)
        if count == 0:
            out.append(Violation("partition", f"trailer {j} appears nowhere", trailer=j))
        elif count > 1:
            out.append(Violation("partition", f"trailer {j} appears {count} times", trailer=j))
    return out


def evaluate(inst: Instance, s: Schedule) -> int:
    """Objective value: sum of f_j * waiting over served + sum of g_j over unserved.

    Raises InfeasibleScheduleError carrying the violation list otherwise.
    """
    violations = check_schedule(inst, s)
    if violations:
        raise InfeasibleScheduleError(violations)
    total = 0
    for run in s.runs:
        for j, start in run.entries:
            t = inst.trailer(j)
            total += t.f * waiting(start, t)
    for j in s.unserved:
        total += inst.trailer(j).g
    return total


def try_insert(inst: Instance, s: Schedule, dock: int, position: int, j: int) -> Optional[Schedule]:
    """Insert unserved trailer j into a run; None if the suffix cannot be re-timed.

    Entries before `position` keep their starts; j and everything after it
    are re-timed to their earliest feasible starts. Never mutates `s`.
    """
    if j not in s.unserved:
        raise ValueError(f"trailer {j} is not unserved")
    run = s.runs[dock]
    if position > len(run.entries):
        raise ValueError(f"position {position} past run length {len(run.entries)}")
    prefix = run.entries[:position]
    prev = completion(prefix[-1][1], inst.trailer(prefix[-1][0])) if prefix else 0
    suffix = retime(inst, [j] + [e[0] for e in run.entries[position:]], prev)
    if suffix is None:
        return None
    new_runs = [list(r.entries) for r in s.runs]
    new_runs[dock] = list(prefix) + suffix
    return make_schedule(inst, new_runs, s.unserved - {j})


# --- schedule text format -------------------------------------------------
#
#   dock 0: (2,5) (5,11)
#   dock 1:
#   unserved: 9 10

def format_schedule(s: Schedule) -> str:
    lines = []
    for run in s.runs:
        body = " ".join(f"({j},{start})" for j, start in run.entries)
        lines.append(f"dock {run.dock}:" + (f" {body}" if body else ""))
    lines.append("unserved:" + ("".join(f" {j}" for j in sorted(s.unserved)) if s.unserved else ""))
    return "\n".join(lines) + "\n"


def parse_schedule(inst: Instance, text: str) -> Schedule:
    runs: list[list[tuple[int, int]]] = [[] for _ in range(inst.docks)]
    unserved: list[int] = []
    saw_unserved = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("dock"):
            head, _, body = line.partition(":")
            try:
                d = int(head.split()[1])
            except (IndexError, ValueError):
                raise FormatError(f"line {lineno}: bad dock header {head!r}")
            if not 0 <= d < inst.docks:
                raise FormatError(f"line {lineno}: dock {d} out of range")
            for token in body.split():
                if not (token.startswith("(") and token.endswith(")")):
                    raise FormatError(f"line {lineno}: bad entry {token!r}")
                try:
                    j_s, start_s = token[1:-1].split(",")
                    runs[d].append((int(j_s), int(start_s)))
                except ValueError:
                    raise FormatError(f"line {lineno}: bad entry {token!r}")
        elif line.startswith("unserved:"):
            saw_unserved = True
            for token in line[len("unserved:"):].split():
                try:
                    unserved.append(int(token))
                except ValueError:
                    raise FormatError(f"line {lineno}: bad trailer id {token!r}")
        else:
            raise FormatError(f"line {lineno}: unrecognized line {line!r}")
    if not saw_unserved:
        raise FormatError("missing 'unserved:' line")
    return make_schedule(inst, runs, unserved)
