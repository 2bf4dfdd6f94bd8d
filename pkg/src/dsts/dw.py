"""Decomposition artifacts: columns, restricted master, pricing model, cuts.

A column (pseudo-schedule) is an arc-incidence set over (predecessor,
successor, dock, start) tuples plus a served-indicator vector h and its
primal cost. The restricted master optimizes a convex combination of known
columns linked to the original arc binaries; the pricing model searches for
a column with negative reduced cost given caller-supplied duals. Neither is
solved here; both are exported via the milp layer and reduced costs are
evaluated exactly in rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .construct import MIN_ARRIVAL_VERTICAL, construct
from .core import FormatError, Instance, Schedule
from .milp import (INF, Constraint, Model, Variable, format_number, hv, lv,
                   schedule_to_assignment, separate, surviving_arc_vars,
                   symmetry_constraints, valid_inequalities, xa)

Arc = tuple[int, int, int, int]


@dataclass(frozen=True)
class PseudoSchedule:
    arcs: frozenset[Arc]
    served: frozenset[int]
    cost: int

    def enter_count(self, j: int) -> int:
        return sum(1 for (_, b, _, _) in self.arcs if b == j)

    def leave_count(self, j: int) -> int:
        return sum(1 for (a, _, _, _) in self.arcs if a == j)


@dataclass(frozen=True)
class DualValues:
    u1: Mapping[int, Fraction] = field(default_factory=dict)
    u2: Mapping[int, Fraction] = field(default_factory=dict)
    alpha: Fraction = Fraction(0)
    v: Mapping[Arc, Fraction] = field(default_factory=dict)


ZERO_DUALS = DualValues()


def column_from_schedule(inst: Instance, s: Schedule) -> PseudoSchedule:
    """Arc encoding of a feasible schedule; cost matches its objective value."""
    support = schedule_to_assignment(inst, s, "arctime")
    arcs = set()
    for name, value in support.items():
        if value and name.startswith("x_"):
            _, i, j, d, t = name.split("_")
            arcs.add((int(i), int(j), int(d), int(t)))
    served = frozenset(j for j in range(1, inst.n + 1) if j not in s.unserved)
    return PseudoSchedule(arcs=frozenset(arcs), served=served, cost=column_cost(inst, arcs, served))


def column_cost(inst: Instance, arcs: Iterable[Arc], served: Iterable[int]) -> int:
    served = frozenset(served)
    cost = 0
    for (_, j, _, t) in arcs:
        if j >= 1:
            tj = inst.trailer(j)
            cost += tj.f * (t - tj.r)
    for j in range(1, inst.n + 1):
        if j not in served:
            cost += inst.trailer(j).g
    return cost


def warm_start_column(inst: Instance) -> PseudoSchedule:
    """First column for the master: arrival-sorted round-robin construction."""
    return column_from_schedule(inst, construct(MIN_ARRIVAL_VERTICAL, inst))


def column_to_assignment(inst: Instance, col: PseudoSchedule) -> dict:
    a: dict[str, object] = {xa(*arc): 1 for arc in col.arcs}
    for j in range(1, inst.n + 1):
        a[hv(j)] = 1 if j in col.served else 0
    return a


def build_rmp(inst: Instance, columns: Sequence[PseudoSchedule]) -> Model:
    """Restricted master over the given columns.

    Lambda weights form a convex combination; per-trailer entering/leaving
    activity is capped at one; linking rows tie the original arc binaries to
    the combination so branching on them stays available downstream.
    """
    if not columns:
        raise ValueError("need at least one column")
    survivors = surviving_arc_vars(inst)
    declared = list(survivors)
    declared_set = set(declared)
    for col in columns:
        for arc in sorted(col.arcs):
            if arc not in declared_set:
                declared.append(arc)
                declared_set.add(arc)

    variables = [Variable(lv(k), 0, INF, "continuous") for k in range(1, len(columns) + 1)]
    variables += [Variable(xa(*arc), 0, 1, "binary") for arc in declared]

    objective = []
    for k, col in enumerate(columns, start=1):
        waiting = col.cost - sum(inst.trailer(j).g for j in range(1, inst.n + 1)
                                 if j not in col.served)
        objective.append((lv(k), waiting))

    cons = []
    for j in range(1, inst.n + 1):
        terms = [(lv(k), col.enter_count(j)) for k, col in enumerate(columns, start=1)
                 if col.enter_count(j)]
        cons.append(Constraint(f"rmp_enter_{j}", tuple(terms), "<=", 1))
    for j in range(1, inst.n + 1):
        terms = [(lv(k), col.leave_count(j)) for k, col in enumerate(columns, start=1)
                 if col.leave_count(j)]
        cons.append(Constraint(f"rmp_leave_{j}", tuple(terms), "<=", 1))
    cons.append(Constraint("convexity", tuple((lv(k), 1) for k in range(1, len(columns) + 1)),
                           "=", 1))
    for arc in declared:
        terms = [(xa(*arc), 1)]
        for k, col in enumerate(columns, start=1):
            if arc in col.arcs:
                terms.append((lv(k), -1))
        cons.append(Constraint(f"rmplink_{arc[0]}_{arc[1]}_{arc[2]}_{arc[3]}",
                               tuple(terms), "=", 0))
    return Model(name=f"{inst.name}-rmp", variables=tuple(variables),
                 objective=tuple(objective), constraints=tuple(cons))


def build_pricing(inst: Instance, duals: DualValues = ZERO_DUALS,
                  tight_dummy_degree: bool = False) -> Model:
    """Column-search model over the preprocessed arc variables plus served
    indicators h. With zero duals its objective is the primal column cost.

    `tight_dummy_degree` lowers the dummy in/out degree caps from the dock
    count to 1 per dock, which is valid and tighter but not the default.
    """
    n, docks = inst.n, inst.docks
    indices = surviving_arc_vars(inst)
    declared = set(indices)
    variables = [Variable(xa(*idx), 0, 1, "binary") for idx in indices]
    variables += [Variable(hv(j), 0, 1, "binary") for j in range(1, n + 1)]

    objective = []
    for (i, j, d, t) in indices:
        coeff: object = 0
        if j >= 1:
            tj = inst.trailer(j)
            coeff = tj.f * (t - tj.r) - duals.u1.get(j, 0)
        if i >= 1:
            coeff = coeff - duals.u2.get(i, 0)
        coeff = coeff - duals.v.get((i, j, d, t), 0)
        if coeff != 0:
            objective.append((xa(i, j, d, t), coeff))
    for j in range(1, n + 1):
        objective.append((hv(j), -inst.trailer(j).g))
    constant = sum(inst.trailer(j).g for j in range(1, n + 1)) - duals.alpha

    degree_cap = 1 if tight_dummy_degree else docks
    cons = []
    for d in range(docks):
        terms = [(xa(i, j, dd, t), 1) for (i, j, dd, t) in indices if i == 0 and dd == d]
        cons.append(Constraint(f"pp_source_{d}", tuple(terms), "<=", degree_cap))
    for d in range(docks):
        terms = [(xa(i, j, dd, t), 1) for (i, j, dd, t) in indices if j == 0 and dd == d]
        cons.append(Constraint(f"pp_sink_{d}", tuple(terms), "<=", degree_cap))
    for d in range(docks):
        for j in range(1, n + 1):
            terms = []
            for (a, b, dd, t) in indices:
                if dd != d:
                    continue
                if b == j:
                    terms.append((xa(a, b, dd, t), 1))
                elif a == j:
                    terms.append((xa(a, b, dd, t), -1))
            cons.append(Constraint(f"pp_flow_{d}_{j}", tuple(terms), "=", 0))
    served_vs_arcs = [(xa(i, j, d, t), -1) for (i, j, d, t) in indices if i >= 1 and j >= 1]
    served_vs_arcs += [(hv(i), 1) for i in range(1, n + 1)]
    cons.append(Constraint("pp_paths", tuple(served_vs_arcs), "=", docks))
    seen_ijt = []
    seen = set()
    for (i, j, d, t) in indices:
        if j >= 1 and (i, j, t) not in seen:
            seen.add((i, j, t))
            seen_ijt.append((i, j, t))
    for (i, j, t) in seen_ijt:
        terms = [(xa(i, j, d, t), 1) for d in range(docks) if (i, j, d, t) in declared]
        terms.append((hv(j), -1))
        cons.append(Constraint(f"pp_served_{i}_{j}_{t}", tuple(terms), "<=", 0))
    for i in range(1, n + 1):
        terms = [(xa(a, b, d, t), 1) for (a, b, d, t) in indices if a == i]
        terms.append((hv(i), -1))
        cons.append(Constraint(f"pp_exit_{i}", tuple(terms), ">=", 0))
    cons.extend(symmetry_constraints(inst, declared))

    return Model(name=f"{inst.name}-pricing", variables=tuple(variables),
                 objective=tuple(objective), constraints=tuple(cons),
                 objective_constant=constant)


def reduced_cost(inst: Instance, duals: DualValues, col: PseudoSchedule):
    """Pricing objective of the column's incidence vector, exactly.

    Equals col.cost minus the dual-weighted entering/leaving counts, the
    linking duals on its arcs, and the convexity dual; negative means the
    column improves the master.
    """
    rc: object = 0
    for (i, j, d, t) in col.arcs:
        if j >= 1:
            tj = inst.trailer(j)
            rc = rc + tj.f * (t - tj.r) - duals.u1.get(j, 0)
        if i >= 1:
            rc = rc - duals.u2.get(i, 0)
        rc = rc - duals.v.get((i, j, d, t), 0)
    for j in range(1, inst.n + 1):
        if j not in col.served:
            rc = rc + inst.trailer(j).g
    return rc - duals.alpha


PRICING_CUT_FAMILIES = ("pp_cut_1", "pp_cut_2", "pp_cut_degree")


def separate_pricing_cuts(inst: Instance, point: Mapping[str, object],
                          tol: float = 1e-6) -> list[Constraint]:
    """Violated members of the three pricing cut families, most violated first."""
    rows = []
    for family in PRICING_CUT_FAMILIES:
        rows.extend(valid_inequalities(inst, family))
    return separate(rows, point, tol)


# --- duals and column text formats ------------------------------------------
#
#   u1 <j> <value>     u2 <j> <value>     alpha <value>     v <i> <j> <d> <t> <value>

def parse_duals(text: str) -> DualValues:
    u1: dict[int, Fraction] = {}
    u2: dict[int, Fraction] = {}
    v: dict[Arc, Fraction] = {}
    alpha = Fraction(0)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "u1" and len(parts) == 3:
                u1[int(parts[1])] = Fraction(parts[2])
            elif parts[0] == "u2" and len(parts) == 3:
                u2[int(parts[1])] = Fraction(parts[2])
            elif parts[0] == "alpha" and len(parts) == 2:
                alpha = Fraction(parts[1])
            elif parts[0] == "v" and len(parts) == 6:
                v[(int(parts[1]), int(parts[2]), int(parts[3]), int(parts[4]))] = Fraction(parts[5])
            else:
                raise ValueError
        except ValueError:
            raise FormatError(f"line {lineno}: bad dual entry {line!r}")
    return DualValues(u1=u1, u2=u2, alpha=alpha, v=v)


def write_duals(duals: DualValues) -> str:
    lines = []
    for j in sorted(duals.u1):
        lines.append(f"u1 {j} {format_number(duals.u1[j])}")
    for j in sorted(duals.u2):
        lines.append(f"u2 {j} {format_number(duals.u2[j])}")
    if duals.alpha:
        lines.append(f"alpha {format_number(duals.alpha)}")
    for arc in sorted(duals.v):
        lines.append(f"v {arc[0]} {arc[1]} {arc[2]} {arc[3]} {format_number(duals.v[arc])}")
    return "\n".join(lines) + ("\n" if lines else "")


def write_column(col: PseudoSchedule) -> str:
    lines = ["column", f"cost {col.cost}",
             "served" + "".join(f" {j}" for j in sorted(col.served))]
    for arc in sorted(col.arcs):
        lines.append(f"arc {arc[0]} {arc[1]} {arc[2]} {arc[3]}")
    return "\n".join(lines) + "\n"


def parse_column(text: str) -> PseudoSchedule:
    cost = None
    served: list[int] = []
    arcs: list[Arc] = []
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "column" and len(parts) == 1:
                saw_header = True
            elif parts[0] == "cost" and len(parts) == 2:
                cost = int(parts[1])
            elif parts[0] == "served":
                served = [int(x) for x in parts[1:]]
            elif parts[0] == "arc" and len(parts) == 5:
                arcs.append((int(parts[1]), int(parts[2]), int(parts[3]), int(parts[4])))
            else:
                raise ValueError
        except ValueError:
            raise FormatError(f"line {lineno}: bad column entry {line!r}")
    if not saw_header or cost is None:
        raise FormatError("column text must carry 'column' header and 'cost' line")
    return PseudoSchedule(arcs=frozenset(arcs), served=frozenset(served), cost=cost)
