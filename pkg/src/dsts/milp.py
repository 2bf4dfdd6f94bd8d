"""Solver-agnostic MILP representation, model builders, and LP text export.

Two formulations are built from an instance:

* a sequence-based big-M model over arc variables x_i_j_d (trailer i
  immediately precedes j on dock d), completion times C and waits S;
* an arc-time-dock indexed model over binaries x_i_j_d_t (dock d finishes i
  and starts serving j at period t), labelled "arctime-reconstructed"
  because its constraint set is reconstructed from the master/pricing
  half-space forms rather than copied from a closed statement.

Variable elimination (eliminated_vars), return-arc symmetry constraints,
and several valid-inequality families can strengthen the arc model. No LP
or MIP is ever solved in-process: models are exported as LP text and
candidate assignments are checked against them numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from .core import Instance, InfeasibleScheduleError, Schedule, check_schedule, completion

INF = float("inf")

Number = object  # int or Fraction in practice
Assignment = Mapping[str, object]


@dataclass(frozen=True)
class Variable:
    name: str
    lb: object = 0
    ub: object = INF
    kind: str = "continuous"  # or "binary"


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, object], ...]
    sense: str  # "<=", "=", ">="
    rhs: object


@dataclass(frozen=True)
class Model:
    name: str
    variables: tuple[Variable, ...]
    objective: tuple[tuple[str, object], ...]
    constraints: tuple[Constraint, ...]
    objective_constant: object = 0
    sense: str = "min"

    @cached_property
    def variable_map(self) -> dict[str, Variable]:
        out = {}
        for v in self.variables:
            if v.name in out:
                raise ValueError(f"duplicate variable {v.name}")
            out[v.name] = v
        return out

    def validate(self) -> None:
        """Every objective and constraint term must reference a declared variable."""
        known = self.variable_map
        for name, _ in self.objective:
            if name not in known:
                raise ValueError(f"objective references undeclared {name}")
        for c in self.constraints:
            for name, _ in c.terms:
                if name not in known:
                    raise ValueError(f"constraint {c.name} references undeclared {name}")


@dataclass(frozen=True)
class ModelViolation:
    kind: str  # "bound", "integrality", "constraint", "unknown-variable"
    name: str
    residual: float

    def __str__(self) -> str:
        return f"{self.kind} {self.name}: residual {self.residual}"


# --- variable naming ---------------------------------------------------------

def xv(i: int, j: int, d: int) -> str:
    return f"x_{i}_{j}_{d}"


def xa(i: int, j: int, d: int, t: int) -> str:
    return f"x_{i}_{j}_{d}_{t}"


def yv(i: int, d: int) -> str:
    return f"y_{i}_{d}"


def zv(j: int) -> str:
    return f"z_{j}"


def cv(j: int) -> str:
    return f"C_{j}"


def sv(j: int) -> str:
    return f"S_{j}"


def hv(j: int) -> str:
    return f"h_{j}"


def lv(k: int) -> str:
    return f"l_{k}"


# --- big-M model --------------------------------------------------------------

def big_m_value(inst: Instance) -> int:
    return inst.horizon + max(t.block for t in inst.trailers)


def build_bigm(inst: Instance, due_dates: bool = True) -> Model:
    """Sequence-based model. `due_dates=False` drops the per-trailer deadline
    rows, leaving only the horizon bound on completions."""
    n, docks, horizon = inst.n, inst.docks, inst.horizon
    big_m = big_m_value(inst)
    variables = []
    # arc variables: i != j except the dummy self-loop that closes empty docks
    for i in range(n + 1):
        for j in range(n + 1):
            if i == j and i != 0:
                continue
            for d in range(docks):
                variables.append(Variable(xv(i, j, d), 0, 1, "binary"))
    for i in range(1, n + 1):
        for d in range(docks):
            variables.append(Variable(yv(i, d), 0, 1, "binary"))
    for j in range(1, n + 1):
        variables.append(Variable(zv(j), 0, 1, "binary"))
    variables.append(Variable(cv(0), 0, horizon))
    for j in range(1, n + 1):
        variables.append(Variable(cv(j), 0, horizon - 1))
    for j in range(1, n + 1):
        variables.append(Variable(sv(j), 0, INF))

    objective = [(sv(j), inst.trailer(j).f) for j in range(1, n + 1)]
    objective += [(zv(j), inst.trailer(j).g) for j in range(1, n + 1)]

    cons = []
    for j in range(1, n + 1):
        terms = [(yv(j, d), 1) for d in range(docks)] + [(zv(j), 1)]
        cons.append(Constraint(f"assign_{j}", tuple(terms), "=", 1))
    for i in range(1, n + 1):
        for d in range(docks):
            terms = [(xv(j, i, d), 1) for j in range(n + 1) if j != i] + [(yv(i, d), -1)]
            cons.append(Constraint(f"indeg_{i}_{d}", tuple(terms), "=", 0))
    for i in range(1, n + 1):
        for d in range(docks):
            terms = [(xv(i, j, d), 1) for j in range(n + 1) if j != i] + [(yv(i, d), -1)]
            cons.append(Constraint(f"outdeg_{i}_{d}", tuple(terms), "=", 0))
    for i in range(1, n + 1):
        for j in range(n + 1):
            if j == i:
                continue
            block_j = inst.trailer(j).block
            for d in range(docks):
                terms = ((cv(i), 1), (cv(j), -1), (xv(i, j, d), big_m))
                cons.append(Constraint(f"seq_{i}_{j}_{d}", terms, "<=", big_m - block_j))
    for j in range(1, n + 1):
        t = inst.trailer(j)
        bound = t.r + t.block
        cons.append(Constraint(f"mincomp_{j}", ((cv(j), 1), (zv(j), bound)), ">=", bound))
    head = [(xv(0, j, d), 1) for j in range(n + 1) for d in range(docks)]
    cons.append(Constraint("head_degree", tuple(head), "=", docks))
    tail = [(xv(j, 0, d), 1) for j in range(n + 1) for d in range(docks)]
    cons.append(Constraint("tail_degree", tuple(tail), "=", docks))
    for j in range(1, n + 1):
        t = inst.trailer(j)
        cons.append(Constraint(f"waitdef_{j}", ((sv(j), 1), (cv(j), -1)), ">=", -(t.r + t.block)))
    if due_dates:
        for j in range(1, n + 1):
            due = inst.trailer(j).due
            cons.append(Constraint(f"due_{j}", ((cv(j), 1), (zv(j), -(horizon - due))), "<=", due))

    return Model(name=f"{inst.name}-bigm", variables=tuple(variables),
                 objective=tuple(objective), constraints=tuple(cons))


# --- arc-time-dock model -------------------------------------------------------

def _pair_window(inst: Instance, i: int, j: int) -> tuple[int, int]:
    """Inclusive surviving start-time window for arc (i, j) after elimination."""
    horizon = inst.horizon
    tj = inst.trailer(j)
    if i == 0:
        # first on the dock: exactly the arrival period, if servable at all
        lo = tj.r
        hi = min(tj.r, tj.due - tj.block, horizon - 1 - tj.block)
    else:
        ti = inst.trailer(i)
        lo = max(tj.r, ti.r + ti.block)
        hi = min(tj.due, tj.due - tj.block, horizon - 1)
    return max(lo, 0), min(hi, horizon - 1)


def _arc_pairs(inst: Instance):
    for i in range(inst.n + 1):
        for j in range(inst.n + 1):
            if i == j:
                continue
            yield i, j


def surviving_arc_vars(inst: Instance) -> list[tuple[int, int, int, int]]:
    """Declared (i, j, d, t) tuples after variable elimination, in index order."""
    out = []
    for i, j in _arc_pairs(inst):
        lo, hi = _pair_window(inst, i, j)
        for d in range(inst.docks):
            out.extend((i, j, d, t) for t in range(lo, hi + 1))
    return out


def full_arc_vars(inst: Instance) -> list[tuple[int, int, int, int]]:
    return [(i, j, d, t) for i, j in _arc_pairs(inst)
            for d in range(inst.docks) for t in range(inst.horizon)]


def eliminated_vars(inst: Instance) -> set[tuple[int, int, int, int]]:
    """Index tuples removed by the three elimination rules (first-on-dock
    serve-on-arrival; start-time windows from arrivals, deadlines, and the
    predecessor's earliest completion; horizon fit for first arcs)."""
    out = set()
    for i, j in _arc_pairs(inst):
        lo, hi = _pair_window(inst, i, j)
        for d in range(inst.docks):
            for t in range(inst.horizon):
                if t < lo or t > hi:
                    out.add((i, j, d, t))
    return out


def symmetry_constraints(inst: Instance,
                         declared: Optional[set[tuple[int, int, int, int]]] = None
                         ) -> list[Constraint]:
    """Force the return arc to the dummy to leave at the last real trailer's
    completion: x_i0dt <= sum of arcs entering i at t - block_i. Rows whose
    sum is empty pin x_i0dt to zero."""
    if declared is None:
        declared = set(surviving_arc_vars(inst))
    cons = []
    for d in range(inst.docks):
        for i in range(1, inst.n + 1):
            block = inst.trailer(i).block
            for t in range(inst.horizon):
                if t - block < 0 or (i, 0, d, t) not in declared:
                    continue
                terms = [(xa(i, 0, d, t), 1)]
                tp = t - block
                for l in range(inst.n + 1):
                    if l != i and (l, i, d, tp) in declared:
                        terms.append((xa(l, i, d, tp), -1))
                cons.append(Constraint(f"sym_{i}_{d}_{t}", tuple(terms), "<=", 0))
    return cons


CUT_FAMILIES = ("three_cycle", "one_per_dock_time", "opposite_arcs",
                "pp_cut_1", "pp_cut_2", "pp_cut_degree")


def valid_inequalities(inst: Instance, family: str,
                       declared: Optional[set[tuple[int, int, int, int]]] = None
                       ) -> list[Constraint]:
    """One fully enumerated inequality family over the declared variables."""
    if declared is None:
        declared = set(surviving_arc_vars(inst))
    n, docks, horizon = inst.n, inst.docks, inst.horizon

    def tsum(i: int, j: int, d: int) -> list[tuple[str, object]]:
        return [(xa(i, j, d, t), 1) for t in range(horizon) if (i, j, d, t) in declared]

    cons: list[Constraint] = []
    if family == "three_cycle":
        # no directed 3-cycle on a dock; both orientations per node triple
        for d in range(docks):
            for i in range(1, n + 1):
                for j in range(i + 1, n + 1):
                    for l in range(j + 1, n + 1):
                        for a, b, c in ((i, j, l), (i, l, j)):
                            terms = tsum(a, b, d) + tsum(b, c, d) + tsum(c, a, d)
                            cons.append(Constraint(f"cycle_{a}_{b}_{c}_{d}",
                                                   tuple(terms), "<=", 2))
    elif family == "one_per_dock_time":
        # at most one real trailer starts (resp. finishes) per dock and period
        for d in range(docks):
            for t in range(horizon):
                outs = [(xa(i, j, d, t), 1) for i in range(1, n + 1)
                        for j in range(n + 1) if j != i and (i, j, d, t) in declared]
                if outs:
                    cons.append(Constraint(f"onedock_out_{d}_{t}", tuple(outs), "<=", 1))
                ins = [(xa(j, i, d, t), 1) for i in range(1, n + 1)
                       for j in range(n + 1) if j != i and (j, i, d, t) in declared]
                if ins:
                    cons.append(Constraint(f"onedock_in_{d}_{t}", tuple(ins), "<=", 1))
    elif family == "opposite_arcs":
        # arcs i->j and j->i never both appear, on any dock at any time;
        # real pairs only: a dock serving a single trailer i legitimately
        # carries both the 0->i head arc and the i->0 return arc
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                terms = []
                for d in range(docks):
                    terms += tsum(i, j, d) + tsum(j, i, d)
                cons.append(Constraint(f"oppose_{i}_{j}", tuple(terms), "<=", 1))
    elif family == "pp_cut_1":
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if j == i:
                    continue
                for d in range(docks):
                    terms = tsum(i, j, d) + tsum(i, 0, d) + tsum(j, 0, d)
                    cons.append(Constraint(f"paircut_out_{i}_{j}_{d}", tuple(terms), "<=", 2))
    elif family == "pp_cut_2":
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if j == i:
                    continue
                for d in range(docks):
                    terms = tsum(i, j, d) + tsum(0, i, d) + tsum(0, j, d)
                    cons.append(Constraint(f"paircut_in_{i}_{j}_{d}", tuple(terms), "<=", 2))
    elif family == "pp_cut_degree":
        # served trailers must be entered / exited: indeg(i) + outdeg(j) >= h_i + h_j.
        # Summed over docks, with only self-loops excluded; per-dock or
        # cross-excluded variants reject feasible integral schedules.
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if j == i:
                    continue
                coeffs: dict[str, int] = {}
                for (a, b, d, t) in declared:
                    if b == i:
                        coeffs[xa(a, b, d, t)] = coeffs.get(xa(a, b, d, t), 0) + 1
                    if a == j:
                        coeffs[xa(a, b, d, t)] = coeffs.get(xa(a, b, d, t), 0) + 1
                terms = sorted(coeffs.items())
                terms += [(hv(i), -1), (hv(j), -1)]
                cons.append(Constraint(f"degreecut_{i}_{j}", tuple(terms), ">=", 0))
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {CUT_FAMILIES}")
    return cons


def build_arc_time(inst: Instance, preprocess: bool = True, symmetry: bool = True,
                   cuts: Iterable[str] = ()) -> Model:
    cuts = tuple(cuts)
    if "pp_cut_degree" in cuts:
        raise ValueError("pp_cut_degree references served indicators, which this "
                         "model does not declare; attach it to the pricing model instead")
    n, docks, horizon = inst.n, inst.docks, inst.horizon
    indices = surviving_arc_vars(inst) if preprocess else full_arc_vars(inst)
    declared = set(indices)
    variables = [Variable(xa(*idx), 0, 1, "binary") for idx in indices]
    variables += [Variable(zv(j), 0, 1, "binary") for j in range(1, n + 1)]

    objective = []
    for (i, j, d, t) in indices:
        if j >= 1:
            tj = inst.trailer(j)
            coeff = tj.f * (t - tj.r)
            if coeff != 0:
                objective.append((xa(i, j, d, t), coeff))
    objective += [(zv(j), inst.trailer(j).g) for j in range(1, n + 1)]

    entering: dict[int, list] = {j: [] for j in range(n + 1)}
    leaving: dict[int, list] = {i: [] for i in range(n + 1)}
    by_dock_in: dict[tuple[int, int], list] = {}
    for (i, j, d, t) in indices:
        entering[j].append((i, d, t))
        leaving[i].append((j, d, t))
        by_dock_in.setdefault((j, d), []).append((i, t))

    cons = []
    for j in range(1, n + 1):
        terms = [(xa(i, j, d, t), 1) for (i, d, t) in entering[j]] + [(zv(j), 1)]
        cons.append(Constraint(f"enter_{j}", tuple(terms), "=", 1))
    for j in range(1, n + 1):
        terms = [(xa(j, i, d, t), 1) for (i, d, t) in leaving[j]] + [(zv(j), 1)]
        cons.append(Constraint(f"leave_{j}", tuple(terms), "=", 1))
    for d in range(docks):
        for j in range(1, n + 1):
            coeffs: dict[str, int] = {}
            for (i, t) in by_dock_in.get((j, d), ()):
                coeffs[xa(i, j, d, t)] = coeffs.get(xa(i, j, d, t), 0) + 1
            for (i, dd, t) in leaving[j]:
                if dd == d:
                    coeffs[xa(j, i, d, t)] = coeffs.get(xa(j, i, d, t), 0) - 1
            terms = tuple((name, c) for name, c in sorted(coeffs.items()) if c != 0)
            cons.append(Constraint(f"flow_{d}_{j}", terms, "=", 0))
    for d in range(docks):
        terms = [(xa(0, j, dd, t), 1) for (j, dd, t) in leaving[0] if dd == d]
        cons.append(Constraint(f"source_{d}", tuple(terms), "<=", 1))
        terms = [(xa(i, 0, dd, t), 1) for (i, dd, t) in entering[0] if dd == d]
        cons.append(Constraint(f"sink_{d}", tuple(terms), "<=", 1))
    # an arc out of a real trailer needs a predecessor arc completed in time
    preds: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for (i, j, d, t) in indices:
        preds.setdefault((j, d), []).append((t, i))
    for key in preds:
        preds[key].sort()
    for (i, j, d, t) in indices:
        if i == 0:
            continue
        block = inst.trailer(i).block
        terms = [(xa(i, j, d, t), 1)]
        for (tp, l) in preds.get((i, d), ()):
            if tp > t - block:
                break
            terms.append((xa(l, i, d, tp), -1))
        cons.append(Constraint(f"link_{i}_{j}_{d}_{t}", tuple(terms), "<=", 0))
    if symmetry:
        cons.extend(symmetry_constraints(inst, declared))
    for family in cuts:
        cons.extend(valid_inequalities(inst, family, declared))

    return Model(name=f"{inst.name}-arctime-reconstructed", variables=tuple(variables),
                 objective=tuple(objective), constraints=tuple(cons))


# --- evaluation and separation --------------------------------------------------

def _value(point: Assignment, name: str):
    return point.get(name, 0)


def constraint_activity(c: Constraint, point: Assignment):
    return sum(coeff * _value(point, name) for name, coeff in c.terms)


def violation_amount(c: Constraint, point: Assignment):
    lhs = constraint_activity(c, point)
    if c.sense == "<=":
        return max(0, lhs - c.rhs)
    if c.sense == ">=":
        return max(0, c.rhs - lhs)
    return abs(lhs - c.rhs)


def separate(constraints: Sequence[Constraint], point: Assignment,
             tol: float = 1e-6) -> list[Constraint]:
    """Members violated by more than tol, most violated first."""
    scored = [(violation_amount(c, point), k, c) for k, c in enumerate(constraints)]
    violated = [(v, k, c) for v, k, c in scored if v > tol]
    violated.sort(key=lambda item: (-item[0], item[1]))
    return [c for _, _, c in violated]


def check_solution(m: Model, a: Assignment, tol: float = 1e-6) -> list[ModelViolation]:
    """Bound, integrality, and constraint violations of `a` against `m`.

    Missing variables count as 0; assignment keys not declared in the model
    are flagged when nonzero.
    """
    out = []
    for v in m.variables:
        val = _value(a, v.name)
        if val < v.lb - tol:
            out.append(ModelViolation("bound", v.name, float(v.lb - val)))
        elif val > v.ub + tol:
            out.append(ModelViolation("bound", v.name, float(val - v.ub)))
        if v.kind == "binary" and abs(val - round(val)) > tol:
            out.append(ModelViolation("integrality", v.name, float(abs(val - round(val)))))
    known = m.variable_map
    for name, val in a.items():
        if name not in known and abs(val) > tol:
            out.append(ModelViolation("unknown-variable", name, float(val)))
    for c in m.constraints:
        v = violation_amount(c, a)
        if v > tol:
            out.append(ModelViolation("constraint", c.name, float(v)))
    return out


def schedule_to_assignment(inst: Instance, s: Schedule, formulation: str = "bigm") -> dict:
    """Map a feasible schedule onto a formulation's variables.

    Arc-time return arcs are placed at the last trailer's completion, the
    symmetry-canonical time.
    """
    violations = check_schedule(inst, s)
    if violations:
        raise InfeasibleScheduleError(violations)
    a: dict[str, object] = {}
    if formulation == "bigm":
        max_done = 0
        for run in s.runs:
            d = run.dock
            prev = 0
            for j, start in run.entries:
                a[xv(prev, j, d)] = 1
                a[yv(j, d)] = 1
                t = inst.trailer(j)
                a[cv(j)] = completion(start, t)
                a[sv(j)] = start - t.r
                max_done = max(max_done, completion(start, t))
                prev = j
            a[xv(prev, 0, d)] = 1
        a[cv(0)] = max_done
        for j in s.unserved:
            a[zv(j)] = 1
            a[cv(j)] = 0
            a[sv(j)] = 0
        return a
    if formulation == "arctime":
        for run in s.runs:
            d = run.dock
            prev = 0
            for j, start in run.entries:
                a[xa(prev, j, d, start)] = 1
                prev = j
            if prev != 0:
                last_start = run.entries[-1][1]
                a[xa(prev, 0, d, completion(last_start, inst.trailer(prev)))] = 1
        for j in s.unserved:
            a[zv(j)] = 1
        return a
    raise ValueError(f"unknown formulation {formulation!r}")


# --- LP text export --------------------------------------------------------------

def format_number(v) -> str:
    """Shortest exact decimal; plain integers stay undotted, never scientific."""
    if isinstance(v, bool):
        raise TypeError("bool coefficient")
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v.is_integer():
            return str(int(v))
        v = Fraction(str(v))
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return str(v.numerator)
        den = v.denominator
        twos = fives = 0
        while den % 2 == 0:
            den //= 2
            twos += 1
        while den % 5 == 0:
            den //= 5
            fives += 1
        if den != 1:
            raise ValueError(f"{v} has no finite decimal expansion")
        k = max(twos, fives)
        scaled = abs(v.numerator) * 10 ** k // v.denominator
        digits = str(scaled).rjust(k + 1, "0")
        text = f"{digits[:-k]}.{digits[-k:]}".rstrip("0").rstrip(".")
        return ("-" if v < 0 else "") + text
    raise TypeError(f"cannot format {type(v).__name__} coefficient")


def _expr(terms: Sequence[tuple[str, object]], constant=0) -> list[str]:
    parts = []
    for name, coeff in terms:
        if coeff == 0:
            continue
        sign = "-" if coeff < 0 else "+"
        mag = -coeff if coeff < 0 else coeff
        body = name if mag == 1 else f"{format_number(mag)} {name}"
        parts.append((sign, body))
    if constant != 0:
        sign = "-" if constant < 0 else "+"
        parts.append((sign, format_number(-constant if constant < 0 else constant)))
    if not parts:
        return ["0"]
    out = []
    for k, (sign, body) in enumerate(parts):
        if k == 0:
            out.append(body if sign == "+" else f"- {body}")
        else:
            out.append(f"{sign} {body}")
    return out


def _wrap(prefix: str, tokens: list[str], width: int = 200) -> list[str]:
    lines = [prefix]
    for token in tokens:
        if len(lines[-1]) + 1 + len(token) > width and lines[-1] != prefix:
            lines.append(" " + token)
        else:
            lines[-1] += " " + token
    return lines


def write_lp(m: Model) -> str:
    """Deterministic LP-format text; equal models serialize to equal bytes."""
    lines = [f"\\ Problem: {m.name}", "Minimize"]
    lines += _wrap(" obj:", _expr(m.objective, m.objective_constant))
    if m.constraints:
        lines.append("Subject To")
        for c in m.constraints:
            sense = {"<=": "<=", ">=": ">=", "=": "="}[c.sense]
            body = _expr(c.terms)
            if body == ["0"] and m.variables:
                # vacuous row (all terms eliminated): keep it parseable
                body = ["0", m.variables[0].name]
            tokens = body + [sense, format_number(c.rhs)]
            lines += _wrap(f" {c.name}:", tokens)
    bounds = []
    for v in m.variables:
        if v.kind == "binary":
            continue
        if v.ub == INF:
            if v.lb != 0:
                bounds.append(f" {v.name} >= {format_number(v.lb)}")
        elif v.lb == 0:
            bounds.append(f" {v.name} <= {format_number(v.ub)}")
        else:
            bounds.append(f" {format_number(v.lb)} <= {v.name} <= {format_number(v.ub)}")
    if bounds:
        lines.append("Bounds")
        lines += bounds
    binaries = [v.name for v in m.variables if v.kind == "binary"]
    if binaries:
        lines.append("Binaries")
        lines += _wrap("", binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"
