from fractions import Fraction

import pytest

from dsts.construct import MIN_ARRIVAL_VERTICAL, construct
from dsts.core import Instance, make_schedule
from dsts.dw import (DualValues, ZERO_DUALS, build_pricing, build_rmp,
                     column_from_schedule, column_to_assignment, parse_column,
                     parse_duals, reduced_cost, separate_pricing_cuts,
                     warm_start_column, write_column, write_duals)
from dsts.instgen import GenConfig, generate
from dsts.milp import check_solution, constraint_activity, xa


def test_column_from_schedule_fragment(example30):
    s = make_schedule(example30, [[(2, 5), (5, 11)], [], []],
                      set(range(1, 11)) - {2, 5})
    col = column_from_schedule(example30, s)
    assert col.cost == 900 == s.cost
    assert col.arcs == {(0, 2, 0, 5), (2, 5, 0, 11), (5, 0, 0, 17)}
    assert col.served == {2, 5}


def test_column_from_all_unserved(example30):
    s = make_schedule(example30, [[], [], []], range(1, 11))
    col = column_from_schedule(example30, s)
    assert col.arcs == frozenset()
    assert col.served == frozenset()
    assert col.cost == 1000


def test_warm_start_column(example30, example70):
    ws30 = warm_start_column(example30)
    assert ws30.cost == construct(MIN_ARRIVAL_VERTICAL, example30).cost
    assert set(range(1, 11)) - ws30.served == {9, 10}
    ws70 = warm_start_column(example70)
    assert ws70.served == set(range(1, 11))
    empty = Instance(name="empty", docks=3, horizon=10, trailers=())
    assert warm_start_column(empty).arcs == frozenset()


def test_cost_consistency_random():
    for seed in range(30):
        inst = generate(GenConfig(seed=500 + seed, docks=2, trailers=7, tf=12, relaxed=True))
        s = construct(MIN_ARRIVAL_VERTICAL, inst)
        assert column_from_schedule(inst, s).cost == s.cost


def test_rmp_single_warm_start(example30):
    col = warm_start_column(example30)
    rmp = build_rmp(example30, [col])
    convexity = next(c for c in rmp.constraints if c.name == "convexity")
    assert convexity.terms == (("l_1", 1),) and convexity.rhs == 1
    a = {"l_1": 1}
    a.update({xa(*arc): 1 for arc in col.arcs})
    assert check_solution(rmp, a) == []  # lambda = 1 reproduces the column's x


def test_rmp_duplicate_columns_share_coefficients(example30):
    col = warm_start_column(example30)
    rmp = build_rmp(example30, [col, col])
    obj = dict(rmp.objective)
    assert obj["l_1"] == obj["l_2"]


def test_pricing_zero_duals_objective_is_primal_cost(example30):
    col = warm_start_column(example30)
    model = build_pricing(example30, ZERO_DUALS)
    point = column_to_assignment(example30, col)
    value = sum(coeff * point.get(name, 0) for name, coeff in model.objective)
    assert value + model.objective_constant == col.cost
    assert check_solution(model, point) == []


def test_pricing_alpha_shift(example30):
    col = warm_start_column(example30)
    model = build_pricing(example30, DualValues(alpha=Fraction(5)))
    point = column_to_assignment(example30, col)
    value = sum(coeff * point.get(name, 0) for name, coeff in model.objective)
    assert value + model.objective_constant == col.cost - 5


def test_dw_models_declare_every_referenced_variable(example30):
    build_rmp(example30, [warm_start_column(example30)]).validate()
    build_pricing(example30).validate()


def test_pricing_tight_dummy_degree(example30):
    loose = build_pricing(example30)
    tight = build_pricing(example30, tight_dummy_degree=True)
    assert next(c for c in loose.constraints if c.name == "pp_source_0").rhs == 3
    assert next(c for c in tight.constraints if c.name == "pp_source_0").rhs == 1


def test_reduced_cost_zero_and_alpha(example30):
    col = warm_start_column(example30)
    assert reduced_cost(example30, ZERO_DUALS, col) == col.cost
    assert reduced_cost(example30, DualValues(alpha=Fraction(7)), col) == col.cost - 7


def test_reduced_cost_cancelling_duals(example30):
    col = warm_start_column(example30)
    entered = sorted(j for j in range(1, 11) if col.enter_count(j))
    share = Fraction(col.cost, len(entered))
    duals = DualValues(u1={j: share for j in entered})
    assert reduced_cost(example30, duals, col) == 0


def _decomposed(inst, duals, col):
    total = col.cost
    for j in range(1, inst.n + 1):
        total -= duals.u1.get(j, 0) * col.enter_count(j)
        total -= duals.u2.get(j, 0) * col.leave_count(j)
    for arc in col.arcs:
        total -= duals.v.get(arc, 0)
    return total - duals.alpha


def test_reduced_cost_decomposition_identity(example30):
    col = warm_start_column(example30)
    duals = DualValues(u1={2: Fraction(3, 2)}, u2={5: Fraction(-7, 4)},
                       alpha=Fraction(11, 8),
                       v={next(iter(col.arcs)): Fraction(1, 2)})
    assert reduced_cost(example30, duals, col) == _decomposed(example30, duals, col)


def test_pricing_cuts_hold_on_integral_columns(example30):
    assert separate_pricing_cuts(example30, column_to_assignment(
        example30, warm_start_column(example30))) == []


def test_pricing_cut_family_one_triggers(example30):
    # trailer 1 both precedes 2 and returns to the dummy: impossible integral
    point = {"x_1_2_0_11": 1, "x_1_0_0_11": 1, "x_2_0_0_17": 1}
    violated = separate_pricing_cuts(example30, point)
    assert [c.name for c in violated] == ["paircut_out_1_2_0"]


def test_pricing_cut_degree_triggers(example30):
    point = {"h_1": 1, "h_2": 1}  # served but never entered or exited
    violated = separate_pricing_cuts(example30, point)
    names = {c.name for c in violated}
    assert "degreecut_1_2" in names and "degreecut_2_1" in names
    for c in violated:
        assert constraint_activity(c, point) < c.rhs


def test_duals_roundtrip():
    duals = DualValues(u1={1: Fraction(1, 2), 3: Fraction(-2)},
                       u2={2: Fraction(5)},
                       alpha=Fraction(3, 4),
                       v={(0, 1, 0, 5): Fraction(-1, 8)})
    text = write_duals(duals)
    back = parse_duals(text)
    assert back == duals
    assert parse_duals("") == ZERO_DUALS


def test_duals_parse_error():
    from dsts.core import FormatError
    with pytest.raises(FormatError, match="line 1"):
        parse_duals("u1 not-a-number\n")


def test_column_text_roundtrip(example30):
    col = warm_start_column(example30)
    assert parse_column(write_column(col)) == col
