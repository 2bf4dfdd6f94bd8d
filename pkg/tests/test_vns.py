from collections import Counter

import pytest

import dsts.vns as vns_mod
from dsts.construct import MIN_ARRIVAL_VERTICAL, construct
from dsts.core import (Instance, InfeasibleScheduleError, Trailer, check_schedule,
                       make_schedule)
from dsts.instgen import GenConfig, generate
from dsts.prng import Rng
from dsts.vns import (DESTRUCTION_OPS, LOCAL_SEARCH_OPS, REPAIR_OPS, OperatorId,
                      TransitionMatrix, VnsConfig, apply_destruction,
                      apply_local_search, apply_repair, matrix_distance,
                      select_operator, update_transition, vns_solve)

from conftest import example_instance


def _matrix(value=1.0):
    n = len(OperatorId)
    return TransitionMatrix(tuple((value,) * n for _ in range(n)))


def test_update_transition_values():
    m = _matrix(1.0)
    m2 = update_transition(m, OperatorId.WIPE_DOCK, OperatorId.SWAP_TRAILERS, 100, 90)
    assert abs(m2.rows[OperatorId.WIPE_DOCK][OperatorId.SWAP_TRAILERS] - 1.1) < 1e-12
    m3 = update_transition(_matrix(0.5), OperatorId.WIPE_DOCK, OperatorId.SWAP_TRAILERS, 100, 150)
    assert abs(m3.rows[OperatorId.WIPE_DOCK][OperatorId.SWAP_TRAILERS] - 0.0) < 1e-12
    same = update_transition(m, OperatorId.WIPE_DOCK, OperatorId.SWAP_TRAILERS, 100, 100)
    assert same == m
    assert update_transition(m, OperatorId.WIPE_DOCK, OperatorId.SWAP_TRAILERS, 0, 50) == m


def test_update_transition_touches_single_entry_and_sign():
    m = _matrix(1.0)
    better = update_transition(m, OperatorId.DOUBLY_RANDOM_REMOVAL,
                               OperatorId.INSERT_FROM_UNSERVEDS, 200, 120)
    worse = update_transition(m, OperatorId.DOUBLY_RANDOM_REMOVAL,
                              OperatorId.INSERT_FROM_UNSERVEDS, 200, 260)
    frm, to = OperatorId.DOUBLY_RANDOM_REMOVAL, OperatorId.INSERT_FROM_UNSERVEDS
    assert better.rows[frm][to] > 1.0 > worse.rows[frm][to]
    for a in OperatorId:
        for b in OperatorId:
            if (a, b) != (frm, to):
                assert better.rows[a][b] == 1.0 == worse.rows[a][b]


def test_matrix_distance_metrics():
    a = _matrix(0.25)
    for metric in ("d1", "d2", "dinf", "dn"):
        assert matrix_distance(a, a, metric) == 0.0

    one = TransitionMatrix(((1.0, 0.0), (0.0, 0.0)))
    zero = TransitionMatrix(((0.0, 0.0), (0.0, 0.0)))
    for metric in ("d1", "d2", "dinf", "dn"):
        assert abs(matrix_distance(one, zero, metric) - 1.0) < 1e-9

    diag = TransitionMatrix(((3.0, 0.0), (0.0, 4.0)))
    assert abs(matrix_distance(diag, zero, "d1") - 7.0) < 1e-9
    assert abs(matrix_distance(diag, zero, "d2") - 5.0) < 1e-9
    assert abs(matrix_distance(diag, zero, "dinf") - 4.0) < 1e-9
    assert abs(matrix_distance(diag, zero, "dn") - 4.0) < 1e-9

    with pytest.raises(ValueError):
        matrix_distance(one, _matrix(1.0), "d1")


def test_select_operator(monkeypatch):
    rng = Rng(1)
    singleton = (OperatorId.WIPE_DOCK,)
    assert select_operator(_matrix(), OperatorId.WIPE_DOCK, singleton, rng) == OperatorId.WIPE_DOCK

    monkeypatch.setattr(vns_mod, "EXPLORATION", 0.0)
    rows = [[0.0] * len(OperatorId) for _ in OperatorId]
    rows[OperatorId.SWAP_TRAILERS][OperatorId.INTER_DOCK_RANDOM_REMOVAL] = 2.0
    for op in DESTRUCTION_OPS[1:]:
        rows[OperatorId.SWAP_TRAILERS][op] = 1.0
    m = TransitionMatrix(tuple(tuple(r) for r in rows))
    for _ in range(20):
        assert select_operator(m, OperatorId.SWAP_TRAILERS, DESTRUCTION_OPS, rng) \
            == OperatorId.INTER_DOCK_RANDOM_REMOVAL

    monkeypatch.setattr(vns_mod, "EXPLORATION", 1.0)
    explore_rng = Rng(9)
    counts = Counter(select_operator(m, OperatorId.SWAP_TRAILERS, DESTRUCTION_OPS, explore_rng)
                     for _ in range(10 ** 4))
    for op in DESTRUCTION_OPS:
        assert abs(counts[op] / 10 ** 4 - 0.25) < 0.05


def _one_dock_instance():
    rows = [(1, 5, 15), (2, 5, 20), (3, 5, 25), (4, 10, 35), (5, 10, 40)]
    return Instance(name="one-dock", docks=1, horizon=40,
                    trailers=tuple(Trailer(i, r, d, 5, 1, 100, 100) for i, r, d in rows))


def test_wipe_dock_moves_run_to_unserved():
    inst = _one_dock_instance()
    s = make_schedule(inst, [[(2, 5), (5, 11)]], {1, 3, 4})
    wiped = apply_destruction(OperatorId.WIPE_DOCK, inst, s, VnsConfig(), Rng(0))
    assert wiped.runs[0].entries == ()
    assert {2, 5} <= wiped.unserved


def test_inter_dock_full_destruction(example30):
    s = construct(MIN_ARRIVAL_VERTICAL, example30)
    cfg = VnsConfig(alpha=1.0)
    out = apply_destruction(OperatorId.INTER_DOCK_RANDOM_REMOVAL, example30, s, cfg, Rng(0))
    assert out.unserved == set(range(1, 11))
    assert out.cost == sum(t.g for t in example30.trailers)


def test_intra_dock_removes_half_of_run():
    inst = _one_dock_instance()
    base = make_schedule(inst, [[(1, 5), (2, 11), (4, 17), (5, 23)]], {3})
    assert check_schedule(inst, base) == []
    for seed in range(100):
        out = apply_destruction(OperatorId.INTRA_DOCK_RANDOM_REMOVAL, inst, base,
                                VnsConfig(gamma=0.5), Rng(seed))
        assert len(out.runs[0].entries) == 2
        assert len(out.unserved) == 3
        assert check_schedule(inst, out) == []


def test_destruction_on_all_unserved_is_noop(example30):
    s = make_schedule(example30, [[], [], []], range(1, 11))
    for op in DESTRUCTION_OPS:
        assert apply_destruction(op, example30, s, VnsConfig(), Rng(3)) == s


def test_repair_fills_exact_gap():
    trailers = (Trailer(1, 5, 15, 5, 1, 100, 100),
                Trailer(2, 10, 35, 5, 1, 100, 100),
                Trailer(3, 10, 40, 5, 1, 100, 100))
    inst = Instance(name="gap", docks=1, horizon=40, trailers=trailers)
    # idle gap [11, 17) between the two entries fits trailer 2 (block 6) exactly
    s = make_schedule(inst, [[(1, 5), (3, 17)]], {2})
    for op in REPAIR_OPS:
        out = apply_repair(op, inst, s)
        assert check_schedule(inst, out) == []
        placed = dict(out.runs[0].entries)
        assert placed[2] == 11  # waiting via earliest start after trailer 1


def test_repair_identity_when_nothing_unserved():
    inst = example_instance(70)
    s = construct(MIN_ARRIVAL_VERTICAL, inst)
    assert s.unserved == set()
    for op in REPAIR_OPS:
        assert apply_repair(op, inst, s) == s


def test_repair_cannot_place_horizon_excluded(example30):
    s = construct(MIN_ARRIVAL_VERTICAL, example30)
    assert s.unserved == {9, 10}
    for op in REPAIR_OPS:
        out = apply_repair(op, example30, s)
        assert {9, 10} <= out.unserved


def test_replace_with_unserved_takes_high_penalty_swap():
    trailers = (Trailer(1, 0, 19, 3, 1, 1, 100),
                Trailer(2, 0, 19, 3, 1, 1, 1000))
    inst = Instance(name="swap", docks=1, horizon=20, trailers=trailers)
    s = make_schedule(inst, [[(1, 0)]], {2})
    out = apply_local_search(OperatorId.REPLACE_WITH_UNSERVED, inst, s)
    assert out.unserved == {1}
    assert out.runs[0].entries == ((2, 0),)
    assert out.cost == s.cost - 900


def test_local_search_fixed_point():
    inst = example_instance(70)
    s = construct(MIN_ARRIVAL_VERTICAL, inst)
    swapped = apply_local_search(OperatorId.SWAP_TRAILERS, inst, s)
    again = apply_local_search(OperatorId.SWAP_TRAILERS, inst, swapped)
    assert again == swapped  # local optimum is a fixed point


def test_local_search_never_worsens():
    for seed in range(100):
        inst = generate(GenConfig(seed=seed, docks=2, trailers=7, tf=12, relaxed=True))
        s = construct(MIN_ARRIVAL_VERTICAL, inst)
        for op in LOCAL_SEARCH_OPS:
            out = apply_local_search(op, inst, s)
            assert out.cost <= s.cost
            assert check_schedule(inst, out) == []


def test_operators_preserve_feasibility_and_partition():
    cfg = VnsConfig()
    for seed in range(50):
        inst = generate(GenConfig(seed=400 + seed, docks=3, trailers=9, tf=12, relaxed=True))
        s = construct(MIN_ARRIVAL_VERTICAL, inst)
        rng = Rng(seed)
        for ops in (DESTRUCTION_OPS, REPAIR_OPS, LOCAL_SEARCH_OPS):
            op = ops[seed % len(ops)]
            if op in DESTRUCTION_OPS:
                s = apply_destruction(op, inst, s, cfg, rng)
            elif op in REPAIR_OPS:
                s = apply_repair(op, inst, s)
            else:
                s = apply_local_search(op, inst, s)
            assert check_schedule(inst, s) == []
            assert sorted(s.served_ids() + sorted(s.unserved)) == list(range(1, inst.n + 1))


def test_vns_solve_deterministic(example30):
    init = construct(MIN_ARRIVAL_VERTICAL, example30)
    a_best, a_stats = vns_solve(example30, init, VnsConfig(seed=11))
    b_best, b_stats = vns_solve(example30, init, VnsConfig(seed=11))
    assert a_best == b_best
    assert a_stats.iterations == b_stats.iterations
    assert [r.best_cost for r in a_stats.records] == [r.best_cost for r in b_stats.records]


def test_vns_solve_trace_non_increasing_and_feasible(example30):
    init = construct(MIN_ARRIVAL_VERTICAL, example30)
    best, stats = vns_solve(example30, init, VnsConfig(seed=2))
    assert check_schedule(example30, best) == []
    assert best.cost <= init.cost
    assert all(a >= b for a, b in zip(stats.best_costs, stats.best_costs[1:]))
    assert {9, 10} <= best.unserved  # horizon-excluded trailers stay out


def test_vns_solve_improves_with_room():
    inst = example_instance(70)
    init = construct(MIN_ARRIVAL_VERTICAL, inst)
    best, _ = vns_solve(inst, init, VnsConfig(seed=3))
    assert init.unserved == set()
    assert best.cost <= init.cost
    assert check_schedule(inst, best) == []


def test_vns_rejects_infeasible_initial(example30):
    bad = make_schedule(example30, [[(9, 25)], [], []], set(range(1, 11)) - {9})
    with pytest.raises(InfeasibleScheduleError):
        vns_solve(example30, bad, VnsConfig())


def test_vns_respects_max_iters(example30):
    init = construct(MIN_ARRIVAL_VERTICAL, example30)
    _, stats = vns_solve(example30, init, VnsConfig(seed=5, max_iters=7))
    assert stats.iterations == 7
