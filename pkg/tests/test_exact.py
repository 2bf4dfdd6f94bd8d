import pytest

from dsts.construct import METHODS, construct
from dsts.core import Instance, Trailer, check_schedule
from dsts.exact import ExactLimits, ExactSearchTimeout, brute_force_optimum
from dsts.instgen import GenConfig, generate
from dsts.vns import VnsConfig, vns_solve

from conftest import example_instance


def test_single_trailer():
    inst = Instance(name="one", docks=1, horizon=5,
                    trailers=(Trailer(1, 0, 4, 1, 1, 1, 10),))
    s, cost = brute_force_optimum(inst)
    assert cost == 0
    assert s.runs[0].entries == ((1, 0),)


def test_two_identical_trailers_only_one_fits():
    # first completes at 3 = due; the second would finish at 6 > 3
    trailers = (Trailer(1, 0, 3, 2, 1, 1, 10), Trailer(2, 0, 3, 2, 1, 1, 10))
    inst = Instance(name="pair", docks=1, horizon=10, trailers=trailers)
    s, cost = brute_force_optimum(inst)
    assert cost == 10
    assert len(s.unserved) == 1


def test_example_restricted_to_six_trailers():
    inst = example_instance(30, n=6)
    s, cost = brute_force_optimum(inst)
    # every 6-served timing waits at least 2 periods (all docks are busy until
    # 11, so the two r=10 trailers wait), and dropping either of them trades
    # 100 waiting for 100 penalty: the optimum is 200 either way
    assert cost == 200
    assert check_schedule(inst, s) == []


def test_oracle_lower_bounds_heuristics():
    for seed in range(25):
        inst = generate(GenConfig(seed=600 + seed, docks=2, trailers=6, tf=12, relaxed=True))
        _, opt = brute_force_optimum(inst)
        for method in METHODS:
            assert opt <= construct(method, inst).cost
        best, _ = vns_solve(inst, construct(METHODS[0], inst), VnsConfig(seed=seed))
        assert opt <= best.cost


def test_oracle_deterministic():
    inst = generate(GenConfig(seed=77, docks=2, trailers=6, tf=12, relaxed=True))
    s1, c1 = brute_force_optimum(inst)
    s2, c2 = brute_force_optimum(inst)
    assert (s1, c1) == (s2, c2)


def test_size_limits():
    inst = generate(GenConfig(seed=1, docks=2, trailers=8, tf=12, relaxed=True))
    with pytest.raises(ValueError):
        brute_force_optimum(inst, ExactLimits(max_trailers=7))
    wide = generate(GenConfig(seed=1, docks=4, trailers=6, tf=12, relaxed=True))
    with pytest.raises(ValueError):
        brute_force_optimum(wide, ExactLimits(max_docks=3))


def test_timeout():
    inst = generate(GenConfig(seed=2, docks=3, trailers=7, tf=16, relaxed=True))
    with pytest.raises(ExactSearchTimeout):
        brute_force_optimum(inst, ExactLimits(timeout=0.0))
