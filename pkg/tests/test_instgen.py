import pytest

from dsts.instgen import (FormatError, GenConfig, generate, instance_name,
                          read_instance, write_instance)

from conftest import example_instance


def test_field_bounds_and_coverage():
    deltas = set()
    for seed in range(20):
        inst = generate(GenConfig(seed=seed, docks=20, trailers=60))
        assert inst.horizon == 16
        for t in inst.trailers:
            assert 0 <= t.r <= 12
            assert 2 <= t.p <= 4
            assert 1 <= t.delta <= 3
            assert 3 <= t.due - t.r - t.delta - t.p <= 5
            assert 5 <= t.f <= 10
            assert t.g == 100 * t.f
            deltas.add(t.delta)
    assert deltas == {1, 2, 3}


def test_determinism_same_seed():
    cfg = GenConfig(seed=7, docks=20, trailers=60)
    assert write_instance(generate(cfg)) == write_instance(generate(cfg))


def test_seeds_differ():
    texts = {write_instance(generate(GenConfig(seed=s, docks=20, trailers=60)))
             for s in range(10)}
    assert len(texts) == 10


def test_golden_instance_is_byte_stable(golden_dir):
    golden = (golden_dir / "tf_20_tr_60_seed42.dsts").read_text(encoding="utf-8")
    assert write_instance(generate(GenConfig(seed=42, docks=20, trailers=60))) == golden


def test_instance_name():
    assert instance_name(GenConfig(seed=0, docks=32, trailers=101)) == "tf_32_tr_101"
    assert instance_name(GenConfig(seed=0, docks=20, trailers=60)) == "tf_20_tr_60"
    assert instance_name(GenConfig(seed=0, docks=1, trailers=1, relaxed=True)) == "tf_1_tr_1"


def test_strict_mode_bounds():
    with pytest.raises(ValueError):
        generate(GenConfig(seed=0, docks=3, trailers=9))
    with pytest.raises(ValueError):
        generate(GenConfig(seed=0, docks=20, trailers=500))
    generate(GenConfig(seed=0, docks=3, trailers=9, tf=12, relaxed=True))


def test_roundtrip_identity():
    inst = generate(GenConfig(seed=3, docks=20, trailers=60))
    text = write_instance(inst)
    assert read_instance(text) == inst
    assert write_instance(read_instance(text)) == text


def test_roundtrip_example_instance(example30):
    text = write_instance(example30)
    assert read_instance(text) == example30


def test_parse_errors():
    inst = example_instance(30)
    text = write_instance(inst)
    truncated = "\n".join(text.splitlines()[:-1]) + "\n"
    with pytest.raises(FormatError, match="trailer row 10"):
        read_instance(truncated)
    with pytest.raises(FormatError, match="trailers"):
        read_instance("DSTS 1\nname x\ndocks 1\nhorizon 4\ntrailers 0\n")
    with pytest.raises(FormatError, match="header"):
        read_instance("DSTS 2\nname x\n")
    bad_line = text.replace("4 10 35 5 1 100 100", "4 10 35 5 one 100 100")
    with pytest.raises(FormatError, match="line 9"):
        read_instance(bad_line)
