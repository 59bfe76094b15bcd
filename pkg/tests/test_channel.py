import random

import pytest

from adaptive_relay.channel import (
    ErasurePair,
    count_admissible_pairs,
    enumerate_admissible_pairs,
    read_pair_file,
    sample_pair,
    validate_pair,
    write_pair_file,
)
from adaptive_relay.errors import EnumerationTooLarge, ParameterError
from oracles import filter_pairs, lemma2_ok, window_ok

PERIOD7_PAIR = ErasurePair((1, 0, 0, 0, 0, 0, 0) * 3, (1, 0, 1, 0, 1, 0, 0) * 3)


def test_all_zero_pair_is_valid_in_both_modes():
    pair = ErasurePair((0,) * 10, (0,) * 10)
    assert validate_pair(pair, 1, 1, 3, "window") == (True, None)
    assert validate_pair(pair, 1, 1, 3, "lemma2") == (True, None)


def test_extended_budget_example():
    assert validate_pair(PERIOD7_PAIR, 1, 2, 4, "lemma2")[0]
    ok, bad = validate_pair(PERIOD7_PAIR, 1, 2, 4, "window")
    assert not ok
    assert (bad.link, bad.start, bad.count, bad.limit) == ("relay", 0, 3, 2)


def test_first_link_overflow_invalid_in_both_modes():
    pair = ErasurePair((0, 1, 0, 1, 0, 0), (0,) * 6)
    for mode in ("window", "lemma2"):
        ok, bad = validate_pair(pair, 1, 2, 3, mode)
        assert not ok and bad.link == "source"


@pytest.mark.parametrize("nt,h", [((1, 1, 2), 3), ((1, 2, 4), 5), ((2, 2, 4), 4)])
@pytest.mark.parametrize("mode", ["window", "lemma2"])
def test_enumeration_matches_filter_oracle(nt, h, mode):
    got = [(p.source, p.relay) for p in enumerate_admissible_pairs(*nt, h, mode)]
    assert len(got) == len(set(got))
    assert sorted(got) == sorted(filter_pairs(*nt, h, mode))
    assert got == [(p.source, p.relay) for p in enumerate_admissible_pairs(*nt, h, mode)]


def test_frozen_small_counts():
    assert len(list(enumerate_admissible_pairs(1, 1, 2, 3))) == 16
    assert len(list(enumerate_admissible_pairs(1, 1, 2, 3, "lemma2"))) == 18


def test_empty_horizon():
    assert list(enumerate_admissible_pairs(1, 2, 4, 0)) == [ErasurePair((), ())]


@pytest.mark.parametrize("nt,count", [((1, 1, 2), 129 * 129), ((1, 2, 3), 69 * 838), ((1, 2, 4), 45 * 487)])
def test_horizon_12_counts(nt, count):
    assert count_admissible_pairs(*nt, 12) == count


def test_random_probes_against_oracle():
    stream = {(p.source, p.relay) for p in enumerate_admissible_pairs(1, 2, 4, 12)}
    rng = random.Random(11)
    hits = 0
    for _ in range(1000):
        # bias towards sparse patterns so that both outcomes occur
        s = tuple(int(rng.random() < 0.15) for _ in range(12))
        r = tuple(int(rng.random() < 0.25) for _ in range(12))
        expect = window_ok(s, 4, 1) and window_ok(r, 4, 2)
        assert ((s, r) in stream) == expect
        hits += expect
    assert 0 < hits < 1000


def test_cap():
    with pytest.raises(EnumerationTooLarge):
        list(enumerate_admissible_pairs(1, 2, 4, 12, cap=1000))
    with pytest.raises(EnumerationTooLarge):
        list(enumerate_admissible_pairs(1, 2, 4, 12, "lemma2", cap=1000))


@pytest.mark.parametrize("generator", ["random", "burst", "spaced"])
@pytest.mark.parametrize("mode", ["window", "lemma2"])
def test_generated_pairs_validate_and_are_deterministic(generator, mode):
    for nt in [(1, 2, 4), (2, 3, 6), (3, 5, 12)]:
        for seed in range(20):
            pair = sample_pair(*nt, 60, seed, generator, mode)
            assert validate_pair(pair, *nt, mode)[0]
            if mode == "lemma2":
                assert lemma2_ok(pair.source, pair.relay, nt[2], nt[0], nt[1])
            else:
                assert window_ok(pair.source, nt[2], nt[0]) and window_ok(pair.relay, nt[2], nt[1])
            assert sample_pair(*nt, 60, seed, generator, mode) == pair


def test_burst_and_spaced_shapes():
    burst = sample_pair(2, 3, 6, 70, 0, "burst").source
    runs = "".join(map(str, burst)).split("0")
    assert {len(r) for r in runs if r} == {2}
    spaced = sample_pair(2, 3, 6, 70, 0, "spaced").source
    ones = [t for t, v in enumerate(spaced) if v]
    assert ones and all(b - a >= 2 for a, b in zip(ones, ones[1:]))


def test_heuristic_generator_uses_extended_budget():
    pair = sample_pair(1, 2, 4, 40, 0, "heuristic")
    assert pair.mode == "lemma2" and pair.horizon == 40
    assert validate_pair(pair, 1, 2, 4)[0]


def test_pattern_file_round_trip(tmp_path):
    path = tmp_path / "pair.txt"
    write_pair_file(path, PERIOD7_PAIR)
    assert path.read_text().splitlines()[0] == "100000010000001000000"
    assert read_pair_file(path, "lemma2") == ErasurePair(PERIOD7_PAIR.source, PERIOD7_PAIR.relay, "lemma2")


@pytest.mark.parametrize("text", ["0101\n", "01\n012\n", "01\n011\n", "01\n01\n01\n"])
def test_bad_pattern_files(text):
    with pytest.raises(ParameterError):
        ErasurePair.from_text(text)


def test_pair_rejects_bad_flags():
    with pytest.raises(ParameterError):
        ErasurePair((0, 2), (0, 0))
    with pytest.raises(ParameterError):
        ErasurePair((0,), (0, 0))
    with pytest.raises(ParameterError):
        ErasurePair((0,), (0,), "bogus")
