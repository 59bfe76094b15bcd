import random

import numpy as np
import pytest

from adaptive_relay.channel import ErasurePair, enumerate_admissible_pairs, sample_pair
from adaptive_relay.errors import ChannelContractViolation
from adaptive_relay.harness import (
    SWEEP_FIELDS,
    run_session,
    run_sweep,
    structural_check,
    verify_exhaustive,
)
from adaptive_relay.params import derive_params


def test_worked_burst_scenario():
    p = derive_params(2, 3, 6)
    source = [0] * 4 + [1, 1] + [0] * 14
    relay = [0] * 7 + [1, 1, 1] + [0] * 10
    rep = run_session(p, ErasurePair(source, relay), seed=0)
    assert rep.success and rep.deadlines_met == 20
    assert rep.max_fill <= 50


def test_invalid_pair_is_rejected():
    p = derive_params(1, 2, 4)
    with pytest.raises(ChannelContractViolation):
        run_session(p, ErasurePair([1, 1, 0, 0], [0, 0, 0, 0]))
    with pytest.raises(ChannelContractViolation):
        run_session(p, ErasurePair([0] * 5, [1, 1, 1, 0, 0]))
    with pytest.raises(ChannelContractViolation):
        structural_check(p, ErasurePair([0] * 5, [1, 1, 1, 0, 0]))


def test_explicit_messages():
    p = derive_params(1, 1, 2)
    msgs = np.arange(6 * p.k).reshape(6, p.k)
    rep = run_session(p, ErasurePair([0, 1, 0, 0, 0, 1], [1, 0, 0, 1, 0, 0]), messages=msgs)
    assert rep.success
    with pytest.raises(ValueError):
        run_session(p, ErasurePair([0] * 3, [0] * 3), messages=msgs)


def test_beyond_budget_failure_is_reported_with_slot():
    p = derive_params(1, 2, 4)
    pair = ErasurePair([0] * 10, [0, 1, 1, 1, 0, 0, 0, 0, 0, 0])
    rep = run_session(p, pair, enforce_relay_budget=False)
    assert not rep.success
    assert rep.first_failure == 0
    assert structural_check(p, pair, enforce_relay_budget=False).first_failure == 0


@pytest.mark.parametrize("nt", [(1, 2, 4), (2, 3, 6), (1, 1, 2)])
def test_count_level_check_agrees_with_symbol_level(nt):
    """Beyond the budget decoding fails often; both engines must agree slot-for-slot."""
    p = derive_params(*nt)
    rng = random.Random(5)
    failures = 0
    for i in range(60):
        s = sample_pair(*nt, 24, i, "random").source
        r = tuple(int(rng.random() < rng.uniform(0.1, 0.5)) for _ in range(24))
        pair = ErasurePair(s, r)
        a = run_session(p, pair, seed=i, enforce_relay_budget=False)
        b = structural_check(p, pair, enforce_relay_budget=False)
        assert (a.success, a.first_failure) == (b.success, b.first_failure)
        assert a.max_fill == b.max_fill
        failures += not a.success
    assert 0 < failures < 60


def test_count_level_check_on_extended_budget_pairs():
    p = derive_params(1, 2, 4)
    for pair in enumerate_admissible_pairs(1, 2, 4, 9, "lemma2"):
        assert structural_check(p, pair).success


def test_exhaustive_small():
    p = derive_params(1, 1, 2)
    rep = verify_exhaustive(p, 6)
    assert rep.success and rep.sessions == 13 * 13
    assert rep.max_fill == p.n2
    d = rep.to_dict()
    assert d["success"] and d["counterexample"] is None
    assert verify_exhaustive(p, 6, mode="lemma2").success


def test_sweep_rows():
    rows = run_sweep(30, seed=4, tau=500)
    assert len(rows) == 30
    keys = [(r.trivial_bound, r.N1, r.N2, r.T, r.sample) for r in rows]
    assert keys == sorted(keys)
    for r in rows:
        assert 10 >= r.N2 > r.N1 >= 1 and r.N1 + r.N2 <= r.T <= r.N1 + r.N2 + 10
        assert r.nonadaptive_rate < r.our_rate <= r.our_upper <= r.trivial_bound
        assert r.our_rate_with_header <= r.our_rate
        assert r.ratio <= 1
        rec = r.as_record()
        assert set(SWEEP_FIELDS) <= set(rec)
    assert rows == run_sweep(30, seed=4, tau=500)
    assert rows != run_sweep(30, seed=5, tau=500)
