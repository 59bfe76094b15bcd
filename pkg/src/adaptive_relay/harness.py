"""End-to-end sessions, exhaustive verification and the randomized sweep."""

from __future__ import annotations

import logging
import random
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .bounds import upper_bound
from .channel import ErasurePair, enumerate_admissible_pairs, validate_pair
from .destination import DestinationDecoder
from .errors import ChannelContractViolation, DecodingFailure
from .field import Field
from .params import (
    CodeParams,
    achievable_rate,
    check_field_capacity,
    derive_params,
    nonadaptive_rate,
    trivial_bound,
)
from .relay import RelayNode
from .schedule import RelaySchedule
from .source import SourceEncoder

log = logging.getLogger(__name__)


@dataclass
class SimulationReport:
    n1_erasures: int
    n2_erasures: int
    delay: int
    horizon: int
    mode: str
    source_link: str
    relay_link: str
    success: bool
    deadlines_met: int
    first_failure: int | None
    failure_reason: str | None
    max_fill: int
    n2: int
    fills: list = dc_field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _check_contract(params: CodeParams, pair: ErasurePair, mode: str, relay: bool = True):
    budget = params.n2_erasures if relay else pair.horizon
    ok, bad = validate_pair(pair, params.n1_erasures, budget, params.delay, mode)
    if not ok:
        raise ChannelContractViolation(
            f"{bad.link} link has {bad.count} > {bad.limit} erasures in the window "
            f"starting at slot {bad.start}"
        )


def _padded(pair: ErasurePair, extra: int):
    return list(pair.source) + [0] * extra, list(pair.relay) + [0] * extra


def random_messages(params: CodeParams, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, params.field_order, size=(count, params.k), dtype=np.int64)


def _decode_run(params, field, mode, packets, relay_flags, messages, enforce=True):
    """Feed relay packets through the second link; returns (met, fail, reason)."""
    dst = DestinationDecoder(params, field, mode, enforce_budget=enforce)
    met = 0
    try:
        for s, pkt in enumerate(packets):
            for t, m in dst.ingest(None if relay_flags[s] else pkt):
                if t >= len(messages) or not np.array_equal(m, messages[t]):
                    return met, t, "decoded message differs from the original"
                met += 1
    except DecodingFailure as exc:
        return met, exc.slot, str(exc)
    return met, None, None


def relay_packets(params, field, source_flags, messages):
    src = SourceEncoder(params, field)
    node = RelayNode(params, field)
    out = []
    for s, erased in enumerate(source_flags):
        x = src.encode(messages[s])
        out.append(node.step(s, None if erased else x))
    return out


def run_session(params: CodeParams, pair: ErasurePair, messages=None, seed: int = 0,
                mode: str | None = None, field: Field | None = None,
                enforce_relay_budget: bool = True) -> SimulationReport:
    """Source -> relay -> destination over ``pair`` plus ``T`` erasure-free tail slots.

    Messages ``0 .. horizon-1`` are checked against their deadlines; the
    tail slots carry zero messages and only let the last deadlines pass.
    With ``enforce_relay_budget=False`` only the first link must respect its
    budget, and decoding failures are reported instead of rejected upfront.
    """
    mode = mode or pair.mode
    _check_contract(params, pair, mode, enforce_relay_budget)
    check_field_capacity(params)
    field = field or Field(params.field_order)
    H, T = pair.horizon, params.delay
    if messages is None:
        messages = random_messages(params, H, seed)
    messages = np.asarray(messages, dtype=np.int64).reshape(-1, params.k)
    if len(messages) != H:
        raise ValueError(f"need {H} messages, got {len(messages)}")
    full = np.concatenate([messages, np.zeros((T, params.k), dtype=np.int64)])
    sflags, rflags = _padded(pair, T)
    packets = relay_packets(params, field, sflags, full)
    met, fail, reason = _decode_run(params, field, mode, packets, rflags, messages,
                                    enforce_relay_budget)
    fills = [p.fill for p in packets]
    return SimulationReport(
        params.n1_erasures, params.n2_erasures, T, H, mode,
        "".join(map(str, pair.source)), "".join(map(str, pair.relay)),
        fail is None and met >= H, min(met, H), fail, reason, max(fills), params.n2, fills,
    )


# -- structural (count-level) check -------------------------------------------


@dataclass
class StructuralReport:
    success: bool
    first_failure: int | None
    reason: str | None
    max_fill: int


def structural_check(params: CodeParams, pair: ErasurePair, mode: str | None = None,
                     enforce_relay_budget: bool = True) -> StructuralReport:
    """Decide decodability of every message from symbol counts alone.

    Mirrors the destination: a message is recoverable by its deadline iff the
    decoder knows its first-link flag, at least ``k''`` diagonal symbols (or
    ``k`` long-code symbols plus every estimate recipe) arrived in packets
    whose layout it can already parse.  Every square submatrix of the Cauchy
    matrices is invertible, so these counting conditions are exact.
    """
    mode = mode or pair.mode
    _check_contract(params, pair, mode, enforce_relay_budget)
    H, T = pair.horizon, params.delay
    sflags, rflags = _padded(pair, T)
    total = H + T
    sched = RelaySchedule(params, field=None, layout=False)
    plans: dict[int, list] = {}
    alpha_at: dict[int, list] = {}
    for s, f in enumerate(sflags):
        sched.advance(f)
        for t0, st in sched.erased.items():
            if t0 < s:
                used = sum(st.alphas[:-1])
                kappa = st.kappas[-1]
                if kappa < params.k and used + st.alphas[-1] > kappa:
                    return StructuralReport(False, t0, "long-code symbols scheduled before their estimates", max(sched.fills))
            if s == t0 + T or (s == total - 1 and t0 + T >= total):
                plans[t0] = [pl.found_at for pl in st.plans]
                alpha_at[t0] = list(st.alphas)
    max_fill = max(sched.fills)
    if max_fill > params.n2:
        return StructuralReport(False, None, "relay packet overflow", max_fill)

    # slot at which each first-link flag becomes known to the destination
    INF = total + T + 1
    known_at = []
    for u in range(total):
        v = next((v for v in range(u, min(u + T, total - 1) + 1) if not rflags[v]), INF)
        known_at.append(v)
    prefix, parsed_upto = 0, []
    for s in range(total):
        while prefix < total and known_at[prefix] <= s:
            prefix += 1
        parsed_upto.append(prefix)  # slots < prefix have a known layout at time s

    for t in range(H):
        s = t + T
        lim = parsed_upto[s]
        if known_at[t] > s:
            return StructuralReport(False, t, "first-link state unknown at deadline", max_fill)
        if not sflags[t]:
            got = sum(1 for v in range(t, s + 1) if not rflags[v] and v < lim)
            if got < params.k_dprime:
                return StructuralReport(False, t, "too few diagonal symbols", max_fill)
        else:
            if len(plans[t]) < params.k_prime or any(u >= lim for u in plans[t]):
                return StructuralReport(False, t, "estimate recipes incomplete", max_fill)
            got = sum(a for i, a in enumerate(alpha_at[t], start=1)
                      if not rflags[t + i] and t + i < lim)
            if got < params.k:
                return StructuralReport(False, t, "too few long-code symbols", max_fill)
    return StructuralReport(True, None, None, max_fill)


# -- exhaustive verification ----------------------------------------------------


@dataclass
class ExhaustiveReport:
    n1_erasures: int
    n2_erasures: int
    delay: int
    horizon: int
    mode: str
    sessions: int
    failures: int
    max_fill: int
    n2: int
    counterexample: ErasurePair | None = None
    reason: str | None = None

    @property
    def success(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["counterexample"] = self.counterexample.to_text() if self.counterexample else None
        out["success"] = self.success
        return out


def verify_exhaustive(params: CodeParams, horizon: int, mode: str = "window", seed: int = 0,
                      field: Field | None = None, stop_on_failure: bool = False) -> ExhaustiveReport:
    """Symbol-level session for every admissible pair of length ``horizon``.

    The relay output only depends on the first link, so it is computed once
    per first-link pattern and replayed against every second-link pattern.
    """
    field = field or Field(params.field_order)
    check_field_capacity(params)
    T = params.delay
    messages = random_messages(params, horizon, seed)
    full = np.concatenate([messages, np.zeros((T, params.k), dtype=np.int64)])
    rep = ExhaustiveReport(params.n1_erasures, params.n2_erasures, T, horizon, mode, 0, 0, 0, params.n2)
    cache_key, packets = None, None
    for pair in enumerate_admissible_pairs(params.n1_erasures, params.n2_erasures, T, horizon, mode):
        if pair.source != cache_key:
            cache_key = pair.source
            packets = relay_packets(params, field, list(pair.source) + [0] * T, full)
            rep.max_fill = max(rep.max_fill, max(p.fill for p in packets))
        met, fail, reason = _decode_run(params, field, mode, packets, list(pair.relay) + [0] * T, messages)
        rep.sessions += 1
        if fail is not None or met < horizon:
            rep.failures += 1
            if rep.counterexample is None:
                rep.counterexample, rep.reason = pair, reason
                log.warning("failure at slot %s for pair %r: %s", fail, pair.to_text(), reason)
            if stop_on_failure:
                break
    return rep


# -- sweep ------------------------------------------------------------------------

SWEEP_FIELDS = (
    "N1", "N2", "T", "trivial_bound", "nonadaptive_rate", "our_upper",
    "our_rate", "our_rate_with_header", "ratio",
)


@dataclass(frozen=True)
class SweepRow:
    N1: int
    N2: int
    T: int
    trivial_bound: Fraction
    nonadaptive_rate: Fraction
    our_upper: Fraction
    our_rate: Fraction  # header overhead excluded
    our_rate_with_header: Fraction
    ratio: Fraction  # our_rate / our_upper
    sample: int

    def as_record(self) -> dict:
        out = {}
        for name in SWEEP_FIELDS:
            v = getattr(self, name)
            if isinstance(v, Fraction):
                out[name] = str(v)
                out[name + "_decimal"] = f"{float(v):.6f}"
            else:
                out[name] = v
        return out


def sample_parameters(rng: random.Random, max_n2: int = 10, extra_delay: int = 10):
    n2 = rng.randint(2, max_n2)
    n1 = rng.randint(1, n2 - 1)
    t = rng.randint(n1 + n2, n1 + n2 + extra_delay)
    return n1, n2, t


def run_sweep(samples: int = 200, seed: int = 0, tau: int = 2000, multiplex: int = 1,
              field_order: int = 2**16, max_n2: int = 10, extra_delay: int = 10) -> list[SweepRow]:
    rng = random.Random(seed)
    rows = []
    for i in range(samples):
        n1, n2, t = sample_parameters(rng, max_n2, extra_delay)
        params = derive_params(n1, n2, t, field_order, multiplex)
        upper = upper_bound(n1, n2, t, tau=tau).final_upper
        ours = achievable_rate(params, include_header=False)
        rows.append(SweepRow(
            n1, n2, t, trivial_bound(n2, t), nonadaptive_rate(n1, n2, t), upper,
            ours, achievable_rate(params, include_header=True), ours / upper, i,
        ))
    rows.sort(key=lambda r: (r.trivial_bound, r.N1, r.N2, r.T, r.sample))
    return rows
