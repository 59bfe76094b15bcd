"""Adversarial erasure patterns for the source->relay and relay->destination links.

A flag of 1 means the packet in that slot is erased.  Finite horizons are
handled by intersecting every window ``[i, i+T]`` with ``[0, horizon)``.

Two budget modes are supported:

``window``
    every window of ``T+1`` slots has at most N1 first-link and N2
    second-link erasures.
``lemma2``
    the extended budget an achievable code must also survive: the first
    link as above; for the second link the window ``[i, i+T]`` is capped at
    N2 when ``x(i)`` arrived, and ``[i+1, i+T]`` is capped at N2 when it was
    erased.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import EnumerationTooLarge, ParameterError

MODES = ("window", "lemma2")
GENERATORS = ("random", "burst", "spaced", "heuristic")


@dataclass(frozen=True)
class ErasurePair:
    source: tuple[int, ...]
    relay: tuple[int, ...]
    mode: str = "window"

    def __post_init__(self):
        object.__setattr__(self, "source", tuple(int(v) for v in self.source))
        object.__setattr__(self, "relay", tuple(int(v) for v in self.relay))
        if len(self.source) != len(self.relay):
            raise ParameterError("both links need the same horizon")
        if any(v not in (0, 1) for v in self.source + self.relay):
            raise ParameterError("erasure flags must be 0 or 1")
        if self.mode not in MODES:
            raise ParameterError(f"unknown budget mode {self.mode!r}")

    @property
    def horizon(self) -> int:
        return len(self.source)

    def to_text(self) -> str:
        return "".join(map(str, self.source)) + "\n" + "".join(map(str, self.relay)) + "\n"

    @classmethod
    def from_text(cls, text: str, mode: str = "window") -> "ErasurePair":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if len(lines) != 2:
            raise ParameterError("pattern file needs exactly two non-empty lines")
        if any(set(ln) - {"0", "1"} for ln in lines):
            raise ParameterError("pattern lines may only contain '0' and '1'")
        if len(lines[0]) != len(lines[1]):
            raise ParameterError("pattern lines must have equal length")
        return cls(tuple(map(int, lines[0])), tuple(map(int, lines[1])), mode)


def read_pair_file(path, mode: str = "window") -> ErasurePair:
    return ErasurePair.from_text(Path(path).read_text(), mode)


def write_pair_file(path, pair: ErasurePair) -> None:
    Path(path).write_text(pair.to_text())


@dataclass(frozen=True)
class Violation:
    link: str  # "source" or "relay"
    start: int  # first slot of the offending window
    count: int
    limit: int


def _prefix(seq):
    out = [0]
    for v in seq:
        out.append(out[-1] + v)
    return out


def validate_pair(pair: ErasurePair, n1_erasures: int, n2_erasures: int, delay: int,
                  mode: str | None = None) -> tuple[bool, Violation | None]:
    """Check every window; return ``(ok, first violating window or None)``."""
    mode = mode or pair.mode
    if mode not in MODES:
        raise ParameterError(f"unknown budget mode {mode!r}")
    H, T = pair.horizon, delay
    ps, pr = _prefix(pair.source), _prefix(pair.relay)
    for i in range(H):
        end = min(i + T, H - 1) + 1
        cs = ps[end] - ps[i]
        if cs > n1_erasures:
            return False, Violation("source", i, cs, n1_erasures)
        lo = i + 1 if (mode == "lemma2" and pair.source[i]) else i
        cr = pr[end] - pr[lo]
        if cr > n2_erasures:
            return False, Violation("relay", i, cr, n2_erasures)
    return True, None


def is_admissible(pair, n1_erasures, n2_erasures, delay, mode=None) -> bool:
    return validate_pair(pair, n1_erasures, n2_erasures, delay, mode)[0]


# -- enumeration --------------------------------------------------------------


def window_sequences(horizon: int, delay: int, budget: int):
    """All 0/1 sequences with at most ``budget`` ones per window, lexicographic."""
    seq = [0] * horizon

    def rec(u, trailing):
        # trailing: ones in [u - delay, u - 1]
        if u == horizon:
            yield tuple(seq)
            return
        drop = seq[u - delay - 1] if u - delay - 1 >= 0 else 0
        base = trailing - drop
        seq[u] = 0
        yield from rec(u + 1, base)
        if base + 1 <= budget:
            seq[u] = 1
            yield from rec(u + 1, base + 1)
            seq[u] = 0

    yield from rec(0, 0)


def lemma2_relay_sequences(source, delay: int, budget: int):
    """Second-link sequences admissible under the extended budget for ``source``."""
    H = len(source)
    seq = [0] * H

    def ok_at(u):
        for i in range(max(0, u - delay), u + 1):
            lo = i + 1 if source[i] else i
            if sum(seq[lo:u + 1]) > budget:
                return False
        return True

    def rec(u):
        if u == H:
            yield tuple(seq)
            return
        seq[u] = 0
        yield from rec(u + 1)
        seq[u] = 1
        if ok_at(u):
            yield from rec(u + 1)
        seq[u] = 0

    yield from rec(0)


def enumerate_admissible_pairs(n1_erasures: int, n2_erasures: int, delay: int,
                               horizon: int, mode: str = "window",
                               cap: int = 2_000_000):
    """Yield every admissible pair exactly once (source-major, lexicographic)."""
    if mode not in MODES:
        raise ParameterError(f"unknown budget mode {mode!r}")
    sources = list(window_sequences(horizon, delay, n1_erasures))
    if mode == "window":
        relays = list(window_sequences(horizon, delay, n2_erasures))
        total = len(sources) * len(relays)
        if total > cap:
            raise EnumerationTooLarge(f"{total} pairs exceed cap {cap}")
        for s in sources:
            for r in relays:
                yield ErasurePair(s, r, mode)
        return
    produced = 0
    for s in sources:
        for r in lemma2_relay_sequences(s, delay, n2_erasures):
            produced += 1
            if produced > cap:
                raise EnumerationTooLarge(f"more than {cap} pairs")
            yield ErasurePair(s, r, mode)


def count_admissible_pairs(n1_erasures, n2_erasures, delay, horizon, mode="window") -> int:
    if mode == "window":
        return (sum(1 for _ in window_sequences(horizon, delay, n1_erasures))
                * sum(1 for _ in window_sequences(horizon, delay, n2_erasures)))
    return sum(
        sum(1 for _ in lemma2_relay_sequences(s, delay, n2_erasures))
        for s in window_sequences(horizon, delay, n1_erasures)
    )


# -- seeded generators ----------------------------------------------------------


def _can_erase_relay(source, relay, u, delay, budget, mode):
    for i in range(max(0, u - delay), u + 1):
        lo = i + 1 if (mode == "lemma2" and source[i]) else i
        if lo > u:
            continue
        if sum(relay[lo:u]) + 1 > budget:
            return False
    return True


def _greedy_relay(source, delay, budget, mode, rng, prob):
    relay = [0] * len(source)
    for u in range(len(source)):
        if rng.random() < prob and _can_erase_relay(source, relay, u, delay, budget, mode):
            relay[u] = 1
    return relay


def _greedy_source(horizon, delay, budget, rng, prob):
    seq = [0] * horizon
    for u in range(horizon):
        if rng.random() < prob and sum(seq[max(0, u - delay):u]) + 1 <= budget:
            seq[u] = 1
    return seq


def _periodic(horizon, period, offsets, rng, skip):
    seq = [0] * horizon
    for base in range(0, horizon + period, period):
        if rng.random() < skip:
            continue
        for o in offsets:
            u = base + o
            if 0 <= u < horizon:
                seq[u] = 1
    return seq


def sample_pair(n1_erasures: int, n2_erasures: int, delay: int, horizon: int,
                seed: int, generator: str = "random", mode: str = "window") -> ErasurePair:
    """Deterministic admissible pair for ``seed``.

    ``burst`` puts N1 (resp. N2) consecutive erasures in randomly skipped
    periods of ``T+1`` slots; ``spaced`` puts N1 first-link erasures two slots
    apart per period; ``random`` places erasures greedily with a random
    intensity; ``heuristic`` returns the greedy upper-bound adversary's
    pattern (extended budget).
    """
    N1, N2, T = n1_erasures, n2_erasures, delay
    rng = np.random.default_rng(seed)
    if generator == "heuristic":
        from .bounds import adversary_heuristic

        res = adversary_heuristic(N1, N2, T, max(horizon, T + 1))
        return ErasurePair(res.pair.source[:horizon], res.pair.relay[:horizon], "lemma2")
    if generator == "random":
        source = _greedy_source(horizon, T, N1, rng, rng.uniform(0.1, 0.9))
        relay = _greedy_relay(source, T, N2, mode, rng, rng.uniform(0.1, 0.9))
    elif generator == "burst":
        start = int(rng.integers(0, T + 1))
        source = _periodic(horizon, T + 1, [start + i for i in range(N1)], rng, 0.3)
        rstart = int(rng.integers(0, T + 1))
        relay = _periodic(horizon, T + 1, [rstart + i for i in range(N2)], rng, 0.3)
        if mode == "lemma2":
            relay = [max(a, b) for a, b in zip(relay, _greedy_relay(source, T, N2, mode, rng, 0.0))]
    elif generator == "spaced":
        gap = 2 if 2 * (N1 - 1) < T + 1 else 1
        start = int(rng.integers(0, T + 1))
        source = _periodic(horizon, T + 1, [start + gap * i for i in range(N1)], rng, 0.3)
        relay = _greedy_relay(source, T, N2, mode, rng, rng.uniform(0.2, 0.9))
    else:
        raise ParameterError(f"unknown generator {generator!r}")
    pair = ErasurePair(source, relay, mode)
    ok, bad = validate_pair(pair, N1, N2, T, mode)
    assert ok, f"generator {generator} produced an inadmissible pair: {bad}"
    return pair
