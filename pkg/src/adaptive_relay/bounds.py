"""Upper bounds on the rate of any relaying scheme.

Besides the two closed-form bounds, the second-link rate is bounded by the
fraction of relay packets that survive an adversary who may use the extended
second-link budget (``lemma2`` mode in :mod:`adaptive_relay.channel`).  Two
adversaries are implemented: a greedy scan and an exhaustive search over
periodic patterns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .channel import ErasurePair, validate_pair
from .errors import ParameterError, SearchTooLarge
from .params import _check_feasible, r1_bound, trivial_bound

MAX_PERIOD_CAP = 16


@dataclass(frozen=True)
class HeuristicResult:
    pair: ErasurePair
    tau: int
    ratio: Fraction  # non-erased relay slots in [0, tau+T], divided by tau
    ratio_full: Fraction  # same count divided by tau+T+1
    asymptotic: Fraction | None  # exact ratio of the eventual cycle
    cycle_start: int | None
    period: int | None


def adversary_heuristic(n1_erasures: int, n2_erasures: int, delay: int, tau: int) -> HeuristicResult:
    """Greedy adversary scanning ``t = 0 .. tau``.

    Whenever a relay erasure at ``t`` already saturates its window and the
    first-link budget allows, ``x(t)`` is erased as well, which buys one more
    relay erasure at ``t + T``.  Otherwise a relay erasure is placed at
    ``t + T`` whenever the window ``[t, t+T]`` has room.
    """
    N1, N2, T = n1_erasures, n2_erasures, delay
    if tau < T + 1:
        raise ParameterError(f"tau must be at least T+1 = {T + 1}")
    size = tau + T + 1
    es, er = [0] * size, [0] * size
    seen: dict[tuple, int] = {}
    cycle = None
    n_r = sum(er[0:T + 1])  # relay erasures in [t, t+T]
    n_s = 0  # source erasures in [t-T, t-1]
    for t in range(tau + 1):
        if cycle is None:
            key = (tuple(er[t:t + T]), tuple(es[max(0, t - T):t]) if t >= T else None)
            if key[1] is not None:
                if key in seen:
                    cycle = (seen[key], t)
                else:
                    seen[key] = t
        if er[t] == 1 and n_r == N2 and n_s < N1:
            es[t] = 1
        if (es[t] == 1 and n_r <= N2) or n_r < N2:
            er[t + T] = 1
            n_r += 1
        # slide both windows to t+1
        n_r -= er[t]
        if t + T + 1 < size:
            n_r += er[t + T + 1]
        n_s += es[t]
        if t - T >= 0:
            n_s -= es[t - T]
    survivors = sum(1 - v for v in er)
    asym = start = period = None
    if cycle is not None:
        start, stop = cycle
        period = stop - start
        seg_s, seg_r = es[start:stop], er[start:stop]
        for d in range(1, period):
            if period % d == 0 and seg_s == seg_s[d:] + seg_s[:d] and seg_r == seg_r[d:] + seg_r[:d]:
                period = d
                break
        stop = start + period
        asym = Fraction(sum(1 - v for v in er[start:stop]), period)
    return HeuristicResult(
        ErasurePair(es, er, "lemma2"), tau,
        Fraction(survivors, tau), Fraction(survivors, size), asym, start, period,
    )


def heuristic_asymptotic(n1_erasures, n2_erasures, delay, tau: int = 10_000) -> Fraction:
    res = adversary_heuristic(n1_erasures, n2_erasures, delay, tau)
    return res.asymptotic if res.asymptotic is not None else res.ratio


# -- periodic brute force ------------------------------------------------------


def _cyclic_ok(src, rel, n1, n2, delay):
    P = len(src)
    for i in range(P):
        if sum(src[(i + u) % P] for u in range(delay + 1)) > n1:
            return False
        lo = 1 if src[i] else 0
        if sum(rel[(i + u) % P] for u in range(lo, delay + 1)) > n2:
            return False
    return True


def _max_relay_erasures(P, n1, n2, delay):
    """Largest number of relay erasures in a feasible period-``P`` pattern."""
    src, rel = [0] * P, [0] * P
    best = [-1, None]

    def prefix_ok(u):
        # windows lying entirely inside [0, u] and ending at u
        i = u - delay
        if i < 0:
            return True
        if sum(src[i:u + 1]) > n1:
            return False
        return sum(rel[i + src[i]:u + 1]) <= n2

    def rec(u, count):
        if count + (P - u) <= best[0]:
            return
        if u == P:
            if _cyclic_ok(src, rel, n1, n2, delay):
                best[0], best[1] = count, (tuple(src), tuple(rel))
            return
        # erasing the relay first reaches good solutions early
        for r in (1, 0):
            for s in (0, 1):
                src[u], rel[u] = s, r
                if prefix_ok(u):
                    rec(u + 1, count + r)
        src[u] = rel[u] = 0

    rec(0, 0)
    return best[0], best[1]


@dataclass(frozen=True)
class BruteForceResult:
    ratio: Fraction
    period: int
    witness: ErasurePair  # one period; repeat it for the infinite pattern
    period_cap: int


def bruteforce_bound(n1_erasures: int, n2_erasures: int, delay: int, period_cap: int) -> BruteForceResult:
    """Minimum surviving relay fraction over periodic patterns of period <= cap."""
    _check_feasible(n1_erasures, n2_erasures, delay)
    if period_cap < 1:
        raise ParameterError("period cap must be positive")
    if period_cap > MAX_PERIOD_CAP:
        raise SearchTooLarge(f"period cap {period_cap} exceeds {MAX_PERIOD_CAP}")
    best = None
    for P in range(1, period_cap + 1):
        count, wit = _max_relay_erasures(P, n1_erasures, n2_erasures, delay)
        ratio = Fraction(P - count, P)
        if best is None or ratio < best.ratio:
            best = BruteForceResult(ratio, P, ErasurePair(wit[0], wit[1], "lemma2"), period_cap)
    return best


def unroll(pair: ErasurePair, repeats: int) -> ErasurePair:
    return ErasurePair(pair.source * repeats, pair.relay * repeats, pair.mode)


# -- report -----------------------------------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    n1_erasures: int
    n2_erasures: int
    delay: int
    trivial: Fraction
    r1: Fraction
    heuristic: HeuristicResult
    bruteforce: BruteForceResult | None
    final_upper: Fraction

    @property
    def heuristic_bound(self) -> Fraction:
        h = self.heuristic
        return h.asymptotic if h.asymptotic is not None else h.ratio

    def to_dict(self) -> dict:
        def frac(v):
            return None if v is None else {"exact": str(v), "float": float(v)}

        h, b = self.heuristic, self.bruteforce
        out = {
            "n1_erasures": self.n1_erasures,
            "n2_erasures": self.n2_erasures,
            "delay": self.delay,
            "trivial": frac(self.trivial),
            "r1": frac(self.r1),
            "heuristic": {
                "tau": h.tau,
                "ratio": frac(h.ratio),
                "ratio_full_horizon": frac(h.ratio_full),
                "asymptotic": frac(h.asymptotic),
                "cycle_start": h.cycle_start,
                "period": h.period,
                "witness": h.pair.to_text(),
            },
            "bruteforce": None,
            "final_upper": frac(self.final_upper),
        }
        if b is not None:
            out["bruteforce"] = {
                "ratio": frac(b.ratio),
                "period": b.period,
                "period_cap": b.period_cap,
                "witness": b.witness.to_text(),
            }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def upper_bound(n1_erasures: int, n2_erasures: int, delay: int, tau: int = 10_000,
                period_cap: int | None = None) -> BoundReport:
    _check_feasible(n1_erasures, n2_erasures, delay)
    N1, N2, T = n1_erasures, n2_erasures, delay
    triv = trivial_bound(N2, T)
    r1 = r1_bound(N1, N2, T)
    heur = adversary_heuristic(N1, N2, T, max(tau, T + 1))
    brute = bruteforce_bound(N1, N2, T, period_cap) if period_cap else None
    second = [triv, heur.asymptotic if heur.asymptotic is not None else heur.ratio]
    if brute is not None:
        second.append(brute.ratio)
    return BoundReport(N1, N2, T, triv, r1, heur, brute, min(r1, min(second)))


def witness_is_valid(pair: ErasurePair, n1_erasures, n2_erasures, delay, periodic=False) -> bool:
    """Validity under the extended (``lemma2``) budget; periodic witnesses are checked cyclically."""
    if periodic:
        return _cyclic_ok(pair.source, pair.relay, n1_erasures, n2_erasures, delay)
    return validate_pair(pair, n1_erasures, n2_erasures, delay, "lemma2")[0]
