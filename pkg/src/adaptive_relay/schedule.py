"""Deterministic relay bookkeeping shared by the relay and the destination.

Everything here depends only on the first-link erasure flags, which the relay
observes and the destination learns from packet headers.  Both sides replay
the same :class:`RelaySchedule`, so they agree on

* which linear combination of received source symbols estimates each
  symbol of an erased source packet (an :class:`EstimatePlan`),
* how many long-code symbols of each erased packet go into every relay
  packet (the per-slot ``alpha`` values), and
* the exact payload layout of every relay packet.

Estimating symbol ``j`` (in every layer) of an erased ``x(t0)`` works inside
the diagonal that holds it.  Unknown diagonal positions sent after ``t0`` must
be eliminated with received parities; unknown positions sent before ``t0``
belong to already-decoded earlier messages at the destination and are left
as interference with recorded coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ChannelContractViolation, SequencingError
from .field import Field, make_systematic_mds_generator
from .params import CodeParams

# payload segment kinds
SYSTEMATIC = "sys"  # relay diagonal code symbols of a received x(t')
LONG = "long"  # long-code symbols of an erased x(t0)

# estimate recipes depend only on the flags around the diagonal, so they are
# shared between schedules (and sessions) with the same parameters
_PLAN_CACHE: dict = {}
_PLAN_CACHE_SIZE = 200_000


@dataclass(frozen=True)
class Segment:
    kind: str
    source_time: int
    start: int  # codeword position (sys) or long-code offset (long)
    length: int


@dataclass(frozen=True)
class EstimatePlan:
    """Recipe for the estimate of symbol ``position`` of ``x(source_time)``.

    Terms are ``(slot, diagonal position, coefficient)``; the same recipe
    applies to every layer.  Coefficients are ``None`` in structural mode.
    """

    source_time: int
    found_at: int
    position: int
    parity_terms: tuple
    known_terms: tuple
    interference: tuple


@dataclass
class ErasedState:
    time: int
    pending: set
    plans: list = dc_field(default_factory=list)
    alphas: list = dc_field(default_factory=list)
    kappas: list = dc_field(default_factory=list)

    @property
    def sent(self) -> int:
        return sum(self.alphas)


def compute_alpha(ell_j, k, kappa, sent, j, erased_now):
    """One step of the long-code allocation for an erased packet."""
    if j >= len(ell_j):
        raise ChannelContractViolation(f"{j} later erasures inside one window")
    if not erased_now or kappa == k:
        return ell_j[j]
    return min(ell_j[j], kappa - sent)


def compute_alphas(params: CodeParams, flags, kappas) -> list[int]:
    """Long-code allocation of an erased slot ``t`` over ``t+1 .. t+T``.

    ``flags[i]`` is the first-link flag of slot ``t+i`` (``flags[0]`` must be
    1) and ``kappas[i-1]`` the number of estimates available at ``t+i``.
    """
    if not flags or not flags[0]:
        raise ValueError("the first slot must be erased")
    out = []
    for i in range(1, min(len(flags), params.delay + 1)):
        j = sum(flags[1:i])
        out.append(compute_alpha(params.ell_j, params.k, kappas[i - 1], sum(out), j, flags[i]))
    return out


class RelaySchedule:
    def __init__(self, params: CodeParams, field: Field | None = None, layout: bool = True):
        self.params = params
        self.field = field
        self.layout = layout
        self.flags: list[int] = []
        self.erased: dict[int, ErasedState] = {}
        self.layouts: list[list[Segment]] = []
        self.fills: list[int] = []
        self._key = (params.n1_erasures, params.n2_erasures, params.delay,
                     field.q if field is not None else None)
        if field is not None:
            g = make_systematic_mds_generator(field, params.n_prime, params.k_prime)
            self.source_parity = g[:, params.k_prime:]
        else:
            self.source_parity = None

    @property
    def time(self) -> int:
        """Number of slots already scheduled."""
        return len(self.flags)

    def flag(self, t: int) -> int:
        return self.flags[t] if t >= 0 else 0

    # -- estimates ---------------------------------------------------------
    def _plan(self, t0: int, j: int, s: int) -> EstimatePlan | None:
        kp = self.params.k_prime
        d = t0 + kp - 1 - j
        lo = d - kp + 1
        # 2 marks slots before the session start
        window = tuple(self.flags[u] if u >= 0 else 2 for u in range(lo, s + 1))
        key = (self._key, j, s - t0, window)
        rel = _PLAN_CACHE.get(key)
        if rel is None:
            rel = self._relative_plan(j, s - t0, window)
            if len(_PLAN_CACHE) > _PLAN_CACHE_SIZE:
                _PLAN_CACHE.clear()
            _PLAN_CACHE[key] = rel
        if rel is False:
            return None
        return EstimatePlan(
            t0, s, j, *(tuple((t0 + dt, a, c) for dt, a, c in terms) for terms in rel)
        )

    def _relative_plan(self, j, offset, window):
        """Plan with slot numbers relative to the erased slot, or False."""
        p = self.params
        kp, n_p = p.k_prime, p.n_prime
        t0 = j  # position j of the diagonal is the erased slot
        s = t0 + offset
        later, earlier, known, parities = [], [], [], []
        for pos in range(kp):
            if pos == j or (pos <= s and window[pos] == 2):
                continue
            if pos > s or window[pos]:
                (earlier if pos < t0 else later).append(pos)
            else:
                known.append(pos)
        for pos in range(kp, n_p):
            if pos <= s and not window[pos]:
                parities.append(pos)
        need = len(later) + 1
        if len(parities) < need:
            return False
        use = parities[:need]
        if self.field is None:
            return tuple(tuple((a - t0, a, None) for a in terms) for terms in (use, known, earlier))
        F, P = self.field, self.source_parity
        cols = [a - kp for a in use]
        rows = [j] + later
        rhs = np.zeros(need, dtype=np.int64)
        rhs[0] = 1
        # sum_c w_c P[r, c] = [r == j] for r in rows
        w = F.solve(P[np.ix_(rows, cols)], rhs)
        mu = F.neg(F.matmul(P[np.ix_(known, cols)], w)) if known else []
        lam = F.matmul(P[np.ix_(earlier, cols)], w) if earlier else []
        return (
            tuple((a - t0, a, int(c)) for a, c in zip(use, w)),
            tuple((a - t0, a, int(c)) for a, c in zip(known, mu)),
            tuple((a - t0, a, int(c)) for a, c in zip(earlier, lam) if c),
        )

    # -- main step ---------------------------------------------------------
    def advance(self, erased: int) -> list[EstimatePlan]:
        """Schedule slot ``self.time`` given its first-link flag."""
        p = self.params
        T, s = p.delay, self.time
        erased = int(bool(erased))
        self.flags.append(erased)
        window = sum(self.flags[max(0, s - T):])
        if window > p.n1_erasures:
            raise ChannelContractViolation(
                f"{window} first-link erasures in the window ending at slot {s}"
            )

        for t0 in [t for t in self.erased if t < s - T]:
            del self.erased[t0]

        new = []
        if not erased:
            for t0 in sorted(self.erased):
                st = self.erased[t0]
                for j in sorted(st.pending, reverse=True):
                    plan = self._plan(t0, j, s)
                    if plan is not None:
                        st.plans.append(plan)
                        st.pending.discard(j)
                        new.append(plan)

        segments, fill = [], 0
        if self.layout:
            for tp in range(max(0, s - T), s + 1):
                if not self.flags[tp]:
                    segments.append(Segment(SYSTEMATIC, tp, s - tp, p.layers_relay))
        else:
            fill = p.layers_relay * sum(1 - f for f in self.flags[max(0, s - T):])

        for t0 in sorted(self.erased):
            st = self.erased[t0]
            j = sum(self.flags[t0 + 1:s])
            kappa = p.layers_source * len(st.plans)
            alpha = compute_alpha(p.ell_j, p.k, kappa, st.sent, j, erased)
            if self.layout and alpha:
                segments.append(Segment(LONG, t0, st.sent, alpha))
            fill += alpha
            st.alphas.append(alpha)
            st.kappas.append(kappa)

        if erased:
            self.erased[s] = ErasedState(s, set(range(p.k_prime)))
        if self.layout:
            fill = sum(seg.length for seg in segments)
            self.layouts.append(segments)
        self.fills.append(fill)
        return new

    def advance_many(self, flags):
        for f in flags:
            self.advance(f)
        return self

    def state(self, t0: int) -> ErasedState:
        if t0 not in self.erased:
            raise SequencingError(f"slot {t0} is not a tracked erased slot")
        return self.erased[t0]


def alpha_trace(params: CodeParams, source_flags, t0: int) -> list[int]:
    """``alpha`` values of erased ``x(t0)`` for slots ``t0+1 .. t0+T``."""
    if not source_flags[t0]:
        raise ValueError(f"x({t0}) is not erased")
    T = params.delay
    flags = list(source_flags[: t0 + T + 1])
    flags += [0] * (t0 + T + 1 - len(flags))
    sched = RelaySchedule(params, layout=False)
    trace = None
    for s, f in enumerate(flags):
        sched.advance(f)
        if s == t0 + T:
            trace = list(sched.erased[t0].alphas)
    return trace
