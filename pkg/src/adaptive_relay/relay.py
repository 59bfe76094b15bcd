"""Adaptive relay: forwards received source packets and estimates of erased ones.

Each relay packet ``y(s)`` carries, in order,

1. for every received ``x(t')`` with ``t'`` in ``[s-T, s]``: ``layers_relay``
   symbols at position ``s - t'`` of the ``[T+1, k'']`` diagonal code applied
   to consecutive groups of ``k''`` message symbols, then
2. for every erased ``x(t0)`` with ``t0`` in ``[s-T, s-1]``: the next
   ``alpha`` symbols of the long systematic code over its ``k`` estimates,

zero-padded to ``n2`` symbols.  The header is the first-link erasure flags of
slots ``[s-T, s]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InternalFault, SequencingError
from .field import CauchyCode, Field, make_systematic_mds_generator
from .params import CodeParams, check_field_capacity
from .schedule import SYSTEMATIC, RelaySchedule
from .source import systematic_part


@dataclass
class RelayPacket:
    time: int
    payload: np.ndarray
    header: tuple[int, ...]  # first-link flags of slots time-T .. time
    fill: int

    def header_slots(self, delay: int):
        return [(self.time - delay + b, f) for b, f in enumerate(self.header)
                if self.time - delay + b >= 0]

    def to_symbols(self, field_order: int, header_symbols: int) -> np.ndarray:
        """Wire form: header bits packed little-endian in base ``q``, then payload."""
        value = sum(bit << b for b, bit in enumerate(self.header))
        head = []
        for _ in range(header_symbols):
            value, digit = divmod(value, field_order)
            head.append(digit)
        if value:
            raise DimensionError("header does not fit in the header symbols")
        return np.concatenate([np.asarray(head, dtype=np.int64), self.payload])

    @classmethod
    def from_symbols(cls, time, symbols, delay, field_order, header_symbols):
        symbols = np.asarray(symbols, dtype=np.int64)
        value = 0
        for digit in reversed(symbols[:header_symbols].tolist()):
            value = value * field_order + int(digit)
        header = tuple((value >> b) & 1 for b in range(delay + 1))
        if value >> (delay + 1):
            raise DimensionError("header carries bits beyond the window")
        payload = symbols[header_symbols:].copy()
        return cls(time, payload, header, -1)


@dataclass(frozen=True)
class Estimate:
    """A single relay estimate and the earlier symbols it still contains."""

    source_time: int
    symbol: int  # index within m(source_time)
    value: int
    found_at: int
    interference: tuple  # ((slot, symbol index, coefficient), ...)


class RelayNode:
    def __init__(self, params: CodeParams, field: Field | None = None):
        check_field_capacity(params)
        self.params = params
        self.field = field or Field(params.field_order)
        self.schedule = RelaySchedule(params, self.field)
        p = params
        self.relay_generator = make_systematic_mds_generator(self.field, p.n_dprime, p.k_dprime)
        self.long_code = CauchyCode(self.field, p.k, max(p.k + 1, p.delay * p.layers_source))
        self._packets: dict[int, np.ndarray] = {}  # received x(t) as (layers, n')
        self._relay_words: dict[int, np.ndarray] = {}  # (layers_relay, T+1)
        self._estimates: dict[int, np.ndarray] = {}
        self._found: dict[int, int] = {}
        self._ledger: dict[int, list[Estimate]] = {}

    @property
    def time(self) -> int:
        return self.schedule.time

    def ingest(self, t: int, packet) -> list[Estimate]:
        """Receive ``x(t)`` (``None`` if erased); returns estimates found now."""
        p = self.params
        if t != self.time:
            raise SequencingError(f"expected slot {self.time}, got {t}")
        if packet is not None:
            packet = np.asarray(packet, dtype=np.int64)
            if packet.shape != (p.n1,):
                raise DimensionError(f"source packet must have {p.n1} symbols")
        plans = self.schedule.advance(packet is None)
        horizon = t - p.delay - p.n_prime
        for old in [u for u in self._packets if u < horizon]:
            del self._packets[old]
        for old in [u for u in self._relay_words if u < t - p.delay]:
            del self._relay_words[old]
        for old in [u for u in self._estimates if u < t - p.delay]:
            del self._estimates[old], self._found[old]
        if packet is not None:
            self._packets[t] = packet.reshape(p.layers_source, p.n_prime)
            msg = systematic_part(p, packet).reshape(p.layers_relay, p.k_dprime)
            self._relay_words[t] = self.field.matmul(msg, self.relay_generator)
        else:
            self._estimates[t] = np.zeros(p.k, dtype=np.int64)
            self._found[t] = 0
            self._ledger[t] = []
        return [e for plan in plans for e in self._apply(plan)]

    def _apply(self, plan) -> list[Estimate]:
        F, p = self.field, self.params
        L, kp = p.layers_source, p.k_prime
        val = np.zeros(L, dtype=np.int64)
        for tp, pos, c in plan.parity_terms + plan.known_terms:
            val = F.add(val, F.mul(self._packets[tp][:, pos], c))
        t0 = plan.source_time
        base = self._found[t0] * L
        self._estimates[t0][base:base + L] = val
        self._found[t0] += 1
        out = [
            Estimate(
                t0, i * kp + plan.position, int(val[i]), plan.found_at,
                tuple((tp, i * kp + pos, c) for tp, pos, c in plan.interference),
            )
            for i in range(L)
        ]
        self._ledger[t0].extend(out)
        return out

    def emit(self, t: int) -> RelayPacket:
        p = self.params
        if t != self.time - 1:
            raise SequencingError(f"relay can only emit slot {self.time - 1}, asked for {t}")
        payload = np.zeros(p.n2, dtype=np.int64)
        off = 0
        for seg in self.schedule.layouts[t]:
            if seg.kind == SYSTEMATIC:
                vals = self._relay_words[seg.source_time][:, seg.start]
            else:
                est = self._estimates[seg.source_time]
                have = self._found[seg.source_time] * p.layers_source
                if seg.start + seg.length > have and have < p.k:
                    raise InternalFault(f"long-code symbols of x({seg.source_time}) requested too early")
                vals = self.long_code.symbols(est, seg.start, seg.length)
            payload[off:off + seg.length] = vals
            off += seg.length
        if off > p.n2:
            raise InternalFault(f"relay packet overflow: {off} > {p.n2}")
        T = p.delay
        header = tuple(self.schedule.flag(u) if u >= 0 else 0 for u in range(t - T, t + 1))
        return RelayPacket(t, payload, header, off)

    def step(self, t: int, packet) -> RelayPacket:
        self.ingest(t, packet)
        return self.emit(t)

    def estimates(self, t0: int) -> list[Estimate]:
        """Estimates of erased ``x(t0)`` found so far, in discovery order."""
        return list(self._ledger.get(t0, []))

    def kappa(self, t0: int) -> int:
        return len(self._ledger.get(t0, []))


def relay_trace(params: CodeParams, field: Field, source_packets) -> list[RelayPacket]:
    """Run a relay over ``source_packets`` (``None`` for erased slots)."""
    node = RelayNode(params, field)
    return [node.step(t, x) for t, x in enumerate(source_packets)]
