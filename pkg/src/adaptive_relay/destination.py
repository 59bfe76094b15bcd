"""Destination decoder: recovers every ``m(t)`` by slot ``t + T``."""

from __future__ import annotations

import numpy as np

from .channel import MODES
from .errors import (
    ChannelContractViolation,
    DecodingFailure,
    DimensionError,
    InternalFault,
    ParameterError,
)
from .field import CauchyCode, Field, make_systematic_mds_generator
from .params import CodeParams, check_field_capacity
from .relay import RelayPacket
from .schedule import SYSTEMATIC, RelaySchedule


# inverse of the surviving columns of the diagonal code, keyed by positions
_DIAGONAL_DECODERS: dict = {}


class DestinationDecoder:
    """Consumes one relay packet (or ``None``) per slot.

    The first-link history is rebuilt from headers and fed to a replica of
    the relay schedule, so the decoder knows the layout of every packet and
    the interference coefficients of every estimate.  ``mode`` selects which
    second-link budget is enforced; ``enforce_budget=False`` skips the
    second-link check so that decoding beyond the budget can be studied.
    """

    def __init__(self, params: CodeParams, field: Field | None = None, mode: str = "window",
                 enforce_budget: bool = True):
        if mode not in MODES:
            raise ParameterError(f"unknown budget mode {mode!r}")
        check_field_capacity(params)
        self.params = params
        self.mode = mode
        self.enforce_budget = enforce_budget
        self.field = field or Field(params.field_order)
        p = params
        self.schedule = RelaySchedule(p, self.field)
        self.relay_generator = make_systematic_mds_generator(self.field, p.n_dprime, p.k_dprime)
        self.long_code = CauchyCode(self.field, p.k, max(p.k + 1, p.delay * p.layers_source))
        self.source_flags: list[int | None] = []
        self.received: list[int] = []
        self._unparsed: list[RelayPacket] = []
        self._sys: dict[int, dict[int, np.ndarray]] = {}
        self._long: dict[int, list[tuple[int, np.ndarray]]] = {}
        self._plans: dict[int, list] = {}
        self.decoded: dict[int, np.ndarray] = {}

    @property
    def time(self) -> int:
        return len(self.received)

    def _merge_header(self, pkt: RelayPacket):
        T = self.params.delay
        for u, f in pkt.header_slots(T):
            while len(self.source_flags) <= u:
                self.source_flags.append(None)
            known = self.source_flags[u]
            if known is None:
                self.source_flags[u] = f
            elif known != f:
                raise InternalFault(f"headers disagree about slot {u}")

    def _catch_up(self):
        sched = self.schedule
        while sched.time < len(self.source_flags) and self.source_flags[sched.time] is not None:
            t = sched.time
            for plan in sched.advance(self.source_flags[t]):
                self._plans.setdefault(plan.source_time, []).append(plan)
        keep = []
        for pkt in self._unparsed:
            if pkt.time < sched.time:
                self._parse(pkt)
            else:
                keep.append(pkt)
        self._unparsed = keep

    def _parse(self, pkt: RelayPacket):
        off = 0
        for seg in self.schedule.layouts[pkt.time]:
            vals = pkt.payload[off:off + seg.length]
            off += seg.length
            if seg.kind == SYSTEMATIC:
                self._sys.setdefault(seg.source_time, {})[seg.start] = vals
            else:
                self._long.setdefault(seg.source_time, []).append((seg.start, vals))

    def _check_windows(self, s: int):
        p = self.params
        T = p.delay
        # first-link windows are enforced by the schedule replica
        i = s - T
        if i < 0 or not self.enforce_budget:
            return
        lo = i
        if self.mode == "lemma2":
            flag = self.source_flags[i] if i < len(self.source_flags) else None
            if flag is None:
                raise ChannelContractViolation(f"no header revealed the first-link state of slot {i}")
            lo = i + flag
        lost = sum(1 - r for r in self.received[lo:s + 1])
        if lost > p.n2_erasures:
            raise ChannelContractViolation(
                f"{lost} second-link erasures in the window starting at slot {i}"
            )

    def ingest(self, packet: RelayPacket | None) -> list[tuple[int, np.ndarray]]:
        """Process slot ``self.time``; returns messages whose deadline is now."""
        p = self.params
        s = self.time
        if packet is not None:
            if packet.time != s:
                raise DimensionError(f"packet for slot {packet.time} arrived at slot {s}")
            if len(packet.payload) != p.n2:
                raise DimensionError(f"relay payload must have {p.n2} symbols")
            self._merge_header(packet)
            self._unparsed.append(packet)
        self.received.append(int(packet is not None))
        self._catch_up()
        self._check_windows(s)
        t = s - p.delay
        if t < 0:
            return []
        msg = self._decode(t)
        self.decoded[t] = msg
        self._forget(t)
        return [(t, msg)]

    def _forget(self, t):
        T = self.params.delay
        self._sys.pop(t, None)
        self._long.pop(t, None)
        self._plans.pop(t, None)
        for old in [u for u in self.decoded if u < t - T - self.params.n_prime]:
            del self.decoded[old]

    def _decode(self, t: int) -> np.ndarray:
        p = self.params
        flag = self.source_flags[t] if t < len(self.source_flags) else None
        if flag is None:
            raise DecodingFailure(f"first-link state of slot {t} unknown at its deadline", t)
        if not flag:
            got = self._sys.get(t, {})
            if len(got) < p.k_dprime:
                raise DecodingFailure(f"only {len(got)} diagonal symbols of m({t}) arrived", t)
            pos = tuple(sorted(got))
            vals = np.stack([got[u] for u in pos])
            msg = self._decode_diagonals(pos, vals)
            if msg is None:
                raise InternalFault(f"diagonal symbols of m({t}) are inconsistent")
            return msg.T.reshape(-1)
        return self._decode_erased(t)

    def _decode_diagonals(self, pos, vals):
        """Decode all sub-packets sharing the surviving positions ``pos``."""
        F, kd = self.field, self.params.k_dprime
        key = (F.q, self.params.n_dprime, kd, pos)
        entry = _DIAGONAL_DECODERS.get(key)
        if entry is None:
            g = self.relay_generator
            entry = (F.inverse(g[:, list(pos[:kd])]).T, g[:, list(pos[kd:])].T)
            _DIAGONAL_DECODERS[key] = entry
        solve, check = entry
        msg = F.matmul(solve, vals[:kd])
        if len(pos) > kd and not np.array_equal(F.matmul(check, msg), vals[kd:]):
            return None
        return msg

    def _decode_erased(self, t: int) -> np.ndarray:
        F, p = self.field, self.params
        L, kp = p.layers_source, p.k_prime
        segs = self._long.get(t, [])
        positions = np.concatenate([np.arange(o, o + len(v)) for o, v in segs]) if segs else np.array([], int)
        if positions.size < p.k:
            raise DecodingFailure(f"only {positions.size} long-code symbols of m({t}) arrived", t)
        values = np.concatenate([v for _, v in segs])
        est = self.long_code.decode(positions, values)
        plans = self._plans.get(t, [])
        if len(plans) < kp:
            raise DecodingFailure(f"estimate plans of m({t}) incomplete at its deadline", t)
        msg = np.zeros((L, kp), dtype=np.int64)
        for idx, plan in enumerate(plans):
            val = est[idx * L:(idx + 1) * L]
            for tp, pos, c in plan.interference:
                earlier = self.decoded[tp].reshape(L, kp)[:, pos]
                val = F.sub(val, F.mul(earlier, c))
            msg[:, plan.position] = val
        return msg.reshape(-1)


def reconstruct_first_link_history(packets, delay: int) -> list[int | None]:
    """Merge the headers of received relay packets into first-link flags."""
    flags: list[int | None] = []
    for pkt in packets:
        if pkt is None:
            continue
        for u, f in pkt.header_slots(delay):
            while len(flags) <= u:
                flags.append(None)
            if flags[u] is not None and flags[u] != f:
                raise InternalFault(f"headers disagree about slot {u}")
            flags[u] = f
    return flags
