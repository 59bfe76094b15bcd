"""Source-side encoder: diagonal interleaving of layered systematic MDS codes.

Packet layout of ``x(t)`` (length ``n1 = layers_source * n_prime``) is
layer-major.  Sub-packet ``i`` occupies ``x[i*n' : (i+1)*n']`` and holds, in
codeword-position order,

* ``m_{i k' + j}(t)`` for ``j in [0, k')`` (systematic part), then
* parity ``a in [0, N1)`` of the diagonal ending at slot ``t - 1 - a``.

The diagonal ending at slot ``d`` is the codeword of the ``[n', k']`` code whose
systematic symbols are ``m_{i k' + j}(d - k' + 1 + j)``; its position ``p``
is transmitted at slot ``d - k' + 1 + p``.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, IncompleteHistoryError
from .field import Field, make_systematic_mds_generator
from .params import CodeParams


def diagonal_time(d: int, p: int, k_prime: int) -> int:
    """Slot at which position ``p`` of the diagonal ending at ``d`` is sent."""
    return d - k_prime + 1 + p


def diagonal_of(t: int, p: int, k_prime: int) -> int:
    """Diagonal whose position ``p`` is sent at slot ``t``."""
    return t + k_prime - 1 - p


class SourceEncoder:
    """Stateful encoder; ``encode`` must be called once per slot, in order."""

    def __init__(self, params: CodeParams, field: Field):
        self.params = params
        self.field = field
        self.generator = make_systematic_mds_generator(field, params.n_prime, params.k_prime)
        self.parity = self.generator[:, params.k_prime:]
        self._history: list[np.ndarray] = []

    @property
    def time(self) -> int:
        return len(self._history)

    def _layered(self, t: int) -> np.ndarray:
        p = self.params
        if t < 0:
            return np.zeros((p.layers_source, p.k_prime), dtype=np.int64)
        return self._history[t]

    def encode(self, message) -> np.ndarray:
        p = self.params
        message = np.asarray(message, dtype=np.int64)
        if message.shape != (p.k,):
            raise DimensionError(f"message must have {p.k} symbols, got {message.shape}")
        t = self.time
        self._history.append(message.reshape(p.layers_source, p.k_prime))
        kp, L = p.k_prime, p.layers_source
        out = np.empty((L, p.n_prime), dtype=np.int64)
        out[:, :kp] = self._history[t]
        for a in range(p.n_prime - kp):
            d = t - 1 - a
            sys = np.stack(
                [self._layered(diagonal_time(d, j, kp))[:, j] for j in range(kp)], axis=1
            )
            out[:, kp + a] = self.field.matmul(sys, self.parity[:, a])
        return out.reshape(-1)


def encode_source(params: CodeParams, field: Field, history) -> np.ndarray:
    """Source packet ``x(t)`` for ``t = len(history) - 1``.

    ``history`` lists ``m(0) .. m(t)``; slots before 0 are implicitly zero.
    """
    history = list(history)
    if not history:
        raise IncompleteHistoryError("history must contain at least m(0)")
    for t, m in enumerate(history):
        if m is None:
            raise IncompleteHistoryError(f"message for slot {t} is missing")
    # only the last n' slots influence x(t)
    t = len(history) - 1
    start = max(0, t - params.n_prime)
    enc = SourceEncoder(params, field)
    enc._history = [
        np.zeros((params.layers_source, params.k_prime), dtype=np.int64)
    ] * start
    x = None
    for m in history[start:]:
        x = enc.encode(m)
    return x


def systematic_part(params: CodeParams, x) -> np.ndarray:
    """Extract ``m(t)`` from a received source packet."""
    x = np.asarray(x, dtype=np.int64).reshape(params.layers_source, params.n_prime)
    return x[:, : params.k_prime].reshape(-1).copy()
