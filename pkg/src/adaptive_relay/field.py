"""Finite-field arithmetic and the linear algebra used by every code in the package.

Field elements are plain integers in ``[0, q)``.  For ``q = p**m`` an element
encodes the coefficients of a polynomial over GF(p) in base ``p`` (least
significant digit is the constant term), so GF(2^m) elements are the usual
bit-vectors.  Vectors and matrices are numpy ``int64`` arrays.

Systematic MDS generators are ``[I_k | C]`` with ``C`` a Cauchy matrix built
on the evaluation points ``x_i = i`` (rows) and ``y_j = k + j`` (parity
columns).  Parity column ``j`` therefore depends only on ``k`` and ``j``, so a
length-``n`` code is a puncturing of every longer one with the same ``k``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import (
    CodeLengthError,
    DecodeInconsistencyError,
    DimensionError,
    FieldError,
    InsufficientSymbolsError,
    SingularSystemError,
)

DEFAULT_FIELD_ORDER = 2**16

# x^m + ... for GF(2^m); verified at table construction, searched if absent.
_BINARY_PRIMITIVE = {
    1: 0x3, 2: 0x7, 3: 0xB, 4: 0x13, 5: 0x25, 6: 0x43, 7: 0x89, 8: 0x11D,
    9: 0x211, 10: 0x409, 11: 0x805, 12: 0x1053, 13: 0x201B, 14: 0x4443,
    15: 0x8003, 16: 0x1100B,
}

_MAX_ORDER = 2**20
_MATMUL_CHUNK = 1 << 22


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``q == p**m`` for prime ``p``, else None."""
    if q < 2:
        return None
    p = next((d for d in range(2, int(q**0.5) + 1) if q % d == 0), q)
    m, r = 0, q
    while r % p == 0:
        r //= p
        m += 1
    return (p, m) if r == 1 else None


def _binary_tables(m: int, poly: int):
    q = 1 << m
    exp = np.zeros(2 * q, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    x = 1
    for i in range(q - 1):
        if i and x == 1:
            return None
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & q:
            x ^= poly
    if x != 1:
        return None
    return exp, log


def _generic_tables(p: int, m: int, low: list[int]):
    # low: coefficients c_0..c_{m-1} of the monic modulus x^m + sum c_i x^i
    q = p**m
    exp = np.zeros(2 * q, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    digits = [1] + [0] * (m - 1)
    weights = [p**i for i in range(m)]
    for i in range(q - 1):
        val = sum(d * w for d, w in zip(digits, weights))
        if i and val == 1:
            return None
        exp[i] = val
        log[val] = i
        top = digits[-1]
        digits = [0] + digits[:-1]
        digits = [(d - top * c) % p for d, c in zip(digits, low)]
    if digits != [1] + [0] * (m - 1):
        return None
    return exp, log


@lru_cache(maxsize=None)
def _tables(p: int, m: int):
    if p == 2:
        if m in _BINARY_PRIMITIVE:
            t = _binary_tables(m, _BINARY_PRIMITIVE[m])
            if t is not None:
                return t
        for poly in range((1 << m) | 1, 1 << (m + 1), 2):
            t = _binary_tables(m, poly)
            if t is not None:
                return t
    else:
        q = p**m
        for code in range(1, q):
            low = [(code // p**i) % p for i in range(m)]
            if low[0] == 0:
                continue
            t = _generic_tables(p, m, low)
            if t is not None:
                return t
    raise FieldError(f"no primitive polynomial found for GF({p}^{m})")


class Field:
    """GF(q) with vectorised arithmetic on integer arrays."""

    def __init__(self, q: int = DEFAULT_FIELD_ORDER):
        pm = prime_power(q)
        if pm is None:
            raise FieldError(f"field order {q} is not a prime power")
        if q > _MAX_ORDER:
            raise FieldError(f"field order {q} exceeds supported maximum {_MAX_ORDER}")
        self.q = q
        self.p, self.m = pm
        exp, log = _tables(self.p, self.m)
        exp[q - 1:2 * q - 2] = exp[: q - 1]
        self._exp = exp
        self._log = log
        self._weights = [self.p**i for i in range(self.m)]

    def __repr__(self):
        return f"Field({self.q})"

    def __eq__(self, other):
        return isinstance(other, Field) and other.q == self.q

    def __hash__(self):
        return hash(("Field", self.q))

    # -- elementwise ------------------------------------------------------
    def add(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._weights:
            out += ((a // w + b // w) % self.p) * w
        return out

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        out = np.zeros_like(a)
        for w in self._weights:
            out += ((-(a // w)) % self.p) * w
        return out

    def sub(self, a, b):
        if self.p == 2:
            return np.asarray(a, dtype=np.int64) ^ np.asarray(b, dtype=np.int64)
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def prod(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        zero = np.any(a == 0, axis=axis)
        out = self._exp[np.sum(self._log[a], axis=axis) % (self.q - 1)]
        return np.where(zero, 0, out)

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis) if a.size else np.zeros(
                np.sum(a, axis=axis).shape, dtype=np.int64)
        if self.m == 1:
            return np.sum(a, axis=axis) % self.p
        if axis is None:
            a, axis = a.ravel(), 0
        a = np.moveaxis(a, axis, 0)
        out = np.zeros(a.shape[1:], dtype=np.int64)
        for row in a:
            out = self.add(out, row)
        return out

    def random(self, shape, rng):
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    # -- matrices -----------------------------------------------------------
    def matmul(self, a, b):
        """Matrix product; 1-D operands behave as in ``numpy.matmul``."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        a2 = a[None, :] if a.ndim == 1 else a
        b2 = b[:, None] if b.ndim == 1 else b
        if a2.shape[1] != b2.shape[0]:
            raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
        rows, inner = a2.shape
        cols = b2.shape[1]
        if inner == 0:
            out = np.zeros((rows, cols), dtype=np.int64)
        else:
            step = max(1, _MATMUL_CHUNK // max(1, inner * cols))
            blocks = []
            for r0 in range(0, rows, step):
                prods = self.mul(a2[r0:r0 + step, :, None], b2[None, :, :])
                blocks.append(self.sum(prods, axis=1))
            out = np.concatenate(blocks, axis=0) if blocks else np.zeros((0, cols), np.int64)
        if a.ndim == 1:
            out = out[0]
        if b.ndim == 1:
            out = out[..., 0]
        return out

    def solve(self, a, b):
        """Solve ``a @ x = b`` by Gauss-Jordan elimination (``b`` may be a matrix)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"coefficient matrix must be square, got {a.shape}")
        n = a.shape[0]
        vector = b.ndim == 1
        b2 = b[:, None] if vector else b
        if b2.shape[0] != n:
            raise DimensionError(f"right-hand side has {b2.shape[0]} rows, expected {n}")
        work = np.concatenate([a, b2], axis=1)
        for col in range(n):
            nz = np.flatnonzero(work[col:, col])
            if nz.size == 0:
                raise SingularSystemError("matrix is singular")
            piv = col + nz[0]
            if piv != col:
                work[[col, piv]] = work[[piv, col]]
            work[col] = self.mul(work[col], self.inv(work[col, col]))
            factors = work[:, col].copy()
            factors[col] = 0
            if np.any(factors):
                work = self.sub(work, self.mul(factors[:, None], work[col][None, :]))
        x = work[:, n:]
        return x[:, 0] if vector else x

    def inverse(self, a):
        a = np.asarray(a, dtype=np.int64)
        return self.solve(a, np.eye(a.shape[0], dtype=np.int64))

    def rank(self, a) -> int:
        work = np.array(a, dtype=np.int64, copy=True)
        rows, cols = work.shape
        r = 0
        for col in range(cols):
            if r == rows:
                break
            nz = np.flatnonzero(work[r:, col])
            if nz.size == 0:
                continue
            piv = r + nz[0]
            work[[r, piv]] = work[[piv, r]]
            work[r] = self.mul(work[r], self.inv(work[r, col]))
            factors = work[:, col].copy()
            factors[r] = 0
            work = self.sub(work, self.mul(factors[:, None], work[r][None, :]))
            r += 1
        return r

    # -- Cauchy structure -----------------------------------------------------
    def cauchy(self, xs, ys):
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        return self.inv(self.sub(xs[:, None], ys[None, :]))

    def cauchy_inverse(self, xs, ys):
        """Closed-form inverse of the square Cauchy matrix ``1/(x_i - y_j)``."""
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        n = xs.size
        if ys.size != n:
            raise DimensionError("Cauchy inverse needs as many x points as y points")
        if n == 0:
            return np.zeros((0, 0), dtype=np.int64)
        xy = self.sub(xs[:, None], ys[None, :])  # x_a - y_b
        xx = self.sub(xs[:, None], xs[None, :])
        yy = self.sub(ys[:, None], ys[None, :])
        np.fill_diagonal(xx, 1)
        np.fill_diagonal(yy, 1)
        px = self.prod(xy, axis=1)  # prod_b (x_a - y_b)
        py = self.prod(xy, axis=0)  # prod_a (x_a - y_b)
        qx = self.prod(xx, axis=1)  # prod_{b != a} (x_a - x_b)
        qy = self.prod(yy, axis=1)  # prod_{b != a} (y_a - y_b)
        # (C^-1)[i, j] = (-1)^(n-1) px[j] py[i] / ((x_j - y_i) qx[j] qy[i])
        num = self.mul(py[:, None], px[None, :])
        den = self.mul(self.mul(xy.T, qy[:, None]), qx[None, :])
        out = self.div(num, den)
        return self.neg(out) if n % 2 == 0 else out


# -- systematic MDS codes -----------------------------------------------------


def cauchy_parity(field: Field, k: int, start: int, count: int) -> np.ndarray:
    """Parity columns ``start .. start+count-1`` of the systematic Cauchy code."""
    xs = np.arange(k, dtype=np.int64)
    ys = np.arange(k + start, k + start + count, dtype=np.int64)
    return field.cauchy(xs, ys)


def make_systematic_mds_generator(field: Field, n: int, k: int) -> np.ndarray:
    """Deterministic ``k x n`` generator ``[I_k | C]`` of an [n, k] MDS code."""
    if not 1 <= k <= n:
        raise DimensionError(f"need 1 <= k <= n, got n={n}, k={k}")
    if n >= field.q:
        raise CodeLengthError(f"code length {n} needs a field larger than {field.q}")
    return np.concatenate(
        [np.eye(k, dtype=np.int64), cauchy_parity(field, k, 0, n - k)], axis=1
    )


def solve_linear_system(field: Field, a, b) -> np.ndarray:
    return field.solve(a, b)


def mds_encode(field: Field, g, message) -> np.ndarray:
    g = np.asarray(g, dtype=np.int64)
    message = np.asarray(message, dtype=np.int64)
    if message.shape[0] != g.shape[0]:
        raise DimensionError(f"message length {message.shape[0]} != k={g.shape[0]}")
    return field.matmul(message, g) if message.ndim == 1 else field.matmul(g.T, message)


def _is_systematic(g: np.ndarray) -> bool:
    k = g.shape[0]
    return g.shape[1] >= k and np.array_equal(g[:, :k], np.eye(k, dtype=np.int64))


def mds_decode_from_subset(field: Field, g, positions, values) -> np.ndarray:
    """Recover the message from codeword coordinates ``positions``.

    ``values`` is ``(len(positions),)`` for one codeword or
    ``(len(positions), B)`` for B codewords sharing the erasure pattern.
    """
    g = np.asarray(g, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)
    positions = [int(p) for p in positions]
    k, n = g.shape
    if len(set(positions)) != len(positions):
        raise DimensionError("positions must be distinct")
    if any(not 0 <= p < n for p in positions):
        raise DimensionError("position outside the code")
    if values.shape[0] != len(positions):
        raise DimensionError("one value per position required")
    if len(positions) < k:
        raise InsufficientSymbolsError(f"{len(positions)} symbols survive, need {k}")
    vector = values.ndim == 1
    vals = values[:, None] if vector else values
    order = sorted(range(len(positions)), key=lambda i: positions[i])
    pos = [positions[i] for i in order]
    vals = vals[order]

    if _is_systematic(g):
        msg = _systematic_decode(field, g, pos, vals, k)
    else:
        chosen = _independent_columns(field, g, pos, k)
        idx = [pos.index(c) for c in chosen]
        msg = field.solve(g[:, chosen].T, vals[idx])

    check = field.matmul(g[:, pos].T, msg)
    if not np.array_equal(check, vals):
        raise DecodeInconsistencyError("surviving symbols are not a codeword")
    return msg[:, 0] if vector else msg


def _systematic_decode(field, g, pos, vals, k):
    known = [i for i, p in enumerate(pos) if p < k]
    parity = [i for i, p in enumerate(pos) if p >= k]
    missing = sorted(set(range(k)) - {pos[i] for i in known})
    msg = np.zeros((k, vals.shape[1]), dtype=np.int64)
    for i in known:
        msg[pos[i]] = vals[i]
    if missing:
        use = parity[: len(missing)]
        cols = [pos[i] for i in use]
        known_rows = [pos[i] for i in known]
        rhs = vals[use]
        if known_rows:
            rhs = field.sub(rhs, field.matmul(g[np.ix_(known_rows, cols)].T, msg[known_rows]))
        msg[missing] = field.solve(g[np.ix_(missing, cols)].T, rhs)
    return msg


def _independent_columns(field, g, pos, k):
    chosen = []
    for p in pos:
        trial = chosen + [p]
        if field.rank(g[:, trial]) == len(trial):
            chosen = trial
        if len(chosen) == k:
            return chosen
    raise SingularSystemError("surviving columns do not span the code")


class CauchyCode:
    """Systematic Cauchy MDS code with a fast erasure decoder.

    ``n_max`` bounds the length; shorter codes with the same ``k`` are
    prefixes, which lets an encoder emit parities before the final length is
    known.
    """

    def __init__(self, field: Field, k: int, n_max: int):
        if n_max >= field.q:
            raise CodeLengthError(f"code length {n_max} needs a field larger than {field.q}")
        if not 1 <= k <= n_max:
            raise DimensionError(f"need 1 <= k <= n, got n={n_max}, k={k}")
        self.field = field
        self.k = k
        self.n_max = n_max
        self.parity = cauchy_parity(field, k, 0, n_max - k)

    def parity_symbols(self, message, start, count):
        """Parity code symbols at codeword positions ``k+start .. k+start+count-1``."""
        return self.field.matmul(message, self.parity[:, start:start + count])

    def symbols(self, message, start, count):
        """Codeword symbols at positions ``start .. start+count-1``."""
        message = np.asarray(message, dtype=np.int64)
        stop = start + count
        head = message[start:min(stop, self.k)] if start < self.k else message[:0]
        if stop <= self.k:
            return head.copy()
        p0 = max(start, self.k) - self.k
        return np.concatenate([head, self.parity_symbols(message, p0, stop - self.k - p0)])

    def decode(self, positions, values):
        """Fast erasure decoding via the closed-form Cauchy inverse."""
        field = self.field
        positions = np.asarray(positions, dtype=np.int64)
        values = np.asarray(values, dtype=np.int64)
        k = self.k
        if positions.size < k:
            raise InsufficientSymbolsError(f"{positions.size} symbols survive, need {k}")
        msg = np.zeros(k, dtype=np.int64)
        sys_mask = positions < k
        msg[positions[sys_mask]] = values[sys_mask]
        have = np.zeros(k, dtype=bool)
        have[positions[sys_mask]] = True
        missing = np.flatnonzero(~have)
        if missing.size:
            par_pos = positions[~sys_mask]
            par_val = values[~sys_mask]
            order = np.argsort(par_pos, kind="stable")
            cols = par_pos[order][: missing.size] - k
            rhs = par_val[order][: missing.size]
            known = np.flatnonzero(have)
            if known.size:
                rhs = field.sub(rhs, field.matmul(msg[known], self.parity[np.ix_(known, cols)]))
            # u_M @ C(M, cols) = rhs
            inv = field.cauchy_inverse(missing, k + cols)
            msg[missing] = field.matmul(rhs, inv)
        return msg
