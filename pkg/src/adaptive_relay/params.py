"""Code dimensions and rates of the adaptive relay construction.

All rates are exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .errors import FieldTooSmallError, ParameterError, ZeroCapacityError
from .field import DEFAULT_FIELD_ORDER, prime_power


def header_symbol_count(delay: int, field_order: int) -> int:
    """Symbols needed for a ``delay + 1`` bit erasure header: ceil((T+1) log_q 2)."""
    bits = 1 << (delay + 1)
    h, cap = 0, 1
    while cap < bits:
        cap *= field_order
        h += 1
    return h


def _relay_sum(n1: int, n2: int, t: int) -> Fraction:
    # sum_{i=0}^{N1-1} (N1-i) / (T+1-N2-(N1-i)); the i = N1 term is zero
    return sum(
        (Fraction(n1 - i, t + 1 - n2 - (n1 - i)) for i in range(n1)), Fraction(0)
    )


def r1_bound(n1: int, n2: int, t: int) -> Fraction:
    return Fraction(t + 1 - n1 - n2, t + 1 - n2)


def r2_rate(n1: int, n2: int, t: int, overhead: Fraction = Fraction(0)) -> Fraction:
    return Fraction(t + 1 - n2) / (t + 1 + _relay_sum(n1, n2, t) + overhead)


def nonadaptive_rate(n1_erasures: int, n2_erasures: int, delay: int) -> Fraction:
    """Rate of the channel-state-independent relaying scheme."""
    _check_feasible(n1_erasures, n2_erasures, delay)
    return Fraction(delay + 1 - n1_erasures - n2_erasures, delay + 1 - n1_erasures)


def trivial_bound(n2_erasures: int, delay: int) -> Fraction:
    """Point-to-point bound of the relay-to-destination link alone."""
    return Fraction(delay + 1 - n2_erasures, delay + 1)


def _check_feasible(n1, n2, t):
    for name, v in (("N1", n1), ("N2", n2), ("T", t)):
        if not isinstance(v, int) or v < 0:
            raise ParameterError(f"{name} must be a non-negative integer, got {v!r}")
    if t < 1:
        raise ParameterError("delay T must be at least 1")
    if n1 + n2 > t:
        raise ZeroCapacityError(f"N1 + N2 = {n1 + n2} > T = {t}: capacity is 0")


@dataclass(frozen=True)
class CodeParams:
    n1_erasures: int
    n2_erasures: int
    delay: int
    field_order: int
    multiplex: int
    k: int
    n1: int
    n2: int
    k_prime: int
    n_prime: int
    layers_source: int
    k_dprime: int
    n_dprime: int
    layers_relay: int
    ell_j: tuple[int, ...]
    header_symbols: int
    r1: Fraction
    r2: Fraction
    r2_asymptotic: Fraction

    @property
    def longest_code(self) -> int:
        """Length of the longest MDS code any node instantiates."""
        return max(self.n_prime, self.n_dprime, self.delay * self.layers_source)

    @property
    def header_overhead(self) -> Fraction:
        """Amortised header symbols per packet: header_symbols / c."""
        return Fraction(self.header_symbols, self.multiplex)

    @property
    def packet_rate(self) -> Fraction:
        """Rate of a real multiplexed packet: c k / (c n2 + header)."""
        c = self.multiplex
        return Fraction(c * self.k, c * self.n2 + self.header_symbols)

    def ell(self, j: int) -> int:
        return self.ell_j[j]

    def to_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            v = getattr(self, name)
            if isinstance(v, Fraction):
                out[name] = str(v)
                out[name + "_float"] = float(v)
            elif isinstance(v, tuple):
                out[name] = list(v)
            else:
                out[name] = v
        return out


def derive_params(
    n1_erasures: int,
    n2_erasures: int,
    delay: int,
    field_order: int = DEFAULT_FIELD_ORDER,
    multiplex: int = 1,
) -> CodeParams:
    _check_feasible(n1_erasures, n2_erasures, delay)
    if prime_power(field_order) is None:
        raise ParameterError(f"field order {field_order} is not a prime power")
    if field_order <= delay + 1:
        raise FieldTooSmallError(f"field order {field_order} must exceed T+1 = {delay + 1}")
    if not isinstance(multiplex, int) or multiplex < 1:
        raise ParameterError("multiplex c must be a positive integer")

    N1, N2, T = n1_erasures, n2_erasures, delay
    base = T + 1 - N2
    k = prod(base - i for i in range(N1 + 1))
    layers_source = prod(base - i for i in range(N1))
    layers_relay = prod(base - i for i in range(1, N1 + 1))
    k_prime, n_prime = base - N1, base
    k_dprime, n_dprime = base, T + 1
    n1 = base * layers_source
    n2 = (T + 1 - N1) * layers_relay + sum(
        prod(base - i for i in range(N1 + 1) if i != l) for l in range(1, N1 + 1)
    )
    ell_j = []
    for j in range(N1):
        q, r = divmod(k, T - N2 - j)
        assert r == 0, "ell_j must be integral"
        ell_j.append(q)

    assert k == layers_source * k_prime == layers_relay * k_dprime
    assert n2 == (T + 1 - N1) * k // base + sum(k // (T - N2 - i) for i in range(N1))

    h = header_symbol_count(T, field_order)
    r1 = r1_bound(N1, N2, T)
    r2_asym = Fraction(k, n2)
    assert r2_asym == r2_rate(N1, N2, T)
    return CodeParams(
        n1_erasures=N1,
        n2_erasures=N2,
        delay=T,
        field_order=field_order,
        multiplex=multiplex,
        k=k,
        n1=n1,
        n2=n2,
        k_prime=k_prime,
        n_prime=n_prime,
        layers_source=layers_source,
        k_dprime=k_dprime,
        n_dprime=n_dprime,
        layers_relay=layers_relay,
        ell_j=tuple(ell_j),
        header_symbols=h,
        r1=r1,
        r2=r2_rate(N1, N2, T, Fraction(h, multiplex)),
        r2_asymptotic=r2_asym,
    )


def achievable_rate(params: CodeParams, include_header: bool = True) -> Fraction:
    """min(R1, R2); without the header R2 is the asymptotic k / n2."""
    return min(params.r1, params.r2 if include_header else params.r2_asymptotic)


def check_field_capacity(params: CodeParams) -> None:
    """Raise unless the field can host every MDS code the construction uses."""
    if params.longest_code >= params.field_order:
        raise FieldTooSmallError(
            f"longest code has length {params.longest_code}; "
            f"field order {params.field_order} is too small"
        )
