"""The constants M, delta, eta of the fortress induction.

Every eta in the recursion is a power ``(eps/2) ** N`` with an integer
exponent N, so it is carried exactly by N.  M is an exact integer; delta is
reported through ``log2``.  The numbers explode doubly exponentially, so
evaluation stops with ``astronomical=True`` once an integer would need more
than ``max_bits`` bits.

Recursion for level k >= 2 and target m, with M(.), eta(.), delta(.) the
level k-1 values::

    M_{m(m-1)} = m
    M_{h-1}    = M(M_h) + ceil((k-1) M_h / eta(M_h))
    M          = M_0
    eta_0      = (eps/2) ** (m^2 M^(2(k-1)))
    eta_h      = eta_{h-1} * eta(M_h)
    delta      = min(m^-2 M^-3(k-1) eta_0, delta(M_h) for all h)
    eta        = eta_{m(m-1)}

Level 1: M = m, eta = (eps/2) ** C(m, 2), delta = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

__all__ = ["ConstantsTable", "compute_constants", "DEFAULT_MAX_BITS"]

DEFAULT_MAX_BITS = 1 << 16


@dataclass
class ConstantsTable:
    r: int
    eps: Fraction
    k: int
    m: int
    M: int | None
    eta_exponent: int | None  # eta = (eps/2) ** eta_exponent
    log2_eta: float | None  # None only when beyond floating-point range
    log2_delta: float | None  # None only when beyond floating-point range
    M_seq: list = field(default_factory=list)  # M_0 .. M_{m(m-1)}, None where not reached
    eta_exponents: list = field(default_factory=list)  # exponents of eta_0 .. eta_{m(m-1)}
    astronomical: bool = False
    note: str = ""

    @property
    def steps(self) -> int:
        return self.m * (self.m - 1) if self.k >= 2 else 0


class _Astronomical(Exception):
    def __init__(self, partial: list, note: str):
        super().__init__(note)
        self.partial = partial
        self.note = note


@dataclass(frozen=True)
class _Level:
    M: int
    N: int  # eta exponent
    log2_delta: float | None  # None when below the float range


def _frac(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def _show(x: int) -> str:
    return str(x) if x.bit_length() <= 64 else f"~2^{x.bit_length()}"


def _ceil_div_power(num: int, base_inv: Fraction, N: int, max_bits: int) -> int:
    # ceil(num * base_inv**N) with base_inv = 2/eps > 1, refusing oversized results
    # base_inv >= 2, so the result has at least N bits
    if N > max_bits:
        raise _Astronomical([], f"ceil({_show(num)} * (2/eps)^N) with N = {_show(N)} exceeds {max_bits} bits")
    est = math.log2(num) + N * math.log2(base_inv)
    if est > max_bits:
        raise _Astronomical([], f"ceil({_show(num)} * (2/eps)^{N}) needs about {est:.3g} bits")
    val = num * base_inv**N
    return -((-val.numerator) // val.denominator)


@lru_cache(maxsize=None)
def _level(eps: Fraction, k: int, m: int, max_bits: int):
    """Return (_Level, M_seq, eta_exponents) for level k and target m."""
    if k == 1:
        return _Level(m, math.comb(m, 2), 0.0), [], []
    steps = m * (m - 1)
    Ms: list = [None] * (steps + 1)
    Ms[steps] = m
    base_inv = 2 / eps
    inner: dict[int, _Level] = {}
    for h in range(steps, 0, -1):
        Mh = Ms[h]
        try:
            sub, _, _ = _level(eps, k - 1, Mh, max_bits)
        except _Astronomical as exc:
            raise _Astronomical(Ms, f"level {k - 1} at M_{h} = {_show(Mh)}: {exc.note}") from None
        inner[h] = sub
        try:
            extra = _ceil_div_power((k - 1) * Mh, base_inv, sub.N, max_bits)
        except _Astronomical as exc:
            raise _Astronomical(Ms, f"M_{h - 1}: {exc.note}") from None
        Ms[h - 1] = sub.M + extra
        if Ms[h - 1].bit_length() > max_bits:
            raise _Astronomical(Ms, f"M_{h - 1} has {Ms[h - 1].bit_length()} bits")
    M = Ms[0]
    N0 = m * m * M ** (2 * (k - 1))
    Ns = [N0]
    for h in range(1, steps + 1):
        Ns.append(Ns[-1] + inner[h].N)
    log2_base = math.log2(eps / 2)
    try:
        first = -2 * math.log2(m) - 3 * (k - 1) * math.log2(M) + N0 * log2_base
    except OverflowError:
        first = None  # below every float; M and the eta exponents stay exact
    lows = [first] + [inner[h].log2_delta for h in inner]
    log2_delta = None if None in lows else min(lows)
    return _Level(M, Ns[-1], log2_delta), Ms, Ns


def compute_constants(r: int, eps, k: int, m: int, max_bits: int = DEFAULT_MAX_BITS) -> ConstantsTable:
    """Evaluate the constants for ``(r, eps, k, m)``; see the module docstring."""
    eps = _frac(eps)
    if int(r) != r or r < 2:
        raise ValueError("r must be an integer >= 2")
    if int(m) != m or m < 2:
        raise ValueError("m must be an integer >= 2")
    if int(k) != k or not 1 <= k <= r:
        raise ValueError("k must be an integer with 1 <= k <= r")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if max_bits < 8:
        raise ValueError("max_bits is too small")
    log2_base = math.log2(eps / 2)
    try:
        lvl, Ms, Ns = _level(eps, k, m, max_bits)
    except _Astronomical as exc:
        steps = m * (m - 1)
        partial = exc.partial or [None] * (steps + 1)
        return ConstantsTable(r, eps, k, m, None, None, None, None, list(partial), [], True, exc.note)
    try:
        log2_eta = lvl.N * log2_base
    except OverflowError:
        log2_eta = None
    note = ""
    if log2_eta is None or lvl.log2_delta is None:
        note = "log2 of eta or delta is below the floating-point range; eta = (eps/2)^eta_exponent is exact"
    return ConstantsTable(
        r, eps, k, m, lvl.M, lvl.N, log2_eta, lvl.log2_delta, list(Ms), list(Ns), False, note
    )
