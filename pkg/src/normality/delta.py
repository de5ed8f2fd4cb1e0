"""Swap maps, digit differences and the pseudonormality test.

For digits ``i != j`` of base ``b`` the swap map exchanges every ``i`` with
``j``; the difference ``x - swap(x)`` only involves positions holding ``i`` or
``j``. We always work with its absolute value. Writing ``delta = |i - j|``
and calling *P* the digit that occurs first (it fixes the sign) and *M* the
other one, every occurrence ``d`` with next occurrence ``n`` contributes:

* ``n`` holds M: digit ``s(d) - 1`` at ``d`` and ``b - 1`` strictly between,
* otherwise: digit ``s(d)`` at ``d`` and ``0`` strictly between,

where ``s(d) = delta`` on P positions and ``b - delta`` on M positions.
Positions before the first occurrence are 0. The digit at the last
occurrence seen so far is undetermined until the next one arrives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import sqrt
from typing import Sequence

import numpy as np

from normality.digits import (
    DIGIT_DTYPE,
    DigitSource,
    EventuallyPeriodicExpansion,
    as_prefix,
    check_base,
    check_digit,
)
from normality.errors import EmptyScheme, ZeroDelta
from normality.exact import expansion_to_rational, periodic_value, rational_to_expansion

EXACT_TOLERANCE = 1e-9


def _check_pair(b: int, i: int, j: int) -> tuple[int, int]:
    return check_digit(i, b), check_digit(j, b)


def _swap_table(b: int, i: int, j: int) -> np.ndarray:
    table = np.arange(b, dtype=DIGIT_DTYPE)
    table[i], table[j] = j, i
    return table


def swap_digits(digits: Sequence[int], i: int, j: int) -> list[int]:
    return [j if d == i else i if d == j else d for d in digits]


def swap_expansion(e: EventuallyPeriodicExpansion, i: int, j: int) -> EventuallyPeriodicExpansion:
    _check_pair(e.base, i, j)
    return EventuallyPeriodicExpansion(e.base, swap_digits(e.preperiod, i, j), swap_digits(e.period, i, j))


class SwapSource(DigitSource):
    def __init__(self, src: DigitSource, i: int, j: int):
        super().__init__(src.base)
        _check_pair(src.base, i, j)
        self._src = src
        self._table = _swap_table(src.base, i, j)

    def _produce(self, k: int) -> np.ndarray:
        return self._table[self._src.read(k)]


def swap_stream(src: DigitSource, i: int, j: int) -> DigitSource:
    """Position-preserving swap of digits ``i`` and ``j``."""
    return SwapSource(src, i, j)


def delta_value(e: EventuallyPeriodicExpansion, i: int, j: int) -> Fraction:
    """``|x - swap(x)|`` as an exact rational."""
    b = e.base
    _check_pair(b, i, j)
    swapped = periodic_value(swap_digits(e.preperiod, i, j), swap_digits(e.period, i, j), b)
    diff = abs(expansion_to_rational(e) - swapped)
    if diff == 0:
        raise ZeroDelta(f"swapping {i} and {j} leaves {e} unchanged")
    return diff


def delta_exact(e: EventuallyPeriodicExpansion, i: int, j: int) -> EventuallyPeriodicExpansion:
    """Exact expansion of ``|x - swap(x)|`` (the reference for the streaming path).

    A difference of exactly 1 (only possible for x = 0 and the pair
    {0, b-1}) has fractional part 0 and comes back as ``0.(0)``.
    """
    diff = delta_value(e, i, j)
    # The difference's denominator divides b**k * (b**L - 1) with L = |period|.
    return rational_to_expansion(diff, e.base, period_multiple=len(e.period))


def _between(occ: np.ndarray, is_p: np.ndarray, b: int, delta: int) -> np.ndarray:
    """Digits at positions occ[0] .. occ[-1] - 1 from consecutive occurrences."""
    if len(occ) < 2:
        return np.empty(0, dtype=DIGIT_DTYPE)
    s = np.where(is_p[:-1], delta, b - delta)
    next_m = ~is_p[1:]
    head = np.where(next_m, s - 1, s)
    fill = np.where(next_m, b - 1, 0).astype(DIGIT_DTYPE)
    gaps = np.diff(occ)
    out = np.repeat(fill, gaps)
    starts = np.empty(len(gaps), dtype=np.int64)
    starts[0] = 0
    np.cumsum(gaps[:-1], out=starts[1:])
    out[starts] = head
    return out


def delta_digits(prefix, b: int, i: int, j: int) -> np.ndarray:
    """All determined digits of ``|x - swap(x)|`` from a finite digit prefix.

    The result covers positions 1 up to (excluding) the last occurrence of
    ``i`` or ``j`` in the prefix.
    """
    b = check_base(b)
    i, j = _check_pair(b, i, j)
    if i == j:
        raise ZeroDelta("i == j")
    x = np.asarray(prefix)
    occ = np.flatnonzero((x == i) | (x == j))
    if not len(occ):
        raise ZeroDelta(f"neither {i} nor {j} occurs in the prefix")
    vals = x[occ]
    lead = np.zeros(occ[0], dtype=DIGIT_DTYPE)
    return np.concatenate((lead, _between(occ, vals == vals[0], b, abs(i - j))))


class DeltaStream(DigitSource):
    """Streams the digits of ``|x - swap(x)|`` without big-number arithmetic.

    Reads the wrapped source in chunks of ``chunk`` digits and stops after
    ``limit`` digits if given (required for unbounded sources that might
    never contain ``i`` or ``j``). Raises :class:`ZeroDelta` when the
    consumed input holds no occurrence at all.
    """

    def __init__(self, src: DigitSource, i: int, j: int, limit: int | None = None, chunk: int = 1 << 16):
        super().__init__(src.base)
        i, j = _check_pair(src.base, i, j)
        if i == j:
            raise ZeroDelta("i == j")
        self.i, self.j = i, j
        self._src = src
        self._delta = abs(i - j)
        self._limit = limit
        self._chunk = chunk
        self._consumed = 0
        self._first: int | None = None
        self._pending: tuple[int, bool] | None = None
        self._carry = np.empty(0, dtype=DIGIT_DTYPE)

    def _block(self) -> np.ndarray | None:
        n = self._chunk if self._limit is None else min(self._chunk, self._limit - self._consumed)
        if n <= 0:
            return None
        raw = self._src.read(n)
        if not len(raw):
            return None
        start = self._consumed
        self._consumed += len(raw)
        idx = np.flatnonzero((raw == self.i) | (raw == self.j))
        if not len(idx):
            return np.empty(0, dtype=DIGIT_DTYPE)
        vals = raw[idx]
        pos = idx.astype(np.int64) + start
        parts = []
        if self._first is None:
            self._first = int(vals[0])
            parts.append(np.zeros(pos[0], dtype=DIGIT_DTYPE))
        is_p = vals == self._first
        if self._pending is not None:
            pos = np.concatenate(([self._pending[0]], pos))
            is_p = np.concatenate(([self._pending[1]], is_p))
        parts.append(_between(pos, is_p, self.base, self._delta))
        self._pending = (int(pos[-1]), bool(is_p[-1]))
        return np.concatenate(parts)

    def _produce(self, k: int) -> np.ndarray:
        parts = [self._carry]
        have = len(self._carry)
        while have < k:
            block = self._block()
            if block is None:
                if self._first is None:
                    raise ZeroDelta(f"neither {self.i} nor {self.j} occurs in {self._consumed} digits")
                break
            parts.append(block)
            have += len(block)
        out = np.concatenate(parts)
        self._carry = out[k:]
        return out[:k]


def delta_stream(src: DigitSource, i: int, j: int, limit: int | None = None) -> DigitSource:
    return DeltaStream(src, i, j, limit=limit)


def digit_set(b: int, delta: int) -> frozenset[int]:
    """The digits that can appear in the difference for a pair at distance ``delta``."""
    return frozenset(v % b for v in (delta, b - delta, delta - 1, b - delta - 1, b - 1, 0))


@dataclass(frozen=True)
class SchemeRow:
    i: int
    j: int
    probs: tuple  # Fractions in exact mode, floats otherwise
    count: int  # digits the row was computed from (the period length in exact mode)
    mode: str

    @property
    def delta(self) -> int:
        return abs(self.i - self.j)


@dataclass(frozen=True)
class DeltaScheme:
    """Digit distributions of ``|x - swap(x)|`` for every pair i < j.

    Pairs whose difference is identically zero are left out.
    """

    base: int
    m: int | None
    mode: str
    rows: dict[tuple[int, int], SchemeRow] = field(default_factory=dict)

    def row(self, i: int, j: int) -> SchemeRow:
        return self.rows[(min(i, j), max(i, j))]

    def sorted_rows(self) -> list[SchemeRow]:
        return [self.rows[k] for k in sorted(self.rows)]


def exact_delta_scheme(e: EventuallyPeriodicExpansion) -> DeltaScheme:
    """Exact scheme of a rational: densities over the period of each difference."""
    b = e.base
    rows = {}
    for i, j in combinations(range(b), 2):
        try:
            diff = delta_exact(e, i, j)
        except ZeroDelta:
            continue
        period = diff.period
        counts = np.bincount(np.asarray(period, dtype=np.int64), minlength=b)
        probs = tuple(Fraction(int(c), len(period)) for c in counts)
        rows[(i, j)] = SchemeRow(i, j, probs, len(period), "exact")
    return DeltaScheme(b, None, "exact", rows)


def delta_scheme(src, b: int, m: int) -> DeltaScheme:
    """Empirical scheme from the first ``m`` digits.

    Each row is the digit distribution of all determined difference digits,
    leading zeros included.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    b = check_base(b)
    x = as_prefix(src, m, b)
    present = np.bincount(x, minlength=b) > 0
    rows = {}
    for i, j in combinations(range(b), 2):
        if not (present[i] or present[j]):
            continue
        digits = delta_digits(x, b, i, j)
        if not len(digits):
            continue
        counts = np.bincount(digits, minlength=b)
        probs = tuple(float(c) for c in counts / np.longdouble(len(digits)))
        rows[(i, j)] = SchemeRow(i, j, probs, len(digits), "stream")
    return DeltaScheme(b, m, "stream", rows)


@dataclass(frozen=True)
class ExpectedRow:
    base: int
    delta: int
    probs: tuple[Fraction, ...]


def expected_row(b: int, delta: int) -> ExpectedRow:
    """Digit distribution of the difference for a b-normal number.

    1/(2b) at each of delta, b-delta, delta-1 and b-delta-1, and (b-2)/(2b)
    at 0 and at b-1; coinciding digits add up.
    """
    b = check_base(b)
    if not 1 <= delta <= b - 1:
        raise ValueError(f"delta must lie in [1, {b - 1}]")
    probs = [Fraction(0)] * b
    for d in (delta, b - delta, delta - 1, b - delta - 1):
        probs[d % b] += Fraction(1, 2 * b)
    probs[0] += Fraction(b - 2, 2 * b)
    probs[b - 1] += Fraction(b - 2, 2 * b)
    return ExpectedRow(b, delta, tuple(probs))


def default_tolerance(row: SchemeRow, b: int) -> float:
    if row.mode == "exact":
        return EXACT_TOLERANCE
    return max(0.01, 5 * sqrt(b / (4 * row.count)))


@dataclass(frozen=True)
class RowCheck:
    i: int
    j: int
    delta: int
    deviation: float
    worst_digit: int
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class PairCheck:
    first: tuple[int, int]
    second: tuple[int, int]
    delta: int
    difference: float
    agree: bool


@dataclass(frozen=True)
class PseudonormalResult:
    passed: bool
    base: int
    mode: str
    rows: list[RowCheck]
    pairs: list[PairCheck]

    @property
    def flagged(self) -> list[tuple[int, int]]:
        return [(r.i, r.j) for r in self.rows if not r.passed]

    @property
    def disagreeing(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        return [(p.first, p.second) for p in self.pairs if not p.agree]


def _max_gap(a: Sequence, c: Sequence) -> tuple[Fraction | float, int]:
    gaps = [abs(x - y) for x, y in zip(a, c)]
    k = max(range(len(gaps)), key=gaps.__getitem__)
    return gaps[k], k


def pseudonormal_test(scheme: DeltaScheme, epsilon: float | None = None) -> PseudonormalResult:
    """Compare every row with :func:`expected_row` in the max norm.

    Rows sharing the same ``delta`` are also compared with each other: exact
    rows must be identical, streamed rows must agree within the larger of the
    two tolerances. The verdict passes iff every row lies within its
    tolerance: ``epsilon`` when given, else :func:`default_tolerance`.
    """
    if not scheme.rows:
        raise EmptyScheme("the scheme has no rows")
    b = scheme.base
    checks = []
    tolerance = {}
    for row in scheme.sorted_rows():
        eps = default_tolerance(row, b) if epsilon is None else float(epsilon)
        tolerance[(row.i, row.j)] = eps
        gap, digit = _max_gap(row.probs, expected_row(b, row.delta).probs)
        checks.append(RowCheck(row.i, row.j, row.delta, float(gap), digit, eps, float(gap) <= eps))
    pairs = []
    rows = scheme.sorted_rows()
    for a, c in combinations(rows, 2):
        if a.delta != c.delta:
            continue
        gap, _ = _max_gap(a.probs, c.probs)
        if a.mode == "exact" and c.mode == "exact":
            agree = gap == 0
        else:
            agree = float(gap) <= max(tolerance[(a.i, a.j)], tolerance[(c.i, c.j)])
        pairs.append(PairCheck((a.i, a.j), (c.i, c.j), a.delta, float(gap), agree))
    return PseudonormalResult(all(c.passed for c in checks), b, scheme.mode, checks, pairs)
