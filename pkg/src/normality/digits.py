"""Digit-domain primitives: bases, exact periodic expansions and digit sources.

All analysis runs over the *fractional* digits of a number, so position 1 is
the first digit after the radix point. Integer parts and signs are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from normality.errors import Exhausted

ALPHABET = "0123456789abcdefghijklmnopqrstuvwxyz"
MAX_BASE = len(ALPHABET)

# Digits are stored as uint8 everywhere (bases never exceed 36).
DIGIT_DTYPE = np.uint8


def check_base(b: int) -> int:
    if isinstance(b, bool) or not isinstance(b, (int, np.integer)):
        raise TypeError(f"base must be an integer, got {type(b).__name__}")
    b = int(b)
    if not 2 <= b <= MAX_BASE:
        raise ValueError(f"base must lie in [2, {MAX_BASE}], got {b}")
    return b


def check_digit(d: int, b: int) -> int:
    d = int(d)
    if not 0 <= d < b:
        raise ValueError(f"{d} is not a base-{b} digit")
    return d


def digits_to_str(digits: Sequence[int]) -> str:
    return "".join(ALPHABET[int(d)] for d in digits)


def str_to_digits(text: str, b: int) -> tuple[int, ...]:
    """Parse ``"1a3"`` style digit strings (``0-9`` then ``a-z``)."""
    out = []
    for ch in text:
        v = ALPHABET.find(ch.lower())
        if v < 0 or v >= b:
            raise ValueError(f"{ch!r} is not a base-{b} digit")
        out.append(v)
    return tuple(out)


def _minimal_period(period: tuple[int, ...]) -> tuple[int, ...]:
    n = len(period)
    for p in range(1, n):
        if n % p == 0 and period[:p] * (n // p) == period:
            return period[:p]
    return period


@dataclass(frozen=True)
class EventuallyPeriodicExpansion:
    """Exact base-``b`` expansion ``0.PRE(PERIOD)`` of a number in [0, 1).

    The constructor normalizes its input: the period is reduced to its
    minimal length, trailing preperiod digits are rotated into the period,
    and a ``(b-1)``-repeating tail is replaced by the terminating form.
    A carry out of the integer part (``0.(b-1)``) is dropped, consistent with
    the fractional-part convention.
    """

    base: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        b = check_base(self.base)
        pre = tuple(check_digit(d, b) for d in self.preperiod)
        per = tuple(check_digit(d, b) for d in self.period)
        if not per:
            raise ValueError("period must be non-empty")
        per = _minimal_period(per)
        pre, per = _rotate(pre, per)
        if per == (b - 1,):
            n = 0
            for d in pre:
                n = n * b + d
            n += 1
            if n == b ** len(pre):
                pre = ()
            else:
                pre = tuple(_int_digits_fixed(n, b, len(pre)))
            per = (0,)
            pre, per = _rotate(pre, per)
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "preperiod", pre)
        object.__setattr__(self, "period", per)

    @property
    def is_terminating(self) -> bool:
        return self.period == (0,)

    def digit_at(self, t: int) -> int:
        return digit_at(self, t)

    def digits(self, m: int) -> np.ndarray:
        """First ``m`` digits as an array."""
        return _expansion_prefix(self, 0, m)

    def __str__(self) -> str:
        return f"0.{digits_to_str(self.preperiod)}({digits_to_str(self.period)})_{self.base}"


def _rotate(pre: tuple[int, ...], per: tuple[int, ...]):
    while pre and pre[-1] == per[-1]:
        per = (pre[-1],) + per[:-1]
        pre = pre[:-1]
    return pre, per


def _int_digits_fixed(n: int, b: int, width: int) -> list[int]:
    out = [0] * width
    for k in range(width - 1, -1, -1):
        n, out[k] = divmod(n, b)
    return out


def parse_expansion(text: str, b: int) -> EventuallyPeriodicExpansion:
    """Parse ``0.PRE(PERIOD)``, ``.PRE(PERIOD)``, ``PRE(PERIOD)`` or ``0.PRE``.

    Any integer part before ``.`` is discarded.
    """
    s = text.strip().replace(" ", "")
    if "." in s:
        s = s.split(".", 1)[1]
    if "(" in s:
        if not s.endswith(")") or s.count("(") != 1:
            raise ValueError(f"malformed periodic expansion {text!r}")
        pre, per = s[:-1].split("(")
    else:
        pre, per = s, "0"
    if not per:
        raise ValueError(f"empty period in {text!r}")
    return EventuallyPeriodicExpansion(b, str_to_digits(pre, b), str_to_digits(per, b))


def digit_at(e: EventuallyPeriodicExpansion, t: int) -> int:
    """Digit at 1-based position ``t``."""
    if t < 1:
        raise ValueError("positions start at 1")
    k = len(e.preperiod)
    if t <= k:
        return e.preperiod[t - 1]
    return e.period[(t - k - 1) % len(e.period)]


def _expansion_prefix(e: EventuallyPeriodicExpansion, start: int, count: int) -> np.ndarray:
    """Digits at 0-based indices ``start .. start+count-1``."""
    pre = np.asarray(e.preperiod, dtype=DIGIT_DTYPE)
    per = np.asarray(e.period, dtype=DIGIT_DTYPE)
    idx = np.arange(start, start + count, dtype=np.int64)
    out = np.empty(count, dtype=DIGIT_DTYPE)
    in_pre = idx < len(pre)
    out[in_pre] = pre[idx[in_pre]]
    rest = idx[~in_pre]
    out[~in_pre] = per[(rest - len(pre)) % len(per)]
    return out


class DigitSource:
    """Single-consumer pull stream of fractional digits.

    Subclasses implement :meth:`_produce`, returning up to ``k`` fresh digits
    (fewer only when the source is finite and has ended). ``position`` counts
    the digits handed out so far, so the next digit sits at ``position + 1``.
    Iterating yields plain ints; :meth:`read` hands out numpy blocks.
    """

    _BLOCK = 4096

    def __init__(self, base: int):
        self.base = check_base(base)
        self.position = 0
        self._buf = np.empty(0, dtype=DIGIT_DTYPE)
        self._ended = False

    def _produce(self, k: int) -> np.ndarray:
        raise NotImplementedError

    def _pull(self, k: int) -> np.ndarray:
        if self._ended:
            return np.empty(0, dtype=DIGIT_DTYPE)
        got = np.asarray(self._produce(k), dtype=DIGIT_DTYPE)
        if len(got) < k:
            self._ended = True
        return got

    def read(self, k: int) -> np.ndarray:
        """Return up to ``k`` digits; a short result means the source ended."""
        if k < 0:
            raise ValueError("cannot read a negative number of digits")
        parts = []
        have = 0
        if len(self._buf):
            head = self._buf[:k]
            self._buf = self._buf[k:]
            parts.append(head)
            have = len(head)
        if have < k:
            parts.append(self._pull(k - have))
        out = np.concatenate(parts) if parts else np.empty(0, dtype=DIGIT_DTYPE)
        self.position += len(out)
        return out

    def __iter__(self) -> Iterator[int]:
        return self

    def __next__(self) -> int:
        if not len(self._buf):
            self._buf = self._pull(self._BLOCK)
            if not len(self._buf):
                raise StopIteration
        d = int(self._buf[0])
        self._buf = self._buf[1:]
        self.position += 1
        return d


class ExpansionSource(DigitSource):
    def __init__(self, expansion: EventuallyPeriodicExpansion):
        super().__init__(expansion.base)
        self.expansion = expansion
        self._next_index = 0

    def _produce(self, k: int) -> np.ndarray:
        out = _expansion_prefix(self.expansion, self._next_index, k)
        self._next_index += k
        return out


class ArraySource(DigitSource):
    """Finite source over an in-memory digit sequence."""

    def __init__(self, digits: Sequence[int] | np.ndarray, base: int):
        super().__init__(base)
        arr = np.asarray(digits, dtype=np.int64)
        if arr.size and (arr.min() < 0 or arr.max() >= self.base):
            raise ValueError(f"digits out of range for base {self.base}")
        self._data = arr.astype(DIGIT_DTYPE)
        self._next_index = 0

    def _produce(self, k: int) -> np.ndarray:
        out = self._data[self._next_index:self._next_index + k]
        self._next_index += len(out)
        return out


def as_source(e: EventuallyPeriodicExpansion) -> DigitSource:
    return ExpansionSource(e)


def take_prefix(src: DigitSource, m: int) -> np.ndarray:
    """Pull exactly ``m`` digits or raise :class:`Exhausted`."""
    if m < 0:
        raise ValueError("prefix length must be non-negative")
    got = src.read(m)
    if len(got) < m:
        raise Exhausted(len(got), m)
    return got


def as_prefix(src, m: int, base: int | None = None) -> np.ndarray:
    """Materialize the first ``m`` digits of a source or an in-memory sequence."""
    if isinstance(src, DigitSource):
        if base is not None and check_base(base) != src.base:
            raise ValueError(f"source is base {src.base}, analysis requested base {base}")
        return take_prefix(src, m)
    arr = np.asarray(src)
    if len(arr) < m:
        raise Exhausted(len(arr), m)
    arr = arr[:m]
    if arr.dtype != DIGIT_DTYPE:
        arr = arr.astype(DIGIT_DTYPE)
    if base is not None and arr.size and int(arr.max()) >= base:
        raise ValueError(f"digits out of range for base {base}")
    return arr
