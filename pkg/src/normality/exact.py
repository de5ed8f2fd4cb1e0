"""Exact integer/rational arithmetic and base conversion.

Rationals are :class:`fractions.Fraction`. Everything here is exact and is
used as the ground truth for the streaming code paths.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, log
from typing import Sequence

from normality.digits import EventuallyPeriodicExpansion, check_base

FACTOR_CAP = 10**12
# Above this size the period needs a caller-supplied multiple.
_ORDER_CAP = FACTOR_CAP
_SMALL = 48


@lru_cache(maxsize=512)
def _power(b: int, e: int) -> int:
    return b**e


def _fixed_digits(n: int, b: int, width: int) -> list[int]:
    if width <= _SMALL:
        out = [0] * width
        for k in range(width - 1, -1, -1):
            n, out[k] = divmod(n, b)
        return out
    low = width // 2
    hi, lo = divmod(n, _power(b, low))
    return _fixed_digits(hi, b, width - low) + _fixed_digits(lo, b, low)


def digit_count(n: int, b: int) -> int:
    """Number of base-``b`` digits of ``n >= 0`` (1 for zero)."""
    if n == 0:
        return 1
    w = max(1, int(n.bit_length() * log(2) / log(b)))
    while _power(b, w) <= n:
        w += 1
    while w > 1 and _power(b, w - 1) > n:
        w -= 1
    return w


def int_to_digits(n: int, b: int, width: int | None = None) -> list[int]:
    """Base-``b`` digits of ``n``, most significant first.

    Without ``width`` the result has no leading zeros (``[0]`` for zero);
    with it, the result is left-padded to exactly ``width`` digits.
    Large inputs are split recursively, so conversion is subquadratic.
    """
    b = check_base(b)
    if n < 0:
        raise ValueError("n must be non-negative")
    if width is None:
        width = digit_count(n, b)
    elif n >= _power(b, width):
        raise ValueError(f"{n} does not fit in {width} base-{b} digits")
    return _fixed_digits(n, b, width)


def digits_to_int(digits: Sequence[int], b: int) -> int:
    n = len(digits)
    if n <= _SMALL:
        v = 0
        for d in digits:
            v = v * b + int(d)
        return v
    low = n // 2
    return digits_to_int(digits[: n - low], b) * _power(b, low) + digits_to_int(digits[n - low:], b)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    if n < 1:
        raise ValueError("can only factor positive integers")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        for q in (p, p + 2):
            while n % q == 0:
                out[q] = out.get(q, 0) + 1
                n //= q
        p += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _totient_factored(n: int) -> dict[int, int]:
    """Factorization of Euler's phi(n), built from the factors of n."""
    out: dict[int, int] = {}
    for p, k in factorize(n).items():
        if k > 1:
            out[p] = out.get(p, 0) + k - 1
        for r, e in factorize(p - 1).items():
            out[r] = out.get(r, 0) + e
    return out


def multiplicative_order(b: int, n: int, multiple: int | None = None) -> int:
    """Smallest ``L >= 1`` with ``b**L == 1 (mod n)``; requires gcd(b, n) = 1.

    ``multiple`` is any known exponent with ``b**multiple == 1 (mod n)``; it
    makes huge moduli cheap (only the multiple is factored).
    """
    if n == 1:
        return 1
    if gcd(b, n) != 1:
        raise ValueError(f"{b} is not invertible modulo {n}")
    if multiple is None:
        if n > _ORDER_CAP:
            raise ValueError(f"modulus {n} too large to factor; pass a known period multiple")
        factors = _totient_factored(n)
        order = 1
        for p, k in factors.items():
            order *= p**k
    else:
        order = multiple
        factors = factorize(multiple)
    if pow(b, order, n) != 1:
        raise ValueError(f"{order} is not a multiple of the order of {b} mod {n}")
    for p in factors:
        while order % p == 0 and pow(b, order // p, n) == 1:
            order //= p
    return order


def rational_to_expansion(
    x, b: int, *, period_multiple: int | None = None, max_period: int | None = None
) -> EventuallyPeriodicExpansion:
    """Exact expansion of ``frac(|x|)`` in base ``b``.

    The preperiod length comes from stripping the factors that the
    denominator shares with ``b``; the period length is the multiplicative
    order of ``b`` modulo what is left. Both are minimal. Digits are then
    produced as two big-integer blocks instead of digit-by-digit division.
    """
    b = check_base(b)
    x = abs(Fraction(x))
    p, q = x.numerator % x.denominator, x.denominator
    if p == 0:
        return EventuallyPeriodicExpansion(b, (), (0,))
    q1, pre_len = q, 0
    while (g := gcd(q1, b)) > 1:
        q1 //= g
        pre_len += 1
    per_len = multiplicative_order(b, q1, period_multiple)
    if max_period is not None and per_len > max_period:
        raise ValueError(f"period of {per_len} digits exceeds the limit of {max_period}")
    # x * b**pre_len == head + tail / q1 with 0 <= tail < q1
    head, tail = divmod(p * (_power(b, pre_len) // (q // q1)), q1)
    body = tail * ((_power(b, per_len) - 1) // q1)
    return EventuallyPeriodicExpansion(
        b,
        tuple(_fixed_digits(head, b, pre_len)),
        tuple(_fixed_digits(body, b, per_len)),
    )


def expansion_to_rational(e: EventuallyPeriodicExpansion, b: int | None = None) -> Fraction:
    """The rational in [0, 1) whose base-``b`` expansion is ``e``."""
    if b is not None and check_base(b) != e.base:
        raise ValueError(f"expansion is base {e.base}, not {b}")
    return periodic_value(e.preperiod, e.period, e.base)


def periodic_value(preperiod: Sequence[int], period: Sequence[int], b: int) -> Fraction:
    """Value of ``0.PRE(PERIOD)`` taken literally, so ``0.(b-1)`` evaluates to 1."""
    head = digits_to_int(preperiod, b)
    body = digits_to_int(period, b)
    return (head + Fraction(body, _power(b, len(period)) - 1)) / _power(b, len(preperiod))


def long_division(p: int, q: int, b: int):
    """Endless generator of the fractional base-``b`` digits of ``|p/q|``."""
    if q == 0:
        raise ZeroDivisionError("q must be non-zero")
    p, q = abs(p), abs(q)
    r = p % q
    while True:
        d, r = divmod(r * b, q)
        yield d


def multiplicatively_dependent(r: int, s: int) -> bool:
    """True iff ``r**n == s**m`` for some positive integers ``n``, ``m``.

    Equivalently the prime exponent vectors of ``r`` and ``s`` are positive
    rational multiples of one another.
    """
    for v in (r, s):
        if v < 2:
            raise ValueError("bases must be >= 2")
        if v > FACTOR_CAP:
            raise ValueError(f"inputs are capped at {FACTOR_CAP}")
    fr, fs = factorize(r), factorize(s)
    if fr.keys() != fs.keys():
        return False
    ratios = {Fraction(fr[p], fs[p]) for p in fr}
    return len(ratios) == 1
