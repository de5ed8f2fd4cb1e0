import os
import random
from fractions import Fraction
from itertools import islice
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from normality.digits import EventuallyPeriodicExpansion as E
from normality.exact import (
    digits_to_int,
    expansion_to_rational,
    factorize,
    int_to_digits,
    long_division,
    multiplicative_order,
    multiplicatively_dependent,
    rational_to_expansion,
)
from oracles import brute_dependent, naive_expansion, naive_int_digits, naive_order

BASES = (2, 3, 5, 10, 16)


@pytest.mark.parametrize("n,b,want", [(19, 5, [3, 4]), (0, 7, [0]), (255, 16, [15, 15])])
def test_int_to_digits_examples(n, b, want):
    assert int_to_digits(n, b) == want


def test_int_to_digits_width():
    assert int_to_digits(5, 2, width=6) == [0, 0, 0, 1, 0, 1]
    with pytest.raises(ValueError):
        int_to_digits(8, 2, width=3)


@given(st.integers(0, 10**400), st.integers(2, 36))
def test_int_to_digits_matches_repeated_division(n, b):
    got = int_to_digits(n, b)
    assert got == naive_int_digits(n, b)
    assert digits_to_int(got, b) == n


@pytest.mark.parametrize("x,b,pre,per", [
    (Fraction(19, 62), 5, (), (1, 2, 3)),
    (Fraction(1, 2), 10, (5,), (0,)),
    (Fraction(1, 3), 10, (), (3,)),
    (Fraction(7, 3), 10, (), (3,)),
    (Fraction(-1, 4), 10, (2, 5), (0,)),
])
def test_rational_to_expansion_examples(x, b, pre, per):
    e = rational_to_expansion(x, b)
    assert (e.preperiod, e.period) == (pre, per)


@pytest.mark.parametrize("pre,per,b,want", [
    ((), (1, 2, 3), 5, Fraction(19, 62)),
    ((), (0,), 2, Fraction(0)),
    ((), (1, 0, 0), 5, Fraction(25, 124)),
])
def test_expansion_to_rational_examples(pre, per, b, want):
    assert expansion_to_rational(E(b, pre, per), b) == want


def test_expansion_base_mismatch():
    with pytest.raises(ValueError):
        expansion_to_rational(E(5, (), (1,)), 10)


# Every p/q up to this denominator; NORMALITY_FULL=1 extends it to 2000.
EXHAUSTIVE_Q = 2000 if os.environ.get("NORMALITY_FULL") else 400


@pytest.mark.slow
@pytest.mark.parametrize("b", BASES)
def test_roundtrip_all_small_rationals(b):
    for q in range(1, EXHAUSTIVE_Q + 1):
        for p in range(q):
            assert expansion_to_rational(rational_to_expansion(Fraction(p, q), b), b) == Fraction(p, q)


@pytest.mark.parametrize("b", BASES)
def test_roundtrip_every_denominator_to_2000(b):
    rng = random.Random(b)
    for q in range(1, 2001):
        for p in {0, q - 1, rng.randrange(q), rng.randrange(q)}:
            assert expansion_to_rational(rational_to_expansion(Fraction(p, q), b), b) == Fraction(p, q)


@pytest.mark.parametrize("b", BASES)
def test_expansion_matches_long_division_oracle(b):
    rng = random.Random(b)
    for _ in range(300):
        q = rng.randint(1, 3000)
        p = rng.randint(0, q - 1)
        pre, per = naive_expansion(p, q, b)
        e = rational_to_expansion(Fraction(p, q), b)
        assert (list(e.preperiod), list(e.period)) == (pre, per), (p, q, b)


@pytest.mark.parametrize("b", BASES)
def test_period_divides_order(b):
    rng = random.Random(100 + b)
    for _ in range(200):
        q = rng.randint(2, 5000)
        if gcd(q, b) != 1:
            continue
        p = rng.randint(1, q - 1)
        assert naive_order(b, q) % len(rational_to_expansion(Fraction(p, q), b).period) == 0


def test_multiplicative_order_against_brute_force():
    for n in range(1, 600):
        for b in (2, 3, 10, 16):
            if gcd(b, n) == 1:
                assert multiplicative_order(b, n) == naive_order(b, n)


def test_multiplicative_order_with_known_multiple():
    n = 10**60 - 1
    assert multiplicative_order(10, n, multiple=60) == 60
    with pytest.raises(ValueError):
        multiplicative_order(10, n, multiple=7)
    with pytest.raises(ValueError):
        multiplicative_order(10, 4)


def test_large_period_uses_multiple():
    # 1/(b**L - 1) has period L
    L = 5000
    e = rational_to_expansion(Fraction(1, 7**L - 1), 7, period_multiple=L)
    assert len(e.period) == L and e.period[-1] == 1 and sum(e.period) == 1


def test_max_period_guard():
    with pytest.raises(ValueError):
        rational_to_expansion(Fraction(1, 9973), 10, max_period=100)


def test_long_division():
    assert list(islice(long_division(1, 7, 10), 12)) == [1, 4, 2, 8, 5, 7] * 2
    assert list(islice(long_division(-19, 62, 5), 6)) == [1, 2, 3, 1, 2, 3]
    with pytest.raises(ZeroDivisionError):
        next(long_division(1, 0, 10))


def test_factorize():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(1) == {}
    assert factorize(999983) == {999983: 1}


@pytest.mark.parametrize("r,s,want", [(2, 8, True), (7, 7, True), (2, 3, False), (4, 8, True),
                                      (6, 36, True), (6, 12, False), (10, 1000, True)])
def test_multiplicatively_dependent_examples(r, s, want):
    assert multiplicatively_dependent(r, s) is want


def test_multiplicatively_dependent_brute_force_grid():
    for r in range(2, 65):
        for s in range(2, 65):
            want = brute_dependent(r, s)
            assert multiplicatively_dependent(r, s) is want, (r, s)
            assert multiplicatively_dependent(s, r) is want


def test_multiplicatively_dependent_bounds():
    with pytest.raises(ValueError):
        multiplicatively_dependent(1, 4)
    with pytest.raises(ValueError):
        multiplicatively_dependent(2, 10**12 + 1)
    assert multiplicatively_dependent(999983, 999983**2 // 999983)


@settings(max_examples=200)
@given(st.integers(0, 10**6), st.integers(1, 10**5), st.sampled_from(BASES + (7, 36)))
def test_roundtrip_property(p, q, b):
    x = Fraction(p, q)
    assert expansion_to_rational(rational_to_expansion(x, b)) == x - int(x)
