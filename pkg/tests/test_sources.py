from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from normality.digits import take_prefix
from normality.errors import BadDigit, BaseMismatch, Exhausted, TermCap
from normality.exact import int_to_digits, rational_to_expansion
from normality.sources import (
    KINDS,
    casual_source,
    champernowne,
    fibonacci_constant,
    file_source,
    martin_partial,
    martin_source,
    oscillating_example,
    parse_source_spec,
    rational_source,
    write_digit_file,
)
from oracles import PI_DIGITS_50, pure_casual_digits


def digits(s):
    return [int(c) for c in s]


def prefix(src, m):
    return list(take_prefix(src, m))


class TestGoldenPrefixes:
    def test_champernowne_10(self):
        assert prefix(champernowne(10), 20) == digits("12345678910111213141")

    def test_champernowne_2(self):
        assert prefix(champernowne(2), 20) == digits("11011100101110111100")

    def test_champernowne_3(self):
        assert prefix(champernowne(3), 20) == digits("12101112202122100101")

    def test_fibonacci_10(self):
        assert prefix(fibonacci_constant(10), 22) == digits("1123581321345589144233")

    def test_fibonacci_2(self):
        assert prefix(fibonacci_constant(2), 10) == [1, 1, 1, 0, 1, 1, 1, 0, 1, 1]
        assert prefix(fibonacci_constant(10), 1) == [1]

    def test_oscillating(self):
        assert prefix(oscillating_example(10), 15) == digits("100111100000000")


@pytest.mark.parametrize("b", range(2, 17))
def test_champernowne_is_flattened_integers(b):
    want = []
    n = 1
    while len(want) < 10**4:
        want.extend(int_to_digits(n, b))
        n += 1
    assert prefix(champernowne(b), 10**4) == want[:10**4]


def test_champernowne_crosses_width_boundaries_in_chunks():
    src = champernowne(10)
    parts = [take_prefix(src, k) for k in (5, 7, 200, 3000, 1)]
    whole = take_prefix(champernowne(10), sum(map(len, parts)))
    assert np.array_equal(np.concatenate(parts), whole)


def test_fibonacci_is_flattened_fibonacci_numbers():
    fib = [1, 1]
    while len(fib) < 400:
        fib.append(fib[-1] + fib[-2])
    want = [d for f in fib for d in int_to_digits(f, 7)]
    assert prefix(fibonacci_constant(7), 5000) == want[:5000]


class TestMartin:
    def test_partial_products(self):
        assert martin_partial(1) == Fraction(3, 4)
        assert martin_partial(3) == Fraction(21, 32)
        assert martin_partial(4) == Fraction(21, 32) * (1 - Fraction(1, 5**16))

    def test_decimal_digits(self):
        assert prefix(martin_source(10), 10) == digits("6562499999")

    def test_decreasing_and_bounded(self):
        vals = [martin_partial(t) for t in range(1, 5)]
        assert all(a > c for a, c in zip(vals, vals[1:]))
        assert min(vals) > Fraction(1, 2)

    def test_term_cap(self):
        with pytest.raises(TermCap):
            martin_partial(5)
        with pytest.raises(ValueError):
            martin_partial(0)


class TestCasual:
    @pytest.mark.parametrize("b", [2, 3, 10, 16, 36])
    def test_matches_reference_generator(self, b):
        assert prefix(casual_source(b, 2024), 2000) == pure_casual_digits(b, 2024, 2000)

    def test_deterministic(self):
        assert prefix(casual_source(10, 9), 10**4) == prefix(casual_source(10, 9), 10**4)
        assert prefix(casual_source(10, 9), 100) != prefix(casual_source(10, 10), 100)

    def test_binary_digits(self):
        assert set(prefix(casual_source(2, 5), 1000)) == {0, 1}

    def test_decimal_frequencies(self):
        x = take_prefix(casual_source(10, 1), 10**6)
        freq = np.bincount(x, minlength=10) / len(x)
        assert np.all(np.abs(freq - 0.1) < 0.005)

    def test_read_sizes_do_not_change_stream(self):
        src = casual_source(7, 3)
        parts = np.concatenate([take_prefix(src, k) for k in (1, 70000, 13)])
        assert np.array_equal(parts, take_prefix(casual_source(7, 3), len(parts)))


class TestFiles:
    def test_pi_prefix_strips_integer_part(self, tmp_path):
        p = tmp_path / "pi.txt"
        p.write_text("3." + PI_DIGITS_50[:20] + "\n" + PI_DIGITS_50[20:] + "\n")
        assert prefix(file_source(p, 10), 50) == digits(PI_DIGITS_50)

    def test_empty_payload(self, tmp_path):
        p = tmp_path / "e.txt"
        p.write_text("# base=10\n")
        with pytest.raises(Exhausted) as err:
            take_prefix(file_source(p), 1)
        assert err.value.available == 0

    def test_bad_digit_position(self, tmp_path):
        p = tmp_path / "bad.txt"
        p.write_text("12 3\na5")
        with pytest.raises(BadDigit) as err:
            take_prefix(file_source(p, 10), 6)
        assert err.value.position == 4

    def test_header_base(self, tmp_path):
        p = tmp_path / "h.txt"
        p.write_text("# base=16\n0.ff0a\n")
        src = file_source(p)
        assert src.base == 16
        assert prefix(src, 4) == [15, 15, 0, 10]
        with pytest.raises(BaseMismatch):
            file_source(p, 10)

    def test_write_read_roundtrip(self, tmp_path):
        x = take_prefix(casual_source(36, 4), 1234)
        p = tmp_path / "w.txt"
        write_digit_file(p, x, 36, width=50)
        assert np.array_equal(take_prefix(file_source(p), 1234), x)
        with pytest.raises(Exhausted):
            take_prefix(file_source(p), 1235)

    def test_replay_identical(self, tmp_path):
        p = tmp_path / "r.txt"
        write_digit_file(p, take_prefix(champernowne(10), 500), 10)
        assert prefix(file_source(p), 500) == prefix(file_source(p), 500)


class TestRational:
    def test_examples(self):
        assert prefix(rational_source(19, 62, 5), 9) == [1, 2, 3] * 3
        assert prefix(rational_source(0, 1, 6), 5) == [0] * 5
        assert prefix(rational_source(1, 7, 10), 12) == [1, 4, 2, 8, 5, 7] * 2

    def test_huge_denominator_streams(self):
        q = 10**30 + 57
        e_digits = prefix(rational_source(1, q, 10), 80)
        assert e_digits == [int(c) for c in str(10**80 // q).zfill(80)]

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            rational_source(1, 0, 10)


@settings(max_examples=50)
@given(st.integers(0, 5000), st.integers(1, 5000), st.integers(2, 36))
def test_rational_source_matches_expansion(p, q, b):
    e = rational_to_expansion(Fraction(p, q), b)
    n = len(e.preperiod) + 3 * len(e.period)
    assert np.array_equal(take_prefix(rational_source(p, q, b), n), e.digits(n))


class TestSpecs:
    def test_kinds_open(self, tmp_path):
        path = tmp_path / "d.txt"
        path.write_text("0.123")
        texts = {"champernowne": "champernowne", "fibonacci": "fibonacci", "martin": "martin:terms=2",
                 "oscillating": "oscillating", "casual": "casual:seed=3", "rational": "rational:1/3",
                 "file": f"file:{path}"}
        assert set(texts) == set(KINDS)
        for kind, text in texts.items():
            spec = parse_source_spec(text)
            assert spec.kind == kind
            assert len(take_prefix(spec.open(), 3)) == 3

    def test_rational_forms(self):
        a = parse_source_spec("rational:19/62", base=5)
        c = parse_source_spec("rational:0.(123)", base=5)
        assert a.exact_value() == c.exact_value() == Fraction(19, 62)
        assert a.is_exact and not parse_source_spec("champernowne").is_exact

    def test_seed_default(self):
        assert parse_source_spec("casual", seed=11).params["seed"] == 11
        assert parse_source_spec("casual:seed=4", seed=11).params["seed"] == 4

    @pytest.mark.parametrize("bad", ["nope", "rational:", "rational:1/0", "casual:seed", "champernowne:x=1",
                                     "file:"])
    def test_rejects(self, bad):
        with pytest.raises((ValueError, ZeroDivisionError)):
            parse_source_spec(bad)

    def test_martin_cap(self):
        with pytest.raises(TermCap):
            parse_source_spec("martin:terms=5")

    def test_replay_gives_same_digits(self):
        spec = parse_source_spec("casual:seed=8", base=4)
        assert prefix(spec.open(), 300) == prefix(spec.open(), 300)
