"""Digit sources for the concrete numbers under study.

Every generator returns a fresh :class:`~normality.digits.DigitSource`; a
:class:`SourceSpec` can rebuild an identical source any number of times.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from normality.digits import (
    ALPHABET,
    DIGIT_DTYPE,
    DigitSource,
    EventuallyPeriodicExpansion,
    ExpansionSource,
    check_base,
    parse_expansion,
)
from normality.errors import BadDigit, BaseMismatch, TermCap
from normality.exact import expansion_to_rational, int_to_digits, long_division, rational_to_expansion

MARTIN_MAX_TERMS = 4
# Rationals with larger denominators are streamed by long division instead
# of being expanded up front.
EXPAND_LIMIT = 10**7


class ChampernowneSource(DigitSource):
    """Concatenation of 1, 2, 3, ... written in base ``b``."""

    def __init__(self, b: int):
        super().__init__(b)
        self._n = 1
        self._carry = np.empty(0, dtype=DIGIT_DTYPE)

    def _produce(self, k: int) -> np.ndarray:
        b = self.base
        parts = [self._carry]
        have = len(self._carry)
        while have < k:
            width = len(int_to_digits(self._n, b))
            top = b**width  # first integer with width + 1 digits
            count = min(top - self._n, (k - have) // width + 1)
            nums = np.arange(self._n, self._n + count, dtype=np.int64)
            powers = b ** np.arange(width - 1, -1, -1, dtype=np.int64)
            block = (nums[:, None] // powers[None, :]) % b
            parts.append(block.astype(DIGIT_DTYPE).ravel())
            have += count * width
            self._n += count
        out = np.concatenate(parts)
        self._carry = out[k:]
        return out[:k]


class FibonacciSource(DigitSource):
    """Concatenation of F_1 = 1, F_2 = 1, 2, 3, 5, 8, ... in base ``b``."""

    def __init__(self, b: int):
        super().__init__(b)
        self._a, self._b = 1, 1
        self._carry: list[int] = []

    def _produce(self, k: int) -> np.ndarray:
        out = self._carry
        while len(out) < k:
            out.extend(int_to_digits(self._a, self.base))
            self._a, self._b = self._b, self._a + self._b
        self._carry = out[k:]
        return np.asarray(out[:k], dtype=DIGIT_DTYPE)


class OscillatingSource(DigitSource):
    """Runs of 1s and 0s with lengths 1, 2, 4, 8, ...: ``0.1 00 1111 00000000 ...``.

    The running density of any digit string made of zeros (and of ``1``)
    keeps swinging between roughly 1/3 and 2/3, so it has no limit.
    """

    def __init__(self, b: int):
        super().__init__(b)
        self._block = 0
        self._left = 1

    def _produce(self, k: int) -> np.ndarray:
        out = np.empty(k, dtype=DIGIT_DTYPE)
        i = 0
        while i < k:
            take = min(self._left, k - i)
            out[i:i + take] = 1 if self._block % 2 == 0 else 0
            i += take
            self._left -= take
            if self._left == 0:
                self._block += 1
                self._left = 1 << self._block
        return out


# PCG XSL-RR 128/64 seeding, as in the PCG reference pcg_setseq_128_srandom_r.
_PCG_MULT = 0x2360ED051FC65DA44385DF649FCCF645
_PCG_STREAM = 0xDA3E39CB94B95BDB
_M128 = (1 << 128) - 1


def pcg64_state(seed: int) -> tuple[int, int]:
    """(state, increment) of PCG64 after seeding with ``seed``."""
    seed &= (1 << 64) - 1
    inc = ((_PCG_STREAM << 1) | 1) & _M128
    state = (inc + seed) & _M128
    state = (state * _PCG_MULT + inc) & _M128
    return state, inc


class CasualSource(DigitSource):
    """Independent uniform digits from PCG64 (XSL-RR 128/64).

    Each 64-bit output ``w`` yields one digit: ``w mod b`` if
    ``w < 2**64 - (2**64 mod b)``, otherwise ``w`` is rejected. Numpy's
    ``PCG64`` bit generator supplies the raw words after its state is set to
    the reference seeding of :func:`pcg64_state`.
    """

    _WORDS = 1 << 16

    def __init__(self, b: int, seed: int = 0):
        super().__init__(b)
        self.seed = int(seed)
        state, inc = pcg64_state(self.seed)
        self._gen = np.random.PCG64()
        self._gen.state = {
            "bit_generator": "PCG64",
            "state": {"state": state, "inc": inc},
            "has_uint32": 0,
            "uinteger": 0,
        }
        # Powers of two divide 2**64, so they never reject.
        excess = (1 << 64) % self.base
        self._limit = np.uint64((1 << 64) - excess) if excess else None
        self._carry = np.empty(0, dtype=DIGIT_DTYPE)

    def _produce(self, k: int) -> np.ndarray:
        parts = [self._carry]
        have = len(self._carry)
        while have < k:
            words = self._gen.random_raw(max(self._WORDS, k - have))
            if self._limit is not None:
                words = words[words < self._limit]
            digits = (words % np.uint64(self.base)).astype(DIGIT_DTYPE)
            parts.append(digits)
            have += len(digits)
        out = np.concatenate(parts)
        self._carry = out[k:]
        return out[:k]


class RationalSource(DigitSource):
    """Lazy long division, for denominators too large to expand up front."""

    def __init__(self, x: Fraction, b: int):
        super().__init__(b)
        self.value = x
        self._gen = long_division(x.numerator, x.denominator, self.base)

    def _produce(self, k: int) -> np.ndarray:
        gen = self._gen
        return np.fromiter((next(gen) for _ in range(k)), dtype=DIGIT_DTYPE, count=k)


_SKIP, _BAD = 254, 255


def _char_table(b: int) -> np.ndarray:
    table = np.full(256, _BAD, dtype=np.uint8)
    for v, ch in enumerate(ALPHABET[:b]):
        table[ord(ch)] = v
    for ch in " \t\r\n\f\v":
        table[ord(ch)] = _SKIP
    return table


_HEADER = re.compile(rb"^#\s*base\s*=\s*(\d+)\s*$")


def read_header(path: str | os.PathLike) -> tuple[int | None, int]:
    """Declared base (or None) and byte offset where the digit payload begins."""
    with open(path, "rb") as fh:
        first = fh.readline()
        if first.startswith(b"#"):
            m = _HEADER.match(first.strip())
            if not m:
                raise ValueError(f"malformed digit-file header {first!r}")
            declared, start = int(m.group(1)), len(first)
        else:
            declared, start = None, 0
        fh.seek(start)
        offset = start
        while chunk := fh.read(1 << 20):
            dot = chunk.find(b".")
            if dot >= 0:
                return declared, offset + dot + 1
            offset += len(chunk)
    return declared, start


class FileSource(DigitSource):
    """Finite source over a digit file (see :func:`write_digit_file`)."""

    _CHUNK = 1 << 20

    def __init__(self, path: str | os.PathLike, b: int | None = None):
        declared, start = read_header(path)
        if b is None:
            b = declared if declared is not None else 10
        b = check_base(b)
        if declared is not None and declared != b:
            raise BaseMismatch(declared, b)
        super().__init__(b)
        self.path = os.fspath(path)
        self._fh = open(self.path, "rb")
        self._fh.seek(start)
        self._table = _char_table(b)
        self._seen = 0
        self._carry = np.empty(0, dtype=DIGIT_DTYPE)

    def _produce(self, k: int) -> np.ndarray:
        parts = [self._carry]
        have = len(self._carry)
        while have < k:
            raw = self._fh.read(self._CHUNK)
            if not raw:
                self._fh.close()
                break
            vals = self._table[np.frombuffer(raw, dtype=np.uint8)]
            vals = vals[vals != _SKIP]
            bad = np.flatnonzero(vals == _BAD)
            if len(bad):
                kept = np.frombuffer(raw, dtype=np.uint8)
                kept = kept[self._table[kept] != _SKIP]
                pos = int(bad[0])
                raise BadDigit(self._seen + pos + 1, chr(kept[pos]), self.base)
            self._seen += len(vals)
            parts.append(vals)
            have += len(vals)
        out = np.concatenate(parts)
        self._carry = out[k:]
        return out[:k]


def write_digit_file(path, digits, b: int, width: int = 100) -> None:
    """Write digits with a ``# base=B`` header, ``width`` digits per line.

    ``path`` may also be an open text stream.
    """
    b = check_base(b)
    arr = np.asarray(digits, dtype=np.uint8)
    text = np.frombuffer(ALPHABET.encode(), dtype=np.uint8)[arr].tobytes().decode()
    lines = [f"# base={b}\n"] + [text[i:i + width] + "\n" for i in range(0, len(text), width)]
    if hasattr(path, "write"):
        path.writelines(lines)
        return
    with open(path, "w") as fh:
        fh.writelines(lines)


def champernowne(b: int) -> DigitSource:
    return ChampernowneSource(b)


def fibonacci_constant(b: int) -> DigitSource:
    return FibonacciSource(b)


def oscillating_example(b: int) -> DigitSource:
    return OscillatingSource(b)


def casual_source(b: int, seed: int) -> DigitSource:
    return CasualSource(b, seed)


def file_source(path: str | os.PathLike, b: int | None = None) -> DigitSource:
    return FileSource(path, b)


def rational_source(p: int, q: int, b: int) -> DigitSource:
    """Digits of ``frac(|p/q|)``: periodic replay when cheap, long division otherwise."""
    if q == 0:
        raise ZeroDivisionError("q must be non-zero")
    x = abs(Fraction(p, q))
    return fraction_source(x, b)


def fraction_source(x: Fraction, b: int) -> DigitSource:
    x = abs(Fraction(x))
    if x.denominator <= EXPAND_LIMIT:
        return ExpansionSource(rational_to_expansion(x, b))
    return RationalSource(x, b)


def _martin_f(n: int) -> int:
    if n == 2:
        return 4
    prev = _martin_f(n - 1)
    if prev % (n - 1):
        raise ArithmeticError(f"f({n - 1}) = {prev} is not divisible by {n - 1}")
    return n ** (prev // (n - 1))


def martin_partial(terms: int) -> Fraction:
    """Exact partial product over the factors m = 2 .. terms + 1 of Martin's number."""
    if terms < 1:
        raise ValueError("need at least one factor")
    if terms > MARTIN_MAX_TERMS:
        raise TermCap(
            f"{terms} factors requested; f(6) = 6**(5**15) cannot be evaluated, "
            f"so at most {MARTIN_MAX_TERMS} are supported"
        )
    out = Fraction(1)
    for m in range(2, terms + 2):
        out *= 1 - Fraction(1, _martin_f(m))
    return out


def martin_source(b: int, terms: int = MARTIN_MAX_TERMS) -> DigitSource:
    return fraction_source(martin_partial(terms), b)


KINDS = ("champernowne", "fibonacci", "martin", "oscillating", "casual", "rational", "file")


@dataclass(frozen=True)
class SourceSpec:
    """Replayable description of a number, as given on the command line."""

    kind: str
    base: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown source kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        check_base(self.base)
        if self.kind == "rational" and "value" not in self.params:
            raise ValueError("rational sources need a value")
        if self.kind == "file" and "path" not in self.params:
            raise ValueError("file sources need a path")

    def open(self) -> DigitSource:
        """A fresh source positioned before digit 1."""
        b = self.base
        if self.kind == "champernowne":
            return champernowne(b)
        if self.kind == "fibonacci":
            return fibonacci_constant(b)
        if self.kind == "oscillating":
            return oscillating_example(b)
        if self.kind == "casual":
            return casual_source(b, self.params.get("seed", 0))
        if self.kind == "martin":
            return martin_source(b, self.params.get("terms", MARTIN_MAX_TERMS))
        if self.kind == "file":
            return file_source(self.params["path"], b)
        return fraction_source(self.exact_value(), b)

    @property
    def is_exact(self) -> bool:
        return self.kind == "rational"

    def exact_value(self) -> Fraction:
        if self.kind != "rational":
            raise ValueError(f"{self.kind} sources have no exact rational value")
        value = self.params["value"]
        if isinstance(value, EventuallyPeriodicExpansion):
            return expansion_to_rational(value)
        return abs(Fraction(value))

    def describe(self) -> str:
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}:{inner}"

    def to_dict(self) -> dict:
        params = {k: (str(v) if isinstance(v, (Fraction, EventuallyPeriodicExpansion)) else v)
                  for k, v in self.params.items()}
        return {"kind": self.kind, "base": self.base, "params": params}


def parse_source_spec(text: str, base: int | None = None, seed: int | None = None) -> SourceSpec:
    """Parse ``kind[:params]`` strings.

    Accepted forms: ``champernowne``, ``fibonacci``, ``oscillating``,
    ``casual[:seed=N]``, ``martin[:terms=N]``, ``rational:P/Q``,
    ``rational:0.PRE(PERIOD)`` (digits read in ``base``) and ``file:PATH``.
    ``base`` defaults to 10, or to the header base of a digit file.
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind not in KINDS:
        raise ValueError(f"unknown source kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind == "file":
        if not rest:
            raise ValueError("file sources need a path: file:PATH")
        if base is None:
            declared, _ = read_header(rest)
            base = declared if declared is not None else 10
        return SourceSpec(kind, base, {"path": rest})
    b = check_base(10 if base is None else base)
    if kind == "rational":
        if not rest:
            raise ValueError("rational sources need a value: rational:P/Q or rational:0.PRE(PERIOD)")
        if "/" in rest:
            num, den = rest.split("/", 1)
            if int(den) == 0:
                raise ValueError("zero denominator")
            value = abs(Fraction(int(num), int(den)))
            return SourceSpec(kind, b, {"value": value})
        return SourceSpec(kind, b, {"value": parse_expansion(rest, b)})
    params: dict = {}
    for item in filter(None, rest.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"expected key=value, got {item!r}")
        params[key.strip()] = int(val)
    allowed = {"casual": {"seed"}, "martin": {"terms"}}.get(kind, set())
    unknown = set(params) - allowed
    if unknown:
        raise ValueError(f"unexpected parameters for {kind}: {', '.join(sorted(unknown))}")
    if kind == "casual" and "seed" not in params:
        params["seed"] = 0 if seed is None else seed
    if kind == "martin":
        terms = params.setdefault("terms", MARTIN_MAX_TERMS)
        if terms > MARTIN_MAX_TERMS:
            raise TermCap(f"at most {MARTIN_MAX_TERMS} factors are supported, got {terms}")
    return SourceSpec(kind, b, params)
