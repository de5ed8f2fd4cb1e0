"""Finite-prefix estimators of digit-string probabilities.

Counts are exact integers; each frequency is formed by one division at the
end. A length-``n`` string is counted over the ``m - n + 1`` overlapping
windows of an ``m``-digit prefix, and that window count is the denominator.

Every function accepts either a :class:`~normality.digits.DigitSource` (the
first ``m`` digits are consumed) or an in-memory digit array.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, log
from typing import Sequence

import numpy as np

from normality.digits import as_prefix, check_base, digits_to_str, str_to_digits
from normality.errors import DegenerateWindow

# Above this many possible strings, counting switches from bincount to sort.
_DENSE_LIMIT = 1 << 22


def _codes(x: np.ndarray, b: int, n: int) -> np.ndarray:
    """Integer code of every length-``n`` window (first digit most significant)."""
    if n * log(b, 2) >= 63:
        raise ValueError(f"strings of length {n} in base {b} do not fit a 64-bit code")
    w = len(x) - n + 1
    codes = np.zeros(max(w, 0), dtype=np.int64)
    for k in range(n):
        codes *= b
        codes += x[k:k + w]
    return codes


def _decode(code: int, b: int, n: int) -> tuple[int, ...]:
    out = [0] * n
    for k in range(n - 1, -1, -1):
        code, out[k] = divmod(code, b)
    return tuple(out)


def _as_key(s, b: int) -> tuple[int, ...]:
    if isinstance(s, str):
        return str_to_digits(s, b)
    return tuple(int(d) for d in s)


@dataclass(frozen=True)
class NGramTable:
    """Occurrence counts of the length-``n`` strings in an ``m``-digit prefix.

    ``codes`` holds the sorted integer codes of the strings that occur and
    ``occurrences`` their counts; strings that never occur are implicit zeros.
    """

    base: int
    n: int
    m: int
    codes: np.ndarray
    occurrences: np.ndarray

    @property
    def windows(self) -> int:
        return self.m - self.n + 1

    @property
    def counts(self) -> dict[tuple[int, ...], int]:
        return {_decode(int(c), self.base, self.n): int(k) for c, k in zip(self.codes, self.occurrences)}

    def count(self, s) -> int:
        key = _as_key(s, self.base)
        if len(key) != self.n:
            raise ValueError(f"expected a string of length {self.n}, got {len(key)}")
        code = 0
        for d in key:
            code = code * self.base + d
        i = np.searchsorted(self.codes, code)
        if i < len(self.codes) and self.codes[i] == code:
            return int(self.occurrences[i])
        return 0

    def dense(self) -> np.ndarray:
        """Counts of all ``b**n`` strings, indexed by code."""
        out = np.zeros(self.base**self.n, dtype=np.int64)
        out[self.codes] = self.occurrences
        return out


def _tally(codes: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray]:
    if size <= _DENSE_LIMIT:
        full = np.bincount(codes, minlength=size)
        nz = np.flatnonzero(full)
        return nz.astype(np.int64), full[nz].astype(np.int64)
    uniq, cnt = np.unique(codes, return_counts=True)
    return uniq, cnt.astype(np.int64)


def count_ngrams(src, m: int, n: int, b: int | None = None) -> NGramTable:
    if not 1 <= n <= m:
        raise ValueError("need m >= n >= 1")
    b = check_base(b if b is not None else src.base)
    x = as_prefix(src, m, b)
    codes, occ = _tally(_codes(x, b, n), b**n)
    return NGramTable(b, n, m, codes, occ)


def empirical_prob(table: NGramTable, s) -> float:
    """``count(s) / windows``; zero for strings that never occur."""
    if table.windows <= 0:
        raise DegenerateWindow(f"no windows of length {table.n} in {table.m} digits")
    return table.count(s) / table.windows


def _worst_string(x: np.ndarray, b: int, n: int) -> tuple[float, int]:
    """Largest |freq - b**-n| over length-``n`` strings, and the code attaining it."""
    size = b**n
    expected = np.longdouble(1) / size
    codes, occ = _tally(_codes(x, b, n), size)
    dev = np.abs(occ / np.longdouble(len(x) - n + 1) - expected)
    i = int(np.argmax(dev)) if len(dev) else -1
    worst, code = (dev[i], int(codes[i])) if i >= 0 else (np.longdouble(-1), 0)
    if len(codes) < size and expected > worst:
        # An absent string deviates by exactly b**-n.
        present = set(codes.tolist())
        code = next(c for c in range(size) if c not in present)
        worst = expected
    return float(worst), code


def simply_normal_dev(src, b: int, m: int) -> float:
    """max over digits d of |freq(d) - 1/b| in the first ``m`` digits."""
    if m < 1:
        raise ValueError("m must be positive")
    return _worst_string(as_prefix(src, m, b), b, 1)[0]


@dataclass(frozen=True)
class BlockDeviation:
    deviation: float
    n: int
    string: tuple[int, ...]
    per_length: tuple[float, ...]

    def __str__(self) -> str:
        return f"{self.deviation:.6g} at n={self.n}, string {digits_to_str(self.string)!r}"


def block_normal_dev(src, b: int, m: int, n_max: int) -> BlockDeviation:
    """Worst |freq(s) - b**-n| over all strings ``s`` of length ``n <= n_max``.

    Strings that never occur count with frequency zero.
    """
    if not 1 <= n_max <= m:
        raise ValueError("need m >= n_max >= 1")
    x = as_prefix(src, m, b)
    best = (-1.0, 0, ())
    per_length = []
    for n in range(1, n_max + 1):
        worst, code = _worst_string(x, b, n)
        per_length.append(worst)
        if worst > best[0]:
            best = (worst, n, _decode(code, b, n))
    return BlockDeviation(best[0], best[1], best[2], tuple(per_length))


@dataclass(frozen=True)
class PrefixConditional:
    """Estimates of P(next digit | preceding (n-1)-string).

    Only prefixes that occur appear in ``rows``; any other prefix is absent
    (no evidence), which is distinct from a probability of zero.
    """

    base: int
    n: int
    rows: dict[tuple[int, ...], np.ndarray]
    support: dict[tuple[int, ...], int]

    def row(self, prefix) -> np.ndarray | None:
        return self.rows.get(_as_key(prefix, self.base))

    def prob(self, prefix, digit: int) -> float | None:
        row = self.row(prefix)
        return None if row is None else float(row[digit])


def prefix_conditional(src, b: int, m: int, n: int) -> PrefixConditional:
    """count(s_1..s_n) / count(s_1..s_{n-1}), the latter over the windows that have a successor."""
    if not 2 <= n <= m:
        raise ValueError("need m >= n >= 2")
    x = as_prefix(src, m, b)
    codes = _codes(x, b, n)
    full, cnt = _tally(codes, b**n)
    heads = full // b
    rows: dict[tuple[int, ...], np.ndarray] = {}
    support: dict[tuple[int, ...], int] = {}
    # full is sorted, so each head's successors form one contiguous run
    uniq, starts = np.unique(heads, return_index=True)
    for head, lo, hi in zip(uniq, starts, list(starts[1:]) + [len(full)]):
        vec = np.zeros(b, dtype=np.int64)
        vec[full[lo:hi] % b] = cnt[lo:hi]
        key = _decode(int(head), b, n - 1)
        total = int(vec.sum())
        support[key] = total
        rows[key] = vec / np.longdouble(total)
    return PrefixConditional(b, n, rows, support)


@dataclass(frozen=True)
class ConditionalMatrix:
    """Estimates of P([s_n] | [s_1]) for windows of length ``n``.

    Row ``s_1`` holds NaN when no window starts with ``s_1`` (absent row).
    """

    base: int
    n: int
    entries: np.ndarray
    support: np.ndarray

    @property
    def absent_rows(self) -> list[int]:
        return [int(d) for d in np.flatnonzero(self.support == 0)]

    def max_deviation(self, target: float | None = None) -> float:
        """Largest |entry - target| over supported rows (target defaults to 1/b)."""
        target = 1 / self.base if target is None else target
        rows = self.entries[self.support > 0]
        return float(np.max(np.abs(rows - target))) if rows.size else float("nan")


def gap_conditional(src, b: int, m: int, n: int) -> ConditionalMatrix:
    """Share of length-``n`` windows starting with s_1 that end with s_n."""
    if not 2 <= n <= m:
        raise ValueError("need m >= n >= 2")
    x = as_prefix(src, m, b).astype(np.int64)
    w = m - n + 1
    joint = np.bincount(x[:w] * b + x[n - 1:n - 1 + w], minlength=b * b).reshape(b, b)
    support = joint.sum(axis=1)
    entries = np.full((b, b), np.nan)
    ok = support > 0
    entries[ok] = joint[ok] / support[ok, None].astype(np.longdouble)
    return ConditionalMatrix(b, n, entries, support)


def default_weyl_precision(b: int, k: int) -> int:
    return ceil(log(abs(k), b) + 12)


def weyl_sum(src, b: int, k: int, N: int, D: int | None = None) -> float:
    """|(1/N) sum_{j=1..N} exp(2 pi i k a_j)| with a_j = frac(b**j * x).

    Each a_j is read from the ``D`` digits at positions j+1 .. j+D, so the
    source must supply ``N + D`` digits.
    """
    if k == 0:
        raise ValueError("k must be non-zero")
    if N < 1:
        raise ValueError("N must be positive")
    if D is None:
        D = default_weyl_precision(b, k)
    if D < 1:
        raise ValueError("D must be positive")
    x = as_prefix(src, N + D, b).astype(np.float64)
    a = np.zeros(N, dtype=np.float64)
    scale = 1.0
    for t in range(D):
        scale /= b
        a += x[1 + t:1 + t + N] * scale
    phase = 2 * np.pi * ((k * a) % 1.0)
    total = np.cos(phase).sum() + 1j * np.sin(phase).sum()
    return min(1.0, abs(total) / N)


def density_trajectory(src, s, checkpoints: Sequence[int], b: int | None = None) -> list[float]:
    """Running frequency of ``s`` among the windows of each prefix checkpoint."""
    checkpoints = [int(c) for c in checkpoints]
    if any(c2 <= c1 for c1, c2 in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if not checkpoints:
        return []
    base = check_base(b if b is not None else src.base)
    key = _as_key(s, base)
    n = len(key)
    if checkpoints[0] < n:
        raise ValueError("every checkpoint must be at least the string length")
    x = as_prefix(src, checkpoints[-1], base)
    hit = np.ones(len(x) - n + 1, dtype=bool)
    for k, d in enumerate(key):
        hit &= x[k:k + len(hit)] == d
    running = np.concatenate(([0], np.cumsum(hit)))
    return [running[c - n + 1] / (c - n + 1) for c in checkpoints]
