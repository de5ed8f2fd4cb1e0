"""Serializable analysis reports and table rendering."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from normality.delta import DeltaScheme, PseudonormalResult
from normality.digits import digits_to_str
from normality.exact import rational_to_expansion

SCHEMA_VERSION = 1


def repeating_decimal(x: Fraction) -> str:
    """``2/3 -> '0.(6)'``, ``1/4 -> '0.25'``, ``1 -> '1'``."""
    if x == int(x):
        return str(int(x))
    e = rational_to_expansion(x, 10)
    head = f"{int(x)}.{digits_to_str(e.preperiod)}"
    return head if e.is_terminating else f"{head}({digits_to_str(e.period)})"


def _prob_text(p, exact: bool) -> str:
    if exact:
        p = Fraction(p)
        return str(p) if p.denominator == 1 else f"{p} = {repeating_decimal(p)}"
    return f"{float(p):.5f}"


def scheme_to_dict(scheme: DeltaScheme) -> dict:
    exact = scheme.mode == "exact"
    rows = []
    for r in scheme.sorted_rows():
        row = {"i": r.i, "j": r.j, "delta": r.delta, "mode": r.mode, "count": r.count}
        if exact:
            row["probs"] = [str(p) for p in r.probs]
            row["decimal"] = [repeating_decimal(p) for p in r.probs]
        else:
            row["probs"] = [float(p) for p in r.probs]
        rows.append(row)
    return {"base": scheme.base, "m": scheme.m, "mode": scheme.mode, "rows": rows}


def verdict_to_dict(result: PseudonormalResult) -> dict:
    return {
        "verdict": "PASS" if result.passed else "FAIL",
        "mode": result.mode,
        "rows": [asdict(r) for r in result.rows],
        "flagged": [list(p) for p in result.flagged],
        "same_delta": [
            {"first": list(p.first), "second": list(p.second), "delta": p.delta,
             "difference": p.difference, "agree": p.agree}
            for p in result.pairs
        ],
    }


def render_scheme_table(scheme: DeltaScheme) -> str:
    exact = scheme.mode == "exact"
    b = scheme.base
    header = ["i", "j"] + [f"P({d})" for d in range(b)] + ["mode", "digits"]
    body = [
        [str(r.i), str(r.j)] + [_prob_text(p, exact) for p in r.probs] + [r.mode, str(r.count)]
        for r in scheme.sorted_rows()
    ]
    return _align([header] + body)


def render_scheme_csv(scheme: DeltaScheme) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "delta", "mode", "count"] + [f"p{d}" for d in range(scheme.base)])
    for r in scheme.sorted_rows():
        probs = [str(p) for p in r.probs] if r.mode == "exact" else [f"{float(p):.5f}" for p in r.probs]
        w.writerow([r.i, r.j, r.delta, r.mode, r.count] + probs)
    return buf.getvalue()


def render_verdict(result: PseudonormalResult) -> str:
    lines = [f"{'PASS' if result.passed else 'FAIL'}: base-{result.base} pseudonormality ({result.mode} mode)"]
    table = [["i", "j", "delta", "max dev", "digit", "tol", "ok"]]
    for r in result.rows:
        table.append([str(r.i), str(r.j), str(r.delta), f"{r.deviation:.5g}", str(r.worst_digit),
                      f"{r.tolerance:.3g}", "yes" if r.passed else "NO"])
    lines.append(_align(table))
    split = [p for p in result.pairs if not p.agree]
    for p in split:
        lines.append(f"rows {p.first} and {p.second} (delta={p.delta}) differ by {p.difference:.5g}")
    return "\n".join(lines)


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(r, widths)).rstrip() for r in rows)


@dataclass
class AnalysisReport:
    """Everything ``normality analyze`` computes, as JSON-friendly values.

    Absent conditional rows are stored as ``None``.
    """

    source: dict
    base: int
    m: int
    simply_normal_dev: float
    block: dict
    gap_conditionals: list[dict] = field(default_factory=list)
    weyl: list[dict] = field(default_factory=list)
    scheme: dict | None = None
    pseudonormal: dict | None = None
    timing: dict = field(default_factory=dict)
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        if data.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))

    def without_timing(self) -> dict:
        d = self.to_dict()
        d.pop("timing")
        return d

    def render_text(self) -> str:
        out = [
            f"source: {self.source['kind']} {self.source['params'] or ''}".rstrip(),
            f"base {self.base}, {self.m} digits",
            f"simple normality deviation: {self.simply_normal_dev:.6g}",
            f"block deviation (n <= {len(self.block['per_length'])}): {self.block['deviation']:.6g} "
            f"at n={self.block['n']}, string '{self.block['string']}'",
        ]
        for g in self.gap_conditionals:
            out.append(f"gap conditional n={g['n']}: max |P - 1/b| = {g['max_deviation']:.6g}"
                       + (f", absent rows {g['absent_rows']}" if g["absent_rows"] else ""))
        for w in self.weyl:
            out.append(f"Weyl |sum| k={w['k']}, N={w['N']}, D={w['D']}: {w['magnitude']:.6g}")
        if self.pseudonormal is not None:
            out.append(f"pseudonormality: {self.pseudonormal['verdict']} ({self.pseudonormal['mode']} mode)")
            if self.pseudonormal["flagged"]:
                out.append(f"  flagged rows: {self.pseudonormal['flagged']}")
        out.append(f"elapsed: {self.timing.get('seconds', 0):.3f} s")
        return "\n".join(out)

    def render_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "key", "value"])
        w.writerow(["simple", "deviation", self.simply_normal_dev])
        w.writerow(["block", "deviation", self.block["deviation"]])
        w.writerow(["block", "string", self.block["string"]])
        for g in self.gap_conditionals:
            w.writerow([f"gap_n{g['n']}", "max_deviation", g["max_deviation"]])
        for x in self.weyl:
            w.writerow([f"weyl_k{x['k']}", "magnitude", x["magnitude"]])
        if self.pseudonormal is not None:
            w.writerow(["pseudonormal", "verdict", self.pseudonormal["verdict"]])
            for r in self.pseudonormal["rows"]:
                w.writerow([f"row_{r['i']}_{r['j']}", "deviation", r["deviation"]])
        return buf.getvalue()


def matrix_to_lists(entries: np.ndarray) -> list[list[float | None]]:
    return [[None if np.isnan(v) else float(v) for v in row] for row in entries]
