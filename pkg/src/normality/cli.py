"""Command-line interface: ``normality {gen,analyze,scheme,pseudonormal}``.

Exit codes: 0 success (or PASS), 1 well-formed FAIL verdict, 2 any error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from normality.delta import (
    DeltaScheme,
    PseudonormalResult,
    delta_scheme,
    exact_delta_scheme,
    pseudonormal_test,
)
from normality.digits import EventuallyPeriodicExpansion, digits_to_str, take_prefix
from normality.errors import NormalityError
from normality.exact import rational_to_expansion
from normality.ngrams import block_normal_dev, default_weyl_precision, gap_conditional, simply_normal_dev, weyl_sum
from normality.report import (
    AnalysisReport,
    matrix_to_lists,
    render_scheme_csv,
    render_scheme_table,
    render_verdict,
    scheme_to_dict,
    verdict_to_dict,
)
from normality.sources import SourceSpec, parse_source_spec, write_digit_file

DEFAULT_DIGITS = 10**6
# Longest period the exact mode will materialize.
MAX_EXACT_PERIOD = 10**6

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _exact_expansion(spec: SourceSpec) -> EventuallyPeriodicExpansion:
    value = spec.params["value"]
    if isinstance(value, EventuallyPeriodicExpansion) and value.base == spec.base:
        return value
    return rational_to_expansion(spec.exact_value(), spec.base, max_period=MAX_EXACT_PERIOD)


def _prefix(spec: SourceSpec, m: int | None) -> np.ndarray:
    src = spec.open()
    if m is None and spec.kind == "file":
        out = []
        while len(block := src.read(1 << 20)):
            out.append(block)
        return np.concatenate(out) if out else np.empty(0, dtype=np.uint8)
    return take_prefix(src, DEFAULT_DIGITS if m is None else m)


def cmd_gen(spec: SourceSpec, count: int, out: str | None = None) -> np.ndarray:
    digits = take_prefix(spec.open(), count)
    write_digit_file(out if out is not None else sys.stdout, digits, spec.base)
    return digits


def cmd_scheme(spec: SourceSpec, m: int | None = None, exact: bool | None = None) -> DeltaScheme:
    """Exact scheme for rational specs, streaming scheme over ``m`` digits otherwise."""
    if exact is None:
        exact = spec.is_exact
    if exact:
        if not spec.is_exact:
            raise ValueError(f"exact mode needs a rational source, not {spec.kind}")
        return exact_delta_scheme(_exact_expansion(spec))
    x = _prefix(spec, m)
    return delta_scheme(x, spec.base, len(x))


def cmd_pseudonormal(spec: SourceSpec, m: int | None = None, epsilon: float | None = None,
                     exact: bool | None = None) -> PseudonormalResult:
    return pseudonormal_test(cmd_scheme(spec, m, exact), epsilon)


def cmd_analyze(spec: SourceSpec, m: int | None = None, ngram_max: int = 4,
                weyl_ks: list[int] | None = None, gap_ns: list[int] | None = None,
                weyl_n: int | None = None, epsilon: float | None = None) -> AnalysisReport:
    start = time.perf_counter()
    b = spec.base
    x = _prefix(spec, m)
    m = len(x)
    if m < max(ngram_max, 2):
        raise ValueError(f"need at least {max(ngram_max, 2)} digits, have {m}")
    block = block_normal_dev(x, b, m, ngram_max)
    gaps = []
    for n in gap_ns or [2]:
        g = gap_conditional(x, b, m, n)
        gaps.append({
            "n": n,
            "entries": matrix_to_lists(g.entries),
            "support": [int(s) for s in g.support],
            "absent_rows": g.absent_rows,
            "max_deviation": g.max_deviation(),
        })
    weyl = []
    for k in weyl_ks or [1]:
        D = default_weyl_precision(b, k)
        N = min(weyl_n or m - D, m - D)
        if N < 1:
            raise ValueError(f"too few digits for a Weyl sum with D={D}")
        weyl.append({"k": k, "N": N, "D": D, "magnitude": weyl_sum(x, b, k, N, D)})
    scheme = cmd_scheme(spec, m) if spec.is_exact else delta_scheme(x, b, m)
    verdict = pseudonormal_test(scheme, epsilon) if scheme.rows else None
    return AnalysisReport(
        source=spec.to_dict(),
        base=b,
        m=m,
        simply_normal_dev=simply_normal_dev(x, b, m),
        block={
            "deviation": block.deviation,
            "n": block.n,
            "string": digits_to_str(block.string),
            "per_length": list(block.per_length),
        },
        gap_conditionals=gaps,
        weyl=weyl,
        scheme=scheme_to_dict(scheme),
        pseudonormal=verdict_to_dict(verdict) if verdict is not None else None,
        timing={"seconds": time.perf_counter() - start},
    )


def _resolve_spec(args) -> SourceSpec:
    text = args.source
    exact = getattr(args, "exact", None)
    if isinstance(exact, str):
        if text is not None:
            raise ValueError("give either a source or --exact VALUE, not both")
        text = f"rational:{exact}"
    if text is None:
        raise ValueError("no source given")
    return parse_source_spec(text, base=args.base, seed=args.seed)


def _add_common(p: argparse.ArgumentParser, source_required: bool = True) -> None:
    p.add_argument("source", nargs=None if source_required else "?",
                   help="kind[:params], e.g. champernowne, casual:seed=7, rational:19/62, file:pi.txt")
    p.add_argument("--base", "-b", type=int, default=None, help="digit base (default 10 or the file header)")
    p.add_argument("--digits", "-m", type=int, default=None, help="prefix length to analyze")
    p.add_argument("--seed", type=int, default=None, help="seed for casual sources without seed=")


def _add_format(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true")
    g.add_argument("--csv", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normality", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write the first digits of a source to a digit file")
    _add_common(p)
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")

    p = sub.add_parser("analyze", help="n-gram, conditional, Weyl and scheme statistics")
    _add_common(p)
    p.add_argument("--ngram-max", type=int, default=4)
    p.add_argument("--weyl-k", type=int, action="append", default=None)
    p.add_argument("--weyl-n", type=int, default=None, help="terms in each Weyl sum (default: all)")
    p.add_argument("--gap-n", type=int, action="append", default=None)
    p.add_argument("--tolerance", type=float, default=None)
    _add_format(p)

    for name, helptext in (("scheme", "print the difference-digit scheme"),
                           ("pseudonormal", "test pseudonormality; exit 0 PASS, 1 FAIL")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p, source_required=False)
        p.add_argument("--exact", nargs="?", const=True, default=None, metavar="VALUE",
                       help="exact mode; VALUE may be P/Q or 0.PRE(PERIOD)")
        if name == "pseudonormal":
            p.add_argument("--tolerance", type=float, default=None)
        _add_format(p)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _resolve_spec(args)
        if args.command == "gen":
            cmd_gen(spec, DEFAULT_DIGITS if args.digits is None else args.digits, args.output)
            return EXIT_OK
        if args.command == "analyze":
            report = cmd_analyze(spec, args.digits, args.ngram_max, args.weyl_k, args.gap_n,
                                 args.weyl_n, args.tolerance)
            print(report.to_json() if args.json else report.render_csv() if args.csv else report.render_text())
            return EXIT_OK
        exact = True if args.exact is not None else None
        if args.command == "scheme":
            scheme = cmd_scheme(spec, args.digits, exact)
            if args.json:
                print(json.dumps(scheme_to_dict(scheme), indent=2))
            elif args.csv:
                print(render_scheme_csv(scheme), end="")
            else:
                print(render_scheme_table(scheme))
            return EXIT_OK
        result = cmd_pseudonormal(spec, args.digits, args.tolerance, exact)
        print(json.dumps(verdict_to_dict(result), indent=2) if args.json else render_verdict(result))
        return EXIT_OK if result.passed else EXIT_FAIL
    except (NormalityError, ValueError, ArithmeticError, OSError) as exc:
        print(f"normality: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
