"""Command-line entry point: ``hyptail check | sweep | optimize | probe``.

Exit codes: 0 success, 1 a theorem-class check failed, 2 invalid
invocation, 3 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import sys

from mpmath.libmp import round_ceiling, round_floor

from .bounds import NOT_APPLICABLE, BoundCheck, check_all, check_conjectures, check_robbins
from .errors import HyptailError
from .hyp import HypParams
from .kernel import format_bound, format_rational
from .orders import check_tce_conj
from .sweep import (
    CONJECTURE_CHECKS,
    THEOREM_CHECKS,
    GridSpec,
    SweepReport,
    emit_report,
    optimize_smuggler,
    probe_conjecture,
    run_sweep,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("hyptail")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _describe(chk: BoundCheck) -> str:
    name = chk.bound_id.value
    if not chk.hypotheses_met:
        return f"{name:<18} {NOT_APPLICABLE:<13} ({', '.join(chk.failed_hypotheses)})"
    v = chk.verdict
    if v.exact:
        rhs = format_rational(v.rhs)
    else:
        rhs = f"[{format_bound(v.rhs.lo, round_floor)}, {format_bound(v.rhs.hi, round_ceiling)}]"
    line = (f"{name:<18} {v.status.value:<13} lhs={format_rational(v.lhs)} {v.relation} rhs={rhs}"
            f"  margin>={format_bound(v.margin_lower_bound, round_floor)}")
    if v.reason:
        line += f"  ({v.reason})"
    return line


def _cmd_check(args) -> int:
    p = HypParams(args.n, args.i, args.k)
    budget = args.precision_bits
    theorems = check_all(p, budget_bits=budget)
    theorems += [check_tce_conj(p, budget_bits=budget), check_robbins(p.n, budget_bits=budget)]
    conjectures = check_conjectures(p, budget_bits=budget)
    print(f"n={p.n} i={p.i} k={p.k}  mean={format_rational(p.mean)}")
    for chk in theorems:
        print(_describe(chk))
    print("conjectures:")
    for chk in conjectures:
        print(_describe(chk))
    failed = any(c.hypotheses_met and c.category == "Fails" for c in theorems)
    return EXIT_FAIL if failed else EXIT_OK


def _grid(args, checks) -> GridSpec:
    kw = dict(n_max=args.n_max, k_filter=args.k_filter, i_filter=args.i_filter,
              checks=tuple(checks), keep_rows=getattr(args, "all_rows", False))
    if args.precision_bits is not None:
        kw["precision_budget_bits"] = args.precision_bits
    return GridSpec(**kw)


def _summarize(report: SweepReport) -> None:
    for bid, counts in report.totals.items():
        cells = " ".join(f"{s}={c}" for s, c in counts.items())
        print(f"{bid:<18} {cells}")
    for name, stats in report.conjecture_stats.items():
        print(f"{name}: " + ", ".join(f"{k}={v}" for k, v in stats.items()))
    if report.findings:
        print(f"findings: {len(report.findings)} conjecture rows did not hold")
        for r in report.findings[:10]:
            print(f"  {r.bound_id} n={r.n} i={r.i} k={r.k} {r.status} lhs={r.lhs} rhs=[{r.rhs_lo}, {r.rhs_hi}]")
    for r in report.theorem_failures:
        print(f"FAIL {r.bound_id} n={r.n} i={r.i} k={r.k} lhs={r.lhs} rhs=[{r.rhs_lo}, {r.rhs_hi}]")


def _finish(report: SweepReport, args) -> int:
    _summarize(report)
    if args.out:
        emit_report(report, args.format, args.out)
    return EXIT_FAIL if report.theorem_failures else EXIT_OK


def _cmd_sweep(args) -> int:
    checks = THEOREM_CHECKS if args.checks == "theorems" else args.checks.split(",")
    return _finish(run_sweep(_grid(args, checks), workers=args.workers), args)


def _cmd_probe(args) -> int:
    spec = _grid(args, (args.conjecture,))
    return _finish(probe_conjecture(args.conjecture, spec, workers=args.workers), args)


def _cmd_optimize(args) -> int:
    res = optimize_smuggler(args.n, args.k)
    best = res.profit(res.argmax_set[0])
    print(f"n={res.n} k={res.k} best profit={format_rational(best)} at i in {list(res.argmax_set)}")
    if args.verbose:
        for i, v in enumerate(res.per_i, 1):
            print(f"  i={i:<4} {format_rational(v)}")
    return EXIT_OK


def _grid_flags(sp: argparse.ArgumentParser, n_max: int) -> None:
    sp.add_argument("--n-max", type=int, default=n_max)
    sp.add_argument("--k-filter", default="all", help="all | n/D | band:A:B")
    sp.add_argument("--i-filter", default="all", help="all | one | half")
    sp.add_argument("--precision-bits", type=int, default=None)
    sp.add_argument("--out", default=None, help="report file")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--all-rows", action="store_true", help="write every evaluated row")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="hyptail", description="Certified hypergeometric tail bounds.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="every bound at one (n, i, k)")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--i", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--precision-bits", type=int, default=None)
    c.set_defaults(func=_cmd_check)

    s = sub.add_parser("sweep", help="exhaustive grid verification")
    _grid_flags(s, 150)
    s.add_argument("--checks", default="theorems",
                   help="comma-separated bound ids, or 'theorems' for " + ",".join(THEOREM_CHECKS))
    s.set_defaults(func=_cmd_sweep)

    o = sub.add_parser("optimize", help="best number of loaded agents")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--k", type=int, required=True)
    o.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("probe", help="scan a conjecture for counterexamples")
    p.add_argument("--conjecture", required=True, choices=CONJECTURE_CHECKS)
    _grid_flags(p, 100)
    p.set_defaults(func=_cmd_probe)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OSError as e:
        print(f"hyptail: {e}", file=sys.stderr)
        return EXIT_IO
    except (HyptailError, ValueError) as e:
        print(f"hyptail: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
