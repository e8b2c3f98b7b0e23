"""Grid sweeps, conjecture probes, the smuggler scan, and report files.

A sweep is split into one task per population size ``n``.  Tasks share
nothing and return plain data; results are merged in increasing ``n`` and
within a task points are visited in (k, i) order, so the report does not
depend on how many worker processes ran.
"""
from __future__ import annotations

import csv
import heapq
import io
import json
import logging
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

from mpmath.libmp import round_ceiling, round_floor

from . import bounds as B
from .bounds import NOT_APPLICABLE, BoundCheck, BoundId
from .errors import InvalidParams, InvalidSpec
from .hyp import HypParams, as_params, hyp_dist, profile
from .kernel import (
    START_BITS,
    default_budget,
    eval_interval,
    format_bound,
    format_rational,
    mpf_to_fraction,
)
from .orders import check_tce_conj

log = logging.getLogger(__name__)

TOP_EXTREMES = 20
STATUSES = ("Holds", "Fails", "Indeterminate", NOT_APPLICABLE)


def _single(fn):
    return lambda p, b: (fn(p, budget_bits=b),)


def _small_mean(p, b):
    return B.check_small_mean(p, budget_bits=b)


def _binom_classics(p, b):
    return B.check_binom_classics(p.k, p.p, budget_bits=b)


# bound id -> (evaluator returning a tuple of checks, position in that tuple);
# ids sharing an evaluator are computed once per point
EVALUATORS: dict[BoundId, tuple[Callable, int]] = {
    BoundId.THEOREM1: (_single(B.check_theorem1), 0),
    BoundId.THEOREM2: (_single(B.check_theorem2), 0),
    BoundId.COROLLARY049: (_single(B.check_corollary049), 0),
    BoundId.BERRY_ESSEEN: (_single(B.check_berry_esseen), 0),
    BoundId.EHM: (_single(B.check_ehm), 0),
    BoundId.MAD_LOWER: (_single(B.check_mad_lower), 0),
    BoundId.TCE_UPPER: (_single(B.check_tce_upper), 0),
    BoundId.POINT_MASS_RATIO: (_single(B.check_pointmass_ratio), 0),
    BoundId.SMALL_MEAN1: (_small_mean, 0),
    BoundId.SMALL_MEAN2: (_small_mean, 1),
    BoundId.BEREND_KONTOROVICH: (_binom_classics, 0),
    BoundId.GREENBERG_MOHRI: (_binom_classics, 1),
    BoundId.MEDIAN_TCE: (lambda p, b: (B.check_median_tce(hyp_dist(p), budget_bits=b),), 0),
    BoundId.TCE_CONJ: (_single(check_tce_conj), 0),
    BoundId.CONJ_HALF: (_single(B.check_conj_half), 0),
    BoundId.CONJ_QUARTER: (_single(B.check_conj_quarter), 0),
    BoundId.THEOREM1_AT_4K: (_single(B.check_theorem1_at_4k), 0),
}


def evaluate(bid: BoundId, params, budget_bits: int | None = None) -> BoundCheck:
    """Run one registered check at one point."""
    fn, idx = EVALUATORS[BoundId(bid)]
    return fn(as_params(params), default_budget() if budget_bits is None else budget_bits)[idx]


THEOREM_CHECKS = tuple(b.value for b in EVALUATORS if not b.is_conjecture)
CONJECTURE_CHECKS = tuple(b.value for b in EVALUATORS if b.is_conjecture)


# --------------------------------------------------------------------------
# grid description

_K_FILTER = re.compile(r"^(all|n/(\d+)|band:(\d+):(\d+))$")
_I_FILTERS = ("all", "one", "half")


def _k_predicate(desc: str) -> Callable[[int, int], bool]:
    m = _K_FILTER.match(desc)
    if not m:
        raise InvalidSpec(f"bad k filter {desc!r}; use all, n/D or band:A:B")
    if m.group(1) == "all":
        return lambda n, k: True
    if m.group(2):
        d = int(m.group(2))
        if d < 1:
            raise InvalidSpec("k filter divisor must be positive")
        return lambda n, k: d * k <= n
    a, b = int(m.group(3)), int(m.group(4))
    if not a < b:
        raise InvalidSpec("band:A:B needs A < B")
    return lambda n, k: a * k <= n < b * k


def _i_values(desc: str, n: int) -> range | tuple:
    if desc == "all":
        return range(1, n + 1)
    if desc == "one":
        return (1,)
    if desc == "half":
        return (n // 2,) if n % 2 == 0 else ()
    raise InvalidSpec(f"bad i filter {desc!r}; use one of {_I_FILTERS}")


@dataclass(frozen=True)
class GridSpec:
    """All (n, i, k) with n_min <= n <= n_max passing the k and i filters.

    k filters: ``all``; ``n/D`` for D*k <= n; ``band:A:B`` for A*k <= n < B*k.
    i filters: ``all``, ``one`` (i = 1), ``half`` (i = n/2).
    """

    n_min: int = 1
    n_max: int = 150
    k_filter: str = "all"
    i_filter: str = "all"
    checks: tuple[str, ...] = THEOREM_CHECKS
    precision_budget_bits: int = field(default_factory=default_budget)
    keep_rows: bool = False

    def __post_init__(self):
        if self.n_min < 1 or self.n_max < 0:
            raise InvalidSpec("n range must be positive")
        if self.precision_budget_bits < 32:
            raise InvalidSpec("precision budget must be at least 32 bits")
        _k_predicate(self.k_filter)
        if self.i_filter not in _I_FILTERS:
            raise InvalidSpec(f"bad i filter {self.i_filter!r}; use one of {_I_FILTERS}")
        object.__setattr__(self, "checks", tuple(self.checks))
        for c in self.checks:
            try:
                bid = BoundId(c)
            except ValueError:
                raise InvalidSpec(f"unknown check {c!r}") from None
            if bid not in EVALUATORS:
                raise InvalidSpec(f"check {c!r} is not defined on (n, i, k) triples")

    @property
    def bound_ids(self) -> tuple[BoundId, ...]:
        return tuple(BoundId(c) for c in self.checks)

    def points_for(self, n: int) -> Iterator[HypParams]:
        keep_k = _k_predicate(self.k_filter)
        i_vals = _i_values(self.i_filter, n)
        for k in range(1, n + 1):
            if keep_k(n, k):
                for i in i_vals:
                    yield HypParams(n, i, k)

    def points(self) -> Iterator[HypParams]:
        for n in range(self.n_min, self.n_max + 1):
            yield from self.points_for(n)

    def cardinality(self) -> int:
        return sum(1 for _ in self.points())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["checks"] = list(self.checks)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GridSpec":
        return cls(**{**d, "checks": tuple(d["checks"])})


# --------------------------------------------------------------------------
# report types

@dataclass(frozen=True)
class ReportRow:
    """One check at one point, with exact and interval values as strings."""

    bound_id: str
    n: int
    i: int
    k: int
    hypotheses_met: bool
    status: str
    lhs: str
    rhs_lo: str
    rhs_hi: str
    margin_lower_bound: str

    FIELDS = ("bound_id", "n", "i", "k", "hypotheses_met", "status",
              "lhs", "rhs_lo", "rhs_hi", "margin_lower_bound")

    @classmethod
    def from_check(cls, p: HypParams, chk: BoundCheck) -> "ReportRow":
        bid = chk.bound_id.value
        if not chk.hypotheses_met:
            return cls(bid, p.n, p.i, p.k, False, NOT_APPLICABLE, "", "", "", "")
        v = chk.verdict
        if v.exact:
            lo = hi = format_rational(v.rhs)
        else:
            lo = format_bound(v.rhs.lo, round_floor)
            hi = format_bound(v.rhs.hi, round_ceiling)
        return cls(bid, p.n, p.i, p.k, True, v.status.value, format_rational(v.lhs), lo, hi,
                   format_bound(v.margin_lower_bound, round_floor))


@dataclass
class SweepReport:
    grid: dict
    report_class: str = "THEOREM"
    totals: dict = field(default_factory=dict)
    extremes: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    undecided: list = field(default_factory=list)
    findings: list = field(default_factory=list)
    conjecture_stats: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    @property
    def theorem_failures(self) -> list[ReportRow]:
        return [r for r in self.failures if not BoundId(r.bound_id).is_conjecture]

    def to_dict(self) -> dict:
        return {
            "grid": self.grid,
            "report_class": self.report_class,
            "totals": self.totals,
            "extremes": {b: [asdict(r) for r in rows] for b, rows in self.extremes.items()},
            "failures": [asdict(r) for r in self.failures],
            "undecided": [asdict(r) for r in self.undecided],
            "findings": [asdict(r) for r in self.findings],
            "conjecture_stats": self.conjecture_stats,
            "rows": [asdict(r) for r in self.rows],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepReport":
        rows = lambda xs: [ReportRow(**x) for x in xs]  # noqa: E731
        return cls(
            grid=d["grid"],
            report_class=d["report_class"],
            totals=d["totals"],
            extremes={b: rows(xs) for b, xs in d["extremes"].items()},
            failures=rows(d["failures"]),
            undecided=rows(d["undecided"]),
            findings=rows(d["findings"]),
            conjecture_stats=d["conjecture_stats"],
            rows=rows(d["rows"]),
        )

    def csv_rows(self) -> list[ReportRow]:
        if self.grid.get("keep_rows"):
            return list(self.rows)
        out = [r for rows in self.extremes.values() for r in rows]
        return out + self.failures + self.undecided + self.findings


# --------------------------------------------------------------------------
# sweep engine

def _point_key(p: HypParams) -> tuple[int, int, int]:
    return p.n, p.k, p.i


def _run_chunk(args) -> dict:
    """Evaluate every requested check at every point with the given n."""
    spec, n = args
    budget = spec.precision_budget_bits
    ids = spec.bound_ids
    totals = {b.value: Counter() for b in ids}
    # per bound, a heap of the TOP_EXTREMES smallest margins, stored negated
    heaps: dict[str, list] = {b.value: [] for b in ids}
    failures, undecided, findings, rows = [], [], [], []
    half = quarter_min = None
    for p in spec.points_for(n):
        done = {}
        for bid in ids:
            fn, idx = EVALUATORS[bid]
            if fn not in done:
                done[fn] = fn(p, budget)
            chk = done[fn][idx]
            cat = chk.category
            totals[bid.value][cat] += 1
            if spec.keep_rows:
                rows.append(ReportRow.from_check(p, chk))
            if cat == NOT_APPLICABLE:
                continue
            if cat == "Holds":
                m = chk.verdict.margin_lower_bound
                neg = (-m, -p.n, -p.k, -p.i)
                h = heaps[bid.value]
                if len(h) < TOP_EXTREMES:
                    heapq.heappush(h, (neg, ReportRow.from_check(p, chk)))
                elif neg > h[0][0]:
                    heapq.heapreplace(h, (neg, ReportRow.from_check(p, chk)))
            elif cat == "Fails":
                (findings if bid.is_conjecture else failures).append(ReportRow.from_check(p, chk))
            else:
                (findings if bid.is_conjecture else undecided).append(ReportRow.from_check(p, chk))
            if bid is BoundId.CONJ_HALF:
                iv = eval_interval(B.conj_half_ratio(p), START_BITS)
                half = _merge_half(half, (mpf_to_fraction(iv.lo), mpf_to_fraction(iv.hi), _point_key(p), 1))
            elif bid is BoundId.CONJ_QUARTER:
                t = profile(p).tail_at_mean
                if quarter_min is None or t < quarter_min[0]:
                    quarter_min = (t, _point_key(p))
    return {
        "totals": totals, "extremes": heaps, "failures": failures, "undecided": undecided,
        "findings": findings, "rows": rows, "half": half, "quarter": quarter_min,
    }


def _merge_half(a, b):
    """Combine (min lo, min hi, witness of min lo, count) summaries of ConjHalf ratios."""
    if a is None or b is None:
        return a or b
    lo, wit = (a[0], a[2]) if a[0] <= b[0] else (b[0], b[2])
    return lo, min(a[1], b[1]), wit, a[3] + b[3]


def _fmt_point(key) -> str:
    n, k, i = key
    return f"n={n},i={i},k={k}"


def run_sweep(spec: GridSpec, workers: int = 1, report_class: str = "THEOREM") -> SweepReport:
    """Evaluate ``spec.checks`` on every grid point and aggregate."""
    ns = list(range(spec.n_min, spec.n_max + 1))
    tasks = [(spec, n) for n in ns]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, tasks, chunksize=1))
    else:
        chunks = [_run_chunk(t) for t in tasks]

    ids = [b.value for b in spec.bound_ids]
    totals = {b: Counter() for b in ids}
    cands = {b: [] for b in ids}
    report = SweepReport(grid=spec.to_dict(), report_class=report_class)
    half = quarter_min = None
    for ch in chunks:
        for b in ids:
            totals[b].update(ch["totals"][b])
            cands[b].extend(ch["extremes"][b])
        report.failures += ch["failures"]
        report.undecided += ch["undecided"]
        report.findings += ch["findings"]
        report.rows += ch["rows"]
        half = _merge_half(half, ch["half"])
        qm = ch["quarter"]
        if qm is not None and (quarter_min is None or qm[0] < quarter_min[0]):
            quarter_min = qm

    report.totals = {b: {s: totals[b].get(s, 0) for s in STATUSES} for b in ids}
    report.extremes = {b: [r for _, r in heapq.nlargest(TOP_EXTREMES, cands[b], key=lambda kr: kr[0])]
                       for b in ids}
    if BoundId.CONJ_HALF.value in ids:
        report.conjecture_stats[BoundId.CONJ_HALF.value] = {
            "points": half[3] if half else 0,
            "conjectured_constant": "1/(2*sqrt(2))",
            "min_normalized_ratio_lo": format_bound(half[0], round_floor) if half else "",
            "min_normalized_ratio_hi": format_bound(half[1], round_ceiling) if half else "",
            "witness": _fmt_point(half[2]) if half else "",
        }
    if BoundId.CONJ_QUARTER.value in ids:
        report.conjecture_stats[BoundId.CONJ_QUARTER.value] = {
            "points": sum(totals[BoundId.CONJ_QUARTER.value][s] for s in STATUSES[:3]),
            "min_tail": format_rational(quarter_min[0]) if quarter_min else "",
            "witness": _fmt_point(quarter_min[1]) if quarter_min else "",
        }
    if BoundId.THEOREM1_AT_4K.value in ids:
        report.conjecture_stats[BoundId.THEOREM1_AT_4K.value] = {
            "points": sum(totals[BoundId.THEOREM1_AT_4K.value][s] for s in STATUSES[:3]),
            "counterexamples": totals[BoundId.THEOREM1_AT_4K.value].get("Fails", 0),
        }
    if report.theorem_failures:
        log.warning("%d theorem-class failures", len(report.theorem_failures))
    return report


def probe_conjecture(name: str, spec: GridSpec, workers: int = 1) -> SweepReport:
    """Sweep a single conjecture; its failures land in ``findings``."""
    bid = BoundId(name)
    if not bid.is_conjecture:
        raise InvalidSpec(f"{name} is not a conjecture; use one of {CONJECTURE_CHECKS}")
    return run_sweep(replace(spec, checks=(bid.value,)), workers=workers, report_class="CONJECTURE")


# --------------------------------------------------------------------------
# smuggler

@dataclass(frozen=True)
class SmugglerResult:
    """Profit probability 1 - P(H_i >= ik/n) for every number i of loaded agents."""

    n: int
    k: int
    per_i: tuple[Fraction, ...]
    argmax_set: tuple[int, ...]

    def profit(self, i: int) -> Fraction:
        return self.per_i[i - 1]


def optimize_smuggler(n: int, k: int) -> SmugglerResult:
    if not (isinstance(n, int) and isinstance(k, int) and 1 <= k <= n):
        raise InvalidParams(f"need 1 <= k <= n, got n={n!r}, k={k!r}")
    per_i = tuple(1 - profile(HypParams(n, i, k)).tail_at_mean for i in range(1, n + 1))
    best = max(per_i)
    return SmugglerResult(n, k, per_i, tuple(i for i, v in enumerate(per_i, 1) if v == best))


# --------------------------------------------------------------------------
# report files

def report_to_csv(report: SweepReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ReportRow.FIELDS)
    for r in report.csv_rows():
        w.writerow([str(getattr(r, f)).lower() if f == "hypotheses_met" else getattr(r, f)
                    for f in ReportRow.FIELDS])
    return buf.getvalue()


def report_to_json(report: SweepReport) -> str:
    return json.dumps(report.to_dict(), indent=2) + "\n"


def report_from_json(text: str) -> SweepReport:
    return SweepReport.from_dict(json.loads(text))


def emit_report(report: SweepReport, fmt: str, destination) -> None:
    """Write ``report`` as CSV or JSON; I/O problems surface as OSError."""
    fmt = fmt.lower()
    if fmt == "csv":
        text = report_to_csv(report)
    elif fmt == "json":
        text = report_to_json(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    Path(destination).write_text(text, encoding="utf-8")
