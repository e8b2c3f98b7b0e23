"""Certifiers for the hypergeometric and binomial tail inequalities.

Each ``check_*`` builds the exact left-hand side from :mod:`hyptail.hyp`,
the right-hand side as a bound expression, and returns a
:class:`BoundCheck`.  Hypotheses are tested first with exact integer
arithmetic; when one fails the check is not applicable and its verdict is
Indeterminate with the failed hypotheses as reason, never Fails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from .hyp import (
    DiscreteDist,
    HypParams,
    as_params,
    bin_dist,
    hyp_bin_dist,
    hyp_dist,
    is_median,
    mad_direct,
    mean,
    profile,
    tail,
    tce,
    total_variation,
    variance,
)
from .kernel import PI, Rational, Verdict, certify, const, exp, lit, log, not_applicable, sqrt, worst
from .errors import InvalidParams


class BoundId(str, Enum):
    THEOREM1 = "Theorem1"
    THEOREM2 = "Theorem2"
    COROLLARY049 = "Corollary049"
    BERRY_ESSEEN = "BerryEsseen"
    EHM = "Ehm"
    MAD_LOWER = "MadLower"
    TCE_UPPER = "TceUpper"
    POINT_MASS_RATIO = "PointMassRatio"
    ROBBINS = "Robbins"
    SMALL_MEAN1 = "SmallMean1"
    SMALL_MEAN2 = "SmallMean2"
    BEREND_KONTOROVICH = "BerendKontorovich"
    GREENBERG_MOHRI = "GreenbergMohri"
    MEDIAN_TCE = "MedianTce"
    TCE_CONJ = "TceConj"
    TCE_BINOMIAL = "TceBinomial"
    CONJ_HALF = "ConjHalf"
    CONJ_QUARTER = "ConjQuarter"
    THEOREM1_AT_4K = "Theorem1at4k"

    def __str__(self):
        return self.value

    @property
    def is_conjecture(self) -> bool:
        return self in CONJECTURES


CONJECTURES = frozenset({BoundId.CONJ_HALF, BoundId.CONJ_QUARTER, BoundId.THEOREM1_AT_4K})

NOT_APPLICABLE = "NotApplicable"

# decimal constants quoted in the literature, taken as exact
BERRY_ESSEEN_CONST = Fraction(5583, 10000)
COROLLARY_CONST = Fraction(49, 1000)

THEOREM2_CONST = const(exp(Fraction(-1, 8)) / (4 * sqrt(2)))
MAD_CONST = const(exp(Fraction(-1, 8)) / (2 * sqrt(2)))
RATIO_CONST = const(exp(Fraction(-1, 8)) / 2)
CONJ_HALF_CONST = const(1 / (2 * sqrt(2)))


@dataclass(frozen=True)
class BoundCheck:
    """One inequality evaluated at one parameter point.

    For conjunctions (Ehm, Robbins) ``parts`` holds every sub-verdict and
    ``verdict`` is the binding one.
    """

    bound_id: BoundId
    params: object
    hypotheses_met: bool
    failed_hypotheses: tuple[str, ...]
    verdict: Verdict
    parts: dict = field(default_factory=dict)
    witnesses: tuple = ()

    @property
    def status(self):
        return self.verdict.status

    @property
    def category(self) -> str:
        """Holds / Fails / Indeterminate, or NotApplicable when a hypothesis failed."""
        return self.verdict.status.value if self.hypotheses_met else NOT_APPLICABLE

    @property
    def is_conjecture(self) -> bool:
        return self.bound_id.is_conjecture


def _na(bound_id: BoundId, params, failed: list[str]) -> BoundCheck:
    return BoundCheck(bound_id, params, False, tuple(failed),
                      not_applicable("hypotheses not met: " + "; ".join(failed)))


def _done(bound_id: BoundId, params, verdict: Verdict, parts=None) -> BoundCheck:
    return BoundCheck(bound_id, params, True, (), verdict, parts or {})


def _theorem2_failures(p: HypParams) -> list[str]:
    n, i, k = p.n, p.i, p.k
    failed = []
    if i * k < n:
        failed.append("E(H) >= 1")
    if i * k > n * (min(i, k) - 2):
        failed.append("E(H) <= min(i,k) - 2")
    if (n - i) * (n - k) <= n:
        failed.append("(n-i)(n-k)/n > 1")
    return failed


def theorem2_shape(p: HypParams):
    """sqrt((n-1)/n) sqrt(Var) / (1 + sqrt(1 + (n-1)/(n-k) Var)), the constant-free part."""
    n, k = p.n, p.k
    v = p.variance
    return sqrt(Fraction(n - 1, n) * v) / (1 + sqrt(1 + Fraction(n - 1, n - k) * v))


# --------------------------------------------------------------------------
# main theorems

def check_theorem1(params, *, relax: bool = False, budget_bits: int | None = None) -> BoundCheck:
    """P(H >= ik/n) >= k/n when n >= 8k.

    ``relax=True`` evaluates the inequality even off its hypothesis; the
    check is still reported with ``hypotheses_met=False``.
    """
    p = as_params(params)
    failed = [] if p.n >= 8 * p.k else ["n >= 8k"]
    if failed and not relax:
        return _na(BoundId.THEOREM1, p, failed)
    v = certify(profile(p).tail_at_mean, ">=", Fraction(p.k, p.n), budget_bits)
    return BoundCheck(BoundId.THEOREM1, p, not failed, tuple(failed), v)


def check_theorem2(params, *, budget_bits: int | None = None) -> BoundCheck:
    p = as_params(params)
    failed = _theorem2_failures(p)
    if failed:
        return _na(BoundId.THEOREM2, p, failed)
    v = certify(profile(p).tail_at_mean, ">=", THEOREM2_CONST * theorem2_shape(p), budget_bits)
    return _done(BoundId.THEOREM2, p, v)


def check_corollary049(params, *, budget_bits: int | None = None) -> BoundCheck:
    p = as_params(params)
    failed = [] if p.n >= 4 else ["n >= 4"]
    failed += _theorem2_failures(p)
    if p.variance < 1:
        failed.append("Var(H) >= 1")
    if failed:
        return _na(BoundId.COROLLARY049, p, failed)
    return _done(BoundId.COROLLARY049, p, certify(profile(p).tail_at_mean, ">=", COROLLARY_CONST, budget_bits))


def check_berry_esseen(params, *, budget_bits: int | None = None) -> BoundCheck:
    """P(H >= E H) >= 1/2 - 0.5583 / sqrt(Var H)."""
    p = as_params(params)
    var = p.variance
    if var <= 0:
        return _na(BoundId.BERRY_ESSEEN, p, ["Var(H) > 0"])
    rhs = Fraction(1, 2) - BERRY_ESSEEN_CONST / sqrt(var)
    return _done(BoundId.BERRY_ESSEEN, p, certify(profile(p).tail_at_mean, ">=", rhs, budget_bits))


def berry_esseen_rhs(params):
    p = as_params(params)
    return Fraction(1, 2) - BERRY_ESSEEN_CONST / sqrt(p.variance)


def check_ehm(params, *, budget_bits: int | None = None) -> BoundCheck:
    """Tail comparison with Bin(k, i/n) and the total variation bound (k-1)/(n-1)."""
    p = as_params(params)
    n, i, k = p.n, p.i, p.k
    if k * i * (n - i) < n * n:
        return _na(BoundId.EHM, p, ["k (i/n) ((n-i)/n) >= 1"])
    slack = Fraction(k - 1, n - 1)
    x_tail = tail(hyp_bin_dist(p), p.mean)
    parts = {
        "tail": certify(profile(p).tail_at_mean, ">=", x_tail - slack, budget_bits),
        "tv": certify(total_variation(p), "<=", slack, budget_bits),
    }
    return _done(BoundId.EHM, p, worst(parts.values()), parts)


def check_mad_lower(params, *, budget_bits: int | None = None) -> BoundCheck:
    """E|H - ik/n| >= e^{-1/8}/(2 sqrt 2) sqrt((n-1)/n) sqrt(Var H) for E(H) in (1, min(i,k)-2]."""
    p = as_params(params)
    n, i, k = p.n, p.i, p.k
    failed = []
    if i * k <= n:
        failed.append("E(H) > 1")
    if i * k > n * (min(i, k) - 2):
        failed.append("E(H) <= min(i,k) - 2")
    if (n - i) * (n - k) <= n:
        failed.append("(n-i)(n-k)/n > 1")
    if failed:
        return _na(BoundId.MAD_LOWER, p, failed)
    # (n-1)/n * Var(H) collapses to ik(n-i)(n-k)/n^3
    rhs = MAD_CONST * sqrt(Fraction(i * k * (n - i) * (n - k), n ** 3))
    return _done(BoundId.MAD_LOWER, p, certify(profile(p).mad, ">=", rhs, budget_bits))


def check_tce_upper(params, *, budget_bits: int | None = None) -> BoundCheck:
    """E(H | H >= E H) <= ceil(E H) + sqrt(Var H (n-1)/(n-k) + 1); undefined at k = n."""
    p = as_params(params)
    n, i, k = p.n, p.i, p.k
    if k == n:
        return _na(BoundId.TCE_UPPER, p, ["k < n"])
    prof = profile(p)
    rhs = prof.m_star + sqrt(Fraction(k * i * (n - i), n * n) + 1)
    return _done(BoundId.TCE_UPPER, p, certify(prof.tce_at_mean, "<=", rhs, budget_bits))


def check_pointmass_ratio(params, *, budget_bits: int | None = None) -> BoundCheck:
    """P(H = m) / P(X = m) lower bound at m = ceil(ik/n)."""
    p = as_params(params)
    n, i, k = p.n, p.i, p.k
    m = p.m_star
    failed = []
    if not 2 <= m <= min(i, k) - 2:
        failed.append("ceil(ik/n) in [2, min(i,k) - 2]")
    if (n - i) * (n - k) <= n:
        failed.append("(n-i)(n-k)/n > 1")
    if failed:
        return _na(BoundId.POINT_MASS_RATIO, p, failed)
    ratio = hyp_dist(p).pmf(m) / hyp_bin_dist(p).pmf(m)
    rhs = RATIO_CONST * sqrt(Fraction(i * (n - i) * (n - k), (i - m) * (n - i - k + m) * n))
    return _done(BoundId.POINT_MASS_RATIO, p, certify(ratio, ">=", rhs, budget_bits))


def robbins_bounds(n: int):
    """Lower and upper Stirling-type expressions bracketing n!."""
    base = sqrt(2 * PI * n) * exp(n * log(n) - n)
    return base * exp(Fraction(1, 12 * n + 1)), base * exp(Fraction(1, 12 * n))


def check_robbins(n: int, *, budget_bits: int | None = None) -> BoundCheck:
    if not isinstance(n, int) or n < 1:
        raise InvalidParams(f"n must be a positive integer, got {n!r}")
    lower, upper = robbins_bounds(n)
    fact = math.factorial(n)
    parts = {
        "lower": certify(fact, ">", lower, budget_bits),
        "upper": certify(fact, "<", upper, budget_bits),
    }
    return _done(BoundId.ROBBINS, n, worst(parts.values()), parts)


def check_small_mean(params, *, budget_bits: int | None = None) -> tuple[BoundCheck, BoundCheck]:
    """For E(H) <= 1: P(H=0) >= P(H>=2) and P(H=1) >= P(H>=2)."""
    p = as_params(params)
    if p.i * p.k > p.n:
        failed = ["E(H) <= 1"]
        return _na(BoundId.SMALL_MEAN1, p, failed), _na(BoundId.SMALL_MEAN2, p, failed)
    d = hyp_dist(p)
    upper2 = tail(d, 2)
    return (
        _done(BoundId.SMALL_MEAN1, p, certify(d.pmf(0), ">=", upper2, budget_bits)),
        _done(BoundId.SMALL_MEAN2, p, certify(d.pmf(1), ">=", upper2, budget_bits)),
    )


def check_binom_classics(k: int, p: Rational, *, budget_bits: int | None = None) -> tuple[BoundCheck, BoundCheck]:
    """Mean absolute deviation lower bound and the 1/4 tail bound for Bin(k, p)."""
    p = Fraction(p)
    if not isinstance(k, int) or k < 1 or not 0 <= p <= 1:
        raise InvalidParams(f"need k >= 1 and 0 <= p <= 1, got k={k!r}, p={p}")
    key = (k, p)
    x = bin_dist(k, p)
    kp = k * p

    bk_failed = []
    if k < 2:
        bk_failed.append("k >= 2")
    if not Fraction(1, k) <= p <= 1 - Fraction(1, k):
        bk_failed.append("p in [1/k, 1 - 1/k]")
    if bk_failed:
        bk = _na(BoundId.BEREND_KONTOROVICH, key, bk_failed)
    else:
        var = kp * (1 - p)
        bk = _done(BoundId.BEREND_KONTOROVICH, key,
                   certify(mad_direct(x, kp), ">=", sqrt(var / 2), budget_bits))

    if not Fraction(1, k) < p < 1:
        gm = _na(BoundId.GREENBERG_MOHRI, key, ["p in (1/k, 1)"])
    else:
        gm = _done(BoundId.GREENBERG_MOHRI, key, certify(tail(x, kp), ">=", Fraction(1, 4), budget_bits))
    return bk, gm


def check_median_tce(dist: DiscreteDist, *, budget_bits: int | None = None) -> BoundCheck:
    """E(X | X >= mu) <= mu + sqrt(Var X) when the mean mu is a median."""
    mu = mean(dist)
    if not is_median(dist, mu):
        return _na(BoundId.MEDIAN_TCE, dist, ["mean is a median"])
    rhs = mu + sqrt(variance(dist))
    return _done(BoundId.MEDIAN_TCE, dist, certify(tce(dist, mu), "<=", rhs, budget_bits))


# --------------------------------------------------------------------------
# conjectures: reported as findings, never as theorem failures

def check_conj_half(params, *, budget_bits: int | None = None) -> BoundCheck:
    """The ``Theorem2`` inequality with its constant raised to 1/(2 sqrt 2)."""
    p = as_params(params)
    failed = _theorem2_failures(p)
    if failed:
        return _na(BoundId.CONJ_HALF, p, failed)
    rhs = CONJ_HALF_CONST * theorem2_shape(p)
    return _done(BoundId.CONJ_HALF, p, certify(profile(p).tail_at_mean, ">=", rhs, budget_bits))


def check_conj_quarter(params, *, budget_bits: int | None = None) -> BoundCheck:
    """P(H >= E H) >= 1/4 when ik/n >= 1/2 and (n-i)(n-k)/n >= 1/2."""
    p = as_params(params)
    n, i, k = p.n, p.i, p.k
    failed = []
    if 2 * i * k < n:
        failed.append("ik/n >= 1/2")
    if 2 * (n - i) * (n - k) < n:
        failed.append("(n-i)(n-k)/n >= 1/2")
    if failed:
        return _na(BoundId.CONJ_QUARTER, p, failed)
    return _done(BoundId.CONJ_QUARTER, p, certify(profile(p).tail_at_mean, ">=", Fraction(1, 4), budget_bits))


def check_theorem1_at_4k(params, *, budget_bits: int | None = None) -> BoundCheck:
    """tail_at_mean >= k/n under the weaker gate n >= 4k."""
    p = as_params(params)
    if p.n < 4 * p.k:
        return _na(BoundId.THEOREM1_AT_4K, p, ["n >= 4k"])
    v = certify(profile(p).tail_at_mean, ">=", Fraction(p.k, p.n), budget_bits)
    return _done(BoundId.THEOREM1_AT_4K, p, v)


def check_conjectures(params, *, budget_bits: int | None = None) -> list[BoundCheck]:
    """The three open statements; findings only, never theorem failures."""
    return [
        check_conj_half(params, budget_bits=budget_bits),
        check_conj_quarter(params, budget_bits=budget_bits),
        check_theorem1_at_4k(params, budget_bits=budget_bits),
    ]


def conj_half_ratio(params):
    """tail_at_mean over :func:`theorem2_shape`, as a bound expression."""
    p = as_params(params)
    return lit(profile(p).tail_at_mean) / theorem2_shape(p)


def check_all(params, *, budget_bits: int | None = None) -> list[BoundCheck]:
    """Every theorem-class bound on a single triple, in a fixed order."""
    p = as_params(params)
    kw = {"budget_bits": budget_bits}
    return [
        check_theorem1(p, **kw),
        check_theorem2(p, **kw),
        check_corollary049(p, **kw),
        check_berry_esseen(p, **kw),
        check_ehm(p, **kw),
        check_mad_lower(p, **kw),
        check_tce_upper(p, **kw),
        check_pointmass_ratio(p, **kw),
        *check_small_mean(p, **kw),
        *check_binom_classics(p.k, p.p, **kw),
        check_median_tce(hyp_dist(p), **kw),
    ]
