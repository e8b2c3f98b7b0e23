import random
from fractions import Fraction

import mpmath
import pytest

from hyptail import bounds as B
from hyptail.bounds import NOT_APPLICABLE, BoundId
from hyptail.hyp import HypParams, bin_dist, hyp_dist, point_mass, profile
from hyptail.kernel import Status, eval_interval, sqrt

F = Fraction
RATIONAL_ONLY = {
    BoundId.THEOREM1, BoundId.EHM, BoundId.COROLLARY049, BoundId.SMALL_MEAN1,
    BoundId.SMALL_MEAN2, BoundId.CONJ_QUARTER, BoundId.THEOREM1_AT_4K, BoundId.GREENBERG_MOHRI,
}


def rhs_mid(chk):
    v = chk.verdict
    return float(v.rhs) if v.exact else float((v.rhs.lower + v.rhs.upper) / 2)


def test_theorem1_examples():
    c = B.check_theorem1((16, 2, 2))
    assert c.hypotheses_met and c.status is Status.HOLDS
    assert c.verdict.lhs == F(29, 120) and c.verdict.rhs == F(1, 8)
    c = B.check_theorem1((10, 1, 3), relax=True)
    assert not c.hypotheses_met and c.verdict.status is Status.HOLDS
    assert c.verdict.lhs == c.verdict.rhs == F(3, 10) and c.verdict.margin_lower_bound == 0
    c = B.check_theorem1((16, 16, 2))
    assert c.status is Status.HOLDS and c.verdict.lhs == 1
    assert B.check_theorem1((10, 1, 3)).category == NOT_APPLICABLE


def test_theorem2_examples():
    c = B.check_theorem2((20, 10, 4))
    assert c.hypotheses_met and c.status is Status.HOLDS
    assert c.verdict.lhs == F(3435, 4845)
    assert abs(rhs_mid(c) - 0.0578) < 5e-5
    # (n-1)/(n-k) Var = 1 here, so the denominator is 1 + sqrt(2)
    ref = eval_interval(B.THEOREM2_CONST * sqrt(F(19, 20) * F(16, 19)) / (1 + sqrt(2)), 128)
    assert c.verdict.rhs.intersect(ref)
    d = B.check_theorem2((20, 4, 10))
    assert d.status is c.status and d.verdict.lhs == c.verdict.lhs
    e = B.check_theorem2((12, 6, 2))
    assert not e.hypotheses_met and e.status is Status.INDETERMINATE


def test_theorem2_mean_one_is_inside():
    p = HypParams(16, 4, 4)  # mean exactly 1, min(i,k) - 2 = 2
    assert B.check_theorem2(p).hypotheses_met
    assert not B.check_mad_lower(p).hypotheses_met


def test_corollary_examples():
    c = B.check_corollary049((30, 15, 6))
    assert c.hypotheses_met and profile((30, 15, 6)).variance == F(36, 29)
    assert c.status is Status.HOLDS and c.verdict.margin_lower_bound > 0
    assert not B.check_corollary049((4, 2, 2)).hypotheses_met


def test_berry_esseen_examples():
    c = B.check_berry_esseen((100, 50, 50))
    assert profile((100, 50, 50)).variance == F(625, 99)
    assert c.status is Status.HOLDS
    ref = 0.5 - 0.5583 / mpmath.sqrt(mpmath.mpf(625) / 99)
    assert abs(rhs_mid(c) - float(ref)) < 1e-12
    c = B.check_berry_esseen((4, 2, 2))
    assert c.status is Status.HOLDS and rhs_mid(c) < 0
    c = B.check_berry_esseen((200, 100, 100))
    assert c.status is Status.HOLDS and c.verdict.rhs.lower > 0.25
    assert B.check_berry_esseen((5, 5, 3)).category == NOT_APPLICABLE


def test_ehm_examples():
    c = B.check_ehm((8, 4, 4))
    assert c.hypotheses_met and set(c.parts) == {"tail", "tv"}
    assert c.parts["tv"].lhs == F(39, 280) and c.parts["tv"].rhs == F(3, 7)
    assert not B.check_ehm((4, 2, 2)).hypotheses_met
    c = B.check_ehm((40, 20, 8))
    assert all(v.status is Status.HOLDS for v in c.parts.values())


def test_mad_lower_examples():
    c = B.check_mad_lower((20, 10, 4))
    assert c.status is Status.HOLDS
    assert c.verdict.lhs == F(16, 10) * F(2025, 4845)
    assert abs(float(c.verdict.lhs) - 0.6687) < 1e-4
    assert abs(rhs_mid(c) - 0.2791) < 1e-4
    # sqrt((n-1)/n) sqrt(Var) = sqrt(ik(n-i)(n-k)/n^3) = sqrt(4/5)
    assert F(19, 20) * profile((20, 10, 4)).variance == F(4, 5)
    assert not B.check_mad_lower((16, 4, 4)).hypotheses_met


def test_tce_upper_examples():
    c = B.check_tce_upper((4, 2, 2))
    assert c.status is Status.HOLDS and c.verdict.lhs == F(6, 5)
    assert c.verdict.rhs.contains(F(2236, 1000)) is False
    assert abs(rhs_mid(c) - (1 + 1.5 ** 0.5)) < 1e-12
    c = B.check_tce_upper((9, 9, 4))
    assert c.status is Status.HOLDS and c.verdict.lhs == 4
    assert B.check_tce_upper((20, 10, 4)).status is Status.HOLDS
    assert not B.check_tce_upper((7, 3, 7)).hypotheses_met


def test_pointmass_ratio_examples():
    c = B.check_pointmass_ratio((20, 10, 4))
    assert c.status is Status.HOLDS
    assert c.verdict.lhs == F(2025, 4845) / F(6, 16)
    assert abs(float(c.verdict.lhs) - 1.1146) < 1e-4
    assert abs(rhs_mid(c) - 0.4933) < 1e-4
    assert not B.check_pointmass_ratio((12, 6, 2)).hypotheses_met
    # integer mean: ik/n = m exactly
    c = B.check_pointmass_ratio((40, 20, 8))
    assert profile((40, 20, 8)).mean == 4 and c.status is Status.HOLDS


def test_robbins_examples():
    c = B.check_robbins(1)
    assert c.status is Status.HOLDS
    mpmath.mp.dps = 40
    try:
        base = mpmath.sqrt(2 * mpmath.pi) / mpmath.e
        lo_ref, hi_ref = base * mpmath.exp(mpmath.mpf(1) / 13), base * mpmath.exp(mpmath.mpf(1) / 12)
    finally:
        mpmath.mp.dps = 15
    assert abs(float(lo_ref) - 0.9959) < 5e-5 and abs(float(hi_ref) - 1.00227) < 5e-6
    assert c.parts["lower"].rhs.lower <= lo_ref <= c.parts["lower"].rhs.upper
    assert c.parts["upper"].rhs.lower <= hi_ref <= c.parts["upper"].rhs.upper
    assert B.check_robbins(10).status is Status.HOLDS
    assert B.check_robbins(100, budget_bits=128).status is Status.HOLDS
    assert B.check_robbins(100, budget_bits=32).status is Status.INDETERMINATE


def test_small_mean_examples():
    a, b = B.check_small_mean((6, 2, 3))
    assert b.status is Status.HOLDS and b.verdict.lhs == F(3, 5) and b.verdict.rhs == F(1, 5)
    assert a.hypotheses_met and b.hypotheses_met
    a, b = B.check_small_mean((6, 1, 3))
    assert b.verdict.lhs == F(1, 2) and b.verdict.rhs == 0 and b.status is Status.HOLDS
    a, b = B.check_small_mean((6, 3, 3))
    assert not a.hypotheses_met and not b.hypotheses_met


def test_binom_classics_examples():
    bk, gm = B.check_binom_classics(2, F(1, 2))
    assert bk.status is Status.HOLDS and bk.verdict.exact and bk.verdict.margin_lower_bound == 0
    bk, gm = B.check_binom_classics(3, F(1, 2))
    assert gm.status is Status.HOLDS and gm.verdict.lhs == F(1, 2)
    bk, gm = B.check_binom_classics(5, F(1, 10))
    assert not bk.hypotheses_met and not gm.hypotheses_met
    bk, gm = B.check_binom_classics(4, 1)
    assert not gm.hypotheses_met


def test_median_tce_examples():
    c = B.check_median_tce(bin_dist(4, F(1, 2)))
    # (6*2 + 4*3 + 1*4) / 11 from the counts C(4, j)
    assert c.status is Status.HOLDS and c.verdict.lhs == F(28, 11) and c.verdict.rhs == 3
    c = B.check_median_tce(point_mass(3))
    assert c.status is Status.HOLDS and c.verdict.margin_lower_bound == 0
    c = B.check_median_tce(bin_dist(2, F(1, 2)))
    assert c.status is Status.HOLDS and c.verdict.lhs == F(4, 3)
    assert not B.check_median_tce(bin_dist(3, F(1, 10))).hypotheses_met


def test_conjecture_examples():
    checks = B.check_conjectures((20, 10, 4))
    assert [c.bound_id for c in checks] == [BoundId.CONJ_HALF, BoundId.CONJ_QUARTER, BoundId.THEOREM1_AT_4K]
    assert all(c.hypotheses_met and c.is_conjecture for c in checks)
    at4k = B.check_theorem1_at_4k((10, 1, 2))
    assert at4k.status is Status.HOLDS and at4k.verdict.lhs == F(2, 10) == at4k.verdict.rhs
    q = B.check_conj_quarter((4, 2, 2))
    assert q.hypotheses_met and q.verdict.lhs == F(5, 6) and q.status is Status.HOLDS


def test_gated_checks_never_fail():
    rng = random.Random(150)
    for _ in range(10_000):
        n = rng.randint(1, 150)
        p = HypParams(n, rng.randint(1, n), rng.randint(1, n))
        for c in B.check_all(p) + B.check_conjectures(p):
            if not c.hypotheses_met:
                assert c.verdict.status is Status.INDETERMINATE and c.failed_hypotheses
                assert c.category == NOT_APPLICABLE


def test_rational_bounds_never_indeterminate():
    for n in range(1, 41):
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                for c in B.check_all((n, i, k)) + B.check_conjectures((n, i, k)):
                    if c.bound_id in RATIONAL_ONLY and c.hypotheses_met:
                        assert c.verdict.exact and c.verdict.status is not Status.INDETERMINATE


def test_theorem2_symmetric_in_i_k():
    for n in range(1, 81):
        for i in range(1, n + 1):
            for k in range(i + 1, n + 1):
                a, b = B.check_theorem2((n, i, k)), B.check_theorem2((n, k, i))
                assert a.category == b.category


def test_invalid_inputs():
    with pytest.raises(ValueError):
        B.check_robbins(0)
    with pytest.raises(ValueError):
        B.check_binom_classics(0, F(1, 2))
    with pytest.raises(ValueError):
        B.check_theorem1((3, 4, 1))


def test_median_tce_on_hypergeometrics():
    for n in range(1, 31):
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                c = B.check_median_tce(hyp_dist((n, i, k)))
                assert c.category in ("Holds", NOT_APPLICABLE)
