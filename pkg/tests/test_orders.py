import random
from fractions import Fraction

import pytest

from hyptail.bounds import BoundId
from hyptail.errors import InvalidParams
from hyptail.hyp import DiscreteDist, bin_dist, conditional_tail_dist, hyp_dist, mean, point_mass
from hyptail.kernel import Status
from hyptail.orders import OrderKind, check_tce_binom_monotone, check_tce_conj, lr_order, st_order

F = Fraction


def lr_brute(a, b):
    lo, hi = min(a.offset, b.offset), max(a.top, b.top)
    for m in range(lo, hi + 1):
        for m2 in range(m + 1, hi + 1):
            if a.pmf(m) * b.pmf(m2) < a.pmf(m2) * b.pmf(m):
                return False
    return True


def st_brute(a, b):
    lo, hi = min(a.offset, b.offset), max(a.top, b.top)
    return all(
        sum(a.pmf(j) for j in range(t, hi + 1)) <= sum(b.pmf(j) for j in range(t, hi + 1))
        for t in range(lo - 1, hi + 2)
    )


def random_dist(rng, max_len=12):
    n = rng.randint(1, max_len)
    w = [rng.choice([0, 0, 1, 2, 3, 5, 8, 13, 40]) for _ in range(n)]
    w[0] = w[0] or 1
    w[-1] = w[-1] or 1
    return DiscreteDist(rng.randint(-3, 3), tuple(w), sum(w))


def test_st_examples():
    a = conditional_tail_dist(hyp_dist((4, 2, 2)), 1)
    b = conditional_tail_dist(bin_dist(2, F(1, 2)), 1)
    w = st_order(a, b)
    assert w.holds and w.order_kind is OrderKind.USUAL_STOCHASTIC
    assert a.pmf(2) == F(1, 5) and b.pmf(2) == F(1, 3)
    assert st_order(a, a).holds
    w = st_order(point_mass(2), point_mass(1))
    assert not w.holds and w.counterexample == 2


def test_lr_examples():
    a = conditional_tail_dist(hyp_dist((4, 2, 2)), 1)
    b = conditional_tail_dist(bin_dist(2, F(1, 2)), 1)
    assert lr_order(a, b).holds
    assert a.pmf(1) / b.pmf(1) == F(6, 5) and a.pmf(2) / b.pmf(2) == F(3, 5)
    assert lr_order(b, b).holds
    w = lr_order(bin_dist(2, F(3, 4)), bin_dist(2, F(1, 4)))
    assert not w.holds and w.order_kind is OrderKind.LIKELIHOOD_RATIO


def test_counterexamples_recheck():
    rng = random.Random(3)
    for _ in range(2000):
        a, b = random_dist(rng), random_dist(rng)
        w = lr_order(a, b)
        if not w.holds:
            m, m2 = w.counterexample
            assert m < m2 and a.pmf(m) * b.pmf(m2) < a.pmf(m2) * b.pmf(m)
        w = st_order(a, b)
        if not w.holds:
            t = w.counterexample
            assert F(a.upper_weight(t), a.total) > F(b.upper_weight(t), b.total)


def test_random_corpus_against_brute_force():
    rng = random.Random(20261016)
    lr_seen = 0
    for _ in range(10_000):
        a, b = random_dist(rng), random_dist(rng)
        if rng.random() < 0.3:
            # nudge b toward dominating a so the lr branch is exercised
            b = DiscreteDist(a.offset + rng.randint(0, 2), a.weights, a.total)
        lr, st = lr_order(a, b).holds, st_order(a, b).holds
        assert lr == lr_brute(a, b)
        assert st == st_brute(a, b)
        if lr:
            lr_seen += 1
            assert st
        if st:
            assert mean(a) <= mean(b)
    assert lr_seen > 1000


def test_lr_scaling_invariance():
    rng = random.Random(11)
    for _ in range(2000):
        a, b = random_dist(rng), random_dist(rng)
        r, s = rng.randint(1, 9), rng.randint(1, 9)
        a2 = DiscreteDist(a.offset, tuple(w * r for w in a.weights), a.total * r)
        b2 = DiscreteDist(b.offset, tuple(w * s for w in b.weights), b.total * s)
        assert lr_order(a2, b2) == lr_order(a, b)
        assert st_order(a2, b2) == st_order(a, b)


def test_tce_conj_examples():
    c = check_tce_conj((4, 2, 2))
    assert c.bound_id is BoundId.TCE_CONJ and c.status is Status.HOLDS
    assert c.verdict.lhs == F(6, 5) and c.verdict.rhs == F(4, 3)
    assert all(w.holds for w in c.witnesses)
    for n in range(1, 25):
        for i in range(1, n + 1):
            c = check_tce_conj((n, i, 1))
            assert c.status is Status.HOLDS and c.verdict.lhs == c.verdict.rhs
    assert check_tce_conj((20, 10, 4)).status is Status.HOLDS


def test_tce_conj_small_grid():
    for n in range(1, 41):
        for i in range(1, n + 1):
            for k in range(1, n + 1):
                assert check_tce_conj((n, i, k)).status is Status.HOLDS


def test_tce_binom_monotone_examples():
    c = check_tce_binom_monotone(2, F(1, 4), F(1, 2), 1)
    assert c.status is Status.HOLDS and c.verdict.lhs == F(8, 7) and c.verdict.rhs == F(4, 3)
    c = check_tce_binom_monotone(5, F(2, 7), F(2, 7), 3)
    assert c.status is Status.HOLDS and c.verdict.lhs == c.verdict.rhs
    assert check_tce_binom_monotone(4, F(1, 4), F(3, 4), 2).status is Status.HOLDS
    with pytest.raises(InvalidParams):
        check_tce_binom_monotone(4, F(1, 2), F(1, 4), 2)
    with pytest.raises(InvalidParams):
        check_tce_binom_monotone(4, F(1, 4), F(1, 2), 5)


def test_tce_binom_monotone_grid():
    ps = [F(a, 10) for a in range(1, 10)]
    for k in range(1, 16):
        for x, p in enumerate(ps):
            for q in ps[x:]:
                for m in range(k + 1):
                    assert check_tce_binom_monotone(k, p, q, m).status is Status.HOLDS
