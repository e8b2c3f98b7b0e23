"""Usual stochastic and likelihood ratio order checks for discrete laws.

Both orders are decided with integer cross-multiplication on the weight
representation, so no ratio of probabilities is ever formed.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction

from .bounds import BoundCheck, BoundId
from .errors import InvalidParams
from .hyp import (
    DiscreteDist,
    as_params,
    bin_dist,
    conditional_tail_dist,
    hyp_bin_dist,
    hyp_dist,
    tce,
)
from .kernel import Status, certify


class OrderKind(str, Enum):
    LIKELIHOOD_RATIO = "LikelihoodRatio"
    USUAL_STOCHASTIC = "UsualStochastic"


@dataclass(frozen=True)
class OrderWitness:
    """Outcome of testing ``a <= b`` in an order.

    ``counterexample`` is a threshold t (usual order) or a pair (m, m')
    with m < m' (likelihood ratio order) where the definition fails.
    """

    order_kind: OrderKind
    holds: bool
    counterexample: int | tuple[int, int] | None = None


def st_order(a: DiscreteDist, b: DiscreteDist) -> OrderWitness:
    """a <=_st b: P(a >= t) <= P(b >= t) at every integer threshold."""
    lo = min(a.offset, b.offset)
    hi = max(a.top, b.top)
    # running upper-tail weights, scanned from the top down
    ua = ub = 0
    for t in range(hi, lo, -1):
        ua += a.weight(t)
        ub += b.weight(t)
        if ua * b.total > ub * a.total:
            return OrderWitness(OrderKind.USUAL_STOCHASTIC, False, t)
    return OrderWitness(OrderKind.USUAL_STOCHASTIC, True)


def lr_order(a: DiscreteDist, b: DiscreteDist) -> OrderWitness:
    """a <=_lr b: P_a(m) P_b(m') >= P_a(m') P_b(m) for all m < m'.

    Each point is the vector (P_b(m), P_a(m)) in the closed first quadrant;
    the condition says its angle never increases along m.  Points where both
    masses vanish are unconstrained, so comparing consecutive non-zero
    vectors decides every pair.
    """
    lo = min(a.offset, b.offset)
    hi = max(a.top, b.top)
    prev = None
    for m in range(lo, hi + 1):
        wa, wb = a.weight(m), b.weight(m)
        if wa == 0 and wb == 0:
            continue
        if prev is not None:
            pm, pa, pb = prev
            if pa * wb < wa * pb:
                return OrderWitness(OrderKind.LIKELIHOOD_RATIO, False, (pm, m))
        prev = (m, wa, wb)
    return OrderWitness(OrderKind.LIKELIHOOD_RATIO, True)


def check_tce_conj(params, *, budget_bits: int | None = None) -> BoundCheck:
    """Conditional tails at the mean: H* <=_lr X*, H* <=_st X*, and the TCE comparison."""
    p = as_params(params)
    h, x = hyp_dist(p), hyp_bin_dist(p)
    mu = p.mean
    h_star = conditional_tail_dist(h, mu)
    x_star = conditional_tail_dist(x, mu)
    lr = lr_order(h_star, x_star)
    st = st_order(h_star, x_star)
    v = certify(tce(h, mu), "<=", tce(x, mu), budget_bits)
    broken = [w.order_kind.value for w in (lr, st) if not w.holds]
    if broken:
        v = replace(v, status=Status.FAILS, reason="order violated: " + ", ".join(broken))
    return BoundCheck(BoundId.TCE_CONJ, p, True, (), v, {"tce": v}, (lr, st))


def check_tce_binom_monotone(k: int, p, q, m: int, *, budget_bits: int | None = None) -> BoundCheck:
    """E(X_p | X_p >= m) <= E(X_q | X_q >= m) for Bin(k, p), Bin(k, q) with p <= q."""
    p, q = Fraction(p), Fraction(q)
    if not (0 < p <= q < 1):
        raise InvalidParams(f"need 0 < p <= q < 1, got p={p}, q={q}")
    if not 0 <= m <= k:
        raise InvalidParams(f"need 0 <= m <= k, got m={m}, k={k}")
    v = certify(tce(bin_dist(k, p), m), "<=", tce(bin_dist(k, q), m), budget_bits)
    return BoundCheck(BoundId.TCE_BINOMIAL, (k, p, q, m), True, (), v)
