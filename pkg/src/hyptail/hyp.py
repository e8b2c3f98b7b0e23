"""Exact hypergeometric and binomial laws and the quantities built on them.

Every distribution is stored as integer weights over a common integer
total, so tails, deviations and conditional expectations reduce to integer
sums followed by a single rational division.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm
from typing import Sequence

from .errors import EmptyTail, InvalidParams
from .kernel import Rational, ceil_q


@dataclass(frozen=True)
class HypParams:
    """Urn of ``n`` marbles, ``i`` of them black, sample of size ``k``."""

    n: int
    i: int
    k: int

    def __post_init__(self):
        n, i, k = self.n, self.i, self.k
        if not all(isinstance(v, int) for v in (n, i, k)):
            raise InvalidParams(f"n, i, k must be integers, got {(n, i, k)!r}")
        if not (n >= 1 and 1 <= i <= n and 1 <= k <= n):
            raise InvalidParams(f"need 1 <= i, k <= n, got n={n}, i={i}, k={k}")

    @property
    def lo(self) -> int:
        return max(0, self.k - (self.n - self.i))

    @property
    def hi(self) -> int:
        return min(self.i, self.k)

    @property
    def mean(self) -> Fraction:
        return Fraction(self.i * self.k, self.n)

    @property
    def variance(self) -> Fraction:
        n, i, k = self.n, self.i, self.k
        if n == 1:
            return Fraction(0)
        return Fraction(k * i * (n - i) * (n - k), n * n * (n - 1))

    @property
    def m_star(self) -> int:
        """Smallest integer at or above the mean."""
        return -(-self.i * self.k // self.n)

    @property
    def p(self) -> Fraction:
        """Success probability of the binomial with the same mean."""
        return Fraction(self.i, self.n)

    def swapped(self) -> "HypParams":
        return HypParams(self.n, self.k, self.i)


def as_params(params) -> HypParams:
    if isinstance(params, HypParams):
        return params
    return HypParams(*params)


@dataclass(frozen=True, eq=False)
class DiscreteDist:
    """Law on ``offset, offset+1, ...`` with mass ``weights[j] / total``.

    The support is tight: first and last weights are positive.  Equality
    compares laws, so scaled weight vectors are equal.
    """

    offset: int
    weights: tuple[int, ...]
    total: int

    def __post_init__(self):
        w = self.weights
        if self.total <= 0 or not w:
            raise ValueError("empty distribution")
        if w[0] <= 0 or w[-1] <= 0 or min(w) < 0:
            raise ValueError("weights must be non-negative with positive end points")
        if sum(w) != self.total:
            raise ValueError("weights do not sum to total")

    def _reduced(self):
        g = gcd(self.total, *self.weights)
        return self.offset, tuple(w // g for w in self.weights), self.total // g

    def __eq__(self, other):
        if not isinstance(other, DiscreteDist):
            return NotImplemented
        return self._reduced() == other._reduced()

    def __hash__(self):
        return hash(self._reduced())

    @classmethod
    def from_masses(cls, offset: int, masses: Sequence[Rational]) -> "DiscreteDist":
        """Build from rational masses; leading and trailing zeros are trimmed."""
        qs = [Fraction(m) for m in masses]
        if any(q < 0 for q in qs) or sum(qs) != 1:
            raise ValueError("masses must be non-negative and sum to 1")
        den = lcm(*(q.denominator for q in qs))
        return _trimmed(offset, [q.numerator * (den // q.denominator) for q in qs], den)

    @property
    def masses(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(w, self.total) for w in self.weights)

    @property
    def top(self) -> int:
        return self.offset + len(self.weights) - 1

    @property
    def support(self) -> range:
        return range(self.offset, self.top + 1)

    def pmf(self, j: int) -> Fraction:
        """P(value = j); zero off the support."""
        idx = j - self.offset
        if 0 <= idx < len(self.weights):
            return Fraction(self.weights[idx], self.total)
        return Fraction(0)

    def weight(self, j: int) -> int:
        idx = j - self.offset
        return self.weights[idx] if 0 <= idx < len(self.weights) else 0

    def upper_weight(self, t: int) -> int:
        """Sum of weights at integer points >= t."""
        idx = t - self.offset
        if idx <= 0:
            return self.total
        return sum(self.weights[idx:])

    def cdf(self, s: int) -> Fraction:
        return 1 - Fraction(self.upper_weight(s + 1), self.total)


def _trimmed(offset: int, weights: list[int], total: int) -> DiscreteDist:
    lo = 0
    while weights[lo] == 0:
        lo += 1
    hi = len(weights)
    while weights[hi - 1] == 0:
        hi -= 1
    return DiscreteDist(offset + lo, tuple(weights[lo:hi]), total)


def point_mass(c: int) -> DiscreteDist:
    return DiscreteDist(c, (1,), 1)


def _hyp_weights(n: int, i: int, k: int) -> DiscreteDist:
    # also accepts i = 0 or k = 0 (point mass at zero) for derived laws
    lo, hi = max(0, k - (n - i)), min(i, k)
    w = [comb(i, lo) * comb(n - i, k - lo)]
    # C(i,j+1) C(n-i,k-j-1) = C(i,j) C(n-i,k-j) (i-j)(k-j) / ((j+1)(n-i-k+j+1)), exactly
    for j in range(lo, hi):
        w.append(w[-1] * (i - j) * (k - j) // ((j + 1) * (n - i - k + j + 1)))
    return DiscreteDist(lo, tuple(w), comb(n, k))


@lru_cache(maxsize=2048)
def _hyp_dist(params: HypParams) -> DiscreteDist:
    return _hyp_weights(params.n, params.i, params.k)


def hyp_dist(params) -> DiscreteDist:
    """Law of the number of black marbles in the sample."""
    return _hyp_dist(as_params(params))


@lru_cache(maxsize=2048)
def _bin_dist(k: int, p: Fraction) -> DiscreteDist:
    a, b = p.numerator, p.denominator
    c = b - a
    if a == 0 or c == 0:
        return point_mass(0 if a == 0 else k)
    # C(k,j) a^j c^(k-j): each step multiplies by (k-j) a / ((j+1) c), exactly
    weights = [c ** k]
    for j in range(k):
        weights.append(weights[-1] * (k - j) * a // ((j + 1) * c))
    return DiscreteDist(0, tuple(weights), b ** k)


def bin_dist(k: int, p: Rational) -> DiscreteDist:
    """Bin(k, p) with exact rational p."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise InvalidParams(f"p must lie in [0, 1], got {p}")
    if not isinstance(k, int) or k < 0:
        raise InvalidParams(f"k must be a non-negative integer, got {k!r}")
    return _bin_dist(k, p)


def hyp_bin_dist(params) -> DiscreteDist:
    """Bin(k, i/n): the binomial counterpart with the same mean."""
    params = as_params(params)
    return _bin_dist(params.k, params.p)


# --------------------------------------------------------------------------
# functionals of a distribution

def tail(dist: DiscreteDist, t: Rational) -> Fraction:
    """P(value >= t)."""
    return Fraction(dist.upper_weight(ceil_q(Fraction(t))), dist.total)


def mean(dist: DiscreteDist) -> Fraction:
    return Fraction(sum(j * w for j, w in zip(dist.support, dist.weights)), dist.total)


def variance(dist: DiscreteDist) -> Fraction:
    mu = mean(dist)
    s2 = Fraction(sum(j * j * w for j, w in zip(dist.support, dist.weights)), dist.total)
    return s2 - mu * mu


def mad_direct(dist: DiscreteDist, center: Rational) -> Fraction:
    """E|value - center| by direct summation."""
    c = Fraction(center)
    p, q = c.numerator, c.denominator
    s = sum(w * abs(q * j - p) for j, w in zip(dist.support, dist.weights))
    return Fraction(s, q * dist.total)


def tce(dist: DiscreteDist, t: Rational) -> Fraction:
    """Tail conditional expectation E(value | value >= t)."""
    start = max(ceil_q(Fraction(t)), dist.offset)
    idx = start - dist.offset
    ws = dist.weights[idx:]
    s = sum(ws)
    if s == 0:
        raise EmptyTail(f"P(value >= {t}) = 0")
    return Fraction(sum(j * w for j, w in enumerate(ws, start)), s)


def conditional_tail_dist(dist: DiscreteDist, t: Rational) -> DiscreteDist:
    """Law of the value conditioned on {value >= t}."""
    start = ceil_q(Fraction(t))
    if start <= dist.offset:
        return dist
    ws = list(dist.weights[start - dist.offset:])
    if not any(ws):
        raise EmptyTail(f"P(value >= {t}) = 0")
    return _trimmed(start, ws, sum(ws))


def median(dist: DiscreteDist) -> int:
    """Smallest s with P(value <= s) >= 1/2."""
    acc = 0
    for j, w in zip(dist.support, dist.weights):
        acc += w
        if 2 * acc >= dist.total:
            return j
    raise AssertionError("unreachable: weights sum to total")


def is_median(dist: DiscreteDist, x: Rational) -> bool:
    """True when P(value <= x) >= 1/2 and P(value >= x) >= 1/2."""
    x = Fraction(x)
    below = dist.total - dist.upper_weight(x.numerator // x.denominator + 1)
    above = dist.upper_weight(ceil_q(x))
    return 2 * below >= dist.total and 2 * above >= dist.total


# --------------------------------------------------------------------------
# hypergeometric profile and closed forms

@dataclass(frozen=True)
class HypProfile:
    params: HypParams
    mean: Fraction
    variance: Fraction
    m_star: int
    tail_at_mean: Fraction
    mad: Fraction
    tce_at_mean: Fraction
    median: int


@lru_cache(maxsize=2048)
def _profile(params: HypParams) -> HypProfile:
    d = _hyp_dist(params)
    m = params.m_star
    idx = m - d.offset
    tail_w = sum(d.weights[idx:])
    first_moment = sum(j * w for j, w in enumerate(d.weights[idx:], m))
    return HypProfile(
        params=params,
        mean=params.mean,
        variance=params.variance,
        m_star=m,
        tail_at_mean=Fraction(tail_w, d.total),
        mad=mad_direct(d, params.mean),
        tce_at_mean=Fraction(first_moment, tail_w),
        median=median(d),
    )


def profile(params) -> HypProfile:
    return _profile(as_params(params))


def mad_closed_hyp(params) -> Fraction:
    """Closed-form mean absolute deviation via the point mass at ceil(ik/n)."""
    params = as_params(params)
    n, i, k = params.n, params.i, params.k
    m = params.m_star
    return Fraction(2 * m * (n - i - k + m), n) * hyp_dist(params).pmf(m)


def mad_closed_bin(k: int, p: Rational) -> Fraction:
    """Closed-form mean absolute deviation of Bin(k, p) via the point mass at ceil(kp)."""
    p = Fraction(p)
    m = ceil_q(k * p)
    return 2 * m * (1 - p) * bin_dist(k, p).pmf(m)


def tail_via_factorial_identity(params, m: int) -> Fraction:
    """P(H >= m) as a prefactor times an inverse factorial moment of a reduced urn."""
    params = as_params(params)
    n, i, k = params.n, params.i, params.k
    if not 0 <= m <= min(i, k):
        raise InvalidParams(f"m must lie in [0, {min(i, k)}], got {m}")
    z = _hyp_weights(n - m, i - m, k - m)
    # sum of w / C(z+m, m) over a running lcm denominator, normalized once
    num, den = 0, 1
    for zv, w in zip(z.support, z.weights):
        c = comb(zv + m, m)
        g = gcd(den, c)
        num = num * (c // g) + w * (den // g)
        den *= c // g
    return Fraction(comb(k, m) * comb(i, m) * num, comb(n, m) * den * z.total)


def total_variation(params) -> Fraction:
    """d_TV between Hyp(n, i, k) and Bin(k, i/n)."""
    params = as_params(params)
    h = hyp_dist(params)
    x = hyp_bin_dist(params)
    s = sum(abs(h.weight(j) * x.total - x.weight(j) * h.total) for j in range(params.k + 1))
    return Fraction(s, 2 * h.total * x.total)
