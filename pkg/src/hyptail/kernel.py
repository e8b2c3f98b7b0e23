"""Exact integers/rationals, bound expressions and certified comparisons.

Probabilities are carried as :class:`fractions.Fraction`.  Irrational
right-hand sides are written as small expression trees (``Expr``) and
evaluated with outward (directed) rounding into an :class:`Interval`.
:func:`certify` compares an exact left-hand side against such a tree and
never rounds silently: it answers Holds, Fails, or Indeterminate.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Union

import mpmath
from mpmath.libmp import (
    finf,
    fninf,
    from_int,
    from_rational,
    fzero,
    libmpi,
    mpf_cmp,
    mpf_log,
    mpf_pos,
    mpf_sub,
    repr_dps,
    round_ceiling,
    round_floor,
    to_float,
    to_rational,
    to_str,
)

from .errors import DomainError

Rational = Union[int, Fraction]

START_BITS = 64
DEFAULT_BUDGET_BITS = 1024


def default_budget() -> int:
    """Precision budget in bits, overridable through ``HYPTAIL_PRECISION_BITS``."""
    raw = os.environ.get("HYPTAIL_PRECISION_BITS")
    if not raw:
        return DEFAULT_BUDGET_BITS
    bits = int(raw)
    if bits < 32:
        raise ValueError("HYPTAIL_PRECISION_BITS must be at least 32")
    return bits


def binom(n: int, r: int) -> int:
    """Binomial coefficient C(n, r), zero outside 0 <= r <= n."""
    if n < 0:
        raise ValueError(f"binom needs n >= 0, got {n}")
    if r < 0 or r > n:
        return 0
    return math.comb(n, r)


def ceil_q(x: Rational) -> int:
    return -((-x.numerator) // x.denominator) if isinstance(x, Fraction) else int(x)


# --------------------------------------------------------------------------
# bound expressions

class Expr:
    """Node of a bound expression.  Supports + - * / and unary minus."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, as_expr(other))

    def __radd__(self, other):
        return Add(as_expr(other), self)

    def __sub__(self, other):
        return Sub(self, as_expr(other))

    def __rsub__(self, other):
        return Sub(as_expr(other), self)

    def __mul__(self, other):
        return Mul(self, as_expr(other))

    def __rmul__(self, other):
        return Mul(as_expr(other), self)

    def __truediv__(self, other):
        return Div(self, as_expr(other))

    def __rtruediv__(self, other):
        return Div(as_expr(other), self)

    def __neg__(self):
        return Neg(self)


@dataclass(frozen=True)
class Lit(Expr):
    value: Fraction

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr

    def __str__(self):
        return f"({self.a} + {self.b})"


@dataclass(frozen=True)
class Sub(Expr):
    a: Expr
    b: Expr

    def __str__(self):
        return f"({self.a} - {self.b})"


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr

    def __str__(self):
        return f"{self.a}*{self.b}"


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr

    def __str__(self):
        return f"{self.a}/{self.b}"


@dataclass(frozen=True)
class Neg(Expr):
    a: Expr

    def __str__(self):
        return f"-{self.a}"


@dataclass(frozen=True)
class Sqrt(Expr):
    a: Expr

    def __str__(self):
        return f"sqrt({self.a})"


@dataclass(frozen=True)
class Exp(Expr):
    a: Expr

    def __str__(self):
        return f"exp({self.a})"


@dataclass(frozen=True)
class Log(Expr):
    a: Expr

    def __str__(self):
        return f"log({self.a})"


@dataclass(frozen=True)
class Pi(Expr):
    def __str__(self):
        return "pi"


PI = Pi()


@dataclass(frozen=True, eq=False)
class Const(Expr):
    """A parameter-free subexpression; its enclosures are memoized per precision.

    Hashes by identity so memo lookups never walk the subtree.
    """

    a: Expr

    def __str__(self):
        return str(self.a)


def const(x) -> Const:
    return Const(as_expr(x))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Lit(Fraction(x))
    raise TypeError(f"cannot use {type(x).__name__} in a bound expression (floats are not exact)")


def lit(x: Rational) -> Lit:
    return Lit(Fraction(x))


def sqrt(x) -> Sqrt:
    return Sqrt(as_expr(x))


def exp(x) -> Exp:
    return Exp(as_expr(x))


def log(x) -> Log:
    return Log(as_expr(x))


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        raise DomainError(f"sqrt of negative value {q}")
    p, d = q.numerator, q.denominator
    rp, rd = math.isqrt(p), math.isqrt(d)
    if rp * rp == p and rd * rd == d:
        return Fraction(rp, rd)
    return None


def exact(expr: Expr) -> Fraction | None:
    """Exact rational value of ``expr`` if it is provably rational, else None.

    Rationality is detected structurally: literals, field operations, square
    roots of rational perfect squares, exp(0) and log(1).
    """
    t = type(expr)
    if t is Lit:
        return expr.value
    if t is Sqrt:
        a = exact(expr.a)
        return None if a is None else _exact_sqrt(a)
    if t is Neg:
        a = exact(expr.a)
        return None if a is None else -a
    if t is Exp:
        a = exact(expr.a)
        return Fraction(1) if a == 0 else None
    if t is Log:
        a = exact(expr.a)
        if a is not None and a <= 0:
            raise DomainError(f"log of non-positive value {a}")
        return Fraction(0) if a == 1 else None
    if t is Pi:
        return None
    if t is Const:
        return _exact_const(expr)
    a = exact(expr.a)
    if a is None:
        return None
    b = exact(expr.b)
    if b is None:
        return None
    if t is Add:
        return a + b
    if t is Sub:
        return a - b
    if t is Mul:
        return a * b
    if b == 0:
        raise DomainError("division by zero")
    return a / b


@lru_cache(maxsize=256)
def _exact_const(c: Const) -> Fraction | None:
    return exact(c.a)


# --------------------------------------------------------------------------
# intervals

def mpf_to_fraction(x) -> Fraction:
    p, q = to_rational(x)
    return Fraction(p, q)


def fraction_to_mpf(q: Rational, prec: int, rnd: str):
    q = Fraction(q)
    return from_rational(q.numerator, q.denominator, prec, rnd)


def _cmp_q(x, q: Fraction) -> int:
    """Sign of (raw mpf x) - q, exact, integers only."""
    if x == finf:
        return 1
    if x == fninf:
        return -1
    sign, man, e, _ = x
    a = (-man if sign else man) * q.denominator
    b = q.numerator
    if e >= 0:
        a <<= e
    else:
        b <<= -e
    return (a > b) - (a < b)


def _wrap(raw) -> mpmath.mpf:
    # mpmath.mpf(raw) would re-round to the context precision; keep the bits
    return mpmath.mp.make_mpf(raw)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] enclosing a real value.

    ``lo`` was rounded toward -inf and ``hi`` toward +inf at
    ``precision_bits`` bits.  Endpoints are stored as raw mpmath tuples;
    use :attr:`lower`/:attr:`upper` for ``mpmath.mpf`` values.
    """

    lo: tuple
    hi: tuple
    precision_bits: int

    @classmethod
    def from_rational(cls, q: Rational, prec: int) -> "Interval":
        return cls(fraction_to_mpf(q, prec, round_floor), fraction_to_mpf(q, prec, round_ceiling), prec)

    @property
    def lower(self) -> mpmath.mpf:
        return _wrap(self.lo)

    @property
    def upper(self) -> mpmath.mpf:
        return _wrap(self.hi)

    @property
    def width(self) -> mpmath.mpf:
        return _wrap(mpf_sub(self.hi, self.lo, self.precision_bits, round_ceiling))

    def contains(self, q: Rational) -> bool:
        q = Fraction(q)
        return _cmp_q(self.lo, q) <= 0 <= _cmp_q(self.hi, q)

    def intersect(self, other: "Interval") -> "Interval":
        lo = self.lo if mpf_cmp(self.lo, other.lo) >= 0 else other.lo
        hi = self.hi if mpf_cmp(self.hi, other.hi) <= 0 else other.hi
        if mpf_cmp(lo, hi) > 0:
            raise ArithmeticError("disjoint enclosures of one value; rounding is broken")
        return Interval(lo, hi, max(self.precision_bits, other.precision_bits))

    def __str__(self):
        dps = max(repr_dps(self.precision_bits) // 2, 8)
        return f"[{to_str(self.lo, dps)}, {to_str(self.hi, dps)}]"


_WHOLE = (fninf, finf)


def _ev(expr: Expr, prec: int):
    t = type(expr)
    if t is Lit:
        q = expr.value
        if q.denominator == 1:
            v = from_int(q.numerator)
            if v[3] <= prec:
                return v, v
        return (from_rational(q.numerator, q.denominator, prec, round_floor),
                from_rational(q.numerator, q.denominator, prec, round_ceiling))
    if t is Add:
        return libmpi.mpi_add(_ev(expr.a, prec), _ev(expr.b, prec), prec)
    if t is Sub:
        return libmpi.mpi_sub(_ev(expr.a, prec), _ev(expr.b, prec), prec)
    if t is Mul:
        return libmpi.mpi_mul(_ev(expr.a, prec), _ev(expr.b, prec), prec)
    if t is Div:
        num = _ev(expr.a, prec)
        den = _ev(expr.b, prec)
        if den[0] == fzero and den[1] == fzero:
            raise DomainError(f"division by zero in {expr}")
        if mpf_cmp(den[0], fzero) <= 0 <= mpf_cmp(den[1], fzero):
            return _WHOLE
        return libmpi.mpi_div(num, den, prec)
    if t is Neg:
        return libmpi.mpi_neg(_ev(expr.a, prec), prec)
    if t is Sqrt:
        lo, hi = _ev(expr.a, prec)
        if mpf_cmp(hi, fzero) < 0:
            raise DomainError(f"sqrt of negative value in {expr}")
        if mpf_cmp(lo, fzero) < 0:
            lo = fzero
        return libmpi.mpi_sqrt((lo, hi), prec)
    if t is Exp or t is Log:
        # transcendental constants recur in every bound; memoize them
        if _is_constant(expr.a):
            return _eval_cached(expr, prec)
        return _transcendental(expr, prec)
    if t is Const:
        return _eval_const(expr, prec)
    if t is Pi:
        return libmpi.mpi_pi(prec)
    raise TypeError(f"unknown expression node {t.__name__}")


def _log(arg, expr, prec):
    lo, hi = arg
    if mpf_cmp(hi, fzero) <= 0:
        raise DomainError(f"log of non-positive value in {expr}")
    if mpf_cmp(lo, fzero) <= 0:
        return fninf, mpf_log(hi, prec, round_ceiling)
    return libmpi.mpi_log(arg, prec)


def _is_constant(expr: Expr) -> bool:
    return type(expr) is Lit or (type(expr) is Neg and type(expr.a) is Lit)


def _transcendental(expr: Expr, prec: int):
    arg = _ev(expr.a, prec)
    if type(expr) is Exp:
        return libmpi.mpi_exp(arg, prec)
    return _log(arg, expr, prec)


@lru_cache(maxsize=4096)
def _eval_cached(expr: Expr, prec: int):
    return _transcendental(expr, prec)


@lru_cache(maxsize=1024)
def _eval_const(c: Const, prec: int):
    return _ev(c.a, prec)


def eval_interval(expr: Expr, precision_bits: int) -> Interval:
    """Outward-rounded enclosure of ``expr`` at ``precision_bits`` bits."""
    if precision_bits < 2:
        raise ValueError("precision_bits must be >= 2")
    lo, hi = _ev(as_expr(expr), precision_bits)
    return Interval(lo, hi, precision_bits)


# --------------------------------------------------------------------------
# verdicts

class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    INDETERMINATE = "Indeterminate"


RELATIONS = {"≥": ">=", "≤": "<=", ">=": ">=", "<=": "<=", ">": ">", "<": "<"}


@dataclass(frozen=True)
class Verdict:
    """Certified outcome of ``lhs <relation> rhs``.

    ``margin_lower_bound`` is a rigorous lower bound on the slack of the
    relation (lhs - rhs for >/>=, rhs - lhs for </<=), rounded down.
    ``precision_used`` is 0 when both sides were exact.
    """

    status: Status
    relation: str
    lhs: Fraction
    rhs: Fraction | Interval
    margin_lower_bound: mpmath.mpf
    precision_used: int
    reason: str | None = None

    @property
    def exact(self) -> bool:
        return isinstance(self.rhs, Fraction)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def rhs_bounds(self) -> tuple[Fraction | tuple, Fraction | tuple]:
        if isinstance(self.rhs, Fraction):
            return self.rhs, self.rhs
        return self.rhs.lo, self.rhs.hi


def not_applicable(reason: str) -> Verdict:
    return Verdict(Status.INDETERMINATE, ">=", Fraction(0), Fraction(0), mpmath.mpf(0), 0, reason)


def _slack(lhs: Fraction, rhs: Fraction, rel: str) -> Fraction:
    return lhs - rhs if rel[0] == ">" else rhs - lhs


def _decide_exact(slack: Fraction, rel: str) -> Status:
    ok = slack >= 0 if len(rel) == 2 else slack > 0
    return Status.HOLDS if ok else Status.FAILS


def _decide_interval(lhs: Fraction, iv: Interval, rel: str) -> Status:
    c_lo = _cmp_q(iv.lo, lhs)  # sign(rhs_lo - lhs)
    c_hi = _cmp_q(iv.hi, lhs)
    strict = len(rel) == 1
    if rel[0] == ">":
        if c_hi < 0 or (not strict and c_hi == 0):
            return Status.HOLDS
        if c_lo > 0 or (strict and c_lo == 0):
            return Status.FAILS
    else:
        if c_lo > 0 or (not strict and c_lo == 0):
            return Status.HOLDS
        if c_hi < 0 or (strict and c_hi == 0):
            return Status.FAILS
    return Status.INDETERMINATE


def _interval_margin(lhs: Fraction, iv: Interval, rel: str) -> mpmath.mpf:
    prec = iv.precision_bits
    if rel[0] == ">":
        a, b = fraction_to_mpf(lhs, prec, round_floor), iv.hi
    else:
        a, b = iv.lo, fraction_to_mpf(lhs, prec, round_ceiling)
    return _wrap(mpf_sub(a, b, prec, round_floor))


def certify(lhs: Rational, relation: str, rhs_expr, budget_bits: int | None = None) -> Verdict:
    """Certify ``lhs <relation> rhs_expr`` for an exact rational ``lhs``.

    Exact right-hand sides are compared directly.  Otherwise the RHS is
    enclosed at 64, 128, 256, ... bits up to ``budget_bits``; enclosures are
    intersected so they only ever shrink.
    """
    rel = RELATIONS.get(relation)
    if rel is None:
        raise ValueError(f"unknown relation {relation!r}")
    budget = default_budget() if budget_bits is None else budget_bits
    if budget < 32:
        raise ValueError("budget_bits must be at least 32")
    lhs = Fraction(lhs)
    expr = as_expr(rhs_expr)
    rhs = exact(expr)
    if rhs is not None:
        slack = _slack(lhs, rhs, rel)
        margin = _wrap(fraction_to_mpf(slack, START_BITS, round_floor))
        return Verdict(_decide_exact(slack, rel), rel, lhs, rhs, margin, 0)
    prec = min(START_BITS, budget)
    best = None
    while True:
        iv = eval_interval(expr, prec)
        best = iv if best is None else best.intersect(iv)
        status = _decide_interval(lhs, best, rel)
        if status is not Status.INDETERMINATE or prec >= budget:
            return Verdict(status, rel, lhs, best, _interval_margin(lhs, best, rel), prec,
                           None if status is not Status.INDETERMINATE else "precision budget exhausted")
        prec = min(2 * prec, budget)


_SEVERITY = {Status.FAILS: 0, Status.INDETERMINATE: 1, Status.HOLDS: 2}


def worst(verdicts) -> Verdict:
    """The binding verdict of a conjunction: failures first, then smallest margin."""
    return min(verdicts, key=lambda v: (_SEVERITY[v.status], v.margin_lower_bound))


# --------------------------------------------------------------------------
# lossless decimal rendering

_FLOAT_MAX_EXP = 1000


def format_bound(x, rnd: str) -> str:
    """Shortest round-trip decimal of a value rounded to double in direction ``rnd``.

    ``x`` is a raw mpf tuple, an ``mpmath.mpf`` or a Fraction; rounding is
    outward so the printed value still bounds the original.
    """
    if isinstance(x, Fraction):
        x = fraction_to_mpf(x, 53, rnd)
    elif isinstance(x, mpmath.mpf):
        x = x._mpf_
    if x == finf:
        return "inf"
    if x == fninf:
        return "-inf"
    r = mpf_pos(x, 53, rnd)
    if r == fzero:
        return "0.0"
    if abs(r[2] + r[3]) < _FLOAT_MAX_EXP:
        return repr(to_float(r))
    return to_str(r, 17)


def format_rational(q: Rational) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


__all__ = [
    "Expr", "Const", "const", "Lit", "Add", "Sub", "Mul", "Div", "Neg", "Sqrt", "Exp", "Log", "Pi", "PI",
    "Interval", "Status", "Verdict", "binom", "certify", "eval_interval", "exact",
    "lit", "sqrt", "exp", "log", "worst", "default_budget",
]
