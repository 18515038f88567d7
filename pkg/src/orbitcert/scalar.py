"""Exact arithmetic over the field Q(sqrt 2) plus outward-rounded dyadic intervals.

Every numeric quantity in this package is a ``Scalar``: either a ``QSqrt2``
(exact value a + b*sqrt(2) with rational a, b) or an ``Enclosure`` (a closed
interval with dyadic endpoints that certifiably contains the true value).
Exact values decide sign, order, and rationality outright. Enclosures only
answer a comparison when their endpoints separate, so ``cmp_gt`` returning
``TRUE`` or ``FALSE`` is always a certificate and ``UNKNOWN`` is an honest
refusal, never a guess.

Rounding is explicit: enclosure endpoints are plain ``Fraction`` values with
power-of-two denominators, operations that leave the dyadic lattice round the
lower endpoint down and the upper endpoint up. No hardware rounding modes are
involved, so results are identical on every platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Union

Rational = Fraction

DEFAULT_PRECISION = 64


class Trilean(Enum):
    """Three-valued answer for certified queries."""

    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:
        raise TypeError("Trilean has no truth value; compare against members")


class DivisionByZero(ZeroDivisionError):
    """Divisor is exactly zero."""


class PossiblyZeroDivisor(ArithmeticError):
    """Divisor is an interval whose endpoints do not exclude zero."""


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot interpret {v!r} as a rational")


def round_down(q: Fraction, precision: int) -> Fraction:
    """Largest multiple of 2**-precision that is <= q."""
    scale = 1 << precision
    return Fraction(math.floor(q * scale), scale)


def round_up(q: Fraction, precision: int) -> Fraction:
    """Smallest multiple of 2**-precision that is >= q."""
    scale = 1 << precision
    return Fraction(math.ceil(q * scale), scale)


def _is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def _ceil_log2(q: Fraction) -> int:
    """Smallest integer k with 2**k >= q, for q > 0."""
    if q <= 0:
        raise ValueError("positive value required")
    k = q.numerator.bit_length() - q.denominator.bit_length()
    while Fraction(2) ** k < q:
        k += 1
    while k > q.numerator.bit_length() - q.denominator.bit_length() and Fraction(2) ** (k - 1) >= q:
        k -= 1
    return k


@dataclass(frozen=True)
class QSqrt2:
    """Exact element a + b*sqrt(2) of Q(sqrt 2).

    The representation is unique, so structural equality is value equality,
    the value is rational exactly when b == 0, and the sign is decidable by
    comparing a*a against 2*b*b with sign bookkeeping.
    """

    a: Fraction
    b: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _as_fraction(self.a))
        object.__setattr__(self, "b", _as_fraction(self.b))

    @property
    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def sign(self) -> int:
        a, b = self.a, self.b
        if b == 0:
            return 0 if a == 0 else (1 if a > 0 else -1)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # Mixed signs: a + b*sqrt(2) > 0 iff the positive term dominates,
        # which squaring decides exactly (the value is never zero here).
        if a > 0:  # b < 0
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1  # a < 0, b > 0

    def floor(self) -> int:
        """Exact floor, decided by sign tests against integer candidates."""
        if self.b == 0:
            return math.floor(self.a)
        # 1.5 > sqrt(2) > 1.25 brackets the irrational part coarsely; the
        # candidate is then corrected by exact sign checks.
        approx = self.a + self.b * (Fraction(3, 2) if self.b < 0 else Fraction(5, 4))
        m = math.floor(approx)
        while (self - m).sign() < 0:
            m -= 1
        while (self - (m + 1)).sign() >= 0:
            m += 1
        return m

    def __add__(self, other) -> "QSqrt2":
        other = _coerce_exact(other)
        return QSqrt2(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other) -> "QSqrt2":
        other = _coerce_exact(other)
        return QSqrt2(self.a - other.a, self.b - other.b)

    def __rsub__(self, other) -> "QSqrt2":
        return _coerce_exact(other) - self

    def __neg__(self) -> "QSqrt2":
        return QSqrt2(-self.a, -self.b)

    def __mul__(self, other) -> "QSqrt2":
        other = _coerce_exact(other)
        return QSqrt2(
            self.a * other.a + 2 * self.b * other.b,
            self.a * other.b + self.b * other.a,
        )

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QSqrt2":
        other = _coerce_exact(other)
        norm = other.a * other.a - 2 * other.b * other.b
        if norm == 0:
            raise DivisionByZero("division by exact zero")
        conj = QSqrt2(other.a, -other.b)
        num = self * conj
        return QSqrt2(num.a / norm, num.b / norm)

    def __rtruediv__(self, other) -> "QSqrt2":
        return _coerce_exact(other) / self

    def __abs__(self) -> "QSqrt2":
        return -self if self.sign() < 0 else self

    def __lt__(self, other) -> bool:
        return (self - _coerce_exact(other)).sign() < 0

    def __le__(self, other) -> bool:
        return (self - _coerce_exact(other)).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - _coerce_exact(other)).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - _coerce_exact(other)).sign() >= 0

    def __str__(self) -> str:
        return serialize(self)

    def enclosure(self, precision: int = DEFAULT_PRECISION) -> "Enclosure":
        return to_enclosure(self, precision)


def _coerce_exact(v) -> QSqrt2:
    if isinstance(v, QSqrt2):
        return v
    if isinstance(v, (int, Fraction)):
        return QSqrt2(_as_fraction(v))
    raise TypeError(f"cannot interpret {v!r} as an exact scalar")


ZERO = QSqrt2(0)
ONE = QSqrt2(1)
SQRT2 = QSqrt2(0, 1)


@dataclass(frozen=True)
class Enclosure:
    """Closed interval [lo, hi] with dyadic endpoints.

    The interval certifies that the true value lies inside it. Arithmetic is
    exact while results stay dyadic and rounds outward (lo down, hi up) at
    the stated precision when they do not.
    """

    lo: Fraction
    hi: Fraction
    precision: int = DEFAULT_PRECISION

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", _as_fraction(self.lo))
        object.__setattr__(self, "hi", _as_fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")
        if not (_is_dyadic(self.lo) and _is_dyadic(self.hi)):
            raise ValueError("enclosure endpoints must be dyadic")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains_fraction(self, q: Fraction) -> bool:
        return self.lo <= q <= self.hi

    def contains_exact(self, x: QSqrt2) -> bool:
        return (x - QSqrt2(self.lo)).sign() >= 0 and (x - QSqrt2(self.hi)).sign() <= 0

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def __str__(self) -> str:
        return serialize(self)


Scalar = Union[QSqrt2, Enclosure]


def exact(a, b=0) -> QSqrt2:
    return QSqrt2(_as_fraction(a), _as_fraction(b))


def interval(lo, hi, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Build an enclosure, rounding non-dyadic endpoints outward."""
    return Enclosure(
        round_down(_as_fraction(lo), precision),
        round_up(_as_fraction(hi), precision),
        precision,
    )


def is_exact(s: Scalar) -> bool:
    return isinstance(s, QSqrt2)


def is_interval(s: Scalar) -> bool:
    return isinstance(s, Enclosure)


@lru_cache(maxsize=None)
def sqrt2_enclosure(precision: int) -> Enclosure:
    return root_enclosure(Fraction(2), 2, precision)


def to_enclosure(s: Scalar, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Embed a scalar into a containing enclosure at the given precision."""
    if isinstance(s, Enclosure):
        return s
    if s.b == 0:
        return Enclosure(round_down(s.a, precision), round_up(s.a, precision), precision)
    r = sqrt2_enclosure(precision + 8)
    if s.b > 0:
        lo, hi = s.a + s.b * r.lo, s.a + s.b * r.hi
    else:
        lo, hi = s.a + s.b * r.hi, s.a + s.b * r.lo
    return Enclosure(round_down(lo, precision), round_up(hi, precision), precision)


def _binary_precision(a: Enclosure, b: Enclosure) -> int:
    return min(a.precision, b.precision)


def _enc_add(a: Enclosure, b: Enclosure) -> Enclosure:
    return Enclosure(a.lo + b.lo, a.hi + b.hi, _binary_precision(a, b))


def _enc_sub(a: Enclosure, b: Enclosure) -> Enclosure:
    return Enclosure(a.lo - b.hi, a.hi - b.lo, _binary_precision(a, b))


def _enc_mul(a: Enclosure, b: Enclosure) -> Enclosure:
    combos = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
    return Enclosure(min(combos), max(combos), _binary_precision(a, b))


def _enc_div(a: Enclosure, b: Enclosure) -> Enclosure:
    if b.contains_zero():
        raise PossiblyZeroDivisor(f"divisor {b} does not exclude zero")
    combos = (a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi)
    p = _binary_precision(a, b)
    return Enclosure(round_down(min(combos), p), round_up(max(combos), p), p)


def _enc_neg(a: Enclosure) -> Enclosure:
    return Enclosure(-a.hi, -a.lo, a.precision)


def _enc_abs(a: Enclosure) -> Enclosure:
    if a.lo >= 0:
        return a
    if a.hi <= 0:
        return _enc_neg(a)
    return Enclosure(Fraction(0), max(-a.lo, a.hi), a.precision)


def _lift(a: Scalar, b: Scalar) -> tuple[Enclosure, Enclosure]:
    p = min(
        [s.precision for s in (a, b) if isinstance(s, Enclosure)] or [DEFAULT_PRECISION]
    )
    return to_enclosure(a, p), to_enclosure(b, p)


def add(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, QSqrt2) and isinstance(b, QSqrt2):
        return a + b
    return _enc_add(*_lift(a, b))


def sub(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, QSqrt2) and isinstance(b, QSqrt2):
        return a - b
    return _enc_sub(*_lift(a, b))


def mul(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, QSqrt2) and isinstance(b, QSqrt2):
        return a * b
    return _enc_mul(*_lift(a, b))


def div(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(b, QSqrt2):
        if b.sign() == 0:
            raise DivisionByZero("division by exact zero")
        if isinstance(a, QSqrt2):
            return a / b
    return _enc_div(*_lift(a, b))


def neg(a: Scalar) -> Scalar:
    return -a if isinstance(a, QSqrt2) else _enc_neg(a)


def absval(a: Scalar) -> Scalar:
    return abs(a) if isinstance(a, QSqrt2) else _enc_abs(a)


_ARITH = {"add": add, "sub": sub, "mul": mul, "div": div, "neg": neg, "abs": absval}


def arith(op: str, a: Scalar, b: Scalar | None = None) -> Scalar:
    """Uniform dispatcher over {add, sub, mul, div, neg, abs}."""
    fn = _ARITH.get(op)
    if fn is None:
        raise ValueError(f"unknown arithmetic op {op!r}")
    if op in ("neg", "abs"):
        return fn(a)
    if b is None:
        raise ValueError(f"op {op!r} needs two operands")
    return fn(a, b)


def cmp_gt(a: Scalar, b: Scalar) -> Trilean:
    """Certified strict comparison a > b.

    TRUE and FALSE are only returned when the order is provable; overlapping
    enclosures yield UNKNOWN.
    """
    if isinstance(a, QSqrt2) and isinstance(b, QSqrt2):
        return Trilean.TRUE if (a - b).sign() > 0 else Trilean.FALSE
    ea, eb = _lift(a, b)
    if ea.lo > eb.hi:
        return Trilean.TRUE
    if ea.hi <= eb.lo:
        return Trilean.FALSE
    return Trilean.UNKNOWN


def cmp_lt(a: Scalar, b: Scalar) -> Trilean:
    return cmp_gt(b, a)


def scalar_eq(a: Scalar, b: Scalar) -> Trilean:
    if isinstance(a, QSqrt2) and isinstance(b, QSqrt2):
        return Trilean.TRUE if a == b else Trilean.FALSE
    ea, eb = _lift(a, b)
    if ea.is_point and eb.is_point and ea.lo == eb.lo:
        return Trilean.TRUE
    if ea.lo > eb.hi or ea.hi < eb.lo:
        return Trilean.FALSE
    return Trilean.UNKNOWN


def rationality(s: Scalar) -> Trilean:
    """YES/NO for exact values, UNKNOWN for nondegenerate intervals."""
    if isinstance(s, QSqrt2):
        return Trilean.TRUE if s.is_rational else Trilean.FALSE
    return Trilean.TRUE if s.is_point else Trilean.UNKNOWN


def sign_or_none(s: Scalar) -> int | None:
    if isinstance(s, QSqrt2):
        return s.sign()
    if s.lo > 0:
        return 1
    if s.hi < 0:
        return -1
    if s.is_point:
        return 0
    return None


def minimum(a: Scalar, b: Scalar) -> Scalar:
    """Sound enclosure (or exact value) of min(a, b)."""
    if isinstance(a, QSqrt2) and isinstance(b, QSqrt2):
        return a if a <= b else b
    ea, eb = _lift(a, b)
    return Enclosure(min(ea.lo, eb.lo), min(ea.hi, eb.hi), _binary_precision(ea, eb))


def maximum(a: Scalar, b: Scalar) -> Scalar:
    if isinstance(a, QSqrt2) and isinstance(b, QSqrt2):
        return a if a >= b else b
    ea, eb = _lift(a, b)
    return Enclosure(max(ea.lo, eb.lo), max(ea.hi, eb.hi), _binary_precision(ea, eb))


def root_enclosure(base: Fraction, n: int, precision: int) -> Enclosure:
    """Enclosure of base**(1/n) by deterministic dyadic bisection.

    The returned interval always contains the root, has width at most
    2**-precision times the root, and shrinks (never widens) as precision
    grows, because a higher precision replays the same bisection path and
    then keeps going.
    """
    base = _as_fraction(base)
    if base <= 0:
        raise ValueError("base must be positive")
    if n < 1:
        raise ValueError("exponent reciprocal must be >= 1")
    if n == 1:
        return Enclosure(round_down(base, precision), round_up(base, precision), precision)
    e = max(0, _ceil_log2(max(Fraction(1), base)))
    extra = max(0, _ceil_log2(1 / base)) if base < 1 else 0
    lo, hi = Fraction(0), Fraction(2) ** e
    for _ in range(precision + e + extra):
        mid = (lo + hi) / 2
        m = mid**n
        if m == base:
            return Enclosure(mid, mid, precision)
        if m < base:
            lo = mid
        else:
            hi = mid
    return Enclosure(lo, hi, precision)


def _inth_root(m: int, n: int) -> int:
    """Floor of the integer n-th root of m >= 0."""
    if m < 0:
        raise ValueError("nonnegative integer required")
    if m in (0, 1):
        return m
    x = 1 << (m.bit_length() // n + 1)
    while True:
        y = ((n - 1) * x + m // x ** (n - 1)) // n
        if y >= x:
            break
        x = y
    return x


def exact_nth_root(q: Fraction, n: int) -> Fraction | None:
    """Exact rational n-th root of q, or None when q is not a perfect power."""
    q = _as_fraction(q)
    if q < 0:
        if n % 2 == 0:
            return None
        r = exact_nth_root(-q, n)
        return None if r is None else -r
    rn = _inth_root(q.numerator, n)
    rd = _inth_root(q.denominator, n)
    if rn**n == q.numerator and rd**n == q.denominator:
        return Fraction(rn, rd)
    return None


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def serialize(s: Scalar) -> str:
    """Textual form: exact as "a/b + c/d*sqrt2", interval as "[lo, hi]@precision"."""
    if isinstance(s, QSqrt2):
        return f"{_frac_str(s.a)} + {_frac_str(s.b)}*sqrt2"
    return f"[{_frac_str(s.lo)}, {_frac_str(s.hi)}]@{s.precision}"


def parse_exact(text) -> QSqrt2:
    """Parse "p/q", "p", or "a/b + c/d*sqrt2" (also dict {"a": .., "b": ..})."""
    if isinstance(text, QSqrt2):
        return text
    if isinstance(text, dict):
        return QSqrt2(_as_fraction(text.get("a", 0)), _as_fraction(text.get("b", 0)))
    if isinstance(text, (int, Fraction)):
        return QSqrt2(_as_fraction(text))
    if not isinstance(text, str):
        raise TypeError(f"cannot parse scalar from {text!r}")
    body = text.strip()
    if "sqrt2" in body:
        head, _, tail = body.partition("+")
        tail = tail.strip()
        if not tail.endswith("*sqrt2"):
            raise ValueError(f"malformed exact scalar {text!r}")
        return QSqrt2(Fraction(head.strip()), Fraction(tail[: -len("*sqrt2")].strip()))
    return QSqrt2(Fraction(body))
