"""Structured subsets of the real line with exact, decidable queries.

These are the only sets the verdict engine accepts: membership of an exact
point is decidable for every form, intersecting with an open ball produces
another structured set, and emptiness of such intersections is certifiable.
That exactness is what allows a refutation to say "this punctured ball is
empty" and mean it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .scalar import QSqrt2, Scalar, exact, _as_fraction


class UnsupportedSet(ValueError):
    """The requested query has no analytic rule for this set form."""


@dataclass(frozen=True)
class IntervalSet:
    """Interval with optional unbounded ends (None means infinite)."""

    a: Optional[QSqrt2]
    b: Optional[QSqrt2]
    closed_left: bool = True
    closed_right: bool = True


@dataclass(frozen=True)
class FiniteSet:
    points: tuple[QSqrt2, ...]


@dataclass(frozen=True)
class HarmonicSet:
    """{sign/n : n_min <= n <= n_max}, n_max=None for the full tail."""

    sign: int
    n_min: int = 1
    n_max: Optional[int] = None

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        if self.n_min < 1:
            raise ValueError("n_min must be >= 1")


@dataclass(frozen=True)
class RationalGrid:
    """{a + k*step : k = 0.., a + k*step <= b}."""

    a: Fraction
    b: Fraction
    step: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _as_fraction(self.a))
        object.__setattr__(self, "b", _as_fraction(self.b))
        object.__setattr__(self, "step", _as_fraction(self.step))
        if self.step <= 0:
            raise ValueError("step must be positive")


@dataclass(frozen=True)
class IrrationalGrid:
    """Rational grid shifted by a nonzero multiple of sqrt(2)."""

    a: Fraction
    b: Fraction
    step: Fraction
    offset: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _as_fraction(self.a))
        object.__setattr__(self, "b", _as_fraction(self.b))
        object.__setattr__(self, "step", _as_fraction(self.step))
        object.__setattr__(self, "offset", _as_fraction(self.offset))
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.offset == 0:
            raise ValueError("offset must be a nonzero sqrt(2) multiple")


@dataclass(frozen=True)
class UnionSet:
    members: tuple["StructuredSet", ...]


@dataclass(frozen=True)
class IntersectionSet:
    members: tuple["StructuredSet", ...]


@dataclass(frozen=True)
class FullLine:
    pass


StructuredSet = Union[
    IntervalSet,
    FiniteSet,
    HarmonicSet,
    RationalGrid,
    IrrationalGrid,
    UnionSet,
    IntersectionSet,
    FullLine,
]

EMPTY = FiniteSet(())


def _grid_count(g: RationalGrid | IrrationalGrid) -> int:
    if g.b < g.a:
        return 0
    return int((g.b - g.a) / g.step) + 1


def _grid_point(g: RationalGrid | IrrationalGrid, k: int) -> QSqrt2:
    base = g.a + k * g.step
    if isinstance(g, IrrationalGrid):
        return QSqrt2(base, g.offset)
    return QSqrt2(base)


def membership(s: StructuredSet, x: QSqrt2) -> bool:
    """Exact membership test for an exact point."""
    if isinstance(s, FullLine):
        return True
    if isinstance(s, IntervalSet):
        if s.a is not None:
            d = (x - s.a).sign()
            if d < 0 or (d == 0 and not s.closed_left):
                return False
        if s.b is not None:
            d = (x - s.b).sign()
            if d > 0 or (d == 0 and not s.closed_right):
                return False
        return True
    if isinstance(s, FiniteSet):
        return x in s.points
    if isinstance(s, HarmonicSet):
        if not x.is_rational:
            return False
        q = x.a
        if q.numerator != s.sign:
            return False
        n = q.denominator
        return n >= s.n_min and (s.n_max is None or n <= s.n_max)
    if isinstance(s, RationalGrid):
        if not x.is_rational:
            return False
        q = x.a
        if q < s.a or q > s.b:
            return False
        ratio = (q - s.a) / s.step
        return ratio.denominator == 1
    if isinstance(s, IrrationalGrid):
        if x.b != s.offset:
            return False
        q = x.a
        if q < s.a or q > s.b:
            return False
        ratio = (q - s.a) / s.step
        return ratio.denominator == 1
    if isinstance(s, UnionSet):
        return any(membership(m, x) for m in s.members)
    if isinstance(s, IntersectionSet):
        return all(membership(m, x) for m in s.members)
    raise UnsupportedSet(f"membership undefined for {s!r}")


def _floor_strict(v: QSqrt2) -> int:
    """Largest integer strictly below v."""
    m = v.floor()
    return m - 1 if (v - m).sign() == 0 else m


def ball_intersect(s: StructuredSet, center: QSqrt2, radius: QSqrt2) -> StructuredSet:
    """Exact description of the open ball (center-radius, center+radius) meet s.

    The center is not removed here; callers that need the punctured ball
    filter it out downstream.
    """
    if not isinstance(radius, QSqrt2):
        raise TypeError("ball_intersect needs an exact radius")
    if radius.sign() <= 0:
        raise ValueError("radius must be positive")
    lo, hi = center - radius, center + radius
    return _open_interval_intersect(s, lo, hi)


def _open_interval_intersect(s: StructuredSet, lo: QSqrt2, hi: QSqrt2) -> StructuredSet:
    if isinstance(s, FullLine):
        return IntervalSet(lo, hi, closed_left=False, closed_right=False)
    if isinstance(s, IntervalSet):
        new_a, closed_l = s.a, s.closed_left
        if new_a is None or (new_a - lo).sign() < 0:
            new_a, closed_l = lo, False
        elif (new_a - lo).sign() == 0:
            closed_l = False
        new_b, closed_r = s.b, s.closed_right
        if new_b is None or (new_b - hi).sign() > 0:
            new_b, closed_r = hi, False
        elif (new_b - hi).sign() == 0:
            closed_r = False
        d = (new_b - new_a).sign()
        if d < 0 or (d == 0 and not (closed_l and closed_r)):
            return EMPTY
        return IntervalSet(new_a, new_b, closed_l, closed_r)
    if isinstance(s, FiniteSet):
        kept = tuple(
            p for p in s.points if (p - lo).sign() > 0 and (p - hi).sign() < 0
        )
        return FiniteSet(kept)
    if isinstance(s, HarmonicSet):
        return _harmonic_intersect(s, lo, hi)
    if isinstance(s, (RationalGrid, IrrationalGrid)):
        return _grid_intersect(s, lo, hi)
    if isinstance(s, UnionSet):
        pieces = [_open_interval_intersect(m, lo, hi) for m in s.members]
        pieces = [p for p in pieces if not (isinstance(p, FiniteSet) and not p.points)]
        if not pieces:
            return EMPTY
        if len(pieces) == 1:
            return pieces[0]
        return UnionSet(tuple(pieces))
    if isinstance(s, IntersectionSet):
        pieces = tuple(_open_interval_intersect(m, lo, hi) for m in s.members)
        for p in pieces:
            if isinstance(p, FiniteSet) and not p.points:
                return EMPTY
        return IntersectionSet(pieces)
    raise UnsupportedSet(f"ball intersection undefined for {s!r}")


def _harmonic_intersect(s: HarmonicSet, lo: QSqrt2, hi: QSqrt2) -> StructuredSet:
    # Points are sign/n; solve lo < sign/n < hi for integer n in the range.
    n_lo, n_hi = s.n_min, s.n_max
    if s.sign == 1:
        if hi.sign() <= 0:
            return EMPTY
        # 1/n < hi  <=>  n > 1/hi
        inv = exact(1) / hi
        n_lo = max(n_lo, inv.floor() + 1)
        if lo.sign() > 0:
            # 1/n > lo  <=>  n < 1/lo
            bound = _floor_strict(exact(1) / lo)
            n_hi = bound if n_hi is None else min(n_hi, bound)
    else:
        if lo.sign() >= 0:
            return EMPTY
        # -1/n > lo  <=>  n > 1/(-lo)
        inv = exact(1) / (-lo)
        n_lo = max(n_lo, inv.floor() + 1)
        if hi.sign() < 0:
            # -1/n < hi  <=>  n < 1/(-hi)
            bound = _floor_strict(exact(1) / (-hi))
            n_hi = bound if n_hi is None else min(n_hi, bound)
    if n_hi is not None and n_lo > n_hi:
        return EMPTY
    return HarmonicSet(s.sign, n_lo, n_hi)


def _grid_intersect(
    s: RationalGrid | IrrationalGrid, lo: QSqrt2, hi: QSqrt2
) -> StructuredSet:
    shift = QSqrt2(0, s.offset) if isinstance(s, IrrationalGrid) else QSqrt2(0)
    # Solve lo < a + k*step + shift < hi over integer k within the grid range.
    lo_r, hi_r = lo - shift, hi - shift
    step = exact(s.step)
    k_lo = _floor_strict((hi_r - exact(s.a)) / step)  # largest k strictly below hi
    k_from = ((lo_r - exact(s.a)) / step).floor() + 1  # smallest k strictly above lo
    k_min = max(0, k_from)
    k_max = min(_grid_count(s) - 1, k_lo)
    if k_min > k_max:
        return EMPTY
    new_a = s.a + k_min * s.step
    new_b = s.a + k_max * s.step
    if isinstance(s, IrrationalGrid):
        return IrrationalGrid(new_a, new_b, s.step, s.offset)
    return RationalGrid(new_a, new_b, s.step)


def is_certainly_empty(s: StructuredSet) -> Optional[bool]:
    """True/False when emptiness is certified, None when undecided."""
    if isinstance(s, FullLine):
        return False
    if isinstance(s, IntervalSet):
        if s.a is None or s.b is None:
            return False
        d = (s.b - s.a).sign()
        if d < 0:
            return True
        if d == 0:
            return not (s.closed_left and s.closed_right)
        return False
    if isinstance(s, FiniteSet):
        return not s.points
    if isinstance(s, HarmonicSet):
        return s.n_max is not None and s.n_min > s.n_max
    if isinstance(s, (RationalGrid, IrrationalGrid)):
        return _grid_count(s) == 0
    if isinstance(s, UnionSet):
        results = [is_certainly_empty(m) for m in s.members]
        if all(r is True for r in results):
            return True
        if any(r is False for r in results):
            return False
        return None
    if isinstance(s, IntersectionSet):
        return _intersection_emptiness(s)
    raise UnsupportedSet(f"emptiness undefined for {s!r}")


def _intersection_emptiness(s: IntersectionSet) -> Optional[bool]:
    results = [is_certainly_empty(m) for m in s.members]
    if any(r is True for r in results):
        return True
    if not s.members:
        return False
    finite = [m for m in s.members if _finite_cardinality(m) is not None]
    if finite:
        base = min(finite, key=lambda m: _finite_cardinality(m) or 0)
        others = [m for m in s.members if m is not base]
        for p in _enumerate_finite(base):
            if all(membership(o, p) for o in others):
                return False
        return True
    # Range reasoning: the intersection lives inside the meet of all ranges.
    lo, lo_strict, hi, hi_strict = None, False, None, False
    for m in s.members:
        m_lo, m_lo_s, m_hi, m_hi_s = set_range(m)
        if m_lo is not None and (lo is None or (m_lo - lo).sign() > 0 or ((m_lo - lo).sign() == 0 and m_lo_s)):
            lo, lo_strict = m_lo, m_lo_s if lo is None or (m_lo - lo).sign() != 0 else (lo_strict or m_lo_s)
        if m_hi is not None and (hi is None or (m_hi - hi).sign() < 0 or ((m_hi - hi).sign() == 0 and m_hi_s)):
            hi, hi_strict = m_hi, m_hi_s if hi is None or (m_hi - hi).sign() != 0 else (hi_strict or m_hi_s)
    if lo is not None and hi is not None:
        d = (hi - lo).sign()
        if d < 0:
            return True
        if d == 0:
            if lo_strict or hi_strict:
                return True
            return not all(membership(m, lo) for m in s.members)
    # Rationality split: an all-rational member cannot meet an all-irrational one.
    classes = {_rationality_class(m) for m in s.members}
    if "rational" in classes and "irrational" in classes:
        return True
    return None


def _finite_cardinality(s: StructuredSet) -> Optional[int]:
    if isinstance(s, FiniteSet):
        return len(s.points)
    if isinstance(s, HarmonicSet) and s.n_max is not None:
        return max(0, s.n_max - s.n_min + 1)
    if isinstance(s, (RationalGrid, IrrationalGrid)):
        return _grid_count(s)
    if isinstance(s, UnionSet):
        sizes = [_finite_cardinality(m) for m in s.members]
        if all(c is not None for c in sizes):
            return sum(sizes)  # upper bound; duplicates only shrink it
    return None


def _enumerate_finite(s: StructuredSet):
    if isinstance(s, FiniteSet):
        yield from s.points
    elif isinstance(s, HarmonicSet) and s.n_max is not None:
        for n in range(s.n_min, s.n_max + 1):
            yield exact(Fraction(s.sign, n))
    elif isinstance(s, (RationalGrid, IrrationalGrid)):
        for k in range(_grid_count(s)):
            yield _grid_point(s, k)
    elif isinstance(s, UnionSet):
        seen = set()
        for m in s.members:
            for p in _enumerate_finite(m):
                if p not in seen:
                    seen.add(p)
                    yield p
    else:
        raise UnsupportedSet(f"{s!r} is not finitely enumerable")


def set_range(s: StructuredSet) -> tuple[Optional[QSqrt2], bool, Optional[QSqrt2], bool]:
    """(lower, lower_strict, upper, upper_strict); None means unbounded."""
    if isinstance(s, FullLine):
        return None, False, None, False
    if isinstance(s, IntervalSet):
        return s.a, not s.closed_left, s.b, not s.closed_right
    if isinstance(s, FiniteSet):
        if not s.points:
            return exact(1), False, exact(0), False  # inverted: empty
        lo = min(s.points)
        hi = max(s.points)
        return lo, False, hi, False
    if isinstance(s, HarmonicSet):
        if s.sign == 1:
            hi = exact(Fraction(1, s.n_min))
            lo = exact(Fraction(1, s.n_max)) if s.n_max is not None else exact(0)
            return lo, s.n_max is None, hi, False
        lo = exact(Fraction(-1, s.n_min))
        hi = exact(Fraction(-1, s.n_max)) if s.n_max is not None else exact(0)
        return lo, False, hi, s.n_max is None
    if isinstance(s, (RationalGrid, IrrationalGrid)):
        count = _grid_count(s)
        if count == 0:
            return exact(1), False, exact(0), False
        return _grid_point(s, 0), False, _grid_point(s, count - 1), False
    if isinstance(s, UnionSet):
        lo, lo_s, hi, hi_s = None, False, None, False
        first = True
        for m in s.members:
            m_lo, m_lo_s, m_hi, m_hi_s = set_range(m)
            if first:
                lo, lo_s, hi, hi_s = m_lo, m_lo_s, m_hi, m_hi_s
                first = False
                continue
            if lo is not None and (m_lo is None or (m_lo - lo).sign() < 0):
                lo, lo_s = m_lo, m_lo_s
            if hi is not None and (m_hi is None or (m_hi - hi).sign() > 0):
                hi, hi_s = m_hi, m_hi_s
        return lo, lo_s, hi, hi_s
    if isinstance(s, IntersectionSet):
        # Sound outer bound: meet of the member ranges.
        lo, lo_s, hi, hi_s = None, False, None, False
        for m in s.members:
            m_lo, m_lo_s, m_hi, m_hi_s = set_range(m)
            if m_lo is not None and (lo is None or (m_lo - lo).sign() > 0):
                lo, lo_s = m_lo, m_lo_s
            if m_hi is not None and (hi is None or (m_hi - hi).sign() < 0):
                hi, hi_s = m_hi, m_hi_s
        return lo, lo_s, hi, hi_s
    raise UnsupportedSet(f"range undefined for {s!r}")


def _rationality_class(s: StructuredSet) -> str:
    if isinstance(s, (HarmonicSet, RationalGrid)):
        return "rational"
    if isinstance(s, IrrationalGrid):
        return "irrational"
    if isinstance(s, FiniteSet):
        if not s.points:
            return "rational"
        if all(p.is_rational for p in s.points):
            return "rational"
        if all(not p.is_rational for p in s.points):
            return "irrational"
        return "mixed"
    if isinstance(s, UnionSet):
        classes = {_rationality_class(m) for m in s.members}
        return classes.pop() if len(classes) == 1 else "mixed"
    return "mixed"


def is_limit_point(s: StructuredSet, x: QSqrt2) -> bool:
    """Whether every ball around x meets s minus {x}, decided analytically."""
    if isinstance(s, FullLine):
        return True
    if isinstance(s, IntervalSet):
        if is_certainly_empty(s):
            return False
        lo, lo_s, hi, hi_s = set_range(s)
        if lo is not None and hi is not None and (hi - lo).sign() == 0:
            return False  # single point has no limit points
        if lo is not None:
            d = (x - lo).sign()
            if d < 0:
                return False
        if hi is not None:
            d = (x - hi).sign()
            if d > 0:
                return False
        return True
    if isinstance(s, FiniteSet):
        return False
    if isinstance(s, HarmonicSet):
        if s.n_max is not None:
            return False
        return x.sign() == 0 and x.is_rational and x.a == 0
    if isinstance(s, (RationalGrid, IrrationalGrid)):
        return False
    if isinstance(s, UnionSet):
        return any(is_limit_point(m, x) for m in s.members)
    if isinstance(s, IntersectionSet):
        if is_certainly_empty(s) is True:
            return False
        if _finite_cardinality(s) is not None:
            return False
        raise UnsupportedSet("limit points of general intersections are not decided")
    raise UnsupportedSet(f"limit points undefined for {s!r}")


def punctured_is_empty(s: StructuredSet, x: QSqrt2) -> Optional[bool]:
    """Certified emptiness of s minus {x}; None when undecided."""
    empty = is_certainly_empty(s)
    if empty is True:
        return True
    card = _finite_cardinality(s)
    if card is not None:
        return not any(p != x for p in _enumerate_finite(s))
    if isinstance(s, IntervalSet):
        lo, lo_s, hi, hi_s = set_range(s)
        if lo is not None and hi is not None and (hi - lo).sign() == 0:
            return lo == x
        return False  # nondegenerate interval: infinitely many points
    if isinstance(s, (HarmonicSet, FullLine)):
        return False  # infinite
    if isinstance(s, UnionSet):
        results = [punctured_is_empty(m, x) for m in s.members]
        if all(r is True for r in results):
            return True
        if any(r is False for r in results):
            return False
        return None
    if isinstance(s, IntersectionSet):
        if empty is True:
            return True
        return None if empty is None else None
    return None


def closure(s: StructuredSet) -> StructuredSet:
    """Topological closure, staying inside the structured forms."""
    if isinstance(s, IntervalSet):
        if is_certainly_empty(s):
            return EMPTY
        return IntervalSet(s.a, s.b, s.a is not None, s.b is not None)
    if isinstance(s, (FiniteSet, RationalGrid, IrrationalGrid, FullLine)):
        return s
    if isinstance(s, HarmonicSet):
        if s.n_max is None:
            return UnionSet((s, FiniteSet((exact(0),))))
        return s
    if isinstance(s, UnionSet):
        return UnionSet(tuple(closure(m) for m in s.members))
    raise UnsupportedSet(f"closure undefined for {s!r}")


def enumerate_points(s: StructuredSet, limit: int, seed: int = 0) -> list[QSqrt2]:
    """Up to `limit` exact points of s in a deterministic order.

    Finite forms enumerate completely (up to the limit). Intervals are swept
    breadth-first through dyadic subdivision with sqrt(2)-offset variants
    interleaved so both rational and irrational candidates appear.
    """
    if limit <= 0:
        return []
    if isinstance(s, FiniteSet):
        return list(s.points[:limit])
    if isinstance(s, HarmonicSet):
        out = []
        n = s.n_min
        while len(out) < limit and (s.n_max is None or n <= s.n_max):
            out.append(exact(Fraction(s.sign, n)))
            n += 1
        return out
    if isinstance(s, (RationalGrid, IrrationalGrid)):
        return [_grid_point(s, k) for k in range(min(limit, _grid_count(s)))]
    if isinstance(s, IntervalSet):
        return _enumerate_interval(s, limit)
    if isinstance(s, FullLine):
        return _enumerate_interval(
            IntervalSet(exact(-64), exact(64), False, False), limit
        )
    if isinstance(s, UnionSet):
        streams = [enumerate_points(m, limit, seed) for m in s.members]
        out: list[QSqrt2] = []
        seen: set[QSqrt2] = set()
        i = 0
        while len(out) < limit and any(i < len(st) for st in streams):
            for st in streams:
                if i < len(st) and st[i] not in seen:
                    seen.add(st[i])
                    out.append(st[i])
                    if len(out) >= limit:
                        break
            i += 1
        return out
    if isinstance(s, IntersectionSet):
        base = None
        for m in s.members:
            if _finite_cardinality(m) is not None:
                base = m
                break
        if base is None:
            for m in s.members:
                if isinstance(m, (IntervalSet, HarmonicSet)):
                    base = m
                    break
        if base is None:
            raise UnsupportedSet("no enumerable member in intersection")
        others = [m for m in s.members if m is not base]
        out = []
        for p in enumerate_points(base, limit * 8, seed):
            if all(membership(o, p) for o in others):
                out.append(p)
                if len(out) >= limit:
                    break
        return out
    raise UnsupportedSet(f"enumeration undefined for {s!r}")


def _enumerate_interval(s: IntervalSet, limit: int) -> list[QSqrt2]:
    lo = s.a if s.a is not None else exact(-64)
    hi = s.b if s.b is not None else exact(64)
    width = hi - lo
    if width.sign() < 0:
        return []
    if width.sign() == 0:
        return [lo] if s.closed_left and s.closed_right and s.a is not None else []
    out: list[QSqrt2] = []
    seen: set[QSqrt2] = set()

    def push(p: QSqrt2) -> None:
        if len(out) >= limit or p in seen:
            return
        if membership(s, p):
            seen.add(p)
            out.append(p)

    if s.a is not None and s.closed_left:
        push(s.a)
    if s.b is not None and s.closed_right:
        push(s.b)
    depth = 1
    while len(out) < limit and depth < limit * 4 + 8:
        denom = 1 << depth
        for j in range(1, denom, 2):
            frac = Fraction(j, denom)
            p = lo + width * frac
            push(p)
            # Irrational companion nudged by a sqrt(2) sliver that stays inside.
            margin = width * Fraction(min(j, denom - j), denom) / 4
            push(p + QSqrt2(0, margin.a / 2) if margin.is_rational else p)
            if len(out) >= limit:
                break
        depth += 1
    return out
