"""Metric spaces: the line, the circle, the 2-torus, and gamma-metric products.

Points are exact scalars (line, circle) or nested pairs of points (torus,
products). Distances stay exact whenever the inputs are exact, so strict
comparisons against thresholds remain certificates rather than estimates.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import scalar as sc
from .scalar import Enclosure, QSqrt2, Scalar, Trilean, exact


class DimensionMismatch(TypeError):
    """Point shape does not match the space."""


Point = Union[Scalar, tuple]


@dataclass(frozen=True)
class RatioBound:
    """gamma(t) = t / (1 + t): bounded by 1, strictly increasing, gamma(0) = 0."""

    def apply(self, t: Scalar) -> Scalar:
        return sc.div(t, sc.add(sc.exact(1), t))

    def inverse_radius(self, r: QSqrt2) -> QSqrt2 | None:
        """Exact preimage radius: gamma(t) < r iff t < inverse. None means all t."""
        if (r - exact(1)).sign() >= 0:
            return None
        return r / (exact(1) - r)

    def kind(self) -> str:
        return "ratio-bound"


@dataclass(frozen=True)
class Capped:
    """gamma(t) = min(t, c): strictly increasing below the cap, constant above."""

    c: QSqrt2

    def __post_init__(self) -> None:
        if self.c.sign() <= 0:
            raise ValueError("cap must be positive")

    def apply(self, t: Scalar) -> Scalar:
        return sc.minimum(t, self.c)

    def inverse_radius(self, r: QSqrt2) -> QSqrt2 | None:
        if (r - self.c).sign() > 0:
            return None
        return r

    def kind(self) -> str:
        return "capped"


GammaFn = Union[RatioBound, Capped]


@dataclass(frozen=True)
class RealLine:
    pass


@dataclass(frozen=True)
class Circle:
    """R/Z with arc distance; points are line scalars taken mod 1."""


@dataclass(frozen=True)
class Torus2:
    """Two circles under the max of the arc distances."""


@dataclass(frozen=True)
class ProductSpace:
    left: "MetricSpace"
    right: "MetricSpace"
    gamma: GammaFn


@dataclass(frozen=True)
class BoundedTransform:
    """Same carrier as `inner`, distance gamma(rho)."""

    inner: "MetricSpace"
    gamma: GammaFn


MetricSpace = Union[RealLine, Circle, Torus2, ProductSpace, BoundedTransform]


def _expect_scalar(p: Point) -> Scalar:
    if isinstance(p, (QSqrt2, Enclosure)):
        return p
    raise DimensionMismatch(f"expected a scalar point, got {p!r}")


def _expect_pair(p: Point) -> tuple:
    if isinstance(p, tuple) and len(p) == 2:
        return p
    raise DimensionMismatch(f"expected a point pair, got {p!r}")


def reduce_mod1(x: Scalar) -> Scalar:
    """Canonical representative in [0, 1) for exact scalars.

    Interval scalars are shifted by an exact integer only, which loses no
    information mod 1.
    """
    if isinstance(x, QSqrt2):
        return x - x.floor()
    mid = (x.lo + x.hi) / 2
    shift = mid.__floor__()
    return Enclosure(x.lo - shift, x.hi - shift, x.precision)


def _arc_distance(x: Scalar, y: Scalar) -> Scalar:
    d = sc.sub(x, y)
    if isinstance(d, QSqrt2):
        t = d - d.floor()
        return sc.minimum(t, exact(1) - t)
    d = reduce_mod1(d)
    if d.width >= Fraction(1, 2):
        return Enclosure(Fraction(0), Fraction(1, 2), d.precision)
    m = sc.absval(d)
    return sc.minimum(m, sc.sub(sc.exact(1), m))


def distance(space: MetricSpace, p: Point, q: Point) -> Scalar:
    """Certified metric value; exact whenever the inputs are exact."""
    if isinstance(space, RealLine):
        return sc.absval(sc.sub(_expect_scalar(p), _expect_scalar(q)))
    if isinstance(space, Circle):
        return _arc_distance(_expect_scalar(p), _expect_scalar(q))
    if isinstance(space, Torus2):
        (p1, p2), (q1, q2) = _expect_pair(p), _expect_pair(q)
        return sc.maximum(_arc_distance(p1, q1), _arc_distance(p2, q2))
    if isinstance(space, ProductSpace):
        (p1, p2), (q1, q2) = _expect_pair(p), _expect_pair(q)
        d1 = space.gamma.apply(distance(space.left, p1, q1))
        d2 = space.gamma.apply(distance(space.right, p2, q2))
        return sc.maximum(d1, d2)
    if isinstance(space, BoundedTransform):
        return space.gamma.apply(distance(space.inner, p, q))
    raise DimensionMismatch(f"unknown space {space!r}")


def point_eq(p: Point, q: Point) -> bool:
    """Structural equality of exact points."""
    if isinstance(p, tuple) and isinstance(q, tuple):
        return len(p) == len(q) and all(point_eq(a, b) for a, b in zip(p, q))
    return isinstance(p, QSqrt2) and isinstance(q, QSqrt2) and p == q


def point_is_exact(p: Point) -> bool:
    if isinstance(p, tuple):
        return all(point_is_exact(c) for c in p)
    return isinstance(p, QSqrt2)


def serialize_point(p: Point) -> object:
    if isinstance(p, tuple):
        return [serialize_point(c) for c in p]
    return sc.serialize(p)


def derive_seed(*parts: object) -> int:
    """Stable sub-seed from string material, independent of hash randomization."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _exact_radius(radius: Scalar) -> QSqrt2:
    if isinstance(radius, QSqrt2):
        if radius.sign() <= 0:
            raise ValueError("radius must be positive")
        return radius
    if radius.lo <= 0:
        raise ValueError("interval radius is not provably positive")
    return QSqrt2(radius.lo)


def sample_ball(
    space: MetricSpace, center: Point, radius: Scalar, budget: int, seed: int
) -> list[Point]:
    """Deterministic exact sample of the open ball around `center`.

    Returns `budget` distinct exact points, none equal to the center. The
    mix interleaves rational points, sqrt(2)-offset irrational points, and
    boundary-proximal points whose distance exceeds radius*(1 - 2**-(k+2))
    for k = 1..ceil(budget/4).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    r = _exact_radius(radius)
    if isinstance(space, RealLine):
        return _sample_line_ball(center, r, budget, seed, wrap=False)
    if isinstance(space, Circle):
        return _sample_line_ball(center, r, budget, seed, wrap=True)
    if isinstance(space, Torus2):
        return _sample_torus_ball(space, center, r, budget, seed)
    if isinstance(space, ProductSpace):
        side = space.gamma.inverse_radius(r)
        side = side if side is not None else exact(1)
        c1, c2 = _expect_pair(center)
        left = sample_ball(space.left, c1, side, budget, derive_seed(seed, "L"))
        right = sample_ball(space.right, c2, side, budget, derive_seed(seed, "R"))
        out = []
        for i in range(budget):
            cand = (left[i], c2) if i % 2 == 0 else (c1, right[i])
            out.append(cand)
        return _dedupe_points(space, center, r, out, budget)
    if isinstance(space, BoundedTransform):
        inner_r = space.gamma.inverse_radius(r)
        inner_r = inner_r if inner_r is not None else exact(1)
        return sample_ball(space.inner, center, inner_r, budget, seed)
    raise DimensionMismatch(f"unknown space {space!r}")


def _offset_stream(r: QSqrt2, budget: int, seed: int):
    """Deterministic stream of exact nonzero offsets with |offset| < r."""
    rng = random.Random(derive_seed(seed, "offsets"))
    # Boundary-proximal magnitudes r*(1 - 2**-(k+2)), alternating sign.
    for k in range(1, (budget + 3) // 4 + 1):
        mag = r * (Fraction(1) - Fraction(1, 1 << (k + 2)))
        yield mag if k % 2 == 1 else -mag
    # One plainly rational-scale and one sqrt(2)-flavoured offset up front.
    yield r * Fraction(1, 3)
    yield (r * Fraction(1, 3)) * QSqrt2(0, Fraction(1, 2))
    i = 0
    while True:
        q = Fraction(rng.randrange(-(1 << 16) + 1, 1 << 16), 1 << 17)
        if q == 0:
            continue
        off = r * q
        # Every other draw gets a sqrt(2) twist to keep irrational points coming.
        yield off * QSqrt2(0, Fraction(1, 2)) if i % 2 else off
        i += 1


def _rational_approximations(c: QSqrt2):
    """Dyadic rational points approaching c (used when c is irrational)."""
    prec = 4
    while True:
        yield QSqrt2(sc.round_down(c.a + c.b * sc.sqrt2_enclosure(prec).lo, prec))
        prec += 4


def _sample_line_ball(
    center: Point, r: QSqrt2, budget: int, seed: int, wrap: bool
) -> list[Point]:
    c = _expect_scalar(center)
    if not isinstance(c, QSqrt2):
        raise ValueError("sampling needs an exact center")
    out: list[QSqrt2] = []
    seen: set[QSqrt2] = set()

    def admit(y: QSqrt2) -> None:
        if len(out) >= budget:
            return
        y = y - y.floor() if wrap else y
        if y == (c - c.floor() if wrap else c):
            return
        d = _arc_distance(y, c) if wrap else abs(y - c)
        if sc.cmp_gt(r, d) is not Trilean.TRUE:
            return
        if y not in seen:
            seen.add(y)
            out.append(y)

    stream = _offset_stream(r, budget, seed)
    rational_stream = _rational_approximations(c) if not c.is_rational else None
    i = 0
    while len(out) < budget and i < budget * 64:
        admit(c + next(stream))
        if rational_stream is not None and i % 3 == 0:
            admit(next(rational_stream))
        i += 1
    if len(out) < budget:
        raise RuntimeError("ball sampler failed to reach the requested budget")
    return out


def _sample_torus_ball(
    space: Torus2, center: Point, r: QSqrt2, budget: int, seed: int
) -> list[Point]:
    c1, c2 = _expect_pair(center)
    r_eff = sc.minimum(r, exact(Fraction(1, 2)))
    if not isinstance(r_eff, QSqrt2):
        r_eff = QSqrt2(sc.to_enclosure(r_eff).lo)
    s1 = _offset_stream(r_eff, budget, derive_seed(seed, "t1"))
    s2 = _offset_stream(r_eff, budget, derive_seed(seed, "t2"))
    out: list[Point] = []
    seen: set[tuple] = set()
    attempts = 0
    while len(out) < budget and attempts < budget * 64:
        attempts += 1
        o1, o2 = next(s1), next(s2)
        if attempts % 2 == 0:
            o2 = o2 * Fraction(1, 2)
        cand = (reduce_mod1(c1 + o1), reduce_mod1(c2 + o2))
        if point_eq(cand, center):
            continue
        d = distance(space, cand, center)
        if sc.cmp_gt(r, d) is not Trilean.TRUE:
            continue
        key = (cand[0], cand[1])
        if key not in seen:
            seen.add(key)
            out.append(cand)
    if len(out) < budget:
        raise RuntimeError("torus ball sampler failed to reach the requested budget")
    return out


def _dedupe_points(
    space: MetricSpace, center: Point, r: QSqrt2, cands: list[Point], budget: int
) -> list[Point]:
    out: list[Point] = []
    for cand in cands:
        if point_eq(cand, center):
            continue
        if sc.cmp_gt(r, distance(space, cand, center)) is not Trilean.TRUE:
            continue
        if any(point_eq(cand, have) for have in out):
            continue
        out.append(cand)
        if len(out) >= budget:
            break
    i = 0
    while len(out) < budget and i < len(cands):
        # Top up with nudged variants if coordinate reuse caused duplicates.
        base = cands[i % len(cands)]
        i += 1
        if not isinstance(base, tuple):
            continue
        nudged = (base[0], sc.add(base[1], exact(Fraction(1, (1 << 12) + i))))
        if (
            not point_eq(nudged, center)
            and sc.cmp_gt(r, distance(space, nudged, center)) is Trilean.TRUE
            and not any(point_eq(nudged, have) for have in out)
        ):
            out.append(nudged)
    if len(out) < budget:
        raise RuntimeError("product ball sampler failed to reach the requested budget")
    return out
