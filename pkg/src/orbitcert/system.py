"""Orbit evaluation: map expressions and the systems the verdict engine drives.

A system is anything that can produce the n-th orbit point O_n(x). Iterated
maps and time-varying families step; direct-iterate rules jump straight to
step n; products, conjugations, powers, and restrictions wrap other systems.

Composition convention: O_0(x) = x for every system. For a time-varying
family {f_k} the step-n point is f_n(f_{n-1}(...f_0(x))), so step n means the
maps indexed 0 through n have been applied. Reports echo both the step index
and the number of maps applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Union

from . import scalar as sc
from . import sets as st
from .scalar import DEFAULT_PRECISION, Enclosure, QSqrt2, Scalar, Trilean, exact
from .space import GammaFn, Point, derive_seed, point_eq, point_is_exact


class RationalityUndecidable(ValueError):
    """A rationality branch received an interval point."""


class NotInvariant(RuntimeError):
    """A restriction probe escaped the carrier."""

    def __init__(self, point: Point, image: Point | None = None):
        self.point = point
        self.image = image
        super().__init__(f"carrier not invariant at {point!r}")


class NotInverse(ValueError):
    """Sample certification of g o g_inv = id failed."""


class UnsupportedSystemKind(TypeError):
    """The operation is restricted to another system kind."""


# ---------------------------------------------------------------------------
# Map expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Affine:
    """x -> lam*x + c."""

    lam: Scalar
    c: Scalar


@dataclass(frozen=True)
class RationalityBranch:
    """Dispatch on exact rationality of the input point."""

    on_rational: "MapExpr"
    on_irrational: "MapExpr"


@dataclass(frozen=True)
class CircleLinear:
    """x -> k*x mod 1 on the circle."""

    k: int

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError("k must be >= 2")


@dataclass(frozen=True)
class TorusLinear:
    """(x, y) -> M(x, y) mod 1 for an integer matrix with |det| = 1."""

    m: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self) -> None:
        (a, b), (c, d) = self.m
        if abs(a * d - b * c) != 1:
            raise ValueError("matrix must have determinant +-1")


@dataclass(frozen=True)
class Cubic:
    """x -> x**3."""


@dataclass(frozen=True)
class CubeRoot:
    """x -> x**(1/3); exact on rational perfect cubes, enclosure otherwise."""

    precision: int = DEFAULT_PRECISION


@dataclass(frozen=True)
class Constant:
    v: Scalar


MapExpr = Union[Affine, RationalityBranch, CircleLinear, TorusLinear, Cubic, CubeRoot, Constant]


def _mod1(x: Scalar) -> Scalar:
    from .space import reduce_mod1

    return reduce_mod1(x)


def _cube_root_scalar(x: Scalar, precision: int) -> Scalar:
    if isinstance(x, QSqrt2) and x.is_rational:
        r = sc.exact_nth_root(x.a, 3)
        if r is not None:
            return exact(r)
    e = sc.to_enclosure(x, precision)

    def root_up(q: Fraction) -> Fraction:
        if q == 0:
            return Fraction(0)
        if q > 0:
            return sc.root_enclosure(q, 3, precision).hi
        return -sc.root_enclosure(-q, 3, precision).lo

    def root_down(q: Fraction) -> Fraction:
        if q == 0:
            return Fraction(0)
        if q > 0:
            return sc.root_enclosure(q, 3, precision).lo
        return -sc.root_enclosure(-q, 3, precision).hi

    return Enclosure(root_down(e.lo), root_up(e.hi), precision)


def eval_map(f: MapExpr, x: Point) -> Point:
    if isinstance(f, Affine):
        return sc.add(sc.mul(f.lam, x), f.c)
    if isinstance(f, RationalityBranch):
        if not isinstance(x, QSqrt2):
            raise RationalityUndecidable("rationality branch needs an exact point")
        branch = f.on_rational if x.is_rational else f.on_irrational
        return eval_map(branch, x)
    if isinstance(f, CircleLinear):
        return _mod1(sc.mul(sc.exact(f.k), x))
    if isinstance(f, TorusLinear):
        if not (isinstance(x, tuple) and len(x) == 2):
            raise TypeError("torus map needs a point pair")
        (a, b), (c, d) = f.m
        u = sc.add(sc.mul(sc.exact(a), x[0]), sc.mul(sc.exact(b), x[1]))
        v = sc.add(sc.mul(sc.exact(c), x[0]), sc.mul(sc.exact(d), x[1]))
        return (_mod1(u), _mod1(v))
    if isinstance(f, Cubic):
        return sc.mul(sc.mul(x, x), x)
    if isinstance(f, CubeRoot):
        return _cube_root_scalar(x, f.precision)
    if isinstance(f, Constant):
        return f.v
    raise TypeError(f"unknown map expression {f!r}")


def identity_map() -> Affine:
    return Affine(exact(1), exact(0))


# ---------------------------------------------------------------------------
# Modulus functions for conjugacy transport
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IsometryModulus:
    """rho(a, b) > delta implies rho(g a, g b) > delta."""

    def apply(self, delta: Scalar) -> Scalar:
        return delta

    def kind(self) -> str:
        return "isometry"


@dataclass(frozen=True)
class ScalingModulus:
    """For g(x) = k*x + c with |k| = factor: separation scales by the factor."""

    factor: Scalar

    def apply(self, delta: Scalar) -> Scalar:
        return sc.mul(self.factor, delta)

    def kind(self) -> str:
        return "scaling"


@dataclass(frozen=True)
class CubicModulus:
    """For g(x) = x**3: |a^3 - b^3| >= |a - b|^3 / 4, so m(delta) = delta^3/4."""

    def apply(self, delta: Scalar) -> Scalar:
        cube = sc.mul(sc.mul(delta, delta), delta)
        return sc.div(cube, sc.exact(4))

    def kind(self) -> str:
        return "cubic"


ModulusFn = Union[IsometryModulus, ScalingModulus, CubicModulus]


# ---------------------------------------------------------------------------
# Orbit systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Iterated:
    f: MapExpr


@dataclass(frozen=True)
class TimeVarying:
    family: Callable[[int], MapExpr]
    name: str


@dataclass(frozen=True)
class DirectIterate:
    rule: Callable[[int, Point], Point]
    name: str


@dataclass(frozen=True)
class ProductSys:
    left: "OrbitSystem"
    right: "OrbitSystem"
    gamma: GammaFn


@dataclass(frozen=True)
class Conjugated:
    g: MapExpr
    inner: "OrbitSystem"
    g_inv: MapExpr
    modulus: ModulusFn


@dataclass(frozen=True)
class Power:
    base: "OrbitSystem"
    m: int


@dataclass(frozen=True)
class Restricted:
    base: "OrbitSystem"
    carrier: st.StructuredSet


OrbitSystem = Union[
    Iterated, TimeVarying, DirectIterate, ProductSys, Conjugated, Power, Restricted
]


def orbit_iterator(system: OrbitSystem, x: Point) -> Iterator[Point]:
    """Yields O_0(x), O_1(x), ... lazily."""
    if isinstance(system, Iterated):
        v = x
        while True:
            yield v
            v = eval_map(system.f, v)
    elif isinstance(system, TimeVarying):
        yield x
        v = eval_map(system.family(0), x)
        n = 1
        while True:
            v = eval_map(system.family(n), v)
            yield v
            n += 1
    elif isinstance(system, DirectIterate):
        n = 0
        while True:
            yield system.rule(n, x)
            n += 1
    elif isinstance(system, ProductSys):
        lx, rx = x
        li, ri = orbit_iterator(system.left, lx), orbit_iterator(system.right, rx)
        while True:
            yield (next(li), next(ri))
    elif isinstance(system, Conjugated):
        inner = orbit_iterator(system.inner, eval_map(system.g_inv, x))
        n = 0
        for v in inner:
            yield x if n == 0 else eval_map(system.g, v)
            n += 1
    elif isinstance(system, Power):
        it = orbit_iterator(system.base, x)
        idx = 0
        target = 0
        while True:
            v = next(it)
            if idx == target:
                yield v
                target += system.m
            idx += 1
    elif isinstance(system, Restricted):
        if point_is_exact(x) and not _carrier_contains(system.carrier, x):
            raise NotInvariant(x)
        for v in orbit_iterator(system.base, x):
            if point_is_exact(v) and not _carrier_contains(system.carrier, v):
                raise NotInvariant(x, v)
            yield v
    else:
        raise TypeError(f"unknown system {system!r}")


def _carrier_contains(carrier: st.StructuredSet, p: Point) -> bool:
    if isinstance(p, tuple):
        return all(_carrier_contains(carrier, c) for c in p)
    if not isinstance(p, QSqrt2):
        raise RationalityUndecidable("carrier membership needs an exact point")
    return st.membership(carrier, p)


def iterate(system: OrbitSystem, n: int, x: Point) -> Point:
    """O_n(x) with exactness preserved wherever the maps allow it."""
    if n < 0:
        raise ValueError("forward orbits only: n must be >= 0")
    if isinstance(system, Power):
        return iterate(system.base, n * system.m, x)
    it = orbit_iterator(system, x)
    v = next(it)
    for _ in range(n):
        v = next(it)
    return v


def orbit_prefix(system: OrbitSystem, x: Point, horizon: int) -> list[Point]:
    """[O_0(x), ..., O_horizon(x)]."""
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    it = orbit_iterator(system, x)
    return [next(it) for _ in range(horizon + 1)]


def supports_collapse_propagation(system: OrbitSystem) -> bool:
    """True when equal orbit points at step n force equality at every later step."""
    if isinstance(system, (Iterated, TimeVarying)):
        return True
    if isinstance(system, Power):
        return supports_collapse_propagation(system.base)
    if isinstance(system, Restricted):
        return supports_collapse_propagation(system.base)
    if isinstance(system, ProductSys):
        return supports_collapse_propagation(system.left) and supports_collapse_propagation(
            system.right
        )
    return False


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _certification_points(seed: int, count: int) -> list[QSqrt2]:
    import random

    rng = random.Random(derive_seed(seed, "conjugacy-cert"))
    pts = []
    for i in range(count):
        q = Fraction(rng.randrange(-(1 << 10), 1 << 10), 1 << 6)
        if i % 3 == 2:
            pts.append(QSqrt2(q, Fraction(1, 8)))
        else:
            pts.append(QSqrt2(q))
    return pts


def conjugate(
    inner: OrbitSystem,
    g: MapExpr,
    g_inv: MapExpr,
    modulus: ModulusFn,
    seed: int = 0,
    sample_count: int = 100,
) -> Conjugated:
    """Wrap `inner` as g . inner . g_inv after sample-certifying the inverse pair.

    Certification checks g(g_inv(y)) == y on seeded points, including points
    constructed as g(s) so that partial inverses (cube roots) get exercised
    on their exact path. An interval result must at least contain y.
    """
    for s in _certification_points(seed, sample_count // 2):
        for y in (s, eval_map(g, s)):
            try:
                back = eval_map(g, eval_map(g_inv, y))
            except (RationalityUndecidable, sc.PossiblyZeroDivisor) as err:
                raise NotInverse(f"inverse pair failed to evaluate at {y}: {err}")
            if isinstance(back, QSqrt2) and isinstance(y, QSqrt2):
                if back != y:
                    raise NotInverse(f"g(g_inv({y})) = {back} != {y}")
            else:
                enc = sc.to_enclosure(back)
                target = y if isinstance(y, QSqrt2) else None
                if target is not None and not enc.contains_exact(target):
                    raise NotInverse(f"g(g_inv({y})) encloses {enc}, excludes {y}")
    return Conjugated(g, inner, g_inv, modulus)


def product(F: OrbitSystem, G: OrbitSystem, gamma: GammaFn) -> ProductSys:
    return ProductSys(F, G, gamma)


def power(F: OrbitSystem, m: int) -> Power:
    if m < 1:
        raise ValueError("power exponent must be >= 1")
    if not isinstance(F, Iterated):
        raise UnsupportedSystemKind("power is defined for single iterated maps only")
    return Power(F, m)


def restrict(
    F: OrbitSystem, carrier: st.StructuredSet, probe_budget: int, seed: int = 0
) -> Restricted:
    """Sampled-invariance gate: every probe's first step must stay in the carrier."""
    probes = st.enumerate_points(carrier, probe_budget, seed)
    for p in probes:
        image = iterate(F, 1, p)
        if not _carrier_contains(carrier, image):
            raise NotInvariant(p, image)
    return Restricted(F, carrier)


# ---------------------------------------------------------------------------
# Expansion bounds
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpansionBounds:
    """Certified per-step distance scaling: l_n * rho <= rho_n <= L_n * rho.

    `uniform_upper` is sup over n >= 1 of L_n when that sup is finite; it is
    what powers uniform-bound refutations.
    """

    lower: Callable[[int], Scalar]
    upper: Callable[[int], Scalar]
    uniform_upper: Optional[Scalar]
    domain: st.StructuredSet
    description: str


ROOT_OF_TWO_SCALING = "root-of-two-scaling"


def make_root_of_two_rule(precision: int) -> Callable[[int, Point], Point]:
    def rule(n: int, x: Point) -> Point:
        if n == 0:
            return x
        if n == 1:
            return sc.mul(exact(2), x)
        return sc.mul(sc.root_enclosure(Fraction(2), n, precision), x)

    return rule


root_of_two_scaling_rule = make_root_of_two_rule(DEFAULT_PRECISION)


def with_precision(system: OrbitSystem, precision: int) -> OrbitSystem:
    """Rebuild a system so interval-producing constants use `precision` bits.

    Used by independent witness re-verification, which re-derives orbits at a
    doubled precision rather than trusting the discovery-time enclosures.
    """
    if isinstance(system, Iterated):
        if isinstance(system.f, CubeRoot):
            return Iterated(CubeRoot(precision))
        return system
    if isinstance(system, DirectIterate):
        if system.name == ROOT_OF_TWO_SCALING:
            return DirectIterate(make_root_of_two_rule(precision), system.name)
        return system
    if isinstance(system, ProductSys):
        return ProductSys(
            with_precision(system.left, precision),
            with_precision(system.right, precision),
            system.gamma,
        )
    if isinstance(system, Conjugated):
        g = CubeRoot(precision) if isinstance(system.g, CubeRoot) else system.g
        g_inv = (
            CubeRoot(precision) if isinstance(system.g_inv, CubeRoot) else system.g_inv
        )
        return Conjugated(g, with_precision(system.inner, precision), g_inv, system.modulus)
    if isinstance(system, Power):
        return Power(with_precision(system.base, precision), system.m)
    if isinstance(system, Restricted):
        return Restricted(with_precision(system.base, precision), system.carrier)
    return system


def expansion_bounds(system: OrbitSystem) -> Optional[ExpansionBounds]:
    """Catalog-form bounds; None when no certified scaling law is known."""
    if isinstance(system, Iterated) and isinstance(system.f, Affine):
        lam = system.f.lam
        if not isinstance(lam, QSqrt2):
            return None
        rate = abs(lam)

        def scale(n: int, r: QSqrt2 = rate) -> Scalar:
            out = exact(1)
            for _ in range(n):
                out = out * r
            return out

        sup: Optional[Scalar]
        if (rate - exact(1)).sign() <= 0:
            sup = rate
        else:
            sup = None
        return ExpansionBounds(
            lower=scale,
            upper=scale,
            uniform_upper=sup,
            domain=st.FullLine(),
            description=f"affine scaling |lam| = {sc.serialize(rate)} per step",
        )
    if isinstance(system, DirectIterate) and system.name == ROOT_OF_TWO_SCALING:
        def rate(n: int) -> Scalar:
            if n <= 1:
                return exact(2)
            return sc.root_enclosure(Fraction(2), n, DEFAULT_PRECISION)

        return ExpansionBounds(
            lower=rate,
            upper=rate,
            uniform_upper=exact(2),
            domain=st.FullLine(),
            description="per-step scaling 2**(1/n), decreasing in n, sup = 2",
        )
    return None
