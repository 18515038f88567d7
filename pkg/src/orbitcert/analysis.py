"""Finite-scale verdict engine with certified witnesses and refutations.

The defining quantifiers ("for each radius ... some point ... some step") are
undecidable as stated, so every query runs against a ScaleBudget: a geometric
radius grid, a step horizon, a sample budget, and a seed. Supported and
Refuted are claims at that scale:

- Supported carries one separation witness per radius level, each re-checkable
  from its stored data.
- Refuted carries a certificate (empty punctured ball, uniform expansion
  bound, or collapsed orbits) that no witness can exist at any scale.
- Inconclusive is the honest third verdict; a failed search never refutes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import scalar as sc
from . import sets as st
from . import space as spc
from . import system as sy
from .scalar import QSqrt2, Scalar, Trilean, exact
from .space import MetricSpace, Point, derive_seed
from .system import OrbitSystem


class DegenerateInput(ValueError):
    """Too few or coincident points for the query."""


class NotAWitness(ValueError):
    """A transformer precondition failed certification."""


class ModulusViolated(RuntimeError):
    """Re-evaluation of a transported witness missed the claimed bound."""


class ContradictionError(AssertionError):
    """A query produced both a witness and a refutation certificate."""


class UnknownLaw(KeyError):
    pass


@dataclass(frozen=True)
class ScaleBudget:
    """Finite stand-in for the unbounded quantifiers.

    The radius grid is {eps_max * ratio**k : k = 0..levels-1}, strictly
    decreasing. `horizon` caps the step search, `samples` the per-level
    candidate count, and `seed` pins every random choice.
    """

    eps_max: QSqrt2
    ratio: Fraction
    levels: int
    horizon: int
    samples: int
    seed: int

    def __post_init__(self) -> None:
        if self.eps_max.sign() <= 0:
            raise ValueError("eps_max must be positive")
        if not (0 < self.ratio < 1):
            raise ValueError("ratio must lie in (0, 1)")
        if self.levels < 1 or self.horizon < 1 or self.samples < 1:
            raise ValueError("levels, horizon, and samples must be >= 1")

    def eps_levels(self) -> list[QSqrt2]:
        out = []
        eps = self.eps_max
        for _ in range(self.levels):
            out.append(eps)
            eps = eps * self.ratio
        return out

    def relative_levels(self) -> list[QSqrt2]:
        """Levels strictly below eps_max, for radius-as-threshold queries."""
        return [eps * self.ratio for eps in self.eps_levels()]


DEFAULT_BUDGET = ScaleBudget(
    eps_max=exact(Fraction(1, 2)),
    ratio=Fraction(1, 2),
    levels=8,
    horizon=64,
    samples=32,
    seed=7,
)


@dataclass(frozen=True)
class SeparationWitness:
    """A concrete (y, n) whose step-n distance from the base orbit is certified.

    `separation_lb` is a certified lower bound on rho(O_n(x), O_n(y)); the
    stored orbit points allow independent re-verification.
    """

    x: Point
    y: Point
    n: int
    separation_lb: Scalar
    level: Optional[Scalar] = None
    orbit_x: Optional[Point] = None
    orbit_y: Optional[Point] = None


@dataclass(frozen=True)
class EmptyBall:
    """S_eps(x) meets the set nowhere except possibly x itself."""

    eps: Scalar
    center: Point


@dataclass(frozen=True)
class UniformBound:
    """Finite sup of the per-step expansion rates forces containment.

    With eps and threshold set: L* * eps <= threshold at that level. With
    both None the bound refutes existence of any working threshold.
    """

    l_star: Scalar
    eps: Optional[Scalar] = None
    threshold: Optional[Scalar] = None
    description: str = ""


@dataclass(frozen=True)
class CollapsedOrbit:
    """Two orbits are exactly equal from step n0 on (step-deterministic system)."""

    n0: int
    x: Point
    y: Point
    value: Point


RefutationCertificate = Union[EmptyBall, UniformBound, CollapsedOrbit]


class Status(Enum):
    SUPPORTED = "supported"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    status: Status
    query: dict
    witnesses: tuple[SeparationWitness, ...] = ()
    certificate: Optional[RefutationCertificate] = None
    diagnostics: tuple[dict, ...] = ()
    warnings: tuple[str, ...] = ()
    budget: Optional[ScaleBudget] = None


# ---------------------------------------------------------------------------
# Separation search primitives
# ---------------------------------------------------------------------------


def separation_scan(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    y: Point,
    threshold: Scalar,
    horizon: int,
    cap: Optional[int] = None,
) -> Optional[SeparationWitness]:
    """Smallest step n in 1..horizon with certified rho(O_n x, O_n y) > threshold."""
    limit = horizon if cap is None else min(horizon, cap)
    if limit < 1:
        return None
    ix = sy.orbit_iterator(system, x)
    iy = sy.orbit_iterator(system, y)
    next(ix), next(iy)
    for n in range(1, limit + 1):
        ox, oy = next(ix), next(iy)
        d = spc.distance(space, ox, oy)
        if sc.cmp_gt(d, threshold) is Trilean.TRUE:
            lb = d if isinstance(d, QSqrt2) else QSqrt2(d.lo)
            return SeparationWitness(
                x=x, y=y, n=n, separation_lb=lb, orbit_x=ox, orbit_y=oy
            )
    return None


def separation_time(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    y: Point,
    d: Scalar,
    horizon: int,
) -> Optional[int]:
    """First certified separation step, or None within the horizon."""
    if spc.point_eq(x, y):
        raise DegenerateInput("separation time needs distinct points")
    w = separation_scan(system, space, x, y, d, horizon)
    return None if w is None else w.n


def _collapse_step(
    system: OrbitSystem, x: Point, y: Point, horizon: int
) -> Optional[tuple[int, Point]]:
    """First step where the two orbits coincide exactly, if propagation holds."""
    if not sy.supports_collapse_propagation(system):
        return None
    ix = sy.orbit_iterator(system, x)
    iy = sy.orbit_iterator(system, y)
    next(ix), next(iy)
    for n in range(1, horizon + 1):
        ox, oy = next(ix), next(iy)
        if spc.point_eq(ox, oy):
            return n, ox
    return None


def _witness_candidates(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    eps: QSqrt2,
    samples: int,
    seed: int,
    candidate_set: Optional[st.StructuredSet],
) -> tuple[list[Point], Optional[RefutationCertificate], Optional[str]]:
    """Candidates for the level, or an EmptyBall certificate, or a skip note."""
    restricted_to = candidate_set
    if restricted_to is None and isinstance(system, sy.Restricted):
        restricted_to = system.carrier
    if restricted_to is None:
        return (
            spc.sample_ball(space, x, eps, samples, seed),
            None,
            None,
        )
    if not isinstance(x, QSqrt2):
        return [], None, "set-restricted search needs an exact scalar point"
    piece = st.ball_intersect(restricted_to, x, eps)
    punct = st.punctured_is_empty(piece, x)
    if punct is True:
        return [], EmptyBall(eps=eps, center=x), None
    cands = [p for p in st.enumerate_points(piece, samples + 1, seed) if p != x]
    return cands[:samples], None, None


def witness_at_level(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    threshold: Scalar,
    eps: QSqrt2,
    samples: int,
    horizon: int,
    seed: int,
    candidate_set: Optional[st.StructuredSet] = None,
) -> tuple[Optional[SeparationWitness], Optional[RefutationCertificate], dict]:
    """Level scan: minimal (n, candidate-index) witness above the threshold.

    Candidate scans may be partitioned; the reduction below keeps the
    lexicographic minimum, so any partitioning reproduces the same witness.
    """
    cands, cert, note = _witness_candidates(
        system, space, x, eps, samples, seed, candidate_set
    )
    diag: dict = {"eps": sc.serialize(eps), "candidates": len(cands)}
    if note:
        diag["note"] = note
    if cert is not None:
        return None, cert, diag
    best: Optional[SeparationWitness] = None
    cap: Optional[int] = None
    for y in cands:
        found = separation_scan(system, space, x, y, threshold, horizon, cap=cap)
        if found is not None:
            w = SeparationWitness(
                x=x,
                y=y,
                n=found.n,
                separation_lb=found.separation_lb,
                level=eps,
                orbit_x=found.orbit_x,
                orbit_y=found.orbit_y,
            )
            if best is None or found.n < best.n:
                best = w
                cap = found.n - 1  # later candidates must beat this step strictly
    return best, None, diag


def _uniform_bound_cert(
    system: OrbitSystem,
    levels: Sequence[QSqrt2],
    threshold_for_level,
) -> Optional[UniformBound]:
    bounds = sy.expansion_bounds(system)
    if bounds is None or bounds.uniform_upper is None:
        return None
    l_star = bounds.uniform_upper
    for eps in levels:
        threshold = threshold_for_level(eps)
        reach = sc.mul(l_star, eps)
        if sc.cmp_gt(reach, threshold) is Trilean.FALSE:
            return UniformBound(
                l_star=l_star,
                eps=eps,
                threshold=threshold,
                description=bounds.description,
            )
    return None


# ---------------------------------------------------------------------------
# Point verdicts
# ---------------------------------------------------------------------------


def _ball_quantified_verdict(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    levels: Sequence[QSqrt2],
    threshold_for_level,
    budget: ScaleBudget,
    query: dict,
    candidate_set: Optional[st.StructuredSet] = None,
) -> Verdict:
    cert = _uniform_bound_cert(system, levels, threshold_for_level)
    if cert is not None:
        return Verdict(Status.REFUTED, query, certificate=cert, budget=budget)
    witnesses: list[SeparationWitness] = []
    diags: list[dict] = []
    for k, eps in enumerate(levels):
        threshold = threshold_for_level(eps)
        w, ball_cert, diag = witness_at_level(
            system,
            space,
            x,
            threshold,
            eps,
            budget.samples,
            budget.horizon,
            derive_seed(budget.seed, "level", k, spc.serialize_point(x)),
            candidate_set=candidate_set,
        )
        if ball_cert is not None:
            return Verdict(
                Status.REFUTED, query, certificate=ball_cert, budget=budget
            )
        if w is None:
            diag["reason"] = "no-certified-witness-at-level"
            diags.append(diag)
        else:
            witnesses.append(w)
    if diags:
        return Verdict(
            Status.INCONCLUSIVE, query, diagnostics=tuple(diags), budget=budget
        )
    return Verdict(Status.SUPPORTED, query, witnesses=tuple(witnesses), budget=budget)


def oe_point_verdict(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    d: Scalar,
    budget: ScaleBudget,
) -> Verdict:
    """Does every ball around x contain a point escaping the d-tube at some step?"""
    if sc.sign_or_none(d) is not None and sc.sign_or_none(d) <= 0:
        raise ValueError("threshold d must be positive")
    query = {
        "op": "oe-point",
        "x": spc.serialize_point(x),
        "d": sc.serialize(d),
    }
    return _ball_quantified_verdict(
        system, space, x, budget.eps_levels(), lambda eps: d, budget, query
    )


def oe_point_of_set_verdict(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    A: st.StructuredSet,
    d: Scalar,
    budget: ScaleBudget,
) -> Verdict:
    """As oe_point_verdict but escape candidates are drawn from A only."""
    query = {
        "op": "oe-point-of-set",
        "x": spc.serialize_point(x),
        "d": sc.serialize(d),
    }
    return _ball_quantified_verdict(
        system,
        space,
        x,
        budget.eps_levels(),
        lambda eps: d,
        budget,
        query,
        candidate_set=A,
    )


def roe_point_verdict(
    system: OrbitSystem, space: MetricSpace, x: Point, budget: ScaleBudget
) -> Verdict:
    """Escape threshold at radius eps is eps itself, for radii below eps_max."""
    query = {"op": "roe-point", "x": spc.serialize_point(x)}
    return _ball_quantified_verdict(
        system,
        space,
        x,
        budget.relative_levels(),
        lambda eps: eps,
        budget,
        query,
    )


def roe_point_of_set_verdict(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    A: st.StructuredSet,
    budget: ScaleBudget,
) -> Verdict:
    query = {"op": "roe-point-of-set", "x": spc.serialize_point(x)}
    return _ball_quantified_verdict(
        system,
        space,
        x,
        budget.relative_levels(),
        lambda eps: eps,
        budget,
        query,
        candidate_set=A,
    )


# ---------------------------------------------------------------------------
# Pair and continuum verdicts
# ---------------------------------------------------------------------------


def expansive_verdict(
    system: OrbitSystem,
    space: MetricSpace,
    points: Sequence[Point],
    d: Scalar,
    horizon: int,
) -> Verdict:
    """Every pair must separate beyond d at some step within the horizon."""
    if len(points) < 2:
        raise DegenerateInput("expansiveness needs at least two points")
    for i, p in enumerate(points):
        for q in points[i + 1 :]:
            if spc.point_eq(p, q):
                raise DegenerateInput("points must be pairwise distinct")
    query = {
        "op": "expansive",
        "points": [spc.serialize_point(p) for p in points],
        "d": sc.serialize(d),
        "horizon": horizon,
    }
    bounds = sy.expansion_bounds(system)
    witnesses: list[SeparationWitness] = []
    unresolved: list[dict] = []
    for i, p in enumerate(points):
        for q in points[i + 1 :]:
            w = separation_scan(system, space, p, q, d, horizon)
            if w is not None:
                witnesses.append(w)
                continue
            collapse = _collapse_step(system, p, q, horizon)
            if collapse is not None:
                n0, value = collapse
                cert = CollapsedOrbit(n0=n0, x=p, y=q, value=value)
                return Verdict(Status.REFUTED, query, certificate=cert)
            if bounds is not None and bounds.uniform_upper is not None:
                rho = spc.distance(space, p, q)
                reach = sc.mul(bounds.uniform_upper, rho)
                if sc.cmp_gt(reach, d) is Trilean.FALSE:
                    cert = UniformBound(
                        l_star=bounds.uniform_upper,
                        eps=rho if isinstance(rho, QSqrt2) else None,
                        threshold=d,
                        description=bounds.description,
                    )
                    return Verdict(Status.REFUTED, query, certificate=cert)
            unresolved.append(
                {
                    "pair": [spc.serialize_point(p), spc.serialize_point(q)],
                    "reason": "no-separation-no-certificate",
                }
            )
    if unresolved:
        return Verdict(Status.INCONCLUSIVE, query, diagnostics=tuple(unresolved))
    return Verdict(Status.SUPPORTED, query, witnesses=tuple(witnesses))


def _cw_sample_points(A: st.IntervalSet, samples: int) -> list[QSqrt2]:
    pts = st.enumerate_points(A, max(samples, 4))
    lo, lo_s, hi, hi_s = st.set_range(A)
    for endpoint, strict in ((lo, lo_s), (hi, hi_s)):
        if endpoint is not None and not strict and st.membership(A, endpoint):
            if endpoint not in pts:
                pts.append(endpoint)
    return pts


def cw_expansive_verdict(
    system: OrbitSystem,
    space: MetricSpace,
    A: st.IntervalSet,
    c: Scalar,
    budget: ScaleBudget,
) -> Verdict:
    """Does the image of the interval reach diameter above c at some step?

    The reported diameter is the max pairwise distance over sampled points of
    A, a sound lower bound for the true diameter; Supported is therefore
    certified while Refuted needs an expansion bound.
    """
    if not isinstance(A, st.IntervalSet):
        raise TypeError("cw verdict takes an interval")
    lo, lo_s, hi, hi_s = st.set_range(A)
    if lo is None or hi is None:
        raise DegenerateInput("cw verdict needs a bounded interval")
    width = hi - lo
    if width.sign() <= 0:
        raise DegenerateInput("interval must be nondegenerate")
    query = {
        "op": "cw-expansive",
        "c": sc.serialize(c),
        "interval": [sc.serialize(lo), sc.serialize(hi)],
    }
    warnings: list[str] = []
    bounds = sy.expansion_bounds(system)
    if bounds is not None and bounds.uniform_upper is not None:
        reach = sc.mul(bounds.uniform_upper, width)
        if sc.cmp_gt(reach, c) is Trilean.FALSE:
            cert = UniformBound(
                l_star=bounds.uniform_upper,
                eps=width,
                threshold=c,
                description=bounds.description,
            )
            return Verdict(Status.REFUTED, query, certificate=cert, budget=budget)
    pts = _cw_sample_points(A, budget.samples)
    iters = [sy.orbit_iterator(system, p) for p in pts]
    images = [next(it) for it in iters]
    for n in range(1, budget.horizon + 1):
        images = [next(it) for it in iters]
        if n == 1:
            for i in range(len(images)):
                for j in range(i + 1, len(images)):
                    if spc.point_eq(images[i], images[j]):
                        warnings.append(
                            "system is not injective on sampled points; "
                            "image diameters may collapse"
                        )
                        break
                else:
                    continue
                break
        best: Optional[tuple[Scalar, int, int]] = None
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                dist = spc.distance(space, images[i], images[j])
                if sc.cmp_gt(dist, c) is Trilean.TRUE:
                    lb = dist if isinstance(dist, QSqrt2) else QSqrt2(sc.to_enclosure(dist).lo)
                    w = SeparationWitness(
                        x=pts[i],
                        y=pts[j],
                        n=n,
                        separation_lb=lb,
                        orbit_x=images[i],
                        orbit_y=images[j],
                    )
                    return Verdict(
                        Status.SUPPORTED,
                        query,
                        witnesses=(w,),
                        warnings=tuple(warnings),
                        budget=budget,
                    )
    diag = {"reason": "sampled-diameter-never-exceeded-threshold"}
    return Verdict(
        Status.INCONCLUSIVE,
        query,
        diagnostics=(diag,),
        warnings=tuple(warnings),
        budget=budget,
    )


def oe_set_map(
    system: OrbitSystem,
    space: MetricSpace,
    A: st.StructuredSet,
    candidates: Sequence[Point],
    d: Scalar,
    budget: ScaleBudget,
) -> list[tuple[Point, Verdict]]:
    """Per-candidate OE-of-set verdicts; the Supported rows approximate OE(A)."""
    out = []
    for x in candidates:
        if not spc.point_is_exact(x):
            raise ValueError("candidates must be exact points")
        out.append((x, oe_point_of_set_verdict(system, space, x, A, d, budget)))
    return out


# ---------------------------------------------------------------------------
# Witness transformers
# ---------------------------------------------------------------------------


def halving_transform(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    y: Point,
    z: Point,
    pair_witness_n: int,
    d_A: Scalar,
) -> SeparationWitness:
    """From a separated pair (y, z) at step n, pick the one separated from x.

    By the triangle inequality at least one of rho(O_n x, O_n y),
    rho(O_n x, O_n z) strictly exceeds d_A / 2.
    """
    if spc.point_eq(y, z):
        raise NotAWitness("degenerate pair: y == z")
    n = pair_witness_n
    oy = sy.iterate(system, n, y)
    oz = sy.iterate(system, n, z)
    if sc.cmp_gt(spc.distance(space, oy, oz), d_A) is not Trilean.TRUE:
        raise NotAWitness("pair separation at the stated step failed certification")
    ox = sy.iterate(system, n, x)
    half = sc.div(d_A, exact(2))
    for cand, ocand in ((y, oy), (z, oz)):
        dist = spc.distance(space, ox, ocand)
        if sc.cmp_gt(dist, half) is Trilean.TRUE:
            lb = dist if isinstance(dist, QSqrt2) else QSqrt2(sc.to_enclosure(dist).lo)
            return SeparationWitness(
                x=x, y=cand, n=n, separation_lb=lb, orbit_x=ox, orbit_y=ocand
            )
    raise NotAWitness("neither branch certified above half the pair constant")


def transport_conjugacy(
    witness: SeparationWitness,
    g: sy.MapExpr,
    modulus: sy.ModulusFn,
    space: MetricSpace = spc.RealLine(),
) -> SeparationWitness:
    """Push a witness through a conjugating map, re-certifying the new bound.

    The stored bound is the achieved separation, so isometries attain the
    transported bound exactly; certification therefore demands a certified
    "at least" rather than a strict excess.
    """
    if witness.orbit_x is None or witness.orbit_y is None:
        raise NotAWitness("witness carries no orbit data to transport")
    target = modulus.apply(witness.separation_lb)
    gox = sy.eval_map(g, witness.orbit_x)
    goy = sy.eval_map(g, witness.orbit_y)
    dist = spc.distance(space, gox, goy)
    if sc.cmp_gt(target, dist) is not Trilean.FALSE:
        raise ModulusViolated(
            f"transported separation {sc.serialize(dist)} did not certify at least "
            f"{sc.serialize(target)}"
        )
    lb = target if isinstance(target, QSqrt2) else QSqrt2(sc.to_enclosure(target).lo)
    return SeparationWitness(
        x=sy.eval_map(g, witness.x),
        y=sy.eval_map(g, witness.y),
        n=witness.n,
        separation_lb=lb,
        orbit_x=gox,
        orbit_y=goy,
    )


def product_witness(
    witness: SeparationWitness,
    partner: Point,
    gamma: spc.GammaFn,
    side: str = "left",
    coord_space: MetricSpace = spc.RealLine(),
) -> SeparationWitness:
    """Embed a coordinate witness into a product, holding the partner fixed.

    The product separation is max(gamma(rho), gamma(0)) = gamma(rho), and the
    new bound gamma(delta) is certified with >= semantics so that capped
    gammas (where equality is attained) validate.
    """
    if witness.orbit_x is None or witness.orbit_y is None:
        raise NotAWitness("witness carries no orbit data to embed")
    delta = witness.separation_lb
    lb = gamma.apply(delta)
    rho = spc.distance(coord_space, witness.orbit_x, witness.orbit_y)
    achieved = gamma.apply(rho)
    if sc.cmp_gt(lb, achieved) is Trilean.TRUE:
        raise ModulusViolated("product separation fell below gamma(delta)")
    lb_exact = lb if isinstance(lb, QSqrt2) else QSqrt2(sc.to_enclosure(lb).lo)
    if side == "left":
        px, py = (witness.x, partner), (witness.y, partner)
        ox, oy = (witness.orbit_x, partner), (witness.orbit_y, partner)
    else:
        px, py = (partner, witness.x), (partner, witness.y)
        ox, oy = (partner, witness.orbit_x), (partner, witness.orbit_y)
    return SeparationWitness(
        x=px, y=py, n=witness.n, separation_lb=lb_exact, orbit_x=ox, orbit_y=oy
    )


def not_oe_certificate(
    system: OrbitSystem, x: Point
) -> Optional[RefutationCertificate]:
    """For-any-threshold refutation from a finite uniform expansion bound."""
    bounds = sy.expansion_bounds(system)
    if bounds is None or bounds.uniform_upper is None:
        return None
    return UniformBound(
        l_star=bounds.uniform_upper,
        eps=None,
        threshold=None,
        description=bounds.description,
    )


def witness_density(
    system: OrbitSystem,
    space: MetricSpace,
    x: Point,
    eps: QSqrt2,
    d: Scalar,
    horizon: int,
    samples: int,
    seed: int,
) -> Fraction:
    """Fraction of sampled ball points that separate within the horizon."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    pts = spc.sample_ball(space, x, eps, samples, seed)
    hits = sum(
        1
        for y in pts
        if separation_scan(system, space, x, y, d, horizon) is not None
    )
    return Fraction(hits, samples)


def verify_witness(
    system: OrbitSystem,
    space: MetricSpace,
    witness: SeparationWitness,
    threshold: Scalar,
    precision: Optional[int] = None,
) -> bool:
    """Independent re-check: recompute the orbit points and the comparison.

    Passing a precision re-derives interval constants at that precision, so
    the check does not reuse discovery-time enclosures.
    """
    checked = system if precision is None else sy.with_precision(system, precision)
    ox = sy.iterate(checked, witness.n, witness.x)
    oy = sy.iterate(checked, witness.n, witness.y)
    dist = spc.distance(space, ox, oy)
    if sc.cmp_gt(dist, threshold) is not Trilean.TRUE:
        return False
    if witness.level is not None:
        ball = spc.distance(space, witness.x, witness.y)
        if sc.cmp_gt(witness.level, ball) is not Trilean.TRUE:
            return False
    return True


def verify_certificate(
    system: OrbitSystem,
    space: MetricSpace,
    cert: RefutationCertificate,
    candidate_set: Optional[st.StructuredSet] = None,
) -> bool:
    """Re-derive the data a refutation certificate rests on."""
    if isinstance(cert, EmptyBall):
        if candidate_set is None or not isinstance(cert.center, QSqrt2):
            return False
        piece = st.ball_intersect(candidate_set, cert.center, cert.eps)
        return st.punctured_is_empty(piece, cert.center) is True
    if isinstance(cert, UniformBound):
        bounds = sy.expansion_bounds(system)
        if bounds is None or bounds.uniform_upper is None:
            return False
        if sc.cmp_gt(bounds.uniform_upper, cert.l_star) is Trilean.TRUE:
            return False
        if cert.eps is not None and cert.threshold is not None:
            reach = sc.mul(cert.l_star, cert.eps)
            return sc.cmp_gt(reach, cert.threshold) is Trilean.FALSE
        return True
    if isinstance(cert, CollapsedOrbit):
        if not sy.supports_collapse_propagation(system):
            return False
        ox = sy.iterate(system, cert.n0, cert.x)
        oy = sy.iterate(system, cert.n0, cert.y)
        return spc.point_eq(ox, oy)
    return False


def check_consistency(verdicts: Sequence[Verdict]) -> None:
    """Reject a Supported and a Refuted answer to the same query.

    Budgets may disagree on Supported vs Inconclusive, never on Supported vs
    Refuted: a witness and a certificate cannot both be valid.
    """
    statuses = {v.status for v in verdicts}
    if Status.SUPPORTED in statuses and Status.REFUTED in statuses:
        raise ContradictionError(
            "query produced both a witness and a refutation certificate"
        )
