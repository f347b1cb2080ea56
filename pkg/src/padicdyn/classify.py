"""Fixed-point characters and geometry: Siegel disks, basins, repelling balls.

The double fixed point 0 is always indifferent and carries a Siegel disk
whose radius depends only on the norm regime.  The second fixed point
x2 = a - d can be indifferent, attracting or repelling; each regime fixes a
geometry for it (shared Siegel disk, its own disjoint Siegel ball, a basin,
a repelling ball), except at a few parameter boundaries the theory leaves
open, which are reported as errors rather than guessed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .padic import PadicDynError, Radius, Valuation, norm, valuation
from .ratmap import CanonicalMap, derivative_norm, displacement_norm, evaluate, orbit
from .normdyn import NormCase, WrongCase, detect_case, invariant_radii

INDIFFERENT = "indifferent"
ATTRACTOR = "attractor"
REPELLER = "repeller"


class UnhandledBoundary(PadicDynError):
    """Parameter combination at a boundary the classification leaves open."""


class NotInvariant(PadicDynError):
    """Radius outside the invariant set I."""


class ExceptionalRadius(PadicDynError):
    """r equals |a-d|_p: the displacement there depends on the point."""


@dataclass(frozen=True)
class FixedPointCharacter:
    which: str                 # "x1" or "x2"
    kind: str                  # indifferent / attractor / repeller
    derivative_norm: Valuation


@dataclass(frozen=True)
class X2Geometry:
    """How the second fixed point organises its neighbourhood.

    kind is one of:
      siegel_equals_x1    -- SI(x2) equals the Siegel disk of 0
      siegel_disjoint_ball-- SI(x2) = U_radius(x2), disjoint from SI(0)
      basin_ball          -- attractor with basin U_radius(x2)
      basin_complement    -- attractor attracting everything outside the
                             closed ball V_radius(0) (pre-poles removed)
      repelling_ball      -- |f(x)-x2| > |x-x2| on U_radius(x2) less x2
    """

    kind: str
    radius: Optional[Radius]
    note: str = ""


@dataclass(frozen=True)
class ClassificationReport:
    case: NormCase
    x2: Fraction
    x1_character: FixedPointCharacter
    x2_character: FixedPointCharacter
    siegel_radius: Radius
    siegel_form: str           # symbolic form of the Siegel radius of 0
    x2_geometry: X2Geometry


def _character(which: str, dnorm: Valuation) -> FixedPointCharacter:
    zero = Valuation(Fraction(0))
    if dnorm == zero:
        kind = INDIFFERENT
    elif dnorm > zero:
        kind = ATTRACTOR
    else:
        kind = REPELLER
    return FixedPointCharacter(which, kind, dnorm)


def classify(f: CanonicalMap) -> ClassificationReport:
    """Full classification of both fixed points with exact branch tests."""
    case = detect_case(f)
    a, al, be = case.a_norm, case.alpha, case.beta
    p = f.p
    x1_char = _character("x1", derivative_norm(f, 0))
    x2_char = _character("x2", derivative_norm(f, f.x2))
    d_norm = f.d_norm
    ad_norm = f.x2_norm
    alpha_sq = al * al

    if case.id == "C1":
        siegel, form = al, "alpha"
        if d_norm < al:
            geom = X2Geometry("siegel_equals_x1", None)
        elif d_norm == al:
            q = norm(f.b + (f.a - f.d) * f.d, p)
            if q < alpha_sq:
                geom = X2Geometry("basin_ball", al)
            elif q == alpha_sq:
                geom = X2Geometry("siegel_disjoint_ball", al)
            else:
                raise UnhandledBoundary("|b+(a-d)d|_p above alpha^2 is not covered")
        else:
            raise UnhandledBoundary("|d|_p above alpha is not covered")
    elif case.id == "C2":
        siegel, form = al, "alpha"
        if d_norm < al:
            w = norm(f.b + (f.a - f.d) * f.a, p)
            if w < alpha_sq:
                geom = X2Geometry("repelling_ball", al)
            elif w == alpha_sq:
                geom = X2Geometry("siegel_disjoint_ball", al)
            else:
                raise UnhandledBoundary("|b+(a-d)a|_p above alpha^2 is not covered")
        elif ad_norm < al:
            geom = X2Geometry("siegel_equals_x1", None)
        else:
            raise UnhandledBoundary("|d|_p = alpha with |x2|_p = alpha is not covered")
    elif case.id == "C3":
        siegel, form = case.alpha_sq_over_a, "alpha^2/|a|"
        geom = X2Geometry("basin_complement", case.alpha_sq_over_a)
    elif case.id in ("C4", "C5", "C6"):
        siegel, form = al, "alpha"
        geom = X2Geometry("repelling_ball", be)
    elif case.id == "C7":
        siegel, form = al, "alpha"
        if ad_norm < al:
            geom = X2Geometry("siegel_equals_x1", None)
        elif ad_norm > al:
            geom = X2Geometry("siegel_disjoint_ball", ad_norm)
        else:
            raise UnhandledBoundary("|a-d|_p = alpha is not covered")
    elif case.id == "C8":
        siegel, form = case.ab_over_a, "alpha*beta/|a|"
        geom = X2Geometry("basin_complement", case.ab_over_a)
    else:  # pragma: no cover
        raise WrongCase(case.id)

    return ClassificationReport(
        case=case,
        x2=f.x2,
        x1_character=x1_char,
        x2_character=x2_char,
        siegel_radius=siegel,
        siegel_form=form,
        x2_geometry=geom,
    )


def expected_x2_kind(geometry_kind: str) -> str:
    """The fixed-point character each geometry implies (consistency oracle)."""
    return {
        "siegel_equals_x1": INDIFFERENT,
        "siegel_disjoint_ball": INDIFFERENT,
        "basin_ball": ATTRACTOR,
        "basin_complement": ATTRACTOR,
        "repelling_ball": REPELLER,
    }[geometry_kind]


def pre_pole_radius(f: CanonicalMap, k: int) -> Radius:
    """Radius of the sphere carrying the k-step pre-images of the poles.

    Only defined when |a|_p > alpha = beta: the radius solves k applications
    of the doubling branch landing exactly on alpha, giving
    alpha * (alpha/|a|)^((2^k - 1)/2^k), a p^(rational) value.
    """
    case = detect_case(f)
    if case.id != "C3":
        raise WrongCase("pre-pole sphere radii need |a|_p > alpha = beta")
    if k < 0:
        raise ValueError("k must be >= 0")
    q = Fraction(2 ** k - 1, 2 ** k)
    return case.alpha * (case.alpha / case.a_norm).powq(q)


def sphere_displacement(f: CanonicalMap, r: Radius) -> Radius:
    """|f(c) - c|_p for any c on the invariant sphere S_r(0).

    Away from r = |a-d|_p the displacement depends only on r; the table is
    the ultrametric evaluation of |c|^2 |a-d-c| / (|c-x1^||c-x2^|).  At
    r = |a-d|_p the value depends on |c - x2|_p and is refused here; use
    displacement_norm on a concrete point instead.
    """
    inv = invariant_radii(f)
    if not inv.contains(r):
        raise NotInvariant(f"radius {r} is not an invariant sphere radius")
    ad = f.x2_norm
    if r == ad:
        raise ExceptionalRadius("displacement at r = |a-d|_p depends on the point")
    a, al, be = f.a_norm, f.alpha, f.beta
    if inv.kind == "I1":
        if al < be:
            return r * r / al
        if ad == al:
            return r * r / al
        # |a-d| < alpha = beta
        if r < ad:
            return r * r * ad / (al * al)
        return r * r * r / (al * al)
    if inv.kind == "I2":
        if r < al:
            if r < ad:
                return r * r * ad / (al * be)
            return r * r * r / (al * be)
        if r < ad:
            return r * ad / be
        return r * r / be
    return a * r * r / (al * be)


@dataclass(frozen=True)
class MinimalBallRecord:
    """V_rho(c) is the smallest closed ball around c that f maps onto itself."""

    center: Fraction
    sphere_radius: Radius
    ball_radius: Radius


def minimal_invariant_ball(f: CanonicalMap, c) -> MinimalBallRecord:
    """Minimal invariant ball around a point of an invariant sphere."""
    c = Fraction(c)
    r = norm(c, f.p)
    if r.is_zero:
        raise NotInvariant("the center must lie on a positive-radius sphere")
    rho = sphere_displacement(f, r)
    return MinimalBallRecord(center=c, sphere_radius=r, ball_radius=rho)


@dataclass(frozen=True)
class PeriodicOrbit:
    period: int
    points: tuple[Fraction, ...]
    multiplier_norm: Valuation  # |(f^period)'|_p along the orbit


def find_periodic(f: CanonicalMap, x, kmax: int) -> Optional[PeriodicOrbit]:
    """Smallest period k <= kmax with f^k(x) = x exactly, if any.

    The cycle multiplier (f^k)' is the product of the derivatives along the
    orbit; for orbits on invariant spheres its norm is 1 (all periodic
    points are indifferent).
    """
    x = Fraction(x)
    pts = orbit(f, x, kmax)
    for k in range(1, kmax + 1):
        if pts[k] == x:
            total = Valuation(Fraction(0))
            for y in pts[:k]:
                total = total + derivative_norm(f, y)
            return PeriodicOrbit(period=k, points=tuple(pts[:k]), multiplier_norm=total)
    return None
