"""Real radius dynamics attached to the p-adic map.

On a sphere S_r(0) the norm of f(x) is determined by r alone except at
finitely many exceptional radii, where it genuinely depends on the point.
Which piecewise radius map applies is governed by how |a|_p compares with
the pole norms alpha <= beta; that yields eight regimes C1..C8.  At an
exceptional radius the step returns a marker (with its one-sided bound)
instead of a value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .padic import PadicDynError, Radius, norm
from .ratmap import CanonicalMap, PoleHit, orbit

MAX_LIMIT_STEPS = 100_000


class WrongCase(PadicDynError):
    """Operation requested for a norm regime it does not apply to."""


@dataclass(frozen=True)
class NormCase:
    """One of the eight norm regimes, with its cached radii."""

    id: str  # "C1".."C8"
    p: int
    a_norm: Radius
    alpha: Radius
    beta: Radius

    @property
    def alpha_sq_over_a(self) -> Radius:
        return self.alpha * self.alpha / self.a_norm

    @property
    def ab_over_a(self) -> Radius:
        return self.alpha * self.beta / self.a_norm

    def __str__(self) -> str:
        return self.id


def detect_case(f: CanonicalMap) -> NormCase:
    """The unique regime of |a|_p against the pole norms alpha <= beta."""
    a, al, be = f.a_norm, f.alpha, f.beta
    if al == be:
        cid = "C1" if a < al else ("C2" if a == al else "C3")
    elif a < al:
        cid = "C4"
    elif a == al:
        cid = "C5"
    elif a < be:
        cid = "C6"
    elif a == be:
        cid = "C7"
    else:
        cid = "C8"
    return NormCase(cid, f.p, a, al, be)


@dataclass(frozen=True)
class Marker:
    """An exceptional radius: the image norm depends on the point there.

    ``lower``/``upper`` are the one-sided bounds the resolved value must
    satisfy (None when unconstrained).
    """

    case_id: str
    name: str
    radius: Radius
    lower: Optional[Radius] = None
    upper: Optional[Radius] = None

    @property
    def key(self) -> str:
        return f"{self.case_id}:{self.name}"

    def admits(self, value: Radius) -> bool:
        # the zero radius (the point mapped onto 0) satisfies any upper bound
        if self.lower is not None and value < self.lower:
            return False
        if self.upper is not None and value > self.upper:
            return False
        return True

    def __str__(self) -> str:
        return self.key


@dataclass(frozen=True)
class Determined:
    radius: Radius


@dataclass(frozen=True)
class DataDependent:
    marker: Marker


Step = Union[Determined, DataDependent]


def case_markers(case: NormCase) -> dict[str, Marker]:
    """The exceptional radii of the regime, keyed by marker name."""
    a, al, be = case.a_norm, case.alpha, case.beta
    cid = case.id
    mk = lambda name, r, lo=None, hi=None: Marker(cid, name, r, lo, hi)
    if cid == "C1":
        return {
            "alpha_star": mk("alpha_star", al, lo=al),
            "a_star": mk("a_star", case.alpha_sq_over_a, hi=a),
        }
    if cid == "C2":
        return {"alpha_hat": mk("alpha_hat", al)}
    if cid == "C3":
        return {
            "a_prime": mk("a_prime", case.alpha_sq_over_a, hi=case.alpha_sq_over_a),
            "alpha_prime": mk("alpha_prime", al, lo=a),
        }
    if cid == "C4":
        return {
            "alpha_check": mk("alpha_check", al, lo=al),
            "beta_check": mk("beta_check", be, lo=al),
            "a_check": mk("a_check", case.ab_over_a, hi=a),
        }
    if cid == "C5":
        return {
            "alpha_tilde": mk("alpha_tilde", al, lo=al),
            "beta_tilde": mk("beta_tilde", be),
        }
    if cid == "C6":
        return {
            "alpha_breve": mk("alpha_breve", al, lo=al),
            "a_breve": mk("a_breve", case.ab_over_a, hi=al),
            "beta_breve": mk("beta_breve", be, lo=a),
        }
    if cid == "C7":
        return {
            "alpha_acute": mk("alpha_acute", al),
            "beta_acute": mk("beta_acute", be, lo=a),
        }
    if cid == "C8":
        return {
            "a_grave": mk("a_grave", case.ab_over_a, hi=case.ab_over_a),
            "alpha_grave": mk("alpha_grave", al, lo=a * al / be),
            "beta_grave": mk("beta_grave", be, lo=a),
        }
    raise WrongCase(f"unknown case id {cid!r}")


def marker_by_key(case: NormCase, key: str) -> Marker:
    name = key.split(":", 1)[-1]
    return case_markers(case)[name]


def predict_step(case: NormCase, r: Radius) -> Step:
    """Image radius of the sphere S_r(0) under one application of the map.

    Exact on non-exceptional radii; returns the blocking marker on the
    finitely many exceptional ones.
    """
    if r.is_zero:
        return Determined(r)
    a, al, be = case.a_norm, case.alpha, case.beta
    m = case_markers(case)
    cid = case.id

    if cid == "C1":
        t = case.alpha_sq_over_a
        if r < al:
            return Determined(r)
        if r == al:
            return DataDependent(m["alpha_star"])
        if r < t:
            return Determined(al * al / r)
        if r == t:
            return DataDependent(m["a_star"])
        return Determined(a)

    if cid == "C2":
        if r < al:
            return Determined(r)
        if r == al:
            return DataDependent(m["alpha_hat"])
        return Determined(a)

    if cid == "C3":
        t = case.alpha_sq_over_a
        if r < t:
            return Determined(r)
        if r == t:
            return DataDependent(m["a_prime"])
        if r < al:
            return Determined(a * r * r / (al * al))
        if r == al:
            return DataDependent(m["alpha_prime"])
        return Determined(a)

    if cid == "C4":
        t = case.ab_over_a
        if r < al:
            return Determined(r)
        if r == al:
            return DataDependent(m["alpha_check"])
        if r < be:
            return Determined(al)
        if r == be:
            return DataDependent(m["beta_check"])
        if r < t:
            return Determined(al * be / r)
        if r == t:
            return DataDependent(m["a_check"])
        return Determined(a)

    if cid == "C5":
        if r < al:
            return Determined(r)
        if r == al:
            return DataDependent(m["alpha_tilde"])
        if r < be:
            return Determined(al)
        if r == be:
            return DataDependent(m["beta_tilde"])
        return Determined(a)

    if cid == "C6":
        t = case.ab_over_a
        if r < al:
            return Determined(r)
        if r == al:
            return DataDependent(m["alpha_breve"])
        if r < t:
            return Determined(al)
        if r == t:
            return DataDependent(m["a_breve"])
        if r < be:
            return Determined(a * r / be)
        if r == be:
            return DataDependent(m["beta_breve"])
        return Determined(a)

    if cid == "C7":
        if r == al:
            return DataDependent(m["alpha_acute"])
        if r < be:
            return Determined(r)
        if r == be:
            return DataDependent(m["beta_acute"])
        return Determined(a)

    if cid == "C8":
        t = case.ab_over_a
        if r < t:
            return Determined(r)
        if r == t:
            return DataDependent(m["a_grave"])
        if r < al:
            return Determined(a * r * r / (al * be))
        if r == al:
            return DataDependent(m["alpha_grave"])
        if r < be:
            return Determined(a * r / be)
        if r == be:
            return DataDependent(m["beta_grave"])
        return Determined(a)

    raise WrongCase(f"unknown case id {cid!r}")


def predict_n(case: NormCase, r: Radius, n: int) -> Step:
    """Radius after n steps, short-circuiting at the first exceptional radius."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cur = r
    for _ in range(n):
        step = predict_step(case, cur)
        if isinstance(step, DataDependent):
            return step
        cur = step.radius
    return Determined(cur)


# --- eventual radius fate ---------------------------------------------------


@dataclass(frozen=True)
class FixedAt:
    radius: Radius


@dataclass(frozen=True)
class ConvergesTo:
    radius: Radius


@dataclass(frozen=True)
class ReachesAfter:
    steps: int
    radius: Radius


@dataclass(frozen=True)
class Blocked:
    marker: Marker


LimitBehavior = Union[FixedAt, ConvergesTo, ReachesAfter, Blocked]

# Markers whose one-sided bound pins every continuation to end at |a|_p,
# even though the value at the marker step is unknown.
_PINNED_TO_A = {("C3", "alpha_prime"), ("C8", "alpha_grave"), ("C8", "beta_grave")}


def limit_behavior(case: NormCase, r: Radius) -> LimitBehavior:
    """Eventual fate of the radius orbit of r under the regime's map.

    FixedAt / ReachesAfter when the walk is fully determined; ConvergesTo
    when a marker intervenes but its bound already forces the limit |a|_p;
    Blocked otherwise.
    """
    if r.is_zero:
        return FixedAt(r)
    cur = r
    steps = 0
    while steps <= MAX_LIMIT_STEPS:
        step = predict_step(case, cur)
        if isinstance(step, DataDependent):
            marker = step.marker
            if (marker.case_id, marker.name) in _PINNED_TO_A:
                return ConvergesTo(case.a_norm)
            return Blocked(marker)
        nxt = step.radius
        if nxt == cur:
            return FixedAt(cur) if steps == 0 else ReachesAfter(steps, cur)
        cur = nxt
        steps += 1
    raise RuntimeError("radius walk did not settle within the step bound")


# --- the exceptional orbit family inside (alpha, beta) for C6 ---------------


def b_set(case: NormCase) -> list[Radius]:
    """Radii in (alpha, beta) whose walk lands exactly on alpha*beta/|a|_p.

    These are r_n = alpha * (beta/|a|_p)^(n+1) for n = 0 and integer n with
    (beta/|a|_p)^n < |a|_p/alpha (open bound, evaluated on exponents).
    """
    if case.id != "C6":
        raise WrongCase("the exceptional orbit family is specific to C6")
    ratio = case.beta / case.a_norm          # > 1, exponent va - eb < 0
    step = -ratio.v                           # positive exponent increment
    bound = (case.a_norm / case.alpha).v * -1  # exponent of |a|/alpha, sign-adjusted
    # n ranges over {0} and integers 0 < n < (e_alpha - va)/(va - e_beta)
    limit = bound / step
    out = [case.alpha * ratio]
    n = 1
    while Fraction(n) < limit:
        out.append(case.alpha * ratio ** (n + 1))
        n += 1
    return out


def in_b_set(case: NormCase, r: Radius) -> bool:
    """Membership of r in the C6 exceptional orbit family."""
    if case.id != "C6":
        raise WrongCase("the exceptional orbit family is specific to C6")
    if r.is_zero:
        return False
    ratio = case.beta / case.a_norm
    # solve r = alpha * ratio^(n+1) for integer n >= 0
    k = (case.alpha.v - r.v) / (-ratio.v)
    if k.denominator != 1 or k < 1:
        return False
    n = int(k) - 1
    if n == 0:
        return True
    limit = (case.alpha.v - case.a_norm.v) / (-ratio.v)
    return Fraction(n) < limit


# --- invariant spheres -------------------------------------------------------


@dataclass(frozen=True)
class InvariantRadii:
    """The set of radii whose spheres the map sends onto themselves.

    kind "I1": (0, alpha)            when |a|_p < beta
    kind "I2": (0, alpha)+(alpha, beta) when |a|_p = beta
    kind "I3": (0, alpha*beta/|a|_p) when |a|_p > beta
    """

    kind: str
    a_norm: Radius
    alpha: Radius
    beta: Radius

    def contains(self, r: Radius) -> bool:
        if r.is_zero:
            return False
        if self.kind == "I1":
            return r < self.alpha
        if self.kind == "I2":
            return r < self.beta and r != self.alpha
        return r < self.alpha * self.beta / self.a_norm

    def sample_exponents(self) -> list[Fraction]:
        """Exponents of a few invariant radii that are integer powers of p."""
        if self.kind == "I1":
            top = self.alpha
        elif self.kind == "I2":
            top = self.beta
        else:
            top = self.alpha * self.beta / self.a_norm
        start = math.floor(top.v) + 1
        out = []
        for k in range(start, start + 4):
            r = Radius(self.alpha.p, Fraction(k))
            if self.contains(r):
                out.append(Fraction(k))
        return out


def invariant_radii(f: CanonicalMap) -> InvariantRadii:
    a, al, be = f.a_norm, f.alpha, f.beta
    if a < be:
        kind = "I1"
    elif a == be:
        kind = "I2"
    else:
        kind = "I3"
    return InvariantRadii(kind, a, al, be)


def invariant_radii_contains(f: CanonicalMap, r: Radius) -> bool:
    """Whether the sphere S_r(0) is invariant under f."""
    return invariant_radii(f).contains(r)


# --- exact-orbit oracle for the radius predictions ---------------------------


@dataclass(frozen=True)
class NormStep:
    """One step of the comparison between predicted and exact norms."""

    index: int
    exact: Radius
    predicted: Step
    matched: Optional[bool]        # None when the step resolved a marker
    resolved_ok: Optional[bool]    # marker bound check, None for determined steps


@dataclass(frozen=True)
class NormOrbitReport:
    case: NormCase
    start_norm: Radius
    steps: tuple[NormStep, ...]

    @property
    def ok(self) -> bool:
        for s in self.steps:
            if s.matched is False or s.resolved_ok is False:
                return False
        return True

    @property
    def resolved_markers(self) -> list[tuple[str, Radius]]:
        return [(s.predicted.marker.key, s.exact) for s in self.steps
                if isinstance(s.predicted, DataDependent)]


def verify_norm_orbit(f: CanonicalMap, x, n: int) -> NormOrbitReport:
    """Iterate f exactly and check each |f^k(x)|_p against the radius map.

    Determined predictions must match exactly; a data-dependent step is
    resolved with the observed norm (checked against the marker's bound)
    and the walk continues from the observation.  PoleHit carries the step
    index when the orbit enters the pre-pole set.
    """
    case = detect_case(f)
    pts = orbit(f, x, n)  # PoleHit propagates with .step set
    cur = norm(pts[0], f.p)
    steps = []
    for k in range(1, n + 1):
        exact = norm(pts[k], f.p)
        if cur.is_zero:
            predicted: Step = Determined(cur)
            matched: Optional[bool] = exact.is_zero
            resolved: Optional[bool] = None
        else:
            predicted = predict_step(case, cur)
            if isinstance(predicted, Determined):
                matched = predicted.radius == exact
                resolved = None
            else:
                matched = None
                resolved = predicted.marker.admits(exact)
        steps.append(NormStep(k, exact, predicted, matched, resolved))
        cur = exact
    return NormOrbitReport(case=case, start_norm=norm(pts[0], f.p), steps=tuple(steps))
