"""Ergodicity of the map on its invariant spheres.

The normalized Haar measure gives each ball V_rho(c) inside the sphere
S_r(0) the mass p*rho/((p-1)*r).  For odd p every invariant sphere carries
an invariant ball of measure at most 1/(p-1), so the system is never
ergodic.  For p = 2 the sphere S_r(0) is conjugated to the unit sphere by
x = 2^(-l) t and the mod-4 coefficient criterion for rational self-maps of
the odd units decides ergodicity; an empirical simulator double-checks the
verdict by binning a long orbit into residue balls.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .padic import (
    DEFAULT_PRECISION,
    PadicDynError,
    PadicInt,
    Radius,
    invert_unit,
    is_square_in_qp,
    norm,
    valuation,
)
from .ratmap import CanonicalMap
from .classify import NotInvariant, sphere_displacement
from .normdyn import invariant_radii


class WrongPrime(PadicDynError):
    """Operation restricted to p = 2 (or to odd p)."""


class BallExceedsSphere(PadicDynError):
    """The measure formula exceeds 1: the ball is no smaller than the sphere."""


class NotSelfMap(PadicDynError):
    """The rational map does not send the unit-sphere domain to itself."""


class NormBoundViolated(PadicDynError):
    """A conjugated coefficient breaks its norm bound (radius not invariant)."""


# ---------------------------------------------------------------------------
# Haar measure on a sphere


@dataclass(frozen=True)
class SphereMeasure:
    """Normalized Haar measure on S_r(0): the whole sphere has mass 1."""

    p: int
    r: Radius

    def ball(self, rho: Radius) -> Fraction:
        """mu(V_rho(c)) = p*rho/((p-1)*r) for a ball inside the sphere."""
        if rho.is_zero:
            return Fraction(0)
        if self.r.is_zero:
            raise ValueError("sphere radius must be positive")
        exp = 1 + self.r.v - rho.v  # mu = p^exp / (p-1)
        if exp.denominator != 1:
            raise ValueError("measure is not rational: exponents differ by a fraction")
        mu = Fraction(self.p) ** int(exp) / (self.p - 1)
        if mu > 1:
            raise BallExceedsSphere(f"mu = {mu} > 1: rho is too large for the sphere")
        return mu


def haar_measure(p: int, r: Radius, rho: Radius) -> Fraction:
    """Convenience wrapper for SphereMeasure(p, r).ball(rho)."""
    return SphereMeasure(p, r).ball(rho)


@dataclass(frozen=True)
class InvariantBallWitness:
    """A non-trivial invariant ball on an invariant sphere (odd p).

    Every point c of the sphere sits in an invariant ball of radius rho_r
    whose measure is at most 1/(p-1) < 1, so the system is not ergodic.
    """

    sphere_radius: Radius
    ball_radius: Radius
    measure: Optional[Fraction]   # None when the exponents are fractional
    bound: Fraction               # 1/(p-1)
    center: Optional[Fraction]    # a concrete center when one exists in Q_p


def non_ergodicity_witness(f: CanonicalMap, r: Radius) -> InvariantBallWitness:
    """The invariant-ball witness for odd p; measure checked against 1/(p-1)."""
    if f.p == 2:
        raise WrongPrime("the invariant-ball witness needs p >= 3")
    rho = sphere_displacement(f, r)  # NotInvariant / ExceptionalRadius propagate
    bound = Fraction(1, f.p - 1)
    measure: Optional[Fraction] = None
    exp = 1 + r.v - rho.v
    if exp.denominator == 1:
        measure = Fraction(f.p) ** int(exp) / (f.p - 1)
        if measure > bound:
            raise AssertionError("invariant ball measure exceeded 1/(p-1)")
    else:
        if exp > 0:
            raise AssertionError("invariant ball measure exceeded 1/(p-1)")
    center = None
    if r.v.denominator == 1:
        center = Fraction(f.p) ** (-int(r.v))
    return InvariantBallWitness(sphere_radius=r, ball_radius=rho,
                                measure=measure, bound=bound, center=center)


# ---------------------------------------------------------------------------
# the mod-4 coefficient criterion on the odd units (p = 2)


@dataclass(frozen=True)
class Mod4Signature:
    """Odd/even-index coefficient sums of numerator and denominator, mod 4."""

    A1: int
    A2: int
    B1: int
    B2: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.A1, self.A2, self.B1, self.B2)


@dataclass(frozen=True)
class Mod4Verdict:
    ergodic: bool
    signature: Mod4Signature
    condition: Optional[int]   # 1..4, or 5 when matched with roles swapped
    interchanged: bool


_MOD4_CONDITIONS = {
    1: (1, 2, 0, 1),
    2: (3, 2, 0, 3),
    3: (1, 0, 2, 1),
    4: (3, 0, 2, 3),
}


def _coeff_mod(coeffs: Sequence, modulus: int) -> list[int]:
    out = []
    for c in coeffs:
        c = Fraction(c)
        if c.denominator % 2 == 0:
            raise NotSelfMap(f"coefficient {c} is not a 2-adic integer")
        out.append(c.numerator * pow(c.denominator, -1, modulus) % modulus)
    return out


def _poly_val_mod(coeffs_mod: Sequence[int], t: int, modulus: int) -> int:
    acc = 0
    for c in reversed(list(coeffs_mod)):
        acc = (acc * t + c) % modulus
    return acc


def mod4_criterion(numerator: Sequence, denominator: Sequence) -> Mod4Verdict:
    """Ergodicity of (numerator/denominator) on the odd 2-adic units.

    Coefficients are ascending; they must be 2-adic integers (odd rational
    denominators are cleared modulo 4).  Both polynomials must send odd
    residues to odd residues (checked modulo 8), otherwise NotSelfMap.
    The verdict compares the mod-4 signature against the four admissible
    patterns, then against the same patterns with numerator and denominator
    interchanged.
    """
    num8 = _coeff_mod(numerator, 8)
    den8 = _coeff_mod(denominator, 8)
    for t in (1, 3, 5, 7):
        if _poly_val_mod(num8, t, 8) % 2 == 0 or _poly_val_mod(den8, t, 8) % 2 == 0:
            raise NotSelfMap("map leaves the odd units (even value mod 8)")
    num4 = _coeff_mod(numerator, 4)
    den4 = _coeff_mod(denominator, 4)

    def sums(coeffs: list[int]) -> tuple[int, int]:
        odd = sum(c for i, c in enumerate(coeffs) if i % 2 == 1) % 4
        even = sum(c for i, c in enumerate(coeffs) if i % 2 == 0) % 4
        return odd, even

    A1, A2 = sums(num4)
    B1, B2 = sums(den4)
    sig = Mod4Signature(A1, A2, B1, B2)
    for idx, pattern in _MOD4_CONDITIONS.items():
        if sig.as_tuple() == pattern:
            return Mod4Verdict(True, sig, idx, False)
    swapped = (B1, B2, A1, A2)
    for idx, pattern in _MOD4_CONDITIONS.items():
        if swapped == pattern:
            return Mod4Verdict(True, sig, idx, True)
    return Mod4Verdict(False, sig, None, False)


# ---------------------------------------------------------------------------
# conjugating an invariant sphere to the unit sphere


@dataclass(frozen=True)
class UnitSphereConjugation:
    """The map x = p^(-l) t carries S_{p^l}(0) to the unit sphere.

    In the t coordinate the map becomes
        (q_a t^2 + t) / (q_c t^2 + q_d t + 1)
    with q_a = p^(-l) a / b, q_c = p^(-2l) / b, q_d = p^(-l) d / b.
    ``gamma_num``/``gamma_den`` are the same polynomials jointly rescaled by
    a power of p so all coefficients are p-adic integers with at least one
    unit among them (the form the mod-4 criterion and the simulator use).
    """

    p: int
    l: int
    q_a: Fraction
    q_c: Fraction
    q_d: Fraction
    gamma_num: tuple[Fraction, Fraction, Fraction]  # ascending: 0, t, t^2
    gamma_den: tuple[Fraction, Fraction, Fraction]


def _bounds_for_regime(f: CanonicalMap) -> tuple[int, int, int]:
    """Minimal valuations (q_a, q_c, q_d) proven for raw coefficients.

    Regime |a| < beta: (2, 2, 1); |a| = beta: (1, 2, 1); |a| > beta:
    (1, 2, 2).  Valuations are of the coefficient, so >= bound means the
    norm is <= p^(-bound).
    """
    a, be = f.a_norm, f.beta
    if a < be:
        return (2, 2, 1)
    if a == be:
        return (1, 2, 1)
    return (1, 2, 2)


def conjugate_to_unit_sphere(f: CanonicalMap, r: Radius) -> UnitSphereConjugation:
    """Coefficients of the map rewritten on the unit sphere.

    Requires r invariant and an integer power of p.  Raw coefficients are
    checked against the norm bounds of their regime; for the one regime
    where the raw form is not integral (|a| = beta with alpha < r < beta)
    the jointly rescaled form is used and validated instead.  A violated
    bound signals a non-invariant radius.
    """
    p = f.p
    if r.is_zero or r.v.denominator != 1:
        raise ValueError("the sphere radius must be a nonzero integer power of p")
    inv = invariant_radii(f)
    if not inv.contains(r):
        raise NormBoundViolated(f"radius {r} is not invariant: no unit-sphere model")
    l = -int(r.v)  # r = p^l
    pl = Fraction(p) ** (-l)
    q_a = pl * f.a / f.b
    q_c = pl * pl / f.b
    q_d = pl * f.d / f.b

    big_radius_regime = f.a_norm == f.beta and f.alpha < r
    if not big_radius_regime:
        va, vc, vd_ = _bounds_for_regime(f)
        for q, bound, label in ((q_a, va, "quadratic"), (q_c, vc, "pole"),
                                (q_d, vd_, "linear")):
            v = valuation(q, p)
            if not v.is_infinite and v.exponent < bound:
                raise NormBoundViolated(
                    f"{label} coefficient norm exceeds p^(-{bound})")

    num = [Fraction(0), Fraction(1), q_a]
    den = [Fraction(1), q_d, q_c]
    vals = [valuation(c, p).exponent for c in num + den if c != 0]
    shift = -min(vals)
    if shift > 0:
        scale = Fraction(p) ** shift
        num = [c * scale for c in num]
        den = [c * scale for c in den]
    return UnitSphereConjugation(p=p, l=l, q_a=q_a, q_c=q_c, q_d=q_d,
                                 gamma_num=tuple(num), gamma_den=tuple(den))


# ---------------------------------------------------------------------------
# the p = 2 verdict


@dataclass(frozen=True)
class ErgodicityVerdict:
    """Ergodicity of (S_r(0), f, mu) for p = 2.

    ``condition`` is which of the three radius conditions fired:
      1: |a| < beta, |d| = beta, r = alpha/2
      2: |a| = beta, r = beta/2   (plus a residue condition, see below)
      3: |a| > beta, r = alpha*beta/(2|a|)
    Condition 2 with alpha < beta additionally requires |a-d| <= beta/4;
    without it the conjugated map fails the mod-4 criterion even though the
    radius matches (``refined`` marks when this extra test decided).
    ``crit`` is the independent mod-4 verdict on the conjugated coefficients.
    """

    ergodic: bool
    condition: Optional[int]
    refined: bool
    crit: Mod4Verdict
    crit_agrees: bool
    sqrt_assumption_holds: bool
    sphere_radius: Radius


def ergodicity_verdict(f: CanonicalMap, r: Radius) -> ErgodicityVerdict:
    """Decide ergodicity on the invariant sphere S_r(0) over Q_2."""
    if f.p != 2:
        raise WrongPrime("the sphere criterion is specific to p = 2")
    inv = invariant_radii(f)
    if not inv.contains(r):
        raise NotInvariant(f"radius {r} is not an invariant sphere radius")
    a, al, be = f.a_norm, f.alpha, f.beta
    half = lambda rad: rad.times_p_power(-1)

    condition: Optional[int] = None
    refined = False
    if a < be:
        if f.d_norm == be and r == half(al):
            condition = 1
    elif a == be:
        if r == half(be):
            condition = 2
            if al < be:
                # residue refinement: the conjugated quadratic and linear
                # units must agree mod 4, i.e. |a-d| <= beta/4
                refined = True
                if not (f.x2_norm <= be.times_p_power(-2)):
                    condition = None
    else:
        if r == half(al * be / a):
            condition = 3

    conj = conjugate_to_unit_sphere(f, r)
    crit = mod4_criterion(conj.gamma_num, conj.gamma_den)
    ergodic = condition is not None
    return ErgodicityVerdict(
        ergodic=ergodic,
        condition=condition,
        refined=refined,
        crit=crit,
        crit_agrees=crit.ergodic == ergodic,
        sqrt_assumption_holds=is_square_in_qp(f.d * f.d - 4 * f.b, 2),
        sphere_radius=r,
    )


# ---------------------------------------------------------------------------
# empirical equidistribution on the unit sphere


@dataclass(frozen=True)
class EquidistributionReport:
    """Visit statistics of a long simulated orbit, binned by residue balls."""

    p: int
    depth: int
    steps: int
    start_residue: int
    counts: dict[int, int]          # admissible residue -> visits
    admissible: tuple[int, ...]
    unvisited: tuple[int, ...]
    uniform: Fraction               # 1 / number of admissible balls

    def frequencies(self) -> dict[int, Fraction]:
        return {res: Fraction(n, self.steps) for res, n in self.counts.items()}

    def max_relative_deviation(self) -> Fraction:
        dev = Fraction(0)
        for res in self.admissible:
            frq = Fraction(self.counts.get(res, 0), self.steps)
            dev = max(dev, abs(frq / self.uniform - 1))
        return dev

    def lines(self) -> list[str]:
        mod = self.p ** self.depth
        out = []
        for res in self.admissible:
            n = self.counts.get(res, 0)
            out.append(f"ball={res} mod {mod} count={n} freq={Fraction(n, self.steps)}")
        return out


def _unit_residues(p: int, depth: int) -> tuple[int, ...]:
    mod = p ** depth
    return tuple(t for t in range(mod) if t % p != 0)


def pick_start(p: int, seed: int, digits: int = 12) -> int:
    """A deterministic seeded unit to start the simulated orbit from."""
    rng = random.Random(seed)
    mod = p ** digits
    while True:
        t = rng.randrange(1, mod)
        if t % p != 0:
            return t


def conjugated_step_exact(conj: UnitSphereConjugation, t: Fraction) -> Fraction:
    """One exact step of the unit-sphere map (for soundness cross-checks)."""
    num = conj.gamma_num[0] + conj.gamma_num[1] * t + conj.gamma_num[2] * t * t
    den = conj.gamma_den[0] + conj.gamma_den[1] * t + conj.gamma_den[2] * t * t
    return num / den


def empirical_equidistribution(f: CanonicalMap, r: Radius, depth: int = 3,
                               steps: int = 4096,
                               precision: int = DEFAULT_PRECISION,
                               seed: int = 0,
                               start: Optional[int] = None) -> EquidistributionReport:
    """Simulate the conjugated map on the unit sphere and bin the orbit.

    Iteration runs in fixed-precision arithmetic modulo p^precision, so
    orbits of thousands of steps cost nothing.  Bins are the admissible
    residue balls modulo p^depth (residues coprime to p); an ergodic system
    visits all of them with near-uniform frequency, a non-ergodic one stays
    inside an invariant ball and leaves bins untouched.
    """
    p = f.p
    if depth < 1 or steps < 1:
        raise ValueError("depth and steps must be positive")
    if precision < depth:
        raise ValueError("precision must cover the binning depth")
    conj = conjugate_to_unit_sphere(f, r)
    num = [PadicInt.from_rational(c, p, precision) for c in conj.gamma_num]
    den = [PadicInt.from_rational(c, p, precision) for c in conj.gamma_den]
    t0 = start if start is not None else pick_start(p, seed)
    if t0 % p == 0:
        raise ValueError("start residue must be a unit")
    t = PadicInt(p, precision, t0)
    mod_depth = p ** depth
    counts: dict[int, int] = {}
    for _ in range(steps):
        counts[t.residue % mod_depth] = counts.get(t.residue % mod_depth, 0) + 1
        top = num[0] + num[1] * t + num[2] * t * t
        bot = den[0] + den[1] * t + den[2] * t * t
        t = top * invert_unit(bot)  # NonUnit here signals a broken precondition
    admissible = _unit_residues(p, depth)
    unvisited = tuple(res for res in admissible if res not in counts)
    return EquidistributionReport(
        p=p, depth=depth, steps=steps, start_residue=t0 % mod_depth,
        counts=counts, admissible=admissible, unvisited=unvisited,
        uniform=Fraction(1, len(admissible)),
    )


def residue_permutation(conj: UnitSphereConjugation, depth: int) -> dict[int, int]:
    """The induced map on admissible residues modulo p^depth.

    The conjugated map is an isometry of the unit sphere, so the image
    residue depends only on the source residue; the result is a permutation
    whose cycle structure reflects ergodicity (a single cycle at every
    depth characterises it).
    """
    p = conj.p
    prec = depth + 4
    out = {}
    for t0 in _unit_residues(p, depth):
        t = PadicInt(p, prec, t0)
        top = PadicInt.from_rational(conj.gamma_num[0], p, prec) + \
            PadicInt.from_rational(conj.gamma_num[1], p, prec) * t + \
            PadicInt.from_rational(conj.gamma_num[2], p, prec) * t * t
        bot = PadicInt.from_rational(conj.gamma_den[0], p, prec) + \
            PadicInt.from_rational(conj.gamma_den[1], p, prec) * t + \
            PadicInt.from_rational(conj.gamma_den[2], p, prec) * t * t
        out[t0] = (top * invert_unit(bot)).residue % p ** depth
    return out


def is_single_cycle(perm: dict[int, int]) -> bool:
    start = next(iter(perm))
    seen = {start}
    cur = perm[start]
    while cur != start:
        if cur in seen:  # entered a cycle that misses some residues
            return False
        seen.add(cur)
        cur = perm[cur]
    return len(seen) == len(perm)
