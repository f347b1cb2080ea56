"""The (2,2)-rational map with two fixed points: canonical form and exact evaluation.

The canonical map is f(x) = (a x^2 + b x) / (x^2 + d x + b) with ab != 0 and
a != d.  Its fixed points are 0 (a double root of the fixed-point cubic,
always indifferent) and x2 = a - d; the poles are the roots of the monic
denominator, with norms alpha <= beta taken from the Newton polygon.

A general map (a x^2 + b x + c) / (x^2 + d x + e) whose fixed-point cubic has
a rational double root is conjugated to the canonical form by the shift
h(t) = t + x2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .padic import (
    DEFAULT_PRECISION,
    PadicApprox,
    PadicDynError,
    PadicSqrt,
    Radius,
    Rational,
    Valuation,
    hensel_sqrt,
    is_square_in_qp,
    norm,
    quad_root_norms,
    rational_sqrt,
    require_prime,
    valuation,
)


class PoleHit(PadicDynError):
    """Evaluation at a pole of the map (a point of the pre-pole set)."""

    def __init__(self, message: str, step: Optional[int] = None):
        super().__init__(message)
        self.step = step


class DegenerateMap(PadicDynError):
    """Parameters make the map collapse (constant or reducible)."""


class TripleRoot(PadicDynError):
    """The fixed-point cubic has a single root of multiplicity three."""


class ThreeDistinctRoots(PadicDynError):
    """The fixed-point cubic is squarefree: three distinct fixed points."""


class IrrationalFixedPoints(PadicDynError):
    """The fixed points exist but are not rational numbers."""


class PoleCoincidesWithFixedPoint(PadicDynError):
    """The double fixed point is also a pole of the general map."""


@dataclass(frozen=True)
class CanonicalMap:
    """f(x) = (a x^2 + b x) / (x^2 + d x + b) over Q_p."""

    a: Fraction
    b: Fraction
    d: Fraction
    p: int
    alpha: Radius = field(init=False, compare=False)
    beta: Radius = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        object.__setattr__(self, "d", Fraction(self.d))
        require_prime(self.p)
        if self.a == 0 or self.b == 0:
            raise DegenerateMap("need a != 0 and b != 0")
        if self.a == self.d:
            raise DegenerateMap("a = d collapses the two fixed points")
        if self.b + (self.a - self.d) * self.a == 0:
            raise DegenerateMap("numerator and denominator share a root")
        alpha, beta = quad_root_norms(self.d, self.b, self.p)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def x2(self) -> Fraction:
        return self.a - self.d

    @property
    def a_norm(self) -> Radius:
        return norm(self.a, self.p)

    @property
    def d_norm(self) -> Radius:
        return norm(self.d, self.p)

    @property
    def x2_norm(self) -> Radius:
        return norm(self.x2, self.p)

    def numerator(self, x: Fraction) -> Fraction:
        return self.a * x * x + self.b * x

    def denominator(self, x: Fraction) -> Fraction:
        return x * x + self.d * x + self.b

    def __str__(self) -> str:
        return (f"(({self.a})x^2 + ({self.b})x) / "
                f"(x^2 + ({self.d})x + ({self.b})) over Q_{self.p}")


@dataclass(frozen=True)
class GeneralMap:
    """f(x) = (a x^2 + b x + c) / (x^2 + d x + e) over Q_p."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    p: int

    def __post_init__(self):
        for name in "abcde":
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        require_prime(self.p)
        if self.a == 0:
            raise DegenerateMap("need a != 0")
        if self.b == self.a * self.d and self.c == self.a * self.e:
            raise DegenerateMap("numerator is a multiple of the denominator")

    def evaluate(self, x: Fraction) -> Fraction:
        x = Fraction(x)
        den = x * x + self.d * x + self.e
        if den == 0:
            raise PoleHit(f"{x} is a pole")
        return (self.a * x * x + self.b * x + self.c) / den


@dataclass(frozen=True)
class ConjugacyRecord:
    """Shift conjugating a general map to canonical form: g(x) = shift + f(x - shift)."""

    shift: Fraction
    canonical: CanonicalMap


@dataclass(frozen=True)
class PoleData:
    """Pole norms, and the exact poles when they are rational."""

    alpha: Radius
    beta: Radius
    exact: Optional[tuple[Fraction, Fraction]]  # ordered so |first| = alpha


# ---------------------------------------------------------------------------
# polynomial helpers over Q (dense ascending coefficient lists)


def _poly_normalize(c: list[Fraction]) -> list[Fraction]:
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(a: Sequence[Fraction], b: Sequence[Fraction]):
    a = list(a)
    b = _poly_normalize(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = a[:]
    while len(_poly_normalize(r)) >= len(b):
        r = _poly_normalize(r)
        shift = len(r) - len(b)
        coef = r[-1] / b[-1]
        q[shift] = coef
        for i, bc in enumerate(b):
            r[shift + i] -= coef * bc
    return _poly_normalize(q), _poly_normalize(r)


def _poly_gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    a = _poly_normalize(list(a))
    b = _poly_normalize(list(b))
    while b:
        _, r = _poly_divmod(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def _poly_eval(c: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for coef in reversed(list(c)):
        acc = acc * x + coef
    return acc


def _rational_roots(c: Sequence[Fraction]) -> list[Fraction]:
    """All rational roots of a polynomial with rational coefficients."""
    c = _poly_normalize(list(c))
    roots = []
    while c and c[0] == 0:
        roots.append(Fraction(0))
        c = c[1:]
    if len(c) <= 1:
        return roots
    lcm = 1
    for coef in c:
        lcm = lcm * coef.denominator // gcd(lcm, coef.denominator)
    ints = [int(coef * lcm) for coef in c]
    lead, const = ints[-1], ints[0]

    def divisors(n: int) -> list[int]:
        n = abs(n)
        out = []
        i = 1
        while i * i <= n:
            if n % i == 0:
                out.append(i)
                out.append(n // i)
            i += 1
        return sorted(set(out))

    for num in divisors(const):
        for den in divisors(lead):
            for s in (1, -1):
                cand = Fraction(s * num, den)
                if _poly_eval(c, cand) == 0:
                    roots.append(cand)
    return sorted(set(roots))


# ---------------------------------------------------------------------------
# conjugation to the canonical form


def fixed_point_cubic(g: GeneralMap) -> list[Fraction]:
    """x^3 + (d-a) x^2 + (e-b) x - c, ascending coefficients."""
    return [-g.c, g.e - g.b, g.d - g.a, Fraction(1)]


def canonicalize(g: GeneralMap) -> ConjugacyRecord:
    """Shift the double fixed point to 0, producing the canonical map.

    The fixed-point cubic must have a rational double root x2 and a distinct
    simple root; the shift h(t) = t + x2 then conjugates g to canonical
    parameters A = a - x2, D = 2 x2 + d, B = x2^2 + d x2 + e.
    """
    cubic = fixed_point_cubic(g)
    deriv = [cubic[1], 2 * cubic[2], 3 * cubic[3]]
    common = _poly_gcd(cubic, deriv)
    if len(common) == 3:  # quadratic gcd: cubic is a perfect cube
        raise TripleRoot("fixed-point cubic has a triple root")
    if len(common) == 1:  # constant gcd: squarefree cubic
        if len(_rational_roots(cubic)) == 3:
            raise ThreeDistinctRoots("three distinct rational fixed points")
        raise ThreeDistinctRoots("three distinct fixed points (not all rational)")
    # linear gcd: monic (x - x2) with x2 automatically rational
    x2 = -common[0]
    if x2.denominator < 0:  # defensive; Fraction keeps den > 0
        raise IrrationalFixedPoints("double fixed point is not rational")
    B = x2 * x2 + g.d * x2 + g.e
    if B == 0:
        raise PoleCoincidesWithFixedPoint(f"double fixed point {x2} is a pole")
    A = g.a - x2
    D = 2 * x2 + g.d
    canonical = CanonicalMap(A, B, D, g.p)
    return ConjugacyRecord(shift=x2, canonical=canonical)


# ---------------------------------------------------------------------------
# exact evaluation and norms


def evaluate(f: CanonicalMap, x: Rational) -> Fraction:
    """f(x) as an exact rational; raises PoleHit on the poles."""
    x = Fraction(x)
    den = f.denominator(x)
    if den == 0:
        raise PoleHit(f"{x} is a pole of the map")
    return f.numerator(x) / den


def orbit(f: CanonicalMap, x: Rational, n: int) -> list[Fraction]:
    """[x, f(x), ..., f^n(x)]; PoleHit carries the failing step index."""
    pts = [Fraction(x)]
    for k in range(n):
        den = f.denominator(pts[-1])
        if den == 0:
            raise PoleHit(f"f^{k}(x) = {pts[-1]} is a pole", step=k)
        pts.append(f.numerator(pts[-1]) / den)
    return pts


def derivative(f: CanonicalMap, x: Rational) -> Fraction:
    """Exact f'(x)."""
    x = Fraction(x)
    den = f.denominator(x)
    if den == 0:
        raise PoleHit(f"{x} is a pole of the map")
    num = f.numerator(x)
    dnum = 2 * f.a * x + f.b
    dden = 2 * x + f.d
    return (dnum * den - num * dden) / (den * den)


def derivative_norm(f: CanonicalMap, x: Rational) -> Valuation:
    """|f'(x)|_p as a valuation (infinite when f'(x) = 0)."""
    return valuation(derivative(f, x), f.p)


def displacement_norm(f: CanonicalMap, c: Rational) -> Valuation:
    """|f(c) - c|_p, computed exactly."""
    c = Fraction(c)
    return valuation(evaluate(f, c) - c, f.p)


def pole_data(f: CanonicalMap) -> PoleData:
    """Pole norms plus the exact poles when d^2 - 4b is a rational square."""
    disc = f.d * f.d - 4 * f.b
    s = rational_sqrt(disc) if disc >= 0 else None
    exact = None
    if s is not None:
        r1 = (-f.d + s) / 2
        r2 = (-f.d - s) / 2
        if norm(r1, f.p) <= norm(r2, f.p):
            exact = (r1, r2)
        else:
            exact = (r2, r1)
    return PoleData(alpha=f.alpha, beta=f.beta, exact=exact)


def approx_evaluate(f: CanonicalMap, x: PadicApprox) -> PadicApprox:
    """One step of f in floating-valuation arithmetic (for long orbits)."""
    num = x * x * f.a + x * f.b
    den = x * x + x * f.d + f.b
    return num / den


# ---------------------------------------------------------------------------
# pre-images


@dataclass(frozen=True)
class PreimageRoots:
    """Solutions of f(x) = y inside Q_p.

    ``rational`` holds exact roots; ``lifted`` holds roots that exist in Q_p
    but not in Q, as approximations to the requested precision;
    ``outside_qp`` counts roots of the quadratic living only in extensions.
    """

    rational: tuple[Fraction, ...]
    lifted: tuple[PadicApprox, ...]
    outside_qp: int

    def __len__(self) -> int:
        return len(self.rational) + len(self.lifted)


def solve_preimage(f: CanonicalMap, y: Rational,
                   precision: int = DEFAULT_PRECISION) -> PreimageRoots:
    """All x in Q_p with f(x) = y: roots of (a-y) x^2 + (b-dy) x - by.

    The y = a case degenerates to a linear equation and is handled inline.
    Irrational roots are Hensel-lifted when the discriminant is a square in
    Q_p, otherwise they are counted in ``outside_qp``.
    """
    y = Fraction(y)
    A = f.a - y
    B = f.b - f.d * y
    C = -f.b * y
    if A == 0:
        if B == 0:
            return PreimageRoots((), (), 0)
        return PreimageRoots((-C / B,), (), 0)
    disc = B * B - 4 * A * C
    if disc == 0:
        return PreimageRoots((-B / (2 * A),), (), 0)
    s = rational_sqrt(disc)
    if s is not None:
        roots = tuple(sorted({(-B + s) / (2 * A), (-B - s) / (2 * A)}))
        return PreimageRoots(roots, (), 0)
    if not is_square_in_qp(disc, f.p):
        return PreimageRoots((), (), 2)
    root: PadicSqrt = hensel_sqrt(disc, f.p, precision)
    s_approx = PadicApprox(f.p, root.half_valuation, root.unit.residue, precision)
    b_over = PadicApprox.from_rational(-B, f.p, precision) if B != 0 else None
    two_a = PadicApprox.from_rational(2 * A, f.p, precision)
    lifted = []
    for sign in (1, -1):
        signed = PadicApprox(f.p, s_approx.val, sign * s_approx.unit, precision)
        top = signed if b_over is None else b_over + signed
        lifted.append(top / two_a)
    return PreimageRoots((), tuple(lifted), 0)
