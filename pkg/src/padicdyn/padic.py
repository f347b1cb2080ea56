"""Exact p-adic valuations, norms, radii and fixed-precision p-adic integers.

Every magnitude is stored as an exact rational exponent, never as a float:
a norm or radius p^(-v) is represented by the exponent v, so values such as
3^(-3/4) stay exact and comparable.  The canonical text form of a magnitude
is ``"p^(v)"`` (the value is p^(-v)) and ``"0"`` for the zero radius;
rationals print as ``"n/d"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Optional, Union

Rational = Union[int, Fraction]

DEFAULT_PRECISION = 64


class PadicDynError(Exception):
    """Base class for typed domain errors raised by this package."""


class ZeroB(PadicDynError):
    """The constant coefficient of the pole quadratic is zero."""


class OddValuation(PadicDynError):
    """Square root requested for an element of odd valuation (not in Q_p)."""


class NonSquareUnit(PadicDynError):
    """Unit part is not a square modulo p (mod 8 for p = 2)."""


class NonUnit(PadicDynError):
    """Inversion requested for a residue divisible by p."""


class PrecisionLoss(PadicDynError):
    """Cancellation consumed the working precision of an approximate value."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f, r = 3, isqrt(n)
    while f <= r:
        if n % f == 0:
            return False
        f += 2
    return True


def require_prime(p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    return p


def _int_valuation(n: int, p: int) -> int:
    # n != 0
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class Valuation:
    """A p-adic valuation: an exact rational exponent or +infinity (val of 0).

    Totally ordered with infinity on top, so ultrametric laws have no
    special cases.
    """

    exponent: Optional[Fraction]  # None encodes +infinity

    INFINITE = None  # replaced below

    @property
    def is_infinite(self) -> bool:
        return self.exponent is None

    def _key(self):
        if self.exponent is None:
            return (1, Fraction(0))
        return (0, self.exponent)

    def __lt__(self, other: "Valuation") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "Valuation") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "Valuation") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "Valuation") -> bool:
        return self._key() >= other._key()

    def __add__(self, other: "Valuation") -> "Valuation":
        if self.exponent is None or other.exponent is None:
            return Valuation(None)
        return Valuation(self.exponent + other.exponent)

    def __sub__(self, other: "Valuation") -> "Valuation":
        if other.exponent is None:
            raise ArithmeticError("cannot subtract an infinite valuation")
        if self.exponent is None:
            return Valuation(None)
        return Valuation(self.exponent - other.exponent)

    def __repr__(self) -> str:
        return "Valuation(inf)" if self.is_infinite else f"Valuation({self.exponent})"


VAL_INFINITY = Valuation(None)


def valuation(x: Rational, p: int) -> Valuation:
    """Exact p-adic valuation of a rational; valuation(0) is infinite."""
    x = Fraction(x)
    if x == 0:
        return VAL_INFINITY
    v = _int_valuation(x.numerator, p) - _int_valuation(x.denominator, p)
    return Valuation(Fraction(v))


@dataclass(frozen=True)
class Radius:
    """A p-adic magnitude p^(-v) stored as its exact exponent v.

    ``v = None`` encodes the zero radius.  The order is the order of the
    values, i.e. the reverse of the exponent order.  Products and quotients
    act on exponents, so radii with fractional exponents (p^(-3/4), ...)
    are first-class citizens.
    """

    p: int
    v: Optional[Fraction]  # value = p ** (-v); None encodes radius 0

    @staticmethod
    def zero(p: int) -> "Radius":
        return Radius(p, None)

    @staticmethod
    def one(p: int) -> "Radius":
        return Radius(p, Fraction(0))

    @staticmethod
    def from_exponent(p: int, v: Rational) -> "Radius":
        return Radius(p, Fraction(v))

    @staticmethod
    def from_valuation(p: int, val: Valuation) -> "Radius":
        return Radius(p, None if val.is_infinite else val.exponent)

    @property
    def is_zero(self) -> bool:
        return self.v is None

    @property
    def val(self) -> Valuation:
        return Valuation(self.v)

    def value(self) -> Optional[Fraction]:
        """The exact rational value, or None when the exponent is fractional."""
        if self.v is None:
            return Fraction(0)
        if self.v.denominator != 1:
            return None
        return Fraction(self.p) ** (-self.v)

    def _key(self):
        # zero radius sorts below every positive radius; larger value = smaller v
        if self.v is None:
            return (0, Fraction(0))
        return (1, -self.v)

    def _check(self, other: "Radius") -> None:
        if self.p != other.p:
            raise ValueError("mixed primes in radius arithmetic")

    def __lt__(self, other: "Radius") -> bool:
        self._check(other)
        return self._key() < other._key()

    def __le__(self, other: "Radius") -> bool:
        self._check(other)
        return self._key() <= other._key()

    def __gt__(self, other: "Radius") -> bool:
        self._check(other)
        return self._key() > other._key()

    def __ge__(self, other: "Radius") -> bool:
        self._check(other)
        return self._key() >= other._key()

    def __mul__(self, other: "Radius") -> "Radius":
        self._check(other)
        if self.v is None or other.v is None:
            return Radius.zero(self.p)
        return Radius(self.p, self.v + other.v)

    def __truediv__(self, other: "Radius") -> "Radius":
        self._check(other)
        if other.v is None:
            raise ZeroDivisionError("division by the zero radius")
        if self.v is None:
            return Radius.zero(self.p)
        return Radius(self.p, self.v - other.v)

    def __pow__(self, n: int) -> "Radius":
        if self.v is None:
            if n <= 0:
                raise ZeroDivisionError("zero radius to a non-positive power")
            return self
        return Radius(self.p, self.v * n)

    def powq(self, q: Rational) -> "Radius":
        """Raise to an exact rational power (exponent arithmetic)."""
        if self.v is None:
            raise ZeroDivisionError("zero radius to a rational power")
        return Radius(self.p, self.v * Fraction(q))

    def times_p_power(self, k: int) -> "Radius":
        """Multiply the value by p^k."""
        if self.v is None:
            return self
        return Radius(self.p, self.v - k)

    def __str__(self) -> str:
        return format_radius(self)

    def __repr__(self) -> str:
        return f"Radius({self.p}, {'zero' if self.v is None else self.v})"


def norm(x: Rational, p: int) -> Radius:
    """|x|_p as a Radius (zero radius for x = 0)."""
    return Radius.from_valuation(p, valuation(x, p))


# ---------------------------------------------------------------------------
# canonical text forms


def format_rational(x: Rational) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(s: str) -> Fraction:
    return Fraction(s.strip())


def format_radius(r: Radius) -> str:
    """Canonical form "p^(v)" where the value is p^(-v); "0" for radius 0."""
    if r.v is None:
        return "0"
    return f"{r.p}^({format_rational(r.v)})"


_SIGN_WRAP = re.compile(r"^\((.*)\)$")


def _parse_signed_exponent(s: str) -> Fraction:
    # accepts nested signs like "-(-3)" and plain "n/d"
    s = s.strip()
    sign = 1
    while True:
        if s.startswith("-"):
            sign = -sign
            s = s[1:].strip()
            continue
        if s.startswith("+"):
            s = s[1:].strip()
            continue
        m = _SIGN_WRAP.match(s)
        if m:
            s = m.group(1).strip()
            continue
        break
    return sign * Fraction(s)


def parse_radius(s: str, p: int) -> Radius:
    """Parse "p^(v)" (value p^(-v)) or "0"; the base must match p."""
    s = s.strip()
    if s == "0":
        return Radius.zero(p)
    m = re.match(r"^(\d+)\^(.+)$", s)
    if not m:
        raise ValueError(f"radius must look like 'p^(n/d)' or '0', got {s!r}")
    base = int(m.group(1))
    if base != p:
        raise ValueError(f"radius base {base} does not match p={p}")
    return Radius(p, _parse_signed_exponent(m.group(2)))


# ---------------------------------------------------------------------------
# root norms of a monic quadratic x^2 + d x + b (Newton polygon)


def quad_root_norms(d: Rational, b: Rational, p: int) -> tuple[Radius, Radius]:
    """Norms (alpha, beta) of the two roots of x^2 + d x + b, alpha <= beta.

    Computed from the lower Newton polygon of the quadratic, so no root has
    to exist in Q_p: if the vertex (1, val d) lies strictly below the chord,
    the two slopes give distinct root valuations val(b) - val(d) and val(d);
    otherwise both roots share the valuation val(b)/2 (possibly a
    half-integer, i.e. a radius p^(±1/2)).

    Guarantees alpha * beta = |b|_p and max(alpha, beta) >= |d|_p.
    """
    b = Fraction(b)
    if b == 0:
        raise ZeroB("quadratic has b = 0; poles would include 0")
    require_prime(p)
    vb = valuation(b, p).exponent
    vd = valuation(d, p)
    if not vd.is_infinite and 2 * vd.exponent < vb:
        v_beta = vd.exponent
        v_alpha = vb - vd.exponent
    else:
        v_alpha = v_beta = vb / 2
    return Radius(p, v_alpha), Radius(p, v_beta)


# ---------------------------------------------------------------------------
# fixed-precision p-adic integers


@dataclass(frozen=True)
class PadicInt:
    """A p-adic integer known modulo p^precision (exact ring arithmetic)."""

    p: int
    precision: int
    residue: int

    def __post_init__(self):
        object.__setattr__(self, "residue", self.residue % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p ** self.precision

    def _coerce(self, other) -> "PadicInt":
        if isinstance(other, PadicInt):
            if other.p != self.p:
                raise ValueError("mixed primes")
            prec = min(self.precision, other.precision)
            return PadicInt(self.p, prec, other.residue)
        return PadicInt(self.p, self.precision, int(other))

    def _pair(self, other):
        o = self._coerce(other)
        prec = min(self.precision, o.precision)
        return PadicInt(self.p, prec, self.residue), o, prec

    def __add__(self, other):
        a, b, prec = self._pair(other)
        return PadicInt(self.p, prec, a.residue + b.residue)

    __radd__ = __add__

    def __sub__(self, other):
        a, b, prec = self._pair(other)
        return PadicInt(self.p, prec, a.residue - b.residue)

    def __rsub__(self, other):
        a, b, prec = self._pair(other)
        return PadicInt(self.p, prec, b.residue - a.residue)

    def __mul__(self, other):
        a, b, prec = self._pair(other)
        return PadicInt(self.p, prec, a.residue * b.residue)

    __rmul__ = __mul__

    def __neg__(self):
        return PadicInt(self.p, self.precision, -self.residue)

    @property
    def is_unit(self) -> bool:
        return self.residue % self.p != 0

    @staticmethod
    def from_rational(x: Rational, p: int, precision: int = DEFAULT_PRECISION) -> "PadicInt":
        """Reduce a rational with non-negative valuation modulo p^precision."""
        x = Fraction(x)
        mod = p ** precision
        den = x.denominator
        if den % p == 0:
            raise NonUnit(f"{x} is not a p-adic integer for p={p}")
        return PadicInt(p, precision, x.numerator * pow(den, -1, mod))

    def __repr__(self) -> str:
        return f"PadicInt({self.residue} mod {self.p}^{self.precision})"


def invert_unit(u: PadicInt) -> PadicInt:
    """Multiplicative inverse modulo p^N; the residue must be a unit."""
    if not u.is_unit:
        raise NonUnit(f"{u.residue} is divisible by {u.p}")
    return PadicInt(u.p, u.precision, pow(u.residue, -1, u.modulus))


# ---------------------------------------------------------------------------
# square roots via Hensel lifting


def _sqrt_mod_p(a: int, p: int) -> Optional[int]:
    """A square root of a modulo an odd prime p, or None (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    c = pow(z, q, p)
    x = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        bexp = pow(c, 1 << (m - i - 1), p)
        x = x * bexp % p
        t = t * bexp * bexp % p
        c = bexp * bexp % p
        m = i
    return x


def unit_sqrt_mod(u: int, p: int, precision: int) -> Optional[int]:
    """A square root of the unit u modulo p^precision, or None.

    For odd p the root exists iff u is a quadratic residue mod p; for p = 2
    (precision >= 3) iff u = 1 mod 8.  The returned root is the smallest
    representative among all roots, which makes the choice deterministic.
    """
    mod = p ** precision
    u %= mod
    if p == 2:
        if precision == 1:
            return 1 if u % 2 == 1 else None
        if precision == 2:
            return 1 if u % 4 == 1 else None
        if u % 8 != 1:
            return None
        s = 1
        for k in range(3, precision):
            if (s * s - u) % (1 << (k + 1)) != 0:
                s += 1 << (k - 1)
        roots = {s % mod, (-s) % mod, (s + mod // 2) % mod, (-s + mod // 2) % mod}
        return min(roots)
    s = _sqrt_mod_p(u, p)
    if s is None:
        return None
    # Newton lifting doubles the known precision each round
    known = 1
    while known < precision:
        known = min(2 * known, precision)
        m = p ** known
        s = (s + u * pow(s, -1, m)) * pow(2, -1, m) % m
    return min(s, mod - s)


@dataclass(frozen=True)
class PadicSqrt:
    """Square root p^half_valuation * unit of an even-valuation rational."""

    half_valuation: int
    unit: PadicInt


def hensel_sqrt(x: Rational, p: int, precision: int = DEFAULT_PRECISION) -> PadicSqrt:
    """Square root of x in Q_p to the given precision.

    Splits x = p^(2k) * u and lifts the root of the unit part, so the result
    squares to x modulo p^(2k) * p^precision.  Raises OddValuation or
    NonSquareUnit when the root lies outside Q_p.
    """
    x = Fraction(x)
    if x == 0:
        raise ValueError("square root of zero has no unit part")
    require_prime(p)
    v = valuation(x, p).exponent
    if v % 2 != 0:
        raise OddValuation(f"val_{p}({x}) = {v} is odd")
    unit = x / Fraction(p) ** int(v)
    mod = p ** precision
    u = unit.numerator * pow(unit.denominator, -1, mod) % mod
    s = unit_sqrt_mod(u, p, precision)
    if s is None:
        raise NonSquareUnit(f"unit part of {x} is not a square in Z_{p}")
    return PadicSqrt(int(v) // 2, PadicInt(p, precision, s))


def rational_sqrt(x: Fraction) -> Optional[Fraction]:
    """Exact non-negative rational square root, or None."""
    if x < 0:
        return None
    if x == 0:
        return Fraction(0)
    rn, rd = isqrt(x.numerator), isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def is_square_in_qp(x: Rational, p: int) -> bool:
    """Whether x is a square in Q_p (0 counts as a square)."""
    x = Fraction(x)
    if x == 0:
        return True
    v = valuation(x, p).exponent
    if v % 2 != 0:
        return False
    unit = x / Fraction(p) ** int(v)
    if p == 2:
        u = unit.numerator * pow(unit.denominator, -1, 8) % 8
        return u == 1
    u = unit.numerator * pow(unit.denominator, -1, p) % p
    return pow(u, (p - 1) // 2, p) == 1


# ---------------------------------------------------------------------------
# floating-valuation approximations (p-adic "floats" with exact exponents)


@dataclass(frozen=True)
class PadicApprox:
    """x = p^val * unit, with the unit known modulo p^precision.

    The absolute precision is p^(val + precision).  Addition renormalises:
    cancellation raises val and lowers precision, and raises PrecisionLoss
    when nothing reliable is left.
    """

    p: int
    val: int
    unit: int  # coprime to p
    precision: int

    def __post_init__(self):
        object.__setattr__(self, "unit", self.unit % self.p ** self.precision)

    @staticmethod
    def from_rational(x: Rational, p: int, precision: int = DEFAULT_PRECISION) -> "PadicApprox":
        x = Fraction(x)
        if x == 0:
            raise ValueError("exact zero has no PadicApprox representation")
        v = int(valuation(x, p).exponent)
        unit = x / Fraction(p) ** v
        mod = p ** precision
        return PadicApprox(p, v, unit.numerator * pow(unit.denominator, -1, mod), precision)

    @property
    def valuation(self) -> Valuation:
        return Valuation(Fraction(self.val))

    def norm(self) -> Radius:
        return Radius(self.p, Fraction(self.val))

    def _coerce(self, other) -> "PadicApprox":
        if isinstance(other, PadicApprox):
            if other.p != self.p:
                raise ValueError("mixed primes")
            return other
        return PadicApprox.from_rational(other, self.p, self.precision)

    def __mul__(self, other) -> "PadicApprox":
        o = self._coerce(other)
        prec = min(self.precision, o.precision)
        return PadicApprox(self.p, self.val + o.val,
                           self.unit * o.unit % self.p ** prec, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PadicApprox":
        o = self._coerce(other)
        prec = min(self.precision, o.precision)
        mod = self.p ** prec
        return PadicApprox(self.p, self.val - o.val,
                           self.unit * pow(o.unit, -1, mod) % mod, prec)

    def __add__(self, other) -> "PadicApprox":
        o = self._coerce(other)
        lo = min(self.val, o.val)
        # absolute precision of the sum
        abs_prec = min(self.val + self.precision, o.val + o.precision)
        digits = abs_prec - lo
        if digits <= 0:
            raise PrecisionLoss("operands have no overlapping precision")
        mod = self.p ** digits
        total = (self.unit * self.p ** (self.val - lo)
                 + o.unit * self.p ** (o.val - lo)) % mod
        if total == 0:
            raise PrecisionLoss("cancellation exceeded working precision")
        shift = _int_valuation(total, self.p)
        if shift >= digits:
            raise PrecisionLoss("cancellation exceeded working precision")
        return PadicApprox(self.p, lo + shift, total // self.p ** shift, digits - shift)

    __radd__ = __add__

    def __sub__(self, other) -> "PadicApprox":
        o = self._coerce(other)
        return self + PadicApprox(o.p, o.val, -o.unit % o.p ** o.precision, o.precision)

    def __rsub__(self, other) -> "PadicApprox":
        o = self._coerce(other)
        return o - self

    def residue(self, digits: int) -> int:
        """The value modulo p^digits (requires val >= 0 and enough precision)."""
        if self.val < 0:
            raise ValueError("negative valuation: not a p-adic integer")
        if self.val + self.precision < digits:
            raise PrecisionLoss("not enough precision for the requested residue")
        return self.unit * self.p ** self.val % self.p ** digits

    def __repr__(self) -> str:
        return f"PadicApprox({self.p}^{self.val} * {self.unit} [{self.precision} digits])"
