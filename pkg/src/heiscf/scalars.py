"""Scalar rings: Gaussian integers, Gaussian rationals, and big-float complexes.

Exact paths use :class:`GaussianInt` and :class:`GaussianRational` (plus
``fractions.Fraction`` for real coordinates). Numeric paths use mpmath values
bound to a per-precision context, so precision always travels with the value
instead of living in a global setting.
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from numbers import Rational

import mpmath


class GaussianInt:
    """An element ``re + im*i`` of Z[i]."""

    __slots__ = ("re", "im")

    def __init__(self, re: int = 0, im: int = 0):
        self.re = int(re)
        self.im = int(im)

    @classmethod
    def coerce(cls, value) -> "GaussianInt":
        if isinstance(value, GaussianInt):
            return value
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, complex) and value.real.is_integer() and value.imag.is_integer():
            return cls(int(value.real), int(value.imag))
        raise TypeError(f"cannot coerce {value!r} to GaussianInt")

    def __repr__(self):
        return f"GaussianInt({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __eq__(self, other):
        if isinstance(other, GaussianInt):
            return self.re == other.re and self.im == other.im
        if isinstance(other, int):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return other == self
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im)) if self.im else hash(self.re)

    def __bool__(self):
        return bool(self.re or self.im)

    def __neg__(self):
        return GaussianInt(-self.re, -self.im)

    def __pos__(self):
        return self

    def _promote(self, other):
        # lift into the other operand's field; None when there is no sensible one
        if isinstance(other, (GaussianRational, Rational)):
            return GaussianRational(self.re, self.im, 1)
        ctx = getattr(other, "context", None)
        if ctx is not None:
            return ctx.mpc(self.re, self.im)
        if isinstance(other, (float, complex)):
            return complex(self.re, self.im)
        return None

    def __add__(self, other):
        if isinstance(other, GaussianInt):
            return GaussianInt(self.re + other.re, self.im + other.im)
        if isinstance(other, int):
            return GaussianInt(self.re + other, self.im)
        lifted = self._promote(other)
        return NotImplemented if lifted is None else lifted + other

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianInt):
            return GaussianInt(self.re - other.re, self.im - other.im)
        if isinstance(other, int):
            return GaussianInt(self.re - other, self.im)
        lifted = self._promote(other)
        return NotImplemented if lifted is None else lifted - other

    def __rsub__(self, other):
        if isinstance(other, int):
            return GaussianInt(other - self.re, -self.im)
        lifted = self._promote(other)
        return NotImplemented if lifted is None else other - lifted

    def __mul__(self, other):
        if isinstance(other, GaussianInt):
            a, b, c, d = self.re, self.im, other.re, other.im
            return GaussianInt(a * c - b * d, a * d + b * c)
        if isinstance(other, int):
            return GaussianInt(self.re * other, self.im * other)
        lifted = self._promote(other)
        return NotImplemented if lifted is None else lifted * other

    __rmul__ = __mul__

    def __truediv__(self, other):
        lifted = self._promote(other) if not isinstance(other, (int, GaussianInt)) else None
        if lifted is not None and not isinstance(lifted, GaussianRational):
            return lifted / other
        return GaussianRational.coerce(self) / other

    def __rtruediv__(self, other):
        lifted = self._promote(other) if not isinstance(other, int) else None
        if lifted is not None and not isinstance(lifted, GaussianRational):
            return other / lifted
        return GaussianRational.coerce(other) / self

    def conjugate(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    @property
    def real(self) -> int:
        return self.re

    @property
    def imag(self) -> int:
        return self.im

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def divmod_round(self, other: "GaussianInt") -> tuple["GaussianInt", "GaussianInt"]:
        """Euclidean division with the quotient rounded to the nearest Gaussian integer."""
        other = GaussianInt.coerce(other)
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("Gaussian division by zero")
        num = self * other.conjugate()
        qr = _round_div(num.re, n)
        qi = _round_div(num.im, n)
        quot = GaussianInt(qr, qi)
        return quot, self - quot * other


def _round_div(a: int, b: int) -> int:
    # nearest integer to a/b for b > 0, halves rounded up
    return (2 * a + b) // (2 * b)


def gint_norm(g) -> int:
    """Squared modulus ``re**2 + im**2`` of a Gaussian integer."""
    g = GaussianInt.coerce(g)
    return g.norm()


def gint_gcd(a, b) -> GaussianInt:
    """A greatest common divisor in Z[i], normalised to the first quadrant."""
    a = GaussianInt.coerce(a)
    b = GaussianInt.coerce(b)
    while b:
        _, rem = a.divmod_round(b)
        a, b = b, rem
    return _normalize_unit(a)


def _normalize_unit(g: GaussianInt) -> GaussianInt:
    # multiply by a unit so that re > 0 and im >= 0
    for _ in range(4):
        if g.re > 0 and g.im >= 0:
            return g
        if not g:
            return g
        g = g * GaussianInt(0, 1)
    return g


class GaussianRational:
    """An element of Q(i), stored as ``(re_num + im_num*i) / den`` with ``den > 0``.

    The representation is always reduced: ``gcd(re_num, im_num, den) == 1``,
    so equal values have identical fields.
    """

    __slots__ = ("re_num", "im_num", "den")

    def __init__(self, re_num: int = 0, im_num: int = 0, den: int = 1):
        re_num, im_num, den = int(re_num), int(im_num), int(den)
        if den == 0:
            raise ZeroDivisionError("GaussianRational with zero denominator")
        if den < 0:
            re_num, im_num, den = -re_num, -im_num, -den
        g = math.gcd(math.gcd(re_num, im_num), den)
        if g > 1:
            re_num //= g
            im_num //= g
            den //= g
        self.re_num = re_num
        self.im_num = im_num
        self.den = den

    @classmethod
    def from_parts(cls, re, im=0) -> "GaussianRational":
        re = Fraction(re)
        im = Fraction(im)
        den = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        return cls(re.numerator * (den // re.denominator), im.numerator * (den // im.denominator), den)

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, GaussianInt):
            return cls(value.re, value.im, 1)
        if isinstance(value, int):
            return cls(value, 0, 1)
        if isinstance(value, Rational):
            return cls(value.numerator, 0, value.denominator)
        raise TypeError(f"cannot coerce {value!r} to GaussianRational")

    def __repr__(self):
        return f"GaussianRational({self.re_num}, {self.im_num}, {self.den})"

    def __str__(self):
        re, im = self.real, self.imag
        if im == 0:
            return str(re)
        return f"({re})+({im})i"

    @property
    def real(self) -> Fraction:
        return Fraction(self.re_num, self.den)

    @property
    def imag(self) -> Fraction:
        return Fraction(self.im_num, self.den)

    def __eq__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return (self.re_num, self.im_num, self.den) == (other.re_num, other.im_num, other.den)

    def __hash__(self):
        if self.im_num == 0:
            return hash(Fraction(self.re_num, self.den))
        return hash((self.re_num, self.im_num, self.den))

    def __bool__(self):
        return bool(self.re_num or self.im_num)

    def __neg__(self):
        return GaussianRational(-self.re_num, -self.im_num, self.den)

    def __pos__(self):
        return self

    def _numeric(self, other):
        ctx = getattr(other, "context", None)
        if ctx is not None:
            return ctx.mpc(_exact_div(ctx, self.re_num, self.den), _exact_div(ctx, self.im_num, self.den))
        if isinstance(other, (float, complex)):
            return complex(self.real, self.imag)
        return None

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            lifted = self._numeric(other)
            return NotImplemented if lifted is None else lifted + other
        d = self.den * o.den
        return GaussianRational(self.re_num * o.den + o.re_num * self.den,
                                self.im_num * o.den + o.im_num * self.den, d)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            lifted = self._numeric(other)
            return NotImplemented if lifted is None else lifted - other
        d = self.den * o.den
        return GaussianRational(self.re_num * o.den - o.re_num * self.den,
                                self.im_num * o.den - o.im_num * self.den, d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            lifted = self._numeric(other)
            return NotImplemented if lifted is None else lifted * other
        a, b, c, d = self.re_num, self.im_num, o.re_num, o.im_num
        return GaussianRational(a * c - b * d, a * d + b * c, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            lifted = self._numeric(other)
            return NotImplemented if lifted is None else lifted / other
        return self * o.inverse()

    def __rtruediv__(self, other):
        try:
            return GaussianRational.coerce(other) * self.inverse()
        except TypeError:
            lifted = self._numeric(other)
            return NotImplemented if lifted is None else other / lifted

    def inverse(self) -> "GaussianRational":
        n = self.re_num * self.re_num + self.im_num * self.im_num
        if n == 0:
            raise ZeroDivisionError("inverse of zero GaussianRational")
        # den / (a+bi) = den (a-bi) / (a^2+b^2)
        return GaussianRational(self.den * self.re_num, -self.den * self.im_num, n)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re_num, -self.im_num, self.den)

    def abs2(self) -> Fraction:
        return Fraction(self.re_num * self.re_num + self.im_num * self.im_num, self.den * self.den)

    def numerator(self) -> GaussianInt:
        return GaussianInt(self.re_num, self.im_num)

    def reduced(self) -> tuple[GaussianInt, GaussianInt]:
        """Numerator and denominator reduced in Z[i] (coprime Gaussian integers)."""
        num = GaussianInt(self.re_num, self.im_num)
        den = GaussianInt(self.den, 0)
        if not num:
            return GaussianInt(0), GaussianInt(1)
        g = gint_gcd(num, den)
        n, _ = num.divmod_round(g)
        d, _ = den.divmod_round(g)
        return n, d


def grat_reduce(x) -> GaussianRational:
    """Canonical form of a Gaussian rational.

    Accepts a :class:`GaussianRational` or a ``(numerator, denominator)`` pair
    of Gaussian integers; a zero denominator raises ``ZeroDivisionError``.
    """
    if isinstance(x, tuple):
        num, den = x
        return GaussianRational.coerce(num) / GaussianRational.coerce(den)
    x = GaussianRational.coerce(x)
    return GaussianRational(x.re_num, x.im_num, x.den)


@functools.lru_cache(maxsize=None)
def mp_context(precision: int) -> mpmath.MPContext:
    """A private mpmath context fixed at ``precision`` bits (round to nearest)."""
    if precision < 8:
        raise ValueError("precision must be at least 8 bits")
    ctx = mpmath.MPContext()
    ctx.prec = precision
    return ctx


def to_bigcomplex(x, precision: int):
    """Round a Gaussian rational to an mpmath complex at ``precision`` bits.

    The returned ``mpc`` is bound to :func:`mp_context` ``(precision)``;
    its ``.context.prec`` reports the precision.
    """
    ctx = mp_context(precision)
    x = GaussianRational.coerce(x)
    # mpf(n)/mpf(d) rounds twice; divide the exact integers once instead
    return ctx.mpc(_exact_div(ctx, x.re_num, x.den), _exact_div(ctx, x.im_num, x.den))


def to_bigfloat(x, precision: int):
    """Round a rational number to an mpmath real at ``precision`` bits."""
    ctx = mp_context(precision)
    x = Fraction(x)
    return _exact_div(ctx, x.numerator, x.denominator)


def _exact_div(ctx, num: int, den: int):
    libmp = mpmath.libmp
    return ctx.make_mpf(libmp.mpf_div(libmp.from_int(num), libmp.from_int(den), ctx.prec, "n"))


def precision_of(value) -> int | None:
    """Bits of precision carried by an mpmath value; ``None`` for other scalars."""
    ctx = getattr(value, "context", None)
    return getattr(ctx, "prec", None)
