"""The Heisenberg group in geometric coordinates ``(x, y, t)``.

Every function here is written with plain arithmetic, so it runs unchanged on
exact rationals (``Fraction``/``int``), on mpmath reals, on Python floats, and
elementwise on numpy arrays. Gauge norms are carried as fourth powers so that
rational inputs stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

# Lebesgue volume of the unit gauge ball {(x^2+y^2)^2 + t^2 <= 1}.
UNIT_BALL_VOLUME = math.pi ** 2 / 2


class InversionOfIdentity(ZeroDivisionError):
    """Raised when the Koranyi inversion is applied to the identity."""


@dataclass(frozen=True)
class HPoint:
    """A point ``(x, y, t)``; equivalently ``(z, t)`` with ``z = x + iy``."""

    x: Any
    y: Any
    t: Any

    def __iter__(self):
        return iter((self.x, self.y, self.t))

    def __mul__(self, other: "HPoint") -> "HPoint":
        return mul(self, other)

    def is_identity(self) -> bool:
        return self.x == 0 and self.y == 0 and self.t == 0

    def is_lattice(self) -> bool:
        return all(isinstance(c, int) or getattr(c, "denominator", None) == 1 for c in self)

    def as_ints(self) -> tuple[int, int, int]:
        return int(self.x), int(self.y), int(self.t)

    def map(self, fn) -> "HPoint":
        return HPoint(fn(self.x), fn(self.y), fn(self.t))


IDENTITY = HPoint(0, 0, 0)


def mul(a: HPoint, b: HPoint) -> HPoint:
    """Group law ``(x,y,t)*(x',y',t') = (x+x', y+y', t+t'+2(xy'-yx'))``."""
    return HPoint(a.x + b.x, a.y + b.y, a.t + b.t + 2 * (a.x * b.y - a.y * b.x))


def inv(a: HPoint) -> HPoint:
    return HPoint(-a.x, -a.y, -a.t)


def left_divide(a: HPoint, b: HPoint) -> HPoint:
    """``inv(a) * b`` without building the intermediate point."""
    return HPoint(b.x - a.x, b.y - a.y, b.t - a.t - 2 * (a.x * b.y - a.y * b.x))


def gauge4(a: HPoint):
    """Fourth power of the gauge norm, ``(x^2+y^2)^2 + t^2``."""
    s = a.x * a.x + a.y * a.y
    return s * s + a.t * a.t


def dist4(a: HPoint, b: HPoint):
    """Fourth power of the left-invariant gauge distance ``||a^-1 * b||``."""
    return gauge4(left_divide(a, b))


def koranyi_inv(a: HPoint) -> HPoint:
    """Koranyi inversion ``(z, t) -> (-z/(|z|^2 + it), -t/(|z|^4 + t^2))``."""
    s = a.x * a.x + a.y * a.y
    n = s * s + a.t * a.t
    if not isinstance(n, np.ndarray) and n == 0:
        raise InversionOfIdentity("Koranyi inversion is undefined at the identity")
    if isinstance(n, int):
        n = Fraction(n)
    # -z (s - it) / n with z = x + iy
    return HPoint(-(a.x * s + a.y * a.t) / n, -(a.y * s - a.x * a.t) / n, -a.t / n)


def dilate(r, a: HPoint) -> HPoint:
    """Heisenberg dilation ``(z, t) -> (r z, r^2 t)``; requires ``r > 0``."""
    if not r > 0:
        raise ValueError(f"dilation factor must be positive, got {r!r}")
    return HPoint(r * a.x, r * a.y, r * r * a.t)


def rotate(c, a: HPoint, tol: float = 1e-12) -> HPoint:
    """Rotate ``z`` by the unit complex ``c`` (a complex number or a ``(re, im)`` pair)."""
    cr, ci = (c.real, c.imag) if not isinstance(c, tuple) else c
    m = cr * cr + ci * ci
    if isinstance(m, float) or type(m).__name__ == "mpf":
        if abs(m - 1) > tol:
            raise ValueError("rotation requires a unit complex number")
    elif m != 1:
        raise ValueError("rotation requires a unit complex number")
    return HPoint(cr * a.x - ci * a.y, cr * a.y + ci * a.x, a.t)


def ball_fraction(radius: float, n: int, rng: np.random.Generator, box: float = 1.0) -> float:
    """Fraction of uniform samples from the box ``[-box, box]^2 x [-box^2, box^2]``
    that land in the gauge ball of the given radius about the origin."""
    x = rng.uniform(-box, box, n)
    y = rng.uniform(-box, box, n)
    t = rng.uniform(-box * box, box * box, n)
    g4 = gauge4(HPoint(x, y, t))
    return float(np.count_nonzero(g4 <= radius ** 4)) / n


def inversion_jacobian_mc(h: HPoint, n: int, rng: np.random.Generator,
                          rel_eps: float = 1e-3, margin: float = 1.25) -> float:
    """Monte Carlo estimate of the volume distortion of the Koranyi inversion at ``h``.

    A gauge ball ``B(h, eps)`` is mapped by the inversion; its image sits
    inside ``iota(h) * B(0, margin * rho)`` with ``rho = eps / ||h||^2``. The
    box around that image is sampled uniformly (left translation is a shear,
    so volume is preserved), each sample is pulled back through the inversion
    (an involution), and the hit fraction gives the image volume.
    """
    h = h.map(float)
    norm = gauge4(h) ** 0.25
    eps = rel_eps * norm
    rho = margin * eps / norm ** 2
    x = rng.uniform(-rho, rho, n)
    y = rng.uniform(-rho, rho, n)
    t = rng.uniform(-rho * rho, rho * rho, n)
    box_volume = (2 * rho) ** 2 * (2 * rho * rho)
    centre = koranyi_inv(h)
    image = mul(HPoint(centre.x, centre.y, centre.t), HPoint(x, y, t))
    back = koranyi_inv(image)
    hits = np.count_nonzero(dist4(h, back) <= eps ** 4)
    return box_volume * hits / n / (UNIT_BALL_VOLUME * eps ** 4)
