"""Independent reference implementations used by the tests.

Nothing here imports the package's arithmetic: each oracle recomputes its
answer from first principles so that agreement is evidence, not tautology.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction


def heis_mul(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2] + 2 * (a[0] * b[1] - a[1] * b[0]))


def heis_gauge4(a):
    return (a[0] ** 2 + a[1] ** 2) ** 2 + a[2] ** 2


def heis_inv_koranyi(a):
    # via complex arithmetic: z -> -z / (|z|^2 + i t), t -> -t / (|z|^4 + t^2)
    x, y, t = (Fraction(c) for c in a)
    s = x * x + y * y
    den = s * s + t * t
    # -(x + iy)(s - it) / den
    re = -(x * s + y * t) / den
    im = -(y * s - x * t) / den
    return (re, im, -t / den)


def brute_nearest(h, tie="max", window=2):
    """Minimise the gauge distance over a +-window box of lattice points.

    Ties are broken by the lexicographic order of the remainder ``g^-1 h``.
    """
    x, y, t = (Fraction(c) for c in h)
    best = None
    cx, cy = round(x), round(y)
    for gx in range(cx - window, cx + window + 1):
        for gy in range(cy - window, cy + window + 1):
            rx, ry = x - gx, y - gy
            tt = t - 2 * (gx * y - gy * x)
            ct = math.floor(tt)
            for gt in range(ct - window, ct + window + 1):
                rem = (rx, ry, tt - gt)
                d = heis_gauge4(rem)
                key = (d, tuple(-c for c in rem)) if tie == "max" else (d, rem)
                if best is None or key < best[0]:
                    best = (key, (gx, gy, gt))
    return best[1]


def nearest_int(w: Fraction, half_up: bool) -> int:
    """Nearest integer to ``w``; halves go up (``half_up``) or down."""
    if half_up:
        return math.floor(w + Fraction(1, 2))
    return math.ceil(w - Fraction(1, 2))


def nicf_digits(x: Fraction, half_up: bool) -> tuple[int, list[int]]:
    """1-D nearest-integer continued fraction via ``x -> -1/x - a``.

    The Heisenberg inversion restricted to the x-axis is ``x -> -1/x``, so the
    partial quotients enter with a minus sign compared to the usual
    ``1/x`` convention.
    """
    a0 = nearest_int(x, half_up)
    x -= a0
    digits = []
    while x != 0:
        w = -1 / x
        a = nearest_int(w, half_up)
        digits.append(a)
        x = w - a
    return a0, digits


def unit_ball_volume_quadrature() -> float:
    """Volume of ``{|z|^4 + t^2 <= 1}`` by 1-D quadrature in the radius."""
    from scipy.integrate import quad
    # slice at |z| = r has t-extent 2 sqrt(1 - r^4); integrate over the disc
    val, _ = quad(lambda r: 2 * math.pi * r * 2 * math.sqrt(1 - r ** 4), 0, 1)
    return val


def random_rational(rng: random.Random, max_den: int = 31, t_den: int = 1000, span: int = 5):
    dx, dy, dt = rng.randint(1, max_den), rng.randint(1, max_den), rng.randint(1, t_den)
    return (Fraction(rng.randint(-span * dx, span * dx), dx),
            Fraction(rng.randint(-span * dy, span * dy), dy),
            Fraction(rng.randint(-4 * span * dt, 4 * span * dt), dt))


def random_digit(rng: random.Random, span: int = 3, t_span: int = 6):
    while True:
        g = (rng.randint(-span, span), rng.randint(-span, span), rng.randint(-t_span, t_span))
        if g != (0, 0, 0):
            return g
