"""The integer lattice H(Z) and its fundamental domains.

Two domains are supported: the unit cube ``[-1/2, 1/2)^3`` and the Dirichlet
domain of points at least as close (in the gauge metric) to the origin as to
any other lattice point. Each comes with a nearest-integer map ``[h]``, the
unique lattice point ``g`` with ``g^-1 * h`` in the domain.

Dirichlet ties are broken by taking the candidate whose remainder
``g^-1 * h`` is lexicographically *largest* in ``(x, y, t)``. The set of tied
remainders is invariant under left translation of ``h``, so this choice is
well defined, and it keeps the cube corner ``(1/2, 1/2, 1/2)`` inside the
domain.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction

from .geometric import HPoint, IDENTITY, gauge4, left_divide
from .scalars import GaussianInt

HALF = Fraction(1, 2)


class DomainKind(enum.Enum):
    CUBE = "cube"
    DIRICHLET = "dirichlet"

    @property
    def rad4(self) -> Fraction:
        """Fourth power of the domain radius (the sup of gauge norms)."""
        return HALF

    @property
    def box(self) -> tuple[tuple[float, float], ...]:
        """Axis-aligned bounding box used for sampling and histograms."""
        if self is DomainKind.CUBE:
            return ((-0.5, 0.5),) * 3
        return ((-0.85, 0.85),) * 3

    @classmethod
    def parse(cls, name: str) -> "DomainKind":
        key = name.strip().lower()
        aliases = {"cube": cls.CUBE, "c": cls.CUBE, "k_c": cls.CUBE,
                   "dirichlet": cls.DIRICHLET, "d": cls.DIRICHLET, "k_d": cls.DIRICHLET}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown domain kind {name!r}; expected 'cube' or 'dirichlet'") from None


def _floor(v) -> int:
    return math.floor(v)


def _half(v):
    # 1/2 in the scalar's own type so mpmath values keep their precision
    return HALF if isinstance(v, (int, Fraction)) else v * 0 + 0.5


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def _near_integer(v, margin) -> bool:
    return abs(v - round(v)) < margin


def nearest_cube_flagged(h: HPoint, margin=0) -> tuple[HPoint, bool]:
    """Nearest integer for the cube, plus a flag for half-integer near-ties."""
    half = _half(h.x)
    sx, sy = h.x + half, h.y + half
    gx, gy = _floor(sx), _floor(sy)
    tt = h.t - 2 * (gx * h.y - gy * h.x)
    st = tt + half
    gt = _floor(st)
    ambiguous = bool(margin) and (_near_integer(sx, margin) or _near_integer(sy, margin)
                                  or _near_integer(st, margin))
    return HPoint(gx, gy, gt), ambiguous


def nearest_cube(h: HPoint) -> HPoint:
    """The ``g`` with ``g^-1 * h`` in ``[-1/2, 1/2)^3``."""
    return nearest_cube_flagged(h)[0]


def _dirichlet_candidates(h: HPoint, window: int = 1, t_window: int = 0):
    cx, cy = round(h.x), round(h.y)
    for gx in range(cx - window, cx + window + 1):
        for gy in range(cy - window, cy + window + 1):
            rx, ry = h.x - gx, h.y - gy
            tt = h.t - 2 * (gx * h.y - gy * h.x)
            s = rx * rx + ry * ry
            s2 = s * s
            base = _floor(tt)
            for gt in range(base - t_window, base + 2 + t_window):
                rt = tt - gt
                yield s2 + rt * rt, (rx, ry, rt), (gx, gy, gt)


def nearest_dirichlet_flagged(h: HPoint, margin=0, window: int = 1,
                              t_window: int = 0) -> tuple[HPoint, bool]:
    """Nearest integer for the Dirichlet domain, plus a near-tie flag.

    ``window`` and ``t_window`` widen the search; the defaults are enough
    because every remainder in the domain has gauge at most ``2^(-1/4) < 1``.
    """
    best = second = None
    for d4, rem, g in _dirichlet_candidates(h, window, t_window):
        key = (d4, rem, g)
        if best is None or d4 < best[0] or (d4 == best[0] and rem > best[1]):
            best, second = key, best
        elif second is None or d4 < second[0]:
            second = key
    ambiguous = bool(margin) and second is not None and (second[0] - best[0]) < margin
    return HPoint(*best[2]), ambiguous


def nearest_dirichlet(h: HPoint) -> HPoint:
    """A lattice point at minimal gauge distance from ``h`` (ties: lexicographic max remainder)."""
    return nearest_dirichlet_flagged(h)[0]


def nearest_flagged(kind: DomainKind, h: HPoint, margin=0) -> tuple[HPoint, bool]:
    if kind is DomainKind.CUBE:
        return nearest_cube_flagged(h, margin)
    return nearest_dirichlet_flagged(h, margin)


def nearest(kind: DomainKind, h: HPoint) -> HPoint:
    return nearest_flagged(kind, h)[0]


def remainder(kind: DomainKind, h: HPoint) -> tuple[HPoint, HPoint]:
    """``([h], [h]^-1 * h)``."""
    g = nearest(kind, h)
    return g, left_divide(g, h)


def in_domain(kind: DomainKind, h: HPoint) -> bool:
    return nearest(kind, h) == IDENTITY


def lattice_siegel(g: HPoint) -> tuple[GaussianInt, GaussianInt]:
    """Siegel coordinates ``(alpha, beta)`` of a lattice point, as Gaussian integers."""
    a, b, c = g.as_ints()
    return GaussianInt(a - b, a + b), GaussianInt(a * a + b * b, c)


def lattice_gauge4(g: HPoint) -> int:
    return int(gauge4(HPoint(*g.as_ints())))
