"""Siegel models and the unitary representation on C^3.

A Heisenberg point ``(z, t)`` lifts to the null vector ``(1, z(1+i), |z|^2 + it)``
of the Hermitian form ``J(z, w) = conj(z1) w1 - conj(z0) w2 - conj(z2) w0``.
Unitary matrices for ``J`` act projectively on these lifts; the embedding
``embed_unitary`` is a homomorphism, and ``U_IOTA`` acts as the Koranyi
inversion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .geometric import HPoint
from .scalars import GaussianInt, GaussianRational, precision_of


class PointAtInfinity(ArithmeticError):
    """The projective point ``(0:0:1)``, which is not a Heisenberg point."""


class NotNull(ValueError):
    """A vector that violates the null constraint ``|u|^2 = 2 Re(v)``."""


def _cx(re, im):
    """Build a complex scalar of the type matching the real scalars given."""
    if isinstance(re, (int, Fraction)) and isinstance(im, (int, Fraction)):
        return GaussianRational.from_parts(re, im)
    ctx = getattr(re, "context", None) or getattr(im, "context", None)
    if ctx is not None:
        return ctx.mpc(re, im)
    return complex(re, im) if not hasattr(re, "shape") else re + 1j * im


def _abs2(c):
    if isinstance(c, GaussianRational):
        return c.abs2()
    if isinstance(c, GaussianInt):
        return c.norm()
    return c.real * c.real + c.imag * c.imag


def _is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, GaussianInt, GaussianRational))


def _tolerance(value) -> float:
    p = precision_of(value)
    if p is not None:
        return 2.0 ** (-p / 2)
    return 1e-9


@dataclass(frozen=True)
class SiegelPoint:
    """Planar Siegel coordinates ``(u, v)`` of a Heisenberg point."""

    u: Any
    v: Any

    def null_defect(self):
        """``|u|^2 - 2 Re(v)``; zero exactly on the Heisenberg group."""
        return _abs2(self.u) - 2 * self.v.real

    def gauge4(self):
        """Fourth power of the gauge norm, ``|v|^2``."""
        return _abs2(self.v)

    def lift(self) -> "ProjVec":
        return ProjVec(1, self.u, self.v)


@dataclass(frozen=True)
class ProjVec:
    """Homogeneous coordinates ``(c0 : c1 : c2)``; equality is up to rescaling."""

    c0: Any
    c1: Any
    c2: Any

    def __post_init__(self):
        if all(_is_exact(c) and c == 0 for c in (self.c0, self.c1, self.c2)):
            raise ValueError("the zero vector is not a projective point")

    def __iter__(self):
        return iter((self.c0, self.c1, self.c2))

    def __eq__(self, other):
        if not isinstance(other, ProjVec):
            return NotImplemented
        a, b = tuple(self), tuple(other)
        return all(a[i] * b[j] - a[j] * b[i] == 0 for i in range(3) for j in range(i + 1, 3))

    def __hash__(self):
        raise TypeError("ProjVec equality is projective and not hashable")

    def is_infinity(self) -> bool:
        return self.c0 == 0

    def to_siegel(self) -> SiegelPoint:
        if self.c0 == 0:
            raise PointAtInfinity("vector has vanishing first coordinate")
        return SiegelPoint(self.c1 / self.c0, self.c2 / self.c0)


INFINITY = ProjVec(0, 0, 1)


def j_norm(w: Sequence):
    """``J(w, w) = |w1|^2 - 2 Re(conj(w0) w2)``."""
    w0, w1, w2 = w
    return _abs2(w1) - 2 * (w0.conjugate() * w2).real


def j_form(a: Sequence, b: Sequence):
    """The Hermitian form ``J(a, b)``, conjugate-linear in ``a``."""
    return (a[1].conjugate() * b[1] - a[0].conjugate() * b[2] - a[2].conjugate() * b[0])


class UMatrix:
    """A 3x3 complex matrix with exact or numeric entries."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(r) for r in rows)
        if len(self.rows) != 3 or any(len(r) != 3 for r in self.rows):
            raise ValueError("UMatrix needs 3x3 entries")

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __repr__(self):
        return "UMatrix(" + ", ".join("[" + ", ".join(str(e) for e in r) + "]" for r in self.rows) + ")"

    def __eq__(self, other):
        if not isinstance(other, UMatrix):
            return NotImplemented
        return all(self.rows[i][j] == other.rows[i][j] for i in range(3) for j in range(3))

    __hash__ = None

    def __matmul__(self, other):
        if isinstance(other, UMatrix):
            b = other.rows
            return UMatrix([[_dot3(r, (b[0][j], b[1][j], b[2][j])) for j in range(3)] for r in self.rows])
        vec = tuple(other)
        out = [_dot3(r, vec) for r in self.rows]
        return ProjVec(*out) if isinstance(other, ProjVec) else tuple(out)

    def column(self, j: int) -> tuple:
        return tuple(self.rows[i][j] for i in range(3))

    def dagger(self) -> "UMatrix":
        return UMatrix([[self.rows[j][i].conjugate() for j in range(3)] for i in range(3)])

    def det(self):
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)

    def map(self, fn) -> "UMatrix":
        return UMatrix([[fn(e) for e in r] for r in self.rows])


def _dot3(r, c):
    return r[0] * c[0] + r[1] * c[1] + r[2] * c[2]


IDENTITY_MATRIX = UMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
J_MATRIX = UMatrix([[0, 0, -1], [0, 1, 0], [-1, 0, 0]])
# As a matrix the inversion coincides with J itself.
U_IOTA = J_MATRIX


def to_siegel(a: HPoint) -> SiegelPoint:
    """``(z, t) -> (z(1+i), |z|^2 + it)``."""
    return SiegelPoint(_cx(a.x - a.y, a.x + a.y), _cx(a.x * a.x + a.y * a.y, a.t))


def from_siegel(s: SiegelPoint, tol: float | None = None) -> HPoint:
    """Inverse of :func:`to_siegel`; rejects vectors off the null cone."""
    defect = s.null_defect()
    if _is_exact(defect):
        if defect != 0:
            raise NotNull(f"|u|^2 - 2Re(v) = {defect} != 0")
    else:
        tol = _tolerance(defect) if tol is None else tol
        if abs(defect) > tol * max(1, abs(s.v)):
            raise NotNull(f"|u|^2 - 2Re(v) = {defect} exceeds tolerance {tol}")
    ur, ui = s.u.real, s.u.imag
    # z = u / (1+i) = u (1-i) / 2
    return HPoint((ur + ui) / 2, (ui - ur) / 2, s.v.imag)


def embed_unitary(a: HPoint) -> UMatrix:
    """The lower-triangular unitary matrix of a Heisenberg point."""
    s = to_siegel(a)
    return UMatrix([[1, 0, 0], [s.u, 1, 0], [s.v, s.u.conjugate(), 1]])


def proj_act(m: UMatrix, s: SiegelPoint) -> SiegelPoint:
    """Projective action of ``m`` on ``(1 : u : v)``, renormalised.

    Raises :class:`PointAtInfinity` when the image is ``(0:0:1)``.
    """
    return (m @ s.lift()).to_siegel()


def siegel_mul(s1: SiegelPoint, s2: SiegelPoint) -> SiegelPoint:
    return SiegelPoint(s1.u + s2.u, s1.v + s2.v + s1.u.conjugate() * s2.u)


def siegel_left_divide(s1: SiegelPoint, s2: SiegelPoint) -> SiegelPoint:
    """``s1^-1 * s2 = (u2 - u1, conj(v1) - conj(u1) u2 + v2)``."""
    return SiegelPoint(s2.u - s1.u, s1.v.conjugate() - s1.u.conjugate() * s2.u + s2.v)


def is_unitary(m: UMatrix, tol: float = 0.0) -> bool:
    """Whether ``m^dagger J m == J`` (exactly, or entrywise within ``tol``)."""
    lhs = m.dagger() @ J_MATRIX @ m
    for i in range(3):
        for j in range(3):
            d = lhs[i, j] - J_MATRIX[i, j]
            if _is_exact(d):
                if d != 0:
                    return False
            elif abs(d) > tol:
                return False
    return True


def u_inverse(m: UMatrix, tol: float = 0.0) -> UMatrix:
    """Inverse of a unitary matrix, ``J m^dagger J``."""
    if not is_unitary(m, tol):
        raise ValueError("u_inverse requires a J-unitary matrix")
    return J_MATRIX @ m.dagger() @ J_MATRIX
