"""Heisenberg continued fractions: digits, reconstruction, and convergents.

Digits are lattice points ``gamma_i``. A point ``h`` expands as
``gamma_0 = [h]``, ``h_0 = gamma_0^-1 h`` and then
``gamma_{i+1} = [iota h_i]``, ``h_{i+1} = gamma_{i+1}^-1 iota h_i``.
Reconstruction evaluates ``gamma_0 iota gamma_1 iota ... iota gamma_n``.

Convergents are read off ``Q_n = A_{gamma_1} ... A_{gamma_n}`` with
``A_gamma = U(iota) U(gamma)``. ``Q_n`` has columns
``(q_n, r_n, p_n)``, the tilde column ``(q~_n, r~_n, p~_n)``, and
``-(q_{n-1}, r_{n-1}, p_{n-1})``. Because ``det A_gamma = -1``, the tilde
column equals ``(-1)^n`` times the conjugated cross products of the outer
columns; the recursion below carries that sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .geometric import HPoint, IDENTITY, gauge4, dist4, koranyi_inv, left_divide, mul
from .lattice import DomainKind, lattice_gauge4, lattice_siegel, nearest_flagged
from .scalars import GaussianInt, GaussianRational, gint_gcd, gint_norm, mp_context, precision_of
from .siegel import (
    PointAtInfinity, ProjVec, SiegelPoint, UMatrix, from_siegel, to_siegel,
)


class InvalidDigits(ValueError):
    """A digit sequence that cannot be evaluated; ``index`` names the offending digit."""

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (digit index {index})")
        self.index = index


class DigitUncertain(ArithmeticError):
    """A numeric digit that cannot be certified at the working precision."""


class InvariantViolation(AssertionError):
    """An internal identity that must hold exactly did not."""


def _exact_scalar(v) -> bool:
    return isinstance(v, (int, Fraction))


def is_exact_point(h: HPoint) -> bool:
    return all(_exact_scalar(c) for c in h)


@dataclass(frozen=True)
class DigitSeq:
    """``gamma_0`` plus the digits ``gamma_1 .. gamma_n`` (all nonzero)."""

    gamma0: HPoint = IDENTITY
    digits: tuple[HPoint, ...] = ()
    finite: bool = True

    def __post_init__(self):
        object.__setattr__(self, "gamma0", HPoint(*self.gamma0.as_ints()))
        object.__setattr__(self, "digits", tuple(HPoint(*HPoint(*d).as_ints()) for d in self.digits))
        for i, d in enumerate(self.digits, start=1):
            if d == IDENTITY:
                raise InvalidDigits("digits after gamma_0 must be nonzero", i)

    def __len__(self):
        return len(self.digits)

    def prefix(self, n: int) -> "DigitSeq":
        return DigitSeq(self.gamma0, self.digits[:n], True)

    def as_lists(self) -> tuple[list[int], list[list[int]]]:
        return list(self.gamma0.as_ints()), [list(d.as_ints()) for d in self.digits]


@dataclass
class Expansion:
    """Result of :func:`expand`: digits, the iterates ``h_0 .. h_n``, and status."""

    kind: DomainKind
    digits: DigitSeq
    iterates: list[HPoint]
    reason: str
    certified: int | None = None
    precision: int | None = None
    resume: HPoint | None = None

    @property
    def finite(self) -> bool:
        return self.reason == "terminated"

    @property
    def siegel(self) -> list[SiegelPoint]:
        return [to_siegel(h) for h in self.iterates]


def advance(kind: DomainKind, h: HPoint, margin=0) -> tuple[HPoint, HPoint, bool]:
    """One Gauss-map step: ``([iota h], [iota h]^-1 iota h, near_tie_flag)``."""
    w = koranyi_inv(h)
    g, ambiguous = nearest_flagged(kind, w, margin)
    return g, left_divide(g, w), ambiguous


def expand(h, kind: DomainKind = DomainKind.CUBE, max_digits: int | None = None) -> Expansion:
    """Continued fraction digits of ``h`` with the trace of forward iterates.

    Rational input (``int``/``Fraction`` coordinates, or a
    :class:`RationalSiegel`) is expanded exactly and always terminates.
    mpmath input at precision ``p`` is expanded in lockstep with a ``2p``-bit
    copy; expansion stops at the first digit on which the two disagree or
    which falls within ``2^(-p/2)`` of a domain boundary (``reason ==
    "uncertain"``). Plain floats are iterated without certification.
    """
    if isinstance(h, RationalSiegel):
        h = h.geometric()
    if is_exact_point(h):
        return _expand_exact(h, kind, max_digits)
    p = precision_of(h.x)
    if p is None:
        return _expand_plain(h, kind, max_digits)
    return _expand_certified(h, kind, max_digits, p)


def _expand_exact(h, kind, max_digits):
    g0, _ = nearest_flagged(kind, h)
    cur = left_divide(g0, h)
    digits, iterates = [], [cur]
    reason = "terminated"
    while cur != IDENTITY:
        if max_digits is not None and len(digits) >= max_digits:
            reason = "max_digits"
            break
        g, cur, _ = advance(kind, cur)
        digits.append(g)
        iterates.append(cur)
    return Expansion(kind, DigitSeq(g0, tuple(digits), reason == "terminated"), iterates, reason)


def _expand_plain(h, kind, max_digits):
    if max_digits is None:
        raise ValueError("floating-point expansion needs max_digits")
    g0, _ = nearest_flagged(kind, h)
    cur = left_divide(g0, h)
    digits, iterates = [], [cur]
    reason = "max_digits"
    while len(digits) < max_digits:
        if gauge4(cur) == 0:
            reason = "terminated"
            break
        g, cur, _ = advance(kind, cur)
        digits.append(g)
        iterates.append(cur)
    return Expansion(kind, DigitSeq(g0, tuple(digits), False), iterates, reason)


def _expand_certified(h, kind, max_digits, p):
    ctx2 = mp_context(2 * p)
    h2 = h.map(ctx2.mpf)
    margin = mp_context(p).ldexp(1, -(p // 2))
    margin2 = ctx2.ldexp(1, -p)
    g0, amb = nearest_flagged(kind, h, margin)
    g0b, amb2 = nearest_flagged(kind, h2, margin2)
    if amb or amb2 or g0 != g0b:
        raise DigitUncertain("integer part of the seed lies on a domain boundary")
    cur, cur2 = left_divide(g0, h), left_divide(g0, h2)
    digits, iterates = [], [cur]
    reason = "uncertain"
    while True:
        if max_digits is not None and len(digits) >= max_digits:
            reason = "max_digits"
            break
        if gauge4(cur2) == 0:
            reason = "terminated"
            break
        g, nxt, amb = advance(kind, cur, margin)
        g2, nxt2, amb2 = advance(kind, cur2, margin2)
        if amb or amb2 or g != g2:
            break
        digits.append(g)
        iterates.append(nxt)
        cur, cur2 = nxt, nxt2
    return Expansion(kind, DigitSeq(g0, tuple(digits), reason == "terminated"), iterates,
                     reason, certified=len(digits), precision=p, resume=cur2)


def reconstruct(d: DigitSeq) -> HPoint:
    """Evaluate ``gamma_0 iota gamma_1 iota ... iota gamma_n`` (exactly on integer digits)."""
    seq = (d.gamma0,) + d.digits
    acc: HPoint = seq[-1]
    for i in range(len(seq) - 2, -1, -1):
        if acc == IDENTITY:
            raise InvalidDigits("continued fraction tail evaluates to 0 before inversion", i + 1)
        acc = mul(seq[i], koranyi_inv(acc))
    return acc


def a_gamma(g: HPoint) -> UMatrix:
    """``A_gamma = U(iota) U(gamma)`` for a lattice point ``gamma``."""
    alpha, beta = lattice_siegel(g)
    return UMatrix([[-beta, -alpha.conjugate(), -1], [alpha, 1, 0], [-1, 0, 0]])


def a_gamma_inv(g: HPoint) -> UMatrix:
    alpha, beta = lattice_siegel(g)
    return UMatrix([[0, 0, -1], [0, 1, alpha], [-1, -alpha.conjugate(), -beta.conjugate()]])


def _gint_matrix(m: UMatrix) -> UMatrix:
    return m.map(GaussianInt.coerce)


def convergent_matrix(digits: Sequence[HPoint]) -> UMatrix:
    """``Q_n`` as a plain product of ``A`` matrices."""
    q = _gint_matrix(UMatrix([[1, 0, 0], [0, 1, 0], [0, 0, 1]]))
    for g in digits:
        q = q @ _gint_matrix(a_gamma(g))
    return q


def reconstruct_via_matrices(d: DigitSeq) -> HPoint:
    """Same value as :func:`reconstruct`, computed as ``gamma_0 * A_1...A_n (1:0:0)``."""
    col = convergent_matrix(d.digits).column(0)
    tail = ProjVec(*col).to_siegel()
    return mul(d.gamma0, from_siegel(SiegelPoint(GaussianRational.coerce(tail.u),
                                                 GaussianRational.coerce(tail.v))))


@dataclass(frozen=True)
class ConvergentState:
    """Columns of ``Q_n``: first ``(q, r, p)``, tilde, and previous first column."""

    n: int
    q: GaussianInt
    r: GaussianInt
    p: GaussianInt
    q_prev: GaussianInt
    r_prev: GaussianInt
    p_prev: GaussianInt
    q_tilde: GaussianInt
    r_tilde: GaussianInt
    p_tilde: GaussianInt

    @property
    def sign(self) -> int:
        return -1 if self.n % 2 else 1

    def matrix(self) -> UMatrix:
        return UMatrix([[self.q, self.q_tilde, -self.q_prev],
                        [self.r, self.r_tilde, -self.r_prev],
                        [self.p, self.p_tilde, -self.p_prev]])

    def approximant(self) -> SiegelPoint:
        """``(r_n / q_n, p_n / q_n)``; the value of ``iota gamma_1 ... iota gamma_n``."""
        if not self.q:
            raise PointAtInfinity(f"q_{self.n} = 0")
        return SiegelPoint(self.r / self.q, self.p / self.q)

    def tilde_point(self) -> SiegelPoint | None:
        """``(r~_n / q~_n, p~_n / q~_n)``, or ``None`` when ``q~_n = 0``."""
        if not self.q_tilde:
            return None
        return SiegelPoint(self.r_tilde / self.q_tilde, self.p_tilde / self.q_tilde)


def _cross_tilde(sign: int, q, r, p, qp, rp, pp):
    return (sign * (r * qp - q * rp).conjugate(),
            sign * (p * qp - q * pp).conjugate(),
            sign * (p * rp - r * pp).conjugate())


def convergents(digits: Iterable[HPoint]) -> Iterator[ConvergentState]:
    """Stream of :class:`ConvergentState` for ``n = 0, 1, ...``.

    Starts from ``Q_0 = I``; each step appends one digit via
    ``(q, r, p)_{n+1} = Q_n (-beta, alpha, -1)`` and refreshes the tilde
    column from cross products of the two outer columns.
    """
    zero, one = GaussianInt(0), GaussianInt(1)
    st = ConvergentState(0, one, zero, zero, zero, zero, -one, zero, one, zero)
    yield st
    for g in digits:
        alpha, beta = lattice_siegel(g)
        nq = -beta * st.q + alpha * st.q_tilde + st.q_prev
        nr = -beta * st.r + alpha * st.r_tilde + st.r_prev
        np_ = -beta * st.p + alpha * st.p_tilde + st.p_prev
        n = st.n + 1
        sign = -1 if n % 2 else 1
        qt, rt, pt = _cross_tilde(sign, nq, nr, np_, st.q, st.r, st.p)
        st = ConvergentState(n, nq, nr, np_, st.q, st.r, st.p, qt, rt, pt)
        yield st


def convergent_list(digits: Sequence[HPoint]) -> list[ConvergentState]:
    return list(convergents(digits))


@dataclass(frozen=True)
class RationalSiegel:
    """A rational Heisenberg point as a primitive integer vector ``(q : r : p)``."""

    q: GaussianInt
    r: GaussianInt
    p: GaussianInt

    def __post_init__(self):
        for name in ("q", "r", "p"):
            object.__setattr__(self, name, GaussianInt.coerce(getattr(self, name)))
        if not self.q:
            raise ValueError("RationalSiegel needs a nonzero denominator q")
        # |r|^2 = 2 Re(p conj q) is the null constraint for (r/q, p/q)
        if self.r.norm() != 2 * (self.p * self.q.conjugate()).re:
            raise ValueError("(r/q, p/q) violates the null constraint")

    @classmethod
    def from_point(cls, h: HPoint) -> "RationalSiegel":
        """Primitive lift (Gaussian gcd 1) of an exact rational point."""
        s = to_siegel(HPoint(*(Fraction(c) for c in h)))
        den = math.lcm(s.u.den, s.v.den)
        vec = [GaussianInt(den), GaussianInt(s.u.re_num * (den // s.u.den), s.u.im_num * (den // s.u.den)),
               GaussianInt(s.v.re_num * (den // s.v.den), s.v.im_num * (den // s.v.den))]
        g = gint_gcd(gint_gcd(vec[0], vec[1]), vec[2])
        vec = [c.divmod_round(g)[0] for c in vec]
        return cls(*vec)

    def siegel(self) -> SiegelPoint:
        return SiegelPoint(self.r / self.q, self.p / self.q)

    def geometric(self) -> HPoint:
        return _geometric_from_vector(self.q, self.r, self.p)


def _geometric_from_vector(q: GaussianInt, r: GaussianInt, p: GaussianInt) -> HPoint:
    # u = r conj(q) / N, z = u (1 - i) / 2, t = Im(p conj q) / N
    n = q.norm()
    a = r * q.conjugate() * GaussianInt(1, -1)
    return HPoint(Fraction(a.re, 2 * n), Fraction(a.im, 2 * n), Fraction((p * q.conjugate()).im, n))


@dataclass
class ExactExpansion:
    digits: DigitSeq
    vectors: list[tuple[GaussianInt, GaussianInt, GaussianInt]]

    @property
    def denominators(self) -> list[GaussianInt]:
        return [v[0] for v in self.vectors]


def expand_exact(s: RationalSiegel, kind: DomainKind = DomainKind.CUBE) -> ExactExpansion:
    """Expand a rational point entirely in Gaussian-integer arithmetic.

    Each iterate is the integer vector ``-A_gamma^-1 (q, r, p)``; the sign is
    chosen so that the new denominator equals the previous ``p``. Norms of the
    denominators shrink by at least a factor of 2 per digit.
    """
    if not isinstance(s, RationalSiegel):
        s = RationalSiegel(*s)
    q, r, p = s.q, s.r, s.p
    g0, _ = nearest_flagged(kind, _geometric_from_vector(q, r, p))
    alpha, beta = lattice_siegel(g0)
    # U(gamma)^-1 = rows (1,0,0), (-alpha,1,0), (conj beta, -conj alpha, 1)
    q, r, p = q, r - alpha * q, beta.conjugate() * q - alpha.conjugate() * r + p
    vectors = [(q, r, p)]
    digits = []
    while p:
        # iota acts on the vector as (q, r, p) -> (-p, r, -q)
        g, _ = nearest_flagged(kind, _geometric_from_vector(-p, r, -q))
        alpha, beta = lattice_siegel(g)
        nq, nr, np_ = p, -r - alpha * p, q + alpha.conjugate() * r + beta.conjugate() * p
        if nq != vectors[-1][2]:
            raise InvariantViolation("denominator chain q^(i) = p^(i-1) broken")
        if nq.norm() * 2 > q.norm():
            raise InvariantViolation("denominator norm failed to halve")
        q, r, p = nq, nr, np_
        digits.append(g)
        vectors.append((q, r, p))
    return ExactExpansion(DigitSeq(g0, tuple(digits), True), vectors)


def approximant_point(d: DigitSeq, state: ConvergentState) -> HPoint:
    """Geometric value of ``gamma_0 iota gamma_1 ... iota gamma_n`` from the convergent."""
    a = state.approximant()
    return mul(d.gamma0, from_siegel(a))


@dataclass(frozen=True)
class ErrorCertificate:
    n: int
    dist4: object          # gauge distance^4 from the n-th approximant to h
    v_product2: object     # prod_{i<=n} |v_i|^2
    q_norm: int            # |q_n|^2
    cool_residual: object  # conj(p_n) - conj(r_n) u + conj(q_n) v - (-1)^n prod v_i

    @property
    def identity_residual(self):
        """``dist4 * |q_n|^2 - prod |v_i|^2``; zero exactly on rational input."""
        return self.dist4 * self.q_norm - self.v_product2

    @property
    def scaled_error(self):
        """``dist4 * |q_n|^2``, bounded by ``(1/2)^(n+1)``."""
        return self.dist4 * self.q_norm

    def bound_holds(self) -> bool:
        bound = Fraction(1, 2 ** (self.n + 1))
        if not isinstance(self.dist4, (int, Fraction)):
            bound = 0.5 ** (self.n + 1)
        return self.dist4 <= bound and self.scaled_error <= bound


def approx_error(exp: Expansion, state: ConvergentState, h: HPoint | None = None) -> ErrorCertificate:
    """Distance from the n-th approximant to ``h`` and its product form.

    The distance is computed geometrically; the product form uses only the
    Siegel ``v`` coordinates of the iterates ``h_0 .. h_n``. In fourth powers
    the two agree: ``dist4 * |q_n|^2 = prod |v_i|^2``.
    """
    n = state.n
    h0 = exp.iterates[0]
    if h is None:
        h = mul(exp.digits.gamma0, h0)
    approx = approximant_point(exp.digits, state)
    d4 = dist4(approx, h)
    sieg = [to_siegel(x) for x in exp.iterates[: n + 1]]
    prod = sieg[0].v
    for s in sieg[1:]:
        prod = prod * s.v
    u, v = sieg[0].u, sieg[0].v
    cool = (state.p.conjugate() - state.r.conjugate() * u + state.q.conjugate() * v
            - state.sign * prod)
    return ErrorCertificate(n, d4, _abs2(prod), state.q.norm(), cool)


def _abs2(c):
    if isinstance(c, GaussianRational):
        return c.abs2()
    return c.real * c.real + c.imag * c.imag


def classical_identity_residual(prev: ConvergentState, nxt: ConvergentState,
                                h0: SiegelPoint, h_next: SiegelPoint, sign: int = -1):
    """Residual of ``v - conj(r_n/q_n) u + conj(p_n/q_n) = sign / (conj(q_n) D)``

    with ``D = q_{n+1} + q~_{n+1} u_{n+1} - q_n v_{n+1}``. The identity holds
    with ``sign = -1``; ``sign = +1`` is kept for comparison.
    """
    u, v = h0.u, h0.v
    lhs = v - (prev.r / prev.q).conjugate() * u + (prev.p / prev.q).conjugate()
    den = nxt.q + nxt.q_tilde * h_next.u - nxt.q_prev * h_next.v
    return lhs - sign / (prev.q.conjugate() * den)


def fracqn_residuals(state: ConvergentState, sieg: Sequence[SiegelPoint]) -> tuple:
    """Residuals of ``Q_n (1, u_n, v_n) = (-1)^n (1/P, u/P, 1/P')``

    where ``P = v_0 v_1 ... v_{n-1}`` and ``P' = v_1 ... v_{n-1}``.
    """
    n = state.n
    u_n, v_n = sieg[n].u, sieg[n].v
    u, v = sieg[0].u, sieg[0].v
    lhs = state.matrix() @ (1, u_n, v_n)
    tail = GaussianRational(1)
    for s in sieg[1:n]:
        tail = tail * s.v
    full = v * tail
    rhs = (state.sign / full, state.sign * u / full, state.sign / tail)
    return tuple(a - b for a, b in zip(lhs, rhs))


def tilde_cross_residuals(state: ConvergentState, sign: int | None = None) -> tuple:
    """Tilde column minus ``sign`` times the conjugated cross products (default ``(-1)^n``)."""
    sign = state.sign if sign is None else sign
    qt, rt, pt = _cross_tilde(sign, state.q, state.r, state.p, state.q_prev, state.r_prev, state.p_prev)
    return state.q_tilde - qt, state.r_tilde - rt, state.p_tilde - pt


def qn2_residual(state: ConvergentState, signs: tuple[int, int, int] | None = None) -> UMatrix:
    """``conj(L) - diag(signs) M`` for the inverse-structure identity of ``Q_n``.

    ``L`` has rows ``(-p, r, -q)``, ``(-p~, r~, -q~)``, ``(-p', r', -q')``
    and ``M`` is the matching matrix of 2x2 minors. Both come from
    ``Q_n^-1 = J Q_n^dagger J = (-1)^n adj(Q_n)``; the residual vanishes for
    row signs ``(s, s, -s)`` with ``s = (-1)^n`` (the default).
    """
    s = state.sign
    signs = (s, s, -s) if signs is None else signs
    q, r, p = state.q, state.r, state.p
    qt, rt, pt = state.q_tilde, state.r_tilde, state.p_tilde
    qp, rp, pp = state.q_prev, state.r_prev, state.p_prev
    lhs = UMatrix([[-p, r, -q], [-pt, rt, -qt], [-pp, rp, -qp]]).map(lambda e: e.conjugate())
    rhs = UMatrix([
        [p * rt - pt * r, pt * q - qt * p, r * qt - rt * q],
        [pp * r - p * rp, p * qp - pp * q, rp * q - r * qp],
        [pp * rt - pt * rp, pt * qp - pp * qt, rp * qt - rt * qp],
    ])
    return UMatrix([[lhs[i, j] - signs[i] * rhs[i, j] for j in range(3)] for i in range(3)])


@dataclass(frozen=True)
class TildeReport:
    n: int
    point: SiegelPoint | None
    lower_ok: bool | None       # 4 |q_n|^2 <= |q~_n|^4
    upper_ok: bool | None       # |q~_n|^4 <= 4 |q_n|^2 |q_{n-1}|^2
    norm_identity: bool         # |q~_n|^2 = -2 Re(q_n conj q_{n-1})
    frac_residuals: tuple | None


def tilde_report(state: ConvergentState) -> TildeReport:
    """Checks on the tilde column of ``Q_n`` (bounds stated in squared norms)."""
    nq, nqt, nqp = state.q.norm(), state.q_tilde.norm(), state.q_prev.norm()
    norm_identity = nqt == -2 * (state.q * state.q_prev.conjugate()).re
    lower = upper = None
    if state.n >= 1:
        lower = 4 * nq <= nqt * nqt
        upper = nqt * nqt <= 4 * nq * nqp
    point = state.tilde_point()
    frac = None
    if point is not None:
        denom = state.q_tilde * state.q
        frac = (point.u - (state.r / state.q + state.sign * state.q.conjugate() / denom),
                point.v - (state.p / state.q + state.sign * state.r.conjugate() / denom))
    return TildeReport(state.n, point, lower, upper, norm_identity, frac)


def tilde_convergents(states: Iterable[ConvergentState]) -> Iterator[TildeReport]:
    for st in states:
        yield tilde_report(st)


def siegel_dist4(a: SiegelPoint, b: SiegelPoint):
    """Gauge-style distance^4 from ``a`` to ``b`` computed in Siegel coordinates.

    Uses ``w = conj(v_a) - conj(u_a) u_b + v_b`` and returns
    ``(|u_b - u_a|^2 / 2)^2 + Im(w)^2``; on the null cone this is exactly
    ``dist4``, and it stays meaningful when ``a`` is off the cone.
    """
    du = b.u - a.u
    w = a.v.conjugate() - a.u.conjugate() * b.u + b.v
    s = _abs2(du) / 2
    return s * s + w.imag * w.imag


PRINGSHEIM_GAUGE4 = 81
_RAD = 2.0 ** -0.25


def pringsheim_bound(n: int) -> float:
    """Certified gauge diameter of the n-th cylinder for digits of gauge >= 3."""
    return (3 - _RAD) ** (-2 * n) * 2 * _RAD


@dataclass
class PringsheimResult:
    digits: list[HPoint]
    approximant: HPoint
    bound: float
    history: list[tuple[int, HPoint, float]] = field(default_factory=list)


def pringsheim_eval(stream: Iterable, tolerance: float, strict: bool = False,
                    max_terms: int = 10_000) -> PringsheimResult:
    """Evaluate ``iota g_1 iota g_2 ...`` for digits of gauge at least 3.

    Terms are consumed until the certified cylinder diameter falls below
    ``tolerance``. ``strict=True`` demands gauge strictly greater than 3.
    """
    digits: list[HPoint] = []
    history = []
    states = None
    st = None
    for i, g in enumerate(stream, start=1):
        g = HPoint(*HPoint(*g).as_ints())
        g4 = lattice_gauge4(g)
        if g4 < PRINGSHEIM_GAUGE4 or (strict and g4 == PRINGSHEIM_GAUGE4):
            raise InvalidDigits(f"digit {g.as_ints()} has gauge below 3", i)
        digits.append(g)
        if states is None:
            states = _StreamingConvergents()
        st = states.push(g)
        point = from_siegel(st.approximant())
        bound = pringsheim_bound(i)
        history.append((i, point, bound))
        if bound < tolerance:
            return PringsheimResult(digits, point, bound, history)
        if i >= max_terms:
            break
    if st is None:
        raise ValueError("empty digit stream")
    return PringsheimResult(digits, history[-1][1], history[-1][2], history)


class _StreamingConvergents:
    """Incremental wrapper around :func:`convergents` for digit streams."""

    def __init__(self):
        self._pending: list[HPoint] = []
        self._gen = convergents(self._feed())
        next(self._gen)

    def _feed(self):
        while True:
            yield self._pending.pop()

    def push(self, g: HPoint) -> ConvergentState:
        self._pending.append(g)
        return next(self._gen)
