"""Gauss-map orbits, histograms of the empirical invariant measure, cylinders."""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fast
from .cf import (
    InvalidDigits, advance, convergents, expand, is_exact_point,
)
from .geometric import HPoint, IDENTITY, dist4, gauge4, koranyi_inv, mul
from .lattice import DomainKind, in_domain
from .scalars import mp_context

NAMED_CONSTANTS = ("pi-3", "e-3", "sqrt2-1")


def named_constant(name: str, precision: int):
    """One of the named irrational seeds, rounded once at ``precision`` bits."""
    ctx = mp_context(precision)
    key = name.strip().lower()
    if key == "pi-3":
        return ctx.pi - 3
    if key == "e-3":
        return ctx.e - 3
    if key == "sqrt2-1":
        return ctx.sqrt(2) - 1
    raise ValueError(f"unknown named constant {name!r}; expected one of {', '.join(NAMED_CONSTANTS)}")


def gauss_step(h: HPoint, kind: DomainKind) -> tuple[HPoint, HPoint]:
    """``T h = [iota h]^-1 iota h`` for ``h`` in the domain, with its digit."""
    if gauge4(h) == 0:
        raise ValueError("the Gauss map is undefined at the identity")
    if not in_domain(kind, h):
        raise ValueError(f"{h} is not in the {kind.value} domain")
    g, out, _ = advance(kind, h)
    return g, out


@dataclass(frozen=True)
class PrecisionPolicy:
    """Working precision for irrational seeds and whether to run past certification."""

    bits: int = 256
    tail: bool = True

    def __post_init__(self):
        if self.bits < 16:
            raise ValueError("precision must be at least 16 bits")


@dataclass
class OrbitRecord:
    """Iterates ``h_1 .. h_n`` of the Gauss map with their digits.

    ``start`` is ``h_0 = gamma_0^-1 h``. Rows ``[:certified]`` come from the
    certified expansion; later rows are the float64 statistical tail.
    """

    kind: DomainKind
    seed: HPoint
    gamma0: HPoint
    start: HPoint
    digits: np.ndarray
    points: np.ndarray
    certified: int
    terminated: bool
    precision: int | None = None
    truncated: bool = False
    exact_points: list[HPoint] | None = None

    def __len__(self):
        return len(self.digits)

    @property
    def gauge4(self) -> np.ndarray:
        x, y, t = self.points.T
        s = x * x + y * y
        return s * s + t * t

    @property
    def siegel(self) -> tuple[np.ndarray, np.ndarray]:
        x, y, t = self.points.T
        return (x - y) + 1j * (x + y), (x * x + y * y) + 1j * t

    @property
    def has_tail(self) -> bool:
        return len(self) > self.certified

    def digit_points(self) -> list[HPoint]:
        return [HPoint(*map(int, d)) for d in self.digits]


def orbit(h: HPoint, kind: DomainKind, n: int, policy: PrecisionPolicy = PrecisionPolicy()) -> OrbitRecord:
    """Run the Gauss map ``n`` times (or until the orbit reaches 0).

    Rational seeds are iterated exactly and every step is certified. Floating
    seeds are expanded at ``policy.bits`` with doubled-precision checking; if
    ``policy.tail`` is set the orbit continues from the last certified iterate
    in float64, otherwise it stops there with ``truncated`` set.
    """
    if n < 1:
        raise ValueError("orbit length must be at least 1")
    if is_exact_point(h):
        e = expand(h, kind, max_digits=n)
        return OrbitRecord(kind, h, e.digits.gamma0, e.iterates[0],
                           np.array([d.as_ints() for d in e.digits.digits], dtype=np.int64).reshape(-1, 3),
                           np.array([[float(c) for c in p] for p in e.iterates[1:]], dtype=np.float64).reshape(-1, 3),
                           len(e.digits), e.finite, exact_points=e.iterates[1:])
    if getattr(h.x, "context", None) is None:
        ctx = mp_context(policy.bits)
        h = h.map(lambda c: ctx.mpf(c))
    e = expand(h, kind, max_digits=n)
    digits = [d.as_ints() for d in e.digits.digits]
    points = [[float(c) for c in p] for p in e.iterates[1:]]
    certified = len(digits)
    terminated = e.finite
    truncated = False
    if len(digits) < n and not terminated:
        if policy.tail:
            r = e.resume
            td, tp, steps = fast.orbit_tail(fast.kind_code(kind), float(r.x), float(r.y), float(r.t),
                                            n - len(digits))
            digits.extend(map(tuple, td[:steps]))
            points.extend(tp[:steps].tolist())
            terminated = steps < n - certified
        else:
            truncated = True
    return OrbitRecord(kind, h, e.digits.gamma0, e.iterates[0].map(float),
                       np.array(digits, dtype=np.int64).reshape(-1, 3),
                       np.array(points, dtype=np.float64).reshape(-1, 3),
                       certified, terminated, precision=e.precision, truncated=truncated)


@dataclass
class Histogram3D:
    """Bin counts over the bounding box of a fundamental domain."""

    kind: DomainKind
    counts: np.ndarray
    dropped: int = 0

    @property
    def shape(self) -> tuple[int, int, int]:
        return tuple(self.counts.shape)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def box(self):
        return self.kind.box

    def merge(self, other: "Histogram3D") -> "Histogram3D":
        if other.kind is not self.kind or other.shape != self.shape:
            raise ValueError("histograms must share domain kind and grid")
        return Histogram3D(self.kind, self.counts + other.counts, self.dropped + other.dropped)

    def normalized(self) -> np.ndarray:
        total = self.total
        if total == 0:
            raise ValueError("cannot normalise an empty histogram")
        return self.counts / total

    def tv_distance(self, other: "Histogram3D") -> float:
        """Total-variation distance between the normalised histograms."""
        if other.shape != self.shape:
            raise ValueError("histograms must share the grid")
        return 0.5 * float(np.abs(self.normalized() - other.normalized()).sum())

    def coarsen(self, factor: int) -> "Histogram3D":
        nx, ny, nt = self.shape
        if nx % factor or ny % factor or nt % factor:
            raise ValueError("grid is not divisible by the coarsening factor")
        c = self.counts.reshape(nx // factor, factor, ny // factor, factor, nt // factor, factor)
        return Histogram3D(self.kind, c.sum(axis=(1, 3, 5)), self.dropped)

    def bin_centres(self) -> np.ndarray:
        axes = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for (lo, hi), n in zip(self.box, self.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def rows(self):
        for (ix, iy, it), c in np.ndenumerate(self.counts):
            yield ix, iy, it, int(c)


def bin_points(kind: DomainKind, points: np.ndarray, grid: Sequence[int]) -> Histogram3D:
    grid = tuple(int(g) for g in grid)
    if len(grid) != 3 or min(grid) < 1:
        raise ValueError("grid needs three positive sizes")
    counts = np.zeros(grid, dtype=np.int64)
    if len(points) == 0:
        return Histogram3D(kind, counts)
    idx = []
    ok = np.ones(len(points), dtype=bool)
    for j, ((lo, hi), n) in enumerate(zip(kind.box, grid)):
        k = np.floor((points[:, j] - lo) / (hi - lo) * n).astype(np.int64)
        ok &= (k >= 0) & (k < n)
        idx.append(k)
    np.add.at(counts, tuple(k[ok] for k in idx), 1)
    return Histogram3D(kind, counts, int((~ok).sum()))


def birkhoff_histogram(h: HPoint, kind: DomainKind, n: int, grid: Sequence[int] = (8, 8, 8),
                       policy: PrecisionPolicy = PrecisionPolicy()) -> tuple[Histogram3D, OrbitRecord]:
    """Histogram of ``h_1 .. h_n``; deterministic for a fixed seed, policy and grid."""
    rec = orbit(h, kind, n, policy)
    return bin_points(kind, rec.points, grid), rec


def interior_bins(kind: DomainKind, grid: Sequence[int], samples_per_bin: int = 64,
                  rng: np.random.Generator | None = None, margin: float = 1e-6) -> np.ndarray:
    """Mask of bins that contain sampled points strictly inside the domain.

    A point is counted as interior when its nearest lattice point stays the
    origin under perturbations of size ``margin`` in every coordinate.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    grid = tuple(grid)
    mask = np.zeros(grid, dtype=bool)
    box = kind.box
    for ijk in np.ndindex(*grid):
        lo = [b[0] + i * (b[1] - b[0]) / n for b, i, n in zip(box, ijk, grid)]
        hi = [b[0] + (i + 1) * (b[1] - b[0]) / n for b, i, n in zip(box, ijk, grid)]
        pts = rng.uniform(lo, hi, size=(samples_per_bin, 3))
        inside = np.ones(samples_per_bin, dtype=bool)
        for dx in (-margin, margin):
            for axis in range(3):
                p = pts.copy()
                p[:, axis] += dx
                inside &= fast.in_domain_many(kind, p[:, 0], p[:, 1], p[:, 2])
        mask[ijk] = bool(inside.any())
    return mask


@dataclass
class DigitStats:
    counts: Counter
    frequencies: dict[tuple[int, int, int], float]
    growth: np.ndarray          # log |q_n|^2 / n for n = 1 .. len
    certified: int
    norm_drops: int = 0         # steps with |q_{n+1}|^2 < |q_n|^2 (measured, never asserted)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def digit_stats(record: OrbitRecord, growth_limit: int | None = None) -> DigitStats:
    """Digit frequencies and the growth rate ``log |q_n|^2 / n`` of convergents.

    The growth sequence is computed exactly from Gaussian-integer convergents
    over the first ``growth_limit`` digits (default: the certified prefix).
    """
    counts = Counter(tuple(int(c) for c in d) for d in record.digits)
    total = sum(counts.values())
    freqs = {k: v / total for k, v in counts.items()} if total else {}
    limit = record.certified if growth_limit is None else min(growth_limit, len(record))
    growth = np.zeros(limit)
    drops = 0
    prev = None
    for st in convergents(HPoint(*map(int, d)) for d in record.digits[:limit]):
        nq = st.q.norm()
        if st.n:
            growth[st.n - 1] = _log_int(nq) / st.n
        if prev is not None and nq < prev:
            drops += 1
        prev = nq
    return DigitStats(counts, freqs, growth, record.certified, drops)


def _log_int(n: int) -> float:
    return math.log(n) if n > 0 else -math.inf


def relative_fluctuation(seq: np.ndarray) -> float:
    """``(max - min) / mean`` over the second half of a sequence."""
    tail = np.asarray(seq[len(seq) // 2:], dtype=float)
    return float((tail.max() - tail.min()) / abs(tail.mean()))


@dataclass(frozen=True)
class CylinderWord:
    digits: tuple[HPoint, ...]
    kind: DomainKind = DomainKind.CUBE

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(HPoint(*HPoint(*d).as_ints()) for d in self.digits))
        for i, d in enumerate(self.digits, start=1):
            if d == IDENTITY:
                raise InvalidDigits("cylinder digits must be nonzero", i)

    def __len__(self):
        return len(self.digits)

    def extend(self, g: HPoint) -> "CylinderWord":
        return CylinderWord(self.digits + (g,), self.kind)


def cylinder_map(w: CylinderWord, h: HPoint) -> HPoint:
    """``iota gamma_1 iota gamma_2 ... iota gamma_n h``; works on numpy arrays too."""
    acc = h
    for i in range(len(w.digits) - 1, -1, -1):
        acc = mul(w.digits[i], acc)
        if not isinstance(acc.x, np.ndarray) and gauge4(acc) == 0:
            raise InvalidDigits("inversion of 0 inside the cylinder map", i + 1)
        acc = koranyi_inv(acc)
    return acc


@dataclass
class CylinderProbe:
    samples: int
    hits: int              # sampled images that land in the domain, i.e. points of C_w
    diameter: float        # largest sampled gauge distance between points of C_w
    full: bool             # every sampled image landed in the domain
    points: np.ndarray = field(repr=False, default=None)


def sample_domain(kind: DomainKind, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` uniform samples from the fundamental domain (rejection from its box)."""
    out = []
    got = 0
    box = np.array(kind.box)
    while got < n:
        p = rng.uniform(box[:, 0], box[:, 1], size=(2 * (n - got) + 16, 3))
        p = p[fast.in_domain_many(kind, p[:, 0], p[:, 1], p[:, 2])]
        out.append(p)
        got += len(p)
    return np.concatenate(out)[:n]


def cylinder_probe(w: CylinderWord, samples: int = 20000, rng: np.random.Generator | None = None,
                   pair_limit: int = 3000) -> CylinderProbe:
    """Estimate the cylinder ``C_w`` (points whose expansion begins with ``w``) by sampling.

    Points ``k`` of ``K`` are pulled back through ``iota gamma_n``, then
    ``iota gamma_{n-1}``, and so on; an image belongs to ``C_w`` when every
    intermediate point stays in ``K``. The cylinder is reported as
    empirically full (``T^n C_w = K``) when every sample survives. This is a
    sampling surrogate, not a proof.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    pts = sample_domain(w.kind, samples, rng)
    x, y, t = pts.T
    alive = np.ones(len(pts), dtype=bool)
    for g in reversed(w.digits):
        acc = mul(g, HPoint(x, y, t))
        alive &= gauge4(acc) > 0
        # dead samples are parked at (0, 0, 1) so the inversion stays finite
        img = koranyi_inv(HPoint(np.where(alive, acc.x, 0.0), np.where(alive, acc.y, 0.0),
                                 np.where(alive, acc.t, 1.0)))
        x, y, t = img.x, img.y, img.t
        alive &= fast.in_domain_many(w.kind, x, y, t)
    cpts = np.stack([x[alive], y[alive], t[alive]], axis=1)
    return CylinderProbe(samples, int(alive.sum()), sampled_diameter(cpts, pair_limit),
                         bool(alive.all()), cpts)


def leading_digits(kind: DomainKind, pts: np.ndarray, n: int) -> np.ndarray:
    """First ``n`` float64 digits of each point (rows of ``pts``), shape ``(len, n, 3)``."""
    out = np.zeros((len(pts), n, 3), dtype=np.int64)
    code = fast.kind_code(kind)
    for i, (x, y, t) in enumerate(pts):
        d, _, _ = fast.orbit_tail(code, float(x), float(y), float(t), n)
        out[i] = d
    return out


def cylinder_nesting(w: CylinderWord, probe: CylinderProbe) -> float:
    """Fraction of sampled points of ``C_w`` whose own expansion starts with ``w``."""
    if probe.hits == 0:
        return 1.0
    digs = leading_digits(w.kind, probe.points, len(w))
    target = np.array([d.as_ints() for d in w.digits], dtype=np.int64)
    return float((digs == target).all(axis=(1, 2)).mean())


def sampled_diameter(pts: np.ndarray, pair_limit: int = 3000) -> float:
    """Largest gauge distance over (a subsample of) the given points."""
    if len(pts) < 2:
        return 0.0
    if len(pts) > pair_limit:
        pts = pts[np.linspace(0, len(pts) - 1, pair_limit).astype(int)]
    best = 0.0
    for i in range(len(pts) - 1):
        a = HPoint(*pts[i])
        b = HPoint(pts[i + 1:, 0], pts[i + 1:, 1], pts[i + 1:, 2])
        best = max(best, float(dist4(a, b).max()))
    return best ** 0.25


def budgeted_histogram(h: HPoint, kind: DomainKind, n: int, grid: Sequence[int],
                       policy: PrecisionPolicy, time_budget: float | None = None,
                       chunk: int = 200_000) -> tuple[Histogram3D, OrbitRecord, bool]:
    """Like :func:`birkhoff_histogram` but stops early when ``time_budget`` seconds pass.

    The orbit is produced in chunks; a partial result is flagged by the third
    return value being ``False``.
    """
    start = time.monotonic()
    first = min(n, chunk)
    rec = orbit(h, kind, first, policy)
    hist = bin_points(kind, rec.points, grid)
    digits, points = [rec.digits], [rec.points]
    done = len(rec)
    complete = True
    while done < n and not rec.terminated and not rec.truncated:
        if time_budget is not None and time.monotonic() - start > time_budget:
            complete = False
            break
        last = points[-1][-1]
        steps = min(chunk, n - done)
        td, tp, got = fast.orbit_tail(fast.kind_code(kind), float(last[0]), float(last[1]),
                                      float(last[2]), steps)
        digits.append(td[:got])
        points.append(tp[:got])
        hist = hist.merge(bin_points(kind, tp[:got], grid))
        done += got
        if got < steps:
            rec.terminated = True
    rec.digits = np.concatenate(digits)
    rec.points = np.concatenate(points)
    return hist, rec, complete
