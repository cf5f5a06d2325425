"""Compiled float64 kernels for long orbits and bulk domain membership.

These mirror :mod:`heiscf.lattice` and :func:`heiscf.cf.advance` operation for
operation, including the Dirichlet tie rule, but run on machine doubles.
Results past the certified prefix of an orbit come from here.
"""

from __future__ import annotations

import math

import numba
import numpy as np

CUBE, DIRICHLET = 0, 1


def kind_code(kind) -> int:
    """Kernel code of a domain kind; integer codes pass through."""
    if isinstance(kind, (int, np.integer)):
        return int(kind)
    return CUBE if kind.value == "cube" else DIRICHLET


@numba.njit(cache=True)
def _nearest_cube(x, y, t):
    gx = math.floor(x + 0.5)
    gy = math.floor(y + 0.5)
    tt = t - 2.0 * (gx * y - gy * x)
    gt = math.floor(tt + 0.5)
    return gx, gy, gt


@numba.njit(cache=True)
def _nearest_dirichlet(x, y, t):
    cx = round(x)
    cy = round(y)
    bd = np.inf
    brx = bry = brt = -np.inf
    bgx = bgy = bgt = 0.0
    for gx in range(int(cx) - 1, int(cx) + 2):
        for gy in range(int(cy) - 1, int(cy) + 2):
            rx = x - gx
            ry = y - gy
            tt = t - 2.0 * (gx * y - gy * x)
            s = rx * rx + ry * ry
            s2 = s * s
            base = math.floor(tt)
            for k in range(2):
                gt = base + k
                rt = tt - gt
                d = s2 + rt * rt
                better = d < bd
                if not better and d == bd:
                    # lexicographically larger remainder wins ties
                    if rx > brx or (rx == brx and (ry > bry or (ry == bry and rt > brt))):
                        better = True
                if better:
                    bd = d
                    brx, bry, brt = rx, ry, rt
                    bgx, bgy, bgt = float(gx), float(gy), gt
    return bgx, bgy, bgt


@numba.njit(cache=True)
def _nearest(code, x, y, t):
    if code == 0:
        return _nearest_cube(x, y, t)
    return _nearest_dirichlet(x, y, t)


@numba.njit(cache=True)
def orbit_tail(code, x, y, t, n):
    """``n`` Gauss-map steps from ``(x, y, t)``; stops early on reaching 0.

    Returns ``(digits, points, steps)`` where rows past ``steps`` are unused.
    """
    digits = np.zeros((n, 3), dtype=np.int64)
    points = np.zeros((n, 3), dtype=np.float64)
    steps = 0
    for i in range(n):
        s = x * x + y * y
        nn = s * s + t * t
        if nn == 0.0:
            break
        wx = -(x * s + y * t) / nn
        wy = -(y * s - x * t) / nn
        wt = -t / nn
        gx, gy, gt = _nearest(code, wx, wy, wt)
        x, y, t = wx - gx, wy - gy, wt - gt - 2.0 * (gx * wy - gy * wx)
        digits[i, 0] = int(gx)
        digits[i, 1] = int(gy)
        digits[i, 2] = int(gt)
        points[i, 0] = x
        points[i, 1] = y
        points[i, 2] = t
        steps += 1
    return digits, points, steps


@numba.njit(cache=True)
def nearest_many(code, xs, ys, ts):
    """Nearest lattice points for arrays of float64 coordinates."""
    n = xs.shape[0]
    out = np.zeros((n, 3), dtype=np.int64)
    for i in range(n):
        gx, gy, gt = _nearest(code, xs[i], ys[i], ts[i])
        out[i, 0] = int(gx)
        out[i, 1] = int(gy)
        out[i, 2] = int(gt)
    return out


def in_domain_many(kind, xs, ys, ts) -> np.ndarray:
    """Boolean mask of points whose nearest lattice point is the origin."""
    g = nearest_many(kind_code(kind), np.ascontiguousarray(xs, dtype=np.float64),
                     np.ascontiguousarray(ys, dtype=np.float64),
                     np.ascontiguousarray(ts, dtype=np.float64))
    return ~g.any(axis=1)
