"""Static figures written next to the CSV/JSON outputs of the CLI."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def histogram_scatter(hist, path, title: str | None = None) -> Path:
    """3D scatter of bin centres with marker area proportional to the bin count."""
    centres = hist.bin_centres().reshape(-1, 3)
    counts = hist.counts.reshape(-1).astype(float)
    keep = counts > 0
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    size = 400 * counts[keep] / counts.max() if keep.any() else counts[keep]
    ax.scatter(*centres[keep].T, s=size, c=counts[keep], cmap="viridis", alpha=0.6, depthshade=False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("t")
    ax.set_title(title or f"empirical invariant measure ({hist.kind.value}, {hist.total} points)")
    return _save(fig, path)


def orbit_projections(points: np.ndarray, path, certified: int = 0, title: str | None = None) -> Path:
    """Three coordinate projections of an orbit; the certified prefix is highlighted."""
    fig, axes = plt.subplots(1, 3, figsize=(12, 4))
    pairs = ((0, 1, "x", "y"), (0, 2, "x", "t"), (1, 2, "y", "t"))
    pts = points[:200_000]
    for ax, (i, j, a, b) in zip(axes, pairs):
        ax.scatter(pts[:, i], pts[:, j], s=0.2, alpha=0.3, color="tab:blue", rasterized=True)
        if certified:
            ax.scatter(points[:certified, i], points[:certified, j], s=6, color="tab:red", label="certified")
        ax.set_xlabel(a)
        ax.set_ylabel(b)
        ax.set_aspect("equal", adjustable="datalim")
    if certified:
        axes[0].legend(loc="upper right", fontsize=8)
    fig.suptitle(title or f"orbit ({len(points)} iterates)")
    return _save(fig, path)


def digit_frequencies(freqs: dict, path, top: int = 30) -> Path:
    items = sorted(freqs.items(), key=lambda kv: -kv[1])[:top]
    fig, ax = plt.subplots(figsize=(10, 4))
    ax.bar(range(len(items)), [v for _, v in items], color="tab:blue")
    ax.set_xticks(range(len(items)))
    ax.set_xticklabels([str(k) for k, _ in items], rotation=70, fontsize=7)
    ax.set_ylabel("relative frequency")
    ax.set_title(f"most frequent digits (top {len(items)})")
    return _save(fig, path)


def growth_curve(growth: Sequence[float], path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    n = np.arange(1, len(growth) + 1)
    ax.plot(n, growth, lw=1)
    ax.set_xlabel("n")
    ax.set_ylabel("log |q_n|^2 / n")
    ax.set_title("growth of convergent denominators")
    return _save(fig, path)


def convergence_curve(ns: Sequence[int], series: dict[str, Sequence[float]], path, ylabel: str) -> Path:
    """Log-scale plot of one or more error sequences against ``n``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, ys in series.items():
        ys = np.asarray(ys, dtype=float)
        ok = ys > 0
        ax.semilogy(np.asarray(ns)[ok], ys[ok], marker=".", lw=1, label=label)
    ax.set_xlabel("n")
    ax.set_ylabel(ylabel)
    ax.legend(fontsize=8)
    return _save(fig, path)


def cylinder_scatter(points: np.ndarray, path, title: str) -> Path:
    fig = plt.figure(figsize=(6, 5))
    ax = fig.add_subplot(projection="3d")
    if len(points):
        ax.scatter(*points[:20000].T, s=0.5, alpha=0.4)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_zlabel("t")
    ax.set_title(title)
    return _save(fig, path)
