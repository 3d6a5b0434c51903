"""Report figures rendered to files alongside the delimited exports.

Everything here is optional presentation: kernel heatmaps, center
cross-sections (horizontal in blue, vertical in orange) and the
displacement quiver. The CSV/PGM exports remain the canonical data;
these figures exist so a kernel or an evaluation run can be inspected
without loading the raw exports into another tool.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .alsf import DisplacementField


def save_kernel_heatmaps(
    path: str | Path, apsf: np.ndarray, alsf: np.ndarray
) -> Path:
    """Side-by-side log-scaled heatmaps of the two kernels."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 4.2))
    for ax, kern, title in ((axes[0], apsf, "isotropic"), (axes[1], alsf, "warped")):
        floor = kern[kern > 0].min() if (kern > 0).any() else 1e-12
        ax.imshow(np.log10(np.maximum(kern, floor)), cmap="inferno")
        ax.set_title(title)
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_cross_sections(path: str | Path, apsf: np.ndarray, alsf: np.ndarray) -> Path:
    """Center-row and center-column profiles of both kernels."""
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6), sharey=True)
    for ax, kern, title in ((axes[0], apsf, "isotropic"), (axes[1], alsf, "warped")):
        c = kern.shape[0] // 2
        offsets = np.arange(kern.shape[0]) - c
        ax.plot(offsets, kern[c, :], color="tab:blue", label="horizontal")
        ax.plot(offsets, kern[:, c], color="tab:orange", label="vertical")
        ax.set_title(title)
        ax.set_xlabel("offset from center (px)")
        ax.legend()
    axes[0].set_ylabel("weight")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_field_quiver(path: str | Path, field: DisplacementField, max_arrows: int = 33) -> Path:
    """Subsampled arrow plot of the displacement field."""
    s = field.size
    step = max(1, math.ceil(s / max_arrows))
    coords = np.arange(0, s, step)
    xx, yy = np.meshgrid(coords, coords)
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    ax.quiver(
        xx,
        yy,
        field.dx[yy, xx],
        -field.dy[yy, xx],  # matplotlib y grows upward; image rows grow down
        angles="xy",
        scale_units="xy",
        scale=1.0,
        width=0.002,
        color="tab:blue",
    )
    ax.set_aspect("equal")
    ax.invert_yaxis()
    ax.set_title("displacement field")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def save_metric_histograms(path: str | Path, rows) -> Path:
    """PSNR/SSIM distributions for an evaluation run."""
    psnrs = [row[2] for row in rows if math.isfinite(row[2])]
    ssims = [row[3] for row in rows]
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.6))
    axes[0].hist(psnrs, bins=min(20, max(5, len(psnrs))), color="tab:blue")
    axes[0].set_xlabel("PSNR (dB)")
    axes[0].set_ylabel("pairs")
    axes[1].hist(ssims, bins=min(20, max(5, len(ssims))), color="tab:orange")
    axes[1].set_xlabel("SSIM")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
