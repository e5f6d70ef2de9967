"""Figure rendering for the experiment reports; every figure goes straight
to a file next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["save_sweep_figure", "save_image_figure"]


def save_sweep_figure(aggregates, path) -> Path:
    """Mean relative error vs measurement count, one line per sparsity
    level and one panel per wrap period."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    r_values = sorted({agg.r for agg in aggregates})
    s_values = sorted({agg.s for agg in aggregates})

    fig, axes = plt.subplots(
        1, len(r_values), figsize=(4.2 * len(r_values), 3.4), sharey=True, squeeze=False
    )
    for ax, r in zip(axes[0], r_values):
        for s in s_values:
            cells = sorted(
                (agg for agg in aggregates if agg.r == r and agg.s == s),
                key=lambda agg: agg.m,
            )
            ax.plot(
                [agg.m for agg in cells],
                [agg.mean_rel_error for agg in cells],
                marker="o",
                markersize=3.5,
                linewidth=1.2,
                label=f"s = {s}",
            )
        ax.set_xlabel("measurements m")
        ax.set_title(f"R = {r:g}")
        ax.grid(True, alpha=0.3)
    axes[0][0].set_ylabel("mean relative error")
    axes[0][-1].legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_image_figure(result, path) -> Path:
    """Four-panel report for one image run: original, s-term reference,
    recovery, and absolute residual."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    panels = [
        ("original", result.original),
        (f"{result.s}-term reference", result.reference),
        (f"recovered ({result.psnr_vs_sparsified:.1f} dB vs ref)", result.recovered),
        ("abs residual", result.residual),
    ]
    fig, axes = plt.subplots(1, 4, figsize=(12.5, 3.4))
    for ax, (title, img) in zip(axes, panels):
        ax.imshow(img, cmap="gray", vmin=0.0, vmax=1.0, interpolation="nearest")
        ax.set_title(title, fontsize=9)
        ax.axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
