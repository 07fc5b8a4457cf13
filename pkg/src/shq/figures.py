"""Companion figures for report files.

Rendering is opt-in: the command line only calls these when a figures
directory is requested, and the delimited report stays the primary
artifact.  The Agg backend writes PNG files straight to disk.
"""

from __future__ import annotations

import os

__all__ = ["verify_figure", "solve_figure", "probe_figure", "figure_path"]


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def verify_figure(results: list, path: str) -> str:
    """Horizontal bars of worst margins per check family."""
    plt = _pyplot()
    worst = {}
    for r in results:
        key = r.name
        v = abs(r.worst_margin)
        worst[key] = max(worst.get(key, 0.0), v)
    names = sorted(worst)
    values = [max(worst[n], 1e-18) for n in names]
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(names) + 1.2))
    ax.barh(range(len(names)), values, color="#33658a")
    ax.set_yticks(range(len(names)), names, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("worst |margin| across the sweep")
    ax.set_title("verification sweep margins")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def solve_figure(solution, path: str) -> str:
    """Center-plane heatmap of the computed solution."""
    plt = _pyplot()
    grid = solution.grid
    shape = grid.shape
    full = solution.u.reshape(shape)
    if len(shape) == 3:
        full = full[:, :, shape[2] // 2]
    fig, ax = plt.subplots(figsize=(5.4, 4.6))
    im = ax.imshow(full.T, origin="lower", cmap="viridis")
    fig.colorbar(im, ax=ax, label="u")
    ax.set_title(f"solution, center plane, mesh {shape[0]}")
    ax.set_xlabel("x index")
    ax.set_ylabel("y index")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def probe_figure(report, path: str) -> str:
    """Mesh-refinement traces of the probed suprema."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.8, 4.2))
    seq = report.mesh_sequence or []
    if seq:
        hs = [h for h, _ in seq]
        vs = [v for _, v in seq]
        ax.plot(hs, vs, "o-", color="#86bbd8", label="sup vs h")
        ax.set_xlabel("mesh spacing h")
        ax.invert_xaxis()
    if report.sup_pogorelov:
        betas = sorted(report.sup_pogorelov)
        ax.plot(
            betas,
            [report.sup_pogorelov[b] for b in betas],
            "s--",
            color="#f6ae2d",
            label="sup vs beta",
        )
        ax.set_xlabel("beta (squares) / h (circles)")
    ax.set_ylabel("probed supremum")
    ax.set_title(f"{report.kind} probe")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def figure_path(directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)
