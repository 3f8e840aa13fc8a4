"""Figure rendering for the CLI report paths.

Every subcommand that writes delimited output also renders a small PNG next
to it; the figures carry constant metadata so repeated runs stay
byte-identical.  All rendering goes through the Agg backend.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_PNG_META = {"Software": "empstab"}


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=_PNG_META)
    plt.close(fig)
    return path


def plot_measures(path, grid, labelled_measures, title=""):
    """Step-density overlay of measures (weights / cell width)."""
    fig, ax = plt.subplots(figsize=(7, 3.2))
    centers = grid.centers
    for label, mu in labelled_measures:
        ax.step(centers, mu.weights / grid.delta, where="mid", lw=1.0, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    if len(labelled_measures) > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    return _save(fig, path)


def plot_sweep(path, eps_values, distances, title=""):
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(eps_values, distances, "o-")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("noise level")
    ax.set_ylabel("W1 to zero-noise empiric")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_membership(path, x_grid, membership, title=""):
    fig, ax = plt.subplots(figsize=(7, 2.2))
    x = np.asarray(x_grid)
    m = np.asarray(membership, dtype=bool)
    ax.scatter(x[m], np.ones(m.sum()), s=4, color="tab:blue", label="member")
    ax.scatter(x[~m], np.zeros((~m).sum()), s=4, color="tab:red", label="non-member")
    ax.set_yticks([0, 1])
    ax.set_yticklabels(["out", "in"])
    ax.set_xlabel("initial state")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_kernel(path, kernel, title=""):
    """Downsampled heat map of the transition matrix."""
    n = kernel.grid.n_cells
    dense = kernel.rows.toarray()
    stride = max(1, n // 512)
    fig, ax = plt.subplots(figsize=(4.6, 4.2))
    im = ax.imshow(dense[::stride, ::stride], origin="lower", aspect="auto",
                   extent=(0, 1, 0, 1), cmap="viridis")
    fig.colorbar(im, ax=ax, label="transition mass")
    ax.set_xlabel("destination")
    ax.set_ylabel("source")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_block_entropy(path, block_table, lyapunov, title=""):
    rows = np.asarray(block_table, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(rows[:, 0], rows[:, 2], "o-", label="H_m - H_{m-1}")
    ax.axhline(lyapunov, color="tab:red", lw=1.0, ls="--", label="Lyapunov integral")
    ax.set_xlabel("block depth m")
    ax.set_ylabel("nats")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)


def plot_distances(path, x_grid, distances, threshold, title=""):
    fig, ax = plt.subplots(figsize=(7, 3.0))
    ax.plot(x_grid, distances, ".", ms=3)
    ax.axhline(threshold, color="tab:red", lw=1.0, ls="--", label="rho_min")
    ax.set_xlabel("initial state")
    ax.set_ylabel("W1 to target")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _save(fig, path)
