"""Static figures rendered next to the delimited report files."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def render_grid(grid, path) -> None:
    """Sample locations against the dyadic lattice, offsets highlighted."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3))
    N = grid.N
    ax1.vlines(np.arange(N) / N, 0, 1, colors="0.85", lw=0.8)
    ax1.scatter(grid.t, np.full(N, 0.5), s=18, zorder=3)
    ax1.set_xlabel("t")
    ax1.set_yticks([])
    ax1.set_title(f"locations (N={N})")
    ax2.stem(np.arange(N), grid.scaled_offsets())
    ax2.set_xlabel("sample j")
    ax2.set_ylabel("2N (t - s/N)")
    ax2.set_ylim(-1.1, 1.1)
    ax2.set_title("scaled offsets")
    _finish(fig, path)


def render_transform(out_vec, exact_vec, path) -> None:
    """Output magnitudes, with the brute-force oracle overlaid when known."""
    fig, ax = plt.subplots(figsize=(6, 3.2))
    k = np.arange(len(out_vec))
    ax.plot(k, np.abs(out_vec), "o-", ms=4, label="low-rank")
    if exact_vec is not None:
        ax.plot(k, np.abs(exact_vec), "x--", ms=5, label="exact")
    ax.set_xlabel("k")
    ax.set_ylabel("|X_k|")
    ax.legend()
    _finish(fig, path)


def render_verify_sweep(sweep: dict, epsilon: float, path) -> None:
    """Measured error as each of K, m, p varies around the chosen point."""
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.2))
    for ax, key in zip(axes, ("K", "m", "p")):
        xs, ys = sweep[key]
        ax.semilogy(xs, ys, "o-", ms=4)
        ax.axhline(epsilon, color="r", ls="--", lw=0.8, label="target")
        ax.set_xlabel(key)
        ax.set_ylabel("spectral error")
        ax.legend(fontsize=8)
    _finish(fig, path)


def render_estimate(rows: list[dict], path) -> None:
    """Gate tallies and depth against the register size."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2))
    eps_values = sorted({r["epsilon"] for r in rows})
    for eps in eps_values:
        sel = [r for r in rows if r["epsilon"] == eps]
        ns = [r["n"] for r in sel]
        cnots = [r["gate_counts"].get("CNOT", 0)
                 + r["modeled_oracle_costs"].get("CNOT", 0) for r in sel]
        depths = [r["depth"] for r in sel]
        ax1.plot(ns, cnots, "o-", label=f"eps={eps:g}")
        ax2.plot(ns, depths, "s-", label=f"eps={eps:g}")
    ax1.set_xlabel("n")
    ax1.set_ylabel("CNOT (emitted + modeled)")
    ax1.legend(fontsize=8)
    ax2.set_xlabel("n")
    ax2.set_ylabel("depth")
    ax2.legend(fontsize=8)
    _finish(fig, path)


def render_lemmas(tables: dict, path) -> None:
    """Measured scalar errors against their bounds, one panel per channel."""
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.2))
    exp = tables["exp_channel"]
    axes[0].semilogy(np.maximum(exp["measured"], 1e-20), "o", ms=4)
    axes[0].axhline(exp["bound"], color="r", ls="--", lw=0.8)
    axes[0].set_title("phase channel")
    axes[0].set_xlabel("sample j")
    for ax, key, title in ((axes[1], "cheb_exact_channel", "T_q at 2j/N-1"),
                           (axes[2], "cheb_offset_channel", "T_q at offsets")):
        ch = tables[key]
        meas = np.maximum(ch["measured"], 1e-20).ravel()
        bound = np.maximum(ch["bound"], 1e-20).ravel()
        ax.loglog(bound, meas, ".", ms=3)
        lim = max(bound.max(), meas.max()) * 2
        ax.plot([1e-20, lim], [1e-20, lim], "r--", lw=0.8)
        ax.set_xlabel("bound")
        ax.set_ylabel("measured")
        ax.set_title(title)
    _finish(fig, path)
