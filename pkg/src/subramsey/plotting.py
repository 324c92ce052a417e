"""Figures for numeric verification and batch reports (files only, Agg backend)."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_f_deficit(rows, path):
    """``1 - f(alpha)`` against its second-order approximation, per D."""
    seen = {}
    for row in rows:
        seen.setdefault(row["D"], row)
    Ds = sorted(seen)
    alphas = [seen[D]["alpha"] for D in Ds]
    deficit = [seen[D]["one_minus_f"] for D in Ds]
    approx = [a * a / 3 + a * a / (3 * math.log(a)) for a in alphas]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(Ds, deficit, "o-", label="1 - f(alpha)")
    ax.semilogy(Ds, approx, "--", label="alpha^2/3 + alpha^2/(3 ln alpha)")
    ax.set_xlabel("D  (alpha = 1/(6D+14))")
    ax.set_ylabel("deficit")
    ax.legend()
    return _save(fig, path)


def plot_delta_margins(rows, path):
    """Heatmap of ``delta - lower bound`` over (r, D)."""
    Ds = sorted({row["D"] for row in rows})
    rs = sorted({row["r"] for row in rows})
    grid = [[math.nan] * len(Ds) for _ in rs]
    for row in rows:
        grid[rs.index(row["r"])][Ds.index(row["D"])] = row["delta"] - row["delta_lower"]
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(grid, origin="lower", aspect="auto", extent=(Ds[0] - 0.5, Ds[-1] + 0.5, rs[0] - 0.5, rs[-1] + 0.5))
    fig.colorbar(im, ax=ax, label="delta - lower bound")
    ax.set_xlabel("D")
    ax.set_ylabel("r")
    return _save(fig, path)


def plot_size_bound(rows, path):
    """``log2`` of the expected edge count against the claimed size bound."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for r in sorted({row["r"] for row in rows}):
        sel = sorted((row for row in rows if row["r"] == r), key=lambda x: x["D"])
        Ds = [x["D"] for x in sel]
        line, = ax.plot(Ds, [x["edges_log2"] for x in sel], "o-", label=f"log2 e(G), r={r}")
        ax.plot(Ds, [x["size_bound_log2"] for x in sel], "--", color=line.get_color(), label=f"bound, r={r}")
    ax.set_xlabel("D")
    ax.set_ylabel("log2")
    ax.legend(fontsize=7)
    return _save(fig, path)


def plot_batch(batch, path):
    """Majority class size per trial next to the pigeonhole floor ``e(G)/r``."""
    reports = batch["reports"]
    seeds = [rep["config"]["seed"] for rep in reports]
    chosen = [rep["chosen_edges"] for rep in reports]
    floor = [rep["host_edges"] / rep["config"]["r"] for rep in reports]
    colours = ["tab:green" if rep["embedding"] and rep["embedding"]["audit"]["pass"] else "tab:gray" for rep in reports]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(seeds, chosen, color=colours)
    ax.plot(seeds, floor, "k_", markersize=14, label="e(G)/r")
    ax.set_xlabel("seed")
    ax.set_ylabel("edges in majority class")
    ax.legend()
    return _save(fig, path)
