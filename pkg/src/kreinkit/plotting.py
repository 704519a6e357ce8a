"""Figures written next to run reports.

Uses the non-interactive Agg backend; every function takes an output path and
returns it.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 11,
    "xtick.labelsize": 9,
    "ytick.labelsize": 9,
    "legend.fontsize": 9,
    "figure.dpi": 120,
}


def _figure(width=5.0, height=3.2):
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(width, height))
    return fig, ax


def margin_histogram(records, path, title, threshold=1e-8):
    """Histogram of ``λ_min/‖gap‖`` with the failure threshold marked."""
    margins = np.array([r.margin for r in records])
    with plt.rc_context(_RC):
        fig, ax = _figure()
        floor = 1e-18
        vals = np.log10(np.maximum(np.abs(margins), floor))
        neg = margins < 0
        bins = np.linspace(vals.min() - 0.5, max(vals.max(), 0) + 0.5, 40)
        ax.hist(vals[~neg], bins=bins, alpha=0.8, label="λ_min ≥ 0")
        if neg.any():
            ax.hist(vals[neg], bins=bins, alpha=0.8, label="λ_min < 0 (rounding)")
        ax.axvline(np.log10(threshold), color="k", ls="--", lw=1, label="|threshold|")
        ax.set_xlabel("log10 |λ_min / ‖gap‖|")
        ax.set_ylabel("instances")
        ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def convergence_plot(history, path, title="contour quadrature"):
    """Successive differences against node count, one line per circle."""
    with plt.rc_context(_RC):
        fig, ax = _figure()
        for k, hist in enumerate(history):
            if not hist:
                continue
            nodes, diffs = zip(*hist)
            ax.loglog(nodes, np.maximum(diffs, 1e-18), "o-", label=f"circle {k}")
        ax.set_xlabel("nodes")
        ax.set_ylabel("‖S_2N − S_N‖_F")
        ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
    return path


def write_margins_csv(records, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "dim", "lambda", "min_eigenvalue", "gap_norm", "margin", "relation"])
        for r in records:
            w.writerow([r.index, r.dim, "" if r.lam is None else r.lam, repr(r.min_eigenvalue), repr(r.gap_norm),
                        repr(r.margin), r.relation])
    return path


def repro_figures(ctx, outdir):
    """Render the figures available from a finished reproduction run."""
    from . import funcalc

    os.makedirs(outdir, exist_ok=True)
    written = []
    titles = {"inverse-convexity": "inverse convexity gaps", "square-transformation": "square transformation gaps"}
    for key, title in titles.items():
        recs = ctx.records.get(key)
        if recs:
            stem = key.replace("-", "_")
            written.append(margin_histogram(recs, os.path.join(outdir, f"{stem}_margins.png"), title))
            written.append(write_margins_csv(recs, os.path.join(outdir, f"{stem}_margins.csv")))
    N = np.array([[1, 1], [-1, -1]], dtype=complex)
    res = funcalc.calculus_contour(funcalc.exponential(), N * 0.999 + np.diag([0.0, 0.5]))
    written.append(convergence_plot(res.history, os.path.join(outdir, "contour_convergence.png")))
    return written
