"""Figure rendering for the report path.

Each subcommand that writes tabular data also drops a PNG next to it
(unless figures are disabled). Figures are derived views of already
written data; the JSON/CSV reports stay the canonical output.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def render_verdict_figure(report, path) -> None:
    """Log-log shell sums with the fitted tail line."""
    rs = np.array(sorted(report.shell_sums), dtype=np.float64)
    ys = np.array([report.shell_sums[int(r)] for r in rs])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.loglog(rs, ys, ".", ms=2.5, color="tab:blue", label="shell sums")
    top = int(rs[-1]).bit_length() - 1
    lo = 2.0 ** (top - 1)
    mask = rs >= lo
    if np.any(mask):
        anchor = ys[mask][0]
        line = anchor * (rs[mask] / rs[mask][0]) ** report.tail_exponent_fit
        ax.loglog(rs[mask], line, "-", color="tab:red",
                  label=f"fit exponent {report.tail_exponent_fit:.3f}")
    ax.set_xlabel("shell radius r")
    ax.set_ylabel("shell sum")
    ax.set_title(f"series verdict: {report.verdict}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_limsup_figure(rows, path) -> None:
    """Shell sums with selected radii highlighted, plus content ratios."""
    rs = np.array([row["r"] for row in rows], dtype=np.float64)
    sums = np.array([row["shell_sum"] for row in rows])
    member = np.array([bool(row["lambda_member"]) for row in rows])
    ratios = np.array([row["min_content_ratio"] for row in rows])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    ax1.loglog(rs, sums, ".", ms=2.5, color="0.6", label="all shells")
    if np.any(member):
        ax1.loglog(rs[member], sums[member], ".", ms=4, color="tab:green",
                   label="selected radii")
    ax1.set_ylabel("shell sum")
    ax1.legend(loc="best", fontsize=8)
    good = ~np.isnan(ratios)
    if np.any(good):
        ax2.loglog(rs[good], ratios[good], ".", ms=2.5, color="tab:purple")
    ax2.set_xlabel("shell radius r")
    ax2.set_ylabel("min content ratio")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_baseline_figure(rows, path) -> None:
    """Classical partial sums against the cutoff."""
    qs = np.array([row["Q"] for row in rows], dtype=np.float64)
    kg = np.array([row["kg_partial"] for row in rows])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.semilogx(qs, kg, "o-", ms=3, label="volume-series partial")
    jar = [row.get("jarnik_partial", math.nan) for row in rows]
    if not all(math.isnan(v) for v in jar):
        ax.semilogx(qs, jar, "s-", ms=3, label="dimension-series partial")
    ax.set_xlabel("cutoff Q")
    ax.set_ylabel("partial sum")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
