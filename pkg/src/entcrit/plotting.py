"""Figure rendering for sweep and decoherence reports.

Each function writes a PNG (or whatever the file extension selects) next
to the delimited output the CLI produces; the CSV stays the primary,
plot-ready artifact.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def save_ghz_threshold_figure(path, ns, gme_thresholds, fullsep_boundaries):
    """Noise-threshold overview: entanglement classes of noisy GHZ states.

    Plots the computed genuine-multipartite boundary and the known full
    separability boundary against the qubit count and shades the three
    regions between them.
    """
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ns, gme_thresholds, "o-", color="tab:red",
            label="GME boundary (computed)")
    ax.plot(ns, fullsep_boundaries, "s--", color="tab:blue",
            label="full-separability boundary")
    ax.fill_between(ns, 0.0, gme_thresholds, color="tab:red", alpha=0.15)
    ax.fill_between(ns, gme_thresholds, fullsep_boundaries,
                    color="tab:orange", alpha=0.15)
    ax.fill_between(ns, fullsep_boundaries, 1.0, color="tab:blue", alpha=0.15)
    ax.set_xlabel("number of qubits N")
    ax.set_ylabel("white-noise fraction p")
    ax.set_xlim(min(ns), max(ns))
    ax.set_ylim(0.0, 1.0)
    ax.legend(loc="lower right", fontsize=8)
    ax.set_title("noisy GHZ states: genuinely entangled / biseparable / separable")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_margin_curve_figure(path, result):
    """Criterion lhs/rhs/margin along one noise sweep."""
    ps = list(result.grid)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ps, [r.lhs for r in result.reports], label="lhs", color="tab:red")
    ax.plot(ps, [r.rhs for r in result.reports], label="rhs", color="tab:blue")
    ax.plot(ps, [r.margin for r in result.reports], label="margin",
            color="tab:green", linestyle="--")
    ax.axvline(result.threshold, color="k", linewidth=0.8, linestyle=":",
               label=f"threshold p* = {result.threshold:.6f}")
    ax.axhline(0.0, color="0.6", linewidth=0.6)
    ax.set_xlabel("white-noise fraction p")
    ax.set_ylabel(f"criterion {result.criterion_id}")
    ax.set_title(f"{result.family_id}, N = {result.n_qubits}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_decoherence_figure(path, rows, analytic_threshold, n_qubits, gamma):
    """Criterion margin of the relaxed, filtered GHZ state against time."""
    ts = [row[0] for row in rows]
    margins = [row[4] for row in rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ts, margins, color="tab:green", label="criterion margin")
    ax.axhline(0.0, color="0.6", linewidth=0.6)
    ax.axvline(analytic_threshold, color="k", linewidth=0.8, linestyle=":",
               label=f"analytic t* = {analytic_threshold:.4f}")
    ax.set_xlabel("time t")
    ax.set_ylabel("margin")
    ax.set_title(f"GME survival under relaxation, N = {n_qubits}, gamma = {gamma}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
