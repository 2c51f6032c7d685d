"""Figure rendering for the report-writing commands.

Everything here draws onto the Agg backend and writes straight to files; the
CSV/JSON reports stay the machine interface, these are the human one.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluate import EvalReport

_MARKERS = ("o", "s", "^", "D", "v", "*")


def render_eval_figure(reports_by_variant: dict[str, list[EvalReport]], path) -> None:
    """Precision/recall/F-score versus tolerance, one line per variant."""
    fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.2), constrained_layout=True)
    panels = [
        ("precision_pct", "Precision (%)"),
        ("recall_pct", "Recall (%)"),
        ("fscore_pct", "F-score (%)"),
    ]
    for ax, (attr, label) in zip(axes, panels):
        for k, (variant, reports) in enumerate(sorted(reports_by_variant.items())):
            tols = [r.tolerance_ms for r in reports]
            vals = [getattr(r, attr) for r in reports]
            ax.plot(tols, vals, marker=_MARKERS[k % len(_MARKERS)], label=variant)
        ax.set_xlabel("tolerance (ms)")
        ax.set_ylabel(label)
        ax.set_ylim(0, 105)
        ax.grid(alpha=0.3)
    axes[0].legend(loc="lower right", fontsize="small")
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep_figure(rows: list[dict], condition: str, xlabel: str, path) -> None:
    """F-score versus degradation level for one condition, one line per
    (variant, tolerance). `rows` are the sweep table rows as dicts."""
    fig, ax = plt.subplots(figsize=(5.2, 3.6), constrained_layout=True)
    picked = [r for r in rows if r["condition"] == condition]
    keys = sorted({(r["variant"], r["tolerance_ms"]) for r in picked})
    for k, (variant, tol) in enumerate(keys):
        pts = sorted(
            (r["level"], r["fscore"])
            for r in picked
            if r["variant"] == variant and r["tolerance_ms"] == tol
        )
        ax.plot(
            [p[0] for p in pts],
            [p[1] for p in pts],
            marker=_MARKERS[k % len(_MARKERS)],
            label=f"{variant}, {tol:g} ms",
        )
    ax.set_xlabel(xlabel)
    ax.set_ylabel("F-score (%)")
    ax.set_ylim(0, 105)
    ax.grid(alpha=0.3)
    ax.legend(loc="best", fontsize="small")
    fig.savefig(path, dpi=150)
    plt.close(fig)
