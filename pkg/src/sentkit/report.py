"""Report rendering: evaluation summaries become delimited tables plus
matplotlib figures written next to them."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def load_summary(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def render_fold_accuracy(summary: dict, out_path, title: str = "Cross-validation") -> None:
    folds = summary["folds"]
    xs = [f["fold"] for f in folds]
    accs = [f["accuracy"] for f in folds]
    f1s = [f["f1"] for f in folds]
    fig, ax = plt.subplots(figsize=(7, 4))
    width = 0.4
    ax.bar([x - width / 2 for x in xs], accs, width, label="accuracy")
    ax.bar([x + width / 2 for x in xs], f1s, width, label="F1")
    ax.axhline(summary["mean_accuracy"], color="black", linestyle="--", linewidth=1,
               label=f"mean acc = {summary['mean_accuracy']:.3f}")
    ax.set_xlabel("fold")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_comparison(summary_a: dict, summary_b: dict, out_path,
                      labels=("run A", "run B"), p_values: dict | None = None) -> None:
    accs_a = [f["accuracy"] for f in summary_a["folds"]]
    accs_b = [f["accuracy"] for f in summary_b["folds"]]
    xs = np.arange(len(accs_a))
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, accs_a, marker="o", label=labels[0])
    ax.plot(xs, accs_b, marker="s", label=labels[1])
    ax.set_xlabel("fold")
    ax.set_ylabel("accuracy")
    title = "Per-fold comparison"
    if p_values:
        bits = ", ".join(f"{name} p={p:.4f}" for name, p in sorted(p_values.items()))
        title += f" ({bits})"
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def render_coefficient_grid(grid: list[tuple[float, float]], out_path) -> None:
    """Line plot of dev accuracy against the supervised coefficient."""
    cs = [c for c, _ in grid]
    accs = [a for _, a in grid]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(cs, accs, marker="o")
    best = max(grid, key=lambda ca: (ca[1], ca[0]))
    ax.axvline(best[0], color="gray", linestyle=":")
    ax.set_xlabel("supervised coefficient")
    ax.set_ylabel("dev accuracy")
    ax.set_title(f"Coefficient grid (best c_s = {best[0]:.1f})")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)


def write_report(summary_path, outdir, compare_path=None) -> list[str]:
    """Render figures for a summary (and an optional comparison run);
    returns the written file names."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    summary = load_summary(summary_path)
    written = []

    table = outdir / "report.tsv"
    with open(table, "w", encoding="utf-8") as fh:
        fh.write("metric\tvalue\n")
        fh.write(f"mean_accuracy\t{summary['mean_accuracy']!r}\n")
        fh.write(f"std_accuracy\t{summary['std_accuracy']!r}\n")
        fh.write(f"mean_f1\t{summary['mean_f1']!r}\n")
        fh.write(f"folds\t{len(summary['folds'])}\n")
    written.append(table.name)

    fig_path = outdir / "fold_scores.png"
    render_fold_accuracy(summary, fig_path)
    written.append(fig_path.name)

    if compare_path:
        other = load_summary(compare_path)
        cmp_path = outdir / "comparison.png"
        from .evaluate import paired_t_test

        p = paired_t_test(
            [f["accuracy"] for f in summary["folds"]],
            [f["accuracy"] for f in other["folds"]],
        )
        render_comparison(summary, other, cmp_path, p_values={"t-test": p})
        written.append(cmp_path.name)
    return written
