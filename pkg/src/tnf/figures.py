"""Figure rendering for experiment reports.

One PNG per suite, written next to report.json/report.csv.  The delimited
files remain the canonical hand-off; figures are a reading aid and their
bytes are not covered by the bit-reproducibility contract (backend and
library versions may vary).
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def _dec(value) -> float:
    if isinstance(value, str) and "/" in value:
        return float(Fraction(value))
    return float(value)


def _fixprob_figure(report, path: Path) -> None:
    rows = report.rows
    xs = [r["case"] for r in rows]
    sig = [r["mc_deviation_sigmas"] for r in rows]
    colors = ["tab:orange" if r["discrepancy"] else "tab:blue" for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.scatter(xs, sig, c=colors, s=28)
    ax.axhline(4.0, color="red", linestyle="--", linewidth=1, label="4 sigma bound")
    ax.set_xlabel("case index (alpha x permutation grid)")
    ax.set_ylabel("|MC - closed form| / stderr")
    ax.set_title("Monte Carlo vs closed-form fixed-point probability")
    ax.set_ylim(bottom=0)
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _classification_figure(report, path: Path) -> None:
    rows = report.rows
    labels = [r["alpha"] for r in rows]
    frac = [r["self_normalizing"] / r["samples"] if r["samples"] else 0.0
            for r in rows]
    colors = ["tab:green" if r["classification"] == "TNF" else "tab:red"
              for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.bar(range(len(rows)), frac, color=colors)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=30, ha="right", fontsize=7)
    ax.set_ylabel("fraction of sampled subgroups self-normalizing")
    ax.set_ylim(0, 1.05)
    ax.set_title("Sampled self-normalizing fraction (green: TNF law, red: not)")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _hierarchy_figure(report, path: Path) -> None:
    rows = [r for r in report.rows if r["kind"] == "chain"]
    labels = [f"S{r['degree']}#{r['class_index']}" for r in rows]
    steps = [r["steps"] for r in rows]
    colors = ["tab:blue" if r["degree"] == rows[0]["degree"] else "tab:purple"
              for r in rows]
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.bar(range(len(rows)), steps, color=colors)
    ax.set_xticks(range(len(rows)))
    ax.set_xticklabels(labels, rotation=60, fontsize=7)
    ax.set_ylabel("normalization steps to fixpoint")
    ax.set_yticks(range(0, max(steps + [1]) + 2))
    ax.set_title("Hierarchy chains of the extreme conjugation-invariant measures")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _decay_figure(report, path: Path) -> None:
    rows = report.rows
    ms = [r["m"] for r in rows]
    exact = [_dec(r["exact"]) for r in rows]
    mc = [r["mc_estimate"] for r in rows]
    err = [4 * r["mc_stderr"] for r in rows]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.errorbar(ms, mc, yerr=err, fmt="o", markersize=3, capsize=2,
                label="Monte Carlo (4 sigma bars)", color="tab:blue")
    ax.plot(ms, exact, "-", color="tab:red", linewidth=1, label="1/(2m-1)")
    ax.set_xlabel("number of blocks m")
    ax.set_ylabel("P(fixed pair matched)")
    ax.set_yscale("log")
    ax.set_title("Matching-overlap decay")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


_RENDERERS = {
    "fixprob-sweep": ("deviations.png", _fixprob_figure),
    "classification": ("classification.png", _classification_figure),
    "hierarchy": ("chains.png", _hierarchy_figure),
    "decay": ("decay.png", _decay_figure),
}


def render_figures(report, out_dir: str | Path) -> list[Path]:
    """Render the figure for the report's suite into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if report.name not in _RENDERERS:
        return []
    filename, renderer = _RENDERERS[report.name]
    path = out / filename
    renderer(report, path)
    return [path]
