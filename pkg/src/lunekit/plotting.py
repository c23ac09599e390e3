"""Matplotlib figures summarising a verification report (written as PNG files)."""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _legend(ax, size: int = 7) -> None:
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=size)


def _cell_label(s: dict) -> str:
    return f"k={s['kappa']:g}, l={s['lambda']:g} ({s['kind']})"


def plot_inradius_vs_bound(report: dict, path: str) -> str:
    t1 = report["theorem1"]
    fig, ax = plt.subplots(figsize=(6, 5))
    for s in t1["summary"]:
        rows = [r for r in t1["rows"] if r.get("cell") == s["cell"] and r.get("slack") is not None]
        if not rows:
            continue
        ax.scatter([r["rho"] for r in rows], [r["r"] for r in rows], s=8, label=_cell_label(s))
    lim = ax.get_xlim()
    ax.plot(lim, lim, color="black", lw=0.8, label="r = rho(L)")
    ax.set_xlabel("rho_lambda(L) of the equal-perimeter lune")
    ax.set_ylabel("numeric inradius r")
    _legend(ax)
    ax.set_title("Inradius against the lune bound")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_margin_vs_hausdorff(report: dict, path: str) -> str:
    t1 = report["theorem1"]
    fig, ax = plt.subplots(figsize=(6, 5))
    for s in t1["summary"]:
        rows = [
            r for r in t1["rows"]
            if r.get("cell") == s["cell"] and r.get("hausdorff_to_lune") is not None and r.get("slack") is not None
        ]
        if rows:
            ax.scatter([r["hausdorff_to_lune"] for r in rows], [r["slack"] for r in rows], s=8, label=_cell_label(s))
    ax.axhline(0.0, color="black", lw=0.8)
    ax.set_xlabel("Hausdorff distance to equal-perimeter lune (upper bound)")
    ax.set_ylabel("slack r - rho(L)")
    _legend(ax)
    ax.set_title("Margin off the extremal set")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_calibration(report: dict, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 5))
    for cal in report.get("calibration", []):
        hs = sorted({s["h"] for s in cal["samples"]})
        worst = [max(s["error"] for s in cal["samples"] if s["h"] == h) for h in hs]
        ax.loglog(hs, np.maximum(worst, 1e-18), marker="o", label=f"k={cal['kappa']:g}, l={cal['lambda']:g}")
    ax.set_xlabel("sampling step h")
    ax.set_ylabel("max |r - rho(L)| on lunes")
    _legend(ax)
    ax.set_title("Discretisation error used for eps_h")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_phase_transitions(report: dict, path: str) -> str:
    fig, ax = plt.subplots(figsize=(6, 5))
    for rep in report["remark1"]["reports"]:
        eps = [r["eps"] for r in rep["rows"]]
        for name, ls in (("gap_from_above", "-"), ("gap_from_below", "--"), ("gap_flat_from_sphere", ":")):
            vals = [r[name] for r in rep["rows"]]
            if any(v is None for v in vals):
                continue
            ax.loglog(eps, np.maximum(vals, 1e-18), ls, marker=".", label=f"L={rep['L']:g} {name}")
    ax.axhline(report["remark1"]["reports"][0]["threshold"], color="grey", lw=0.8)
    ax.set_xlabel("eps")
    ax.set_ylabel("branch gap")
    _legend(ax, 6)
    ax.set_title("Branch continuity near the switches")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report_figures(report: dict, outdir: str) -> list[str]:
    """Render every figure the report has data for; returns the file paths."""
    os.makedirs(outdir, exist_ok=True)
    paths = []
    if report.get("theorem1") and report["theorem1"]["rows"]:
        paths.append(plot_inradius_vs_bound(report, os.path.join(outdir, "inradius_vs_bound.png")))
        paths.append(plot_margin_vs_hausdorff(report, os.path.join(outdir, "margin_vs_hausdorff.png")))
    if report.get("calibration"):
        paths.append(plot_calibration(report, os.path.join(outdir, "calibration.png")))
    if report.get("remark1"):
        paths.append(plot_phase_transitions(report, os.path.join(outdir, "phase_transitions.png")))
    return paths
