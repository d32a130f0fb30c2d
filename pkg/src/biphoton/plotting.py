"""Figure output for the CLI report path. Uses the non-interactive Agg backend."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 11,
    "axes.labelsize": 12,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.6,
    "savefig.dpi": 150,
}


def _pi_ticks(ax, lo, hi):
    ticks = [k * math.pi / 2 for k in range(math.floor(lo / (math.pi / 2)), math.ceil(hi / (math.pi / 2)) + 1)]
    names = {0: "0", 1: r"$\pi/2$", 2: r"$\pi$", -1: r"$-\pi/2$", -2: r"$-\pi$"}
    ax.set_xticks(ticks)
    ax.set_xticklabels([names.get(round(t / (math.pi / 2)), rf"${round(t / (math.pi / 2))}\pi/2$") for t in ticks])


def _save(fig, path):
    path = Path(path)
    # strip the timestamp so repeated runs give identical files
    metadata = {"Date": None} if path.suffix.lower() in (".svg", ".pdf") else None
    fig.savefig(path, bbox_inches="tight", metadata=metadata)
    plt.close(fig)
    return path


def plot_mzi(rows, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.8))
        x = [r["phi1_rad"] - r["phi2_rad"] for r in rows]
        ax.plot(x, [r["p_1d"] for r in rows], "o-", label="1D")
        ax.plot(x, [r["p_2d"] for r in rows], "s--", label="2D")
        _pi_ticks(ax, min(x), max(x))
        ax.set_xlabel(r"path difference $\varphi_1 - \varphi_2$")
        ax.set_ylabel("detection probability")
        ax.set_ylim(-0.05, 1.05)
        ax.legend()
        return _save(fig, path)


def plot_sweep(rows, path):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.8))
        x = [r["delta_rad"] for r in rows]
        ax.plot(x, [r["degree"] for r in rows], "-", label="analytic")
        if "c_hat" in rows[0]:
            ax.errorbar(x, [r["c_hat"] for r in rows], yerr=[r["std_err"] for r in rows],
                        fmt="o", ms=4, capsize=2, label="sampled")
        ax.axhline(0, color="0.5", lw=0.8)
        _pi_ticks(ax, min(x), max(x))
        ax.set_xlabel(r"nonlocal phase $\varphi_B - \varphi_A$")
        ax.set_ylabel("degree of correlation")
        ax.set_ylim(-1.1, 1.1)
        ax.legend(loc="lower left")
        return _save(fig, path)


def plot_fringes(rows, path, overlap):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.8))
        x = [r["phase_rad"] for r in rows]
        ax.plot(x, [r["p_port1"] for r in rows], "o-", ms=3)
        _pi_ticks(ax, min(x), max(x))
        ax.set_xlabel(r"phase $\varphi$")
        ax.set_ylabel("P(port 1)")
        ax.set_ylim(-0.05, 1.05)
        ax.set_title(f"pointer overlap c = {overlap:g}")
        return _save(fig, path)
