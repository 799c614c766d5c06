"""Three-row sweep figures rendered to static SVG.

Row 1: trace norm and A_k against p. Row 2: accessible fraction and gap.
Row 3: empirical vs predicted accuracy with the selected Pauli weight.
One column per locality k.
"""

from __future__ import annotations

import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError  # noqa: E402

STYLE = {
    "svg.hashsalt": "signal-horizon",
    "svg.fonttype": "path",
    "font.size": 8,
    "axes.titlesize": 9,
    "axes.labelsize": 8,
    "legend.fontsize": 6,
    "lines.linewidth": 1.2,
    "lines.markersize": 3,
}

_K_COLORS = {1: "tab:blue", 2: "tab:orange", 3: "tab:green"}


def _column(records, name):
    return [math.nan if getattr(r, name) is None else getattr(r, name) for r in records]


def _color(k):
    return _K_COLORS.get(k, f"C{k % 10}")


def plot_encoding(records, path) -> Path:
    """Write the three-row panel figure for records of a single encoding."""
    by_k = defaultdict(list)
    for r in records:
        if r.status == "ok":
            by_k[r.k].append(r)
    if not by_k:
        raise ConfigError("no successful records to plot")
    ks = sorted(by_k)
    first = next(iter(by_k.values()))[0]

    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(
            3, len(ks), figsize=(3.0 * len(ks), 7.0), sharex=True, squeeze=False
        )
        for col, k in enumerate(ks):
            rows = sorted(by_k[k], key=lambda r: r.p)
            p = _column(rows, "p")
            c = _color(k)
            has_tn = any(r.trace_norm is not None for r in rows)

            ax = axes[0][col]
            if has_tn:
                ax.plot(p, _column(rows, "trace_norm"), color="black", label=r"$\|N_p(\Delta\rho)\|_1$")
            ax.plot(p, _column(rows, "A_k_exact"), color=c, label=f"$A_{k}$ exact")
            ax.plot(p, _column(rows, "A_k_hat"), "o", color=c, mfc="none", label=rf"$\hat A_{k}$")
            ax.axhline(rows[0].epsilon, color="gray", ls=":", lw=0.8, label=r"$\epsilon$")
            ax.set_title(f"k = {k}")
            ax.legend(loc="upper right")

            ax = axes[1][col]
            if has_tn:
                ax.plot(p, _column(rows, "accessible_fraction"), color=c, label="accessible fraction")
                ax.set_ylim(0, 1.05)
                twin = ax.twinx()
                twin.plot(p, _column(rows, "gap"), color="gray", ls="--", label="gap")
                twin.set_ylabel("gap")
                ax.legend(loc="lower left")
                twin.legend(loc="upper right")
            else:
                ax.text(0.5, 0.5, "trace norm not computed", ha="center", va="center",
                        transform=ax.transAxes)  # fmt: skip

            ax = axes[2][col]
            ax.plot(p, _column(rows, "acc_predicted_exact"), color=c, label=r"$1/2 + A_k/4$")
            ax.plot(p, _column(rows, "acc_empirical"), "s", color=c, mfc="none", label="empirical")
            ax.axhline(0.5, color="gray", ls=":", lw=0.8)
            ax.set_xlabel("p")
            ax.legend(loc="upper right")
            twin = ax.twinx()
            twin.step(p, _column(rows, "w_star"), where="mid", color="purple", lw=0.8, label=r"$w(P^\star)$")
            twin.step(p, _column(rows, "w_star_exact"), where="mid", color="purple", ls="--",
                      lw=0.8, label="exact")  # fmt: skip
            twin.set_ylim(-0.2, max(ks) + 0.5)
            twin.set_ylabel(r"$w(P^\star)$")
            twin.legend(loc="center right")

        axes[0][0].set_ylabel("bias")
        axes[1][0].set_ylabel(r"$A_k / \|N_p(\Delta\rho)\|_1$")
        axes[2][0].set_ylabel("accuracy")
        fig.suptitle(f"{first.encoding} encoding (n = {first.n})")
        fig.tight_layout()
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def plot_results(records, out_dir) -> list[Path]:
    """One SVG per encoding present in ``records``."""
    if not records:
        raise ConfigError("no records to plot")
    groups = defaultdict(list)
    for r in records:
        groups[r.encoding].append(r)
    return [plot_encoding(rs, Path(out_dir) / f"figure_{enc}.svg") for enc, rs in sorted(groups.items())]
