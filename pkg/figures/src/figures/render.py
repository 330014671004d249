"""Figure rendering with a pinned, byte-stable configuration.

Display only: every number on a page comes straight from the input CSVs.
The renderer is pinned so that identical inputs give identical output
bytes: fixed fonts embedded as paths, a fixed SVG hash salt, and no
timestamp metadata. Figures are built through the object API (no pyplot),
so rendering holds no global state.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

import matplotlib
from matplotlib.figure import Figure

from .io import read_constants, read_ensemble, read_stats

__all__ = ["FigureSpec", "plot_constants", "plot_ensemble", "PINNED_RC"]

PINNED_RC = {
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "svg.fonttype": "path",  # glyphs as paths: output independent of viewer fonts
    "svg.hashsalt": "figures-0.1",  # fixed salt keeps SVG element ids stable
    "axes.grid": True,
    "grid.alpha": 0.3,
    "grid.linewidth": 0.6,
}

# dropping the creation date is what makes repeated renders byte-identical
_METADATA = {"Date": None}

_SERIES_COLOR = "#4878a8"
_MEAN_COLOR = "#1a2e45"
_THEORY_COLOR = "#b3432b"
_REFERENCE_COLOR = "#888888"


@dataclass
class FigureSpec:
    """What to draw and where: input paths, output path, panels, ranges.

    panels applies to the constants figure ("both", "mu", "sigma2").
    x_range clamps the horizontal axis of every panel; y_range applies
    only when a single panel is drawn (it is ambiguous across two).
    """

    inputs: tuple[str, ...] = ()
    out_path: str = ""
    panels: str = "both"
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.panels not in ("both", "mu", "sigma2"):
            raise ValueError(f"unknown panel selection {self.panels!r}")


def _new_figure(n_panels: int) -> Figure:
    return Figure(figsize=(4.6 * n_panels, 3.5), dpi=100, layout="constrained")


def _apply_ranges(ax, spec: FigureSpec, single_panel: bool):
    if spec.x_range is not None:
        ax.set_xlim(*spec.x_range)
    if spec.y_range is not None and single_panel:
        ax.set_ylim(*spec.y_range)


def plot_constants(sweep_csv: str, out_path: str, spec: FigureSpec | None = None) -> dict:
    """Drift and variance coefficients against the asymmetry parameter.

    Two panels by default: mu(alpha) with a zero reference line, and
    sigma2(alpha) with the closed-form curve overlaid as a dashed
    reference. Rows whose status is not "ok" are skipped. Returns a
    summary of what was drawn; nothing is written when loading fails.
    """
    spec = spec or FigureSpec(inputs=(sweep_csv,), out_path=out_path)
    table = read_constants(sweep_csv)

    with matplotlib.rc_context(PINNED_RC):
        wanted = ("mu", "sigma2") if spec.panels == "both" else (spec.panels,)
        fig = _new_figure(len(wanted))
        axes = fig.subplots(1, len(wanted), squeeze=False)[0]

        for ax, panel in zip(axes, wanted):
            if panel == "mu":
                ax.axhline(0.0, color=_REFERENCE_COLOR, linewidth=0.8)
                ax.plot(table.alpha, table.mu, "o-", color=_SERIES_COLOR, markersize=4)
                ax.set_ylabel("drift coefficient")
            else:
                ax.plot(
                    table.alpha,
                    table.a1_closed,
                    "--",
                    color=_THEORY_COLOR,
                    linewidth=1.2,
                    label="closed form",
                )
                ax.plot(
                    table.alpha,
                    table.sigma2,
                    "o",
                    color=_SERIES_COLOR,
                    markersize=4,
                    label="quadrature",
                )
                ax.set_ylabel("variance coefficient")
                ax.legend(frameon=False)
            ax.set_xlabel("asymmetry parameter")
            _apply_ranges(ax, spec, single_panel=len(wanted) == 1)

        fig.savefig(out_path, metadata=dict(_METADATA))

    return {
        "n_points": len(table.alpha),
        "n_skipped": table.n_skipped,
        "alpha_min": table.alpha[0],
        "alpha_max": table.alpha[-1],
        "mu_left": table.mu[0],
        "sigma2_left": table.sigma2[0],
        "panels": wanted,
    }


def _variance_series(eta: list[list[float]]) -> list[float]:
    n_times = len(eta[0])
    out = []
    for i in range(n_times):
        column = [row[i] for row in eta]
        out.append(statistics.variance(column) if len(column) > 1 else 0.0)
    return out


def plot_ensemble(
    ensemble_csv: str, stats_csv: str, out_path: str, spec: FigureSpec | None = None
) -> dict:
    """Shift trajectories with their mean band, and variance vs the theory line.

    Left panel: every clean replicate as a thin line, the cross-replicate
    mean on top, and a two-standard-error band around it. Right panel: the
    cross-replicate variance of the shift against time, with the straight
    line whose slope is exactly the stats file's sigma2 field. The time
    axis is the slow clock when it is non-degenerate, else the simulation
    clock (noise-off files record a frozen slow clock).
    """
    spec = spec or FigureSpec(inputs=(ensemble_csv, stats_csv), out_path=out_path)
    table = read_ensemble(ensemble_csv)
    stats = read_stats(stats_csv)

    slow_clock = any(t != table.t_paper[0] for t in table.t_paper)
    t = table.t_paper if slow_clock else table.t_w
    clock_label = "slow clock" if slow_clock else "simulation clock"
    axis_label = f"time ({clock_label})"

    n = len(table.eta)
    mean = [statistics.fmean(row[i] for row in table.eta) for i in range(len(t))]
    if n > 1:
        half_band = [
            2.0 * statistics.stdev(row[i] for row in table.eta) / n**0.5
            for i in range(len(t))
        ]
    else:
        half_band = [0.0] * len(t)
    var = _variance_series(table.eta)
    theory = [stats.sigma2 * ti for ti in t]

    with matplotlib.rc_context(PINNED_RC):
        fig = _new_figure(2)
        ax_traj, ax_var = fig.subplots(1, 2)

        for row in table.eta:
            ax_traj.plot(t, row, color=_SERIES_COLOR, linewidth=0.5, alpha=0.25)
        lo = [m - b for m, b in zip(mean, half_band)]
        hi = [m + b for m, b in zip(mean, half_band)]
        ax_traj.fill_between(t, lo, hi, color=_MEAN_COLOR, alpha=0.2, linewidth=0)
        ax_traj.plot(t, mean, color=_MEAN_COLOR, linewidth=1.5, label="mean")
        ax_traj.set_xlabel(axis_label)
        ax_traj.set_ylabel("front shift")
        ax_traj.legend(frameon=False, loc="upper right")
        _apply_ranges(ax_traj, spec, single_panel=False)

        ax_var.plot(t, var, color=_SERIES_COLOR, linewidth=1.4, label="ensemble")
        ax_var.plot(t, theory, "--", color=_THEORY_COLOR, linewidth=1.2, label="theory slope")
        ax_var.set_xlabel(axis_label)
        ax_var.set_ylabel("shift variance")
        ax_var.legend(frameon=False, loc="upper left")
        if spec.x_range is not None:
            ax_var.set_xlim(*spec.x_range)

        fig.savefig(out_path, metadata=dict(_METADATA))

    return {
        "n_clean": n,
        "n_flagged": table.n_flagged,
        "slow_clock": slow_clock,
        "clock_label": clock_label,
        "theory_slope": stats.sigma2,
        "mean_end": mean[-1],
        "mean_end_stderr": half_band[-1] / 2.0 if n > 1 else 0.0,
        "var_end": var[-1],
    }
