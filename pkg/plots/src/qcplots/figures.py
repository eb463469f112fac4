"""The five figure kinds and the aggregation behind them.

Every figure is a pure function of its input CSV: style is pinned in an
rc context, SVG ids are salted with a constant, and no timestamp is written,
so rendering the same file twice yields identical bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .aggregate import BinStat, bin_stats, ci95_half
from .io import column_floats, read_rows, require_columns

KINDS = ("updates", "perturbation", "training-sensitivity", "bound-comparison", "welch")

_AXES: dict[str, tuple[str, str]] = {
    "updates": ("index", "mean_abs_rel_change"),
    "perturbation": ("L", "cs_opdiff_gauged"),
    "training-sensitivity": ("index", "cs_opdiff_gauged"),
}

_DEFAULT_GROUPS: dict[str, tuple[str, ...]] = {
    "updates": (),
    "perturbation": ("n", "params_per_layer"),
    "training-sensitivity": (),
    "bound-comparison": (),
    "welch": ("d",),
}

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 10.0,
    "svg.fonttype": "path",
    "svg.hashsalt": "qcplots",
    "axes.grid": True,
    "grid.alpha": 0.3,
}


@dataclass(frozen=True)
class FigureSpec:
    """One render request: what to draw, from where, to where."""

    kind: str
    input_path: Path
    output_path: Path
    group_by: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")

    @property
    def groups(self) -> tuple[str, ...]:
        if self.group_by is None:
            return _DEFAULT_GROUPS[self.kind]
        return self.group_by


@dataclass(frozen=True)
class Series:
    """One plotted line (or point set) with its per-bin statistics."""

    label: str
    stats: list[BinStat]
    dashed: bool = field(default=False)


def _group_sort_key(values: tuple[str, ...]):
    key = []
    for value in values:
        try:
            key.append((0, float(value), ""))
        except ValueError:
            key.append((1, 0.0, value))
    return tuple(key)


def _split_by_groups(
    rows: list[dict[str, str]], columns: tuple[str, ...]
) -> list[tuple[str, list[dict[str, str]]]]:
    if not columns:
        return [("", rows)]
    require_columns(rows, columns)
    buckets: dict[tuple[str, ...], list[dict[str, str]]] = {}
    for row in rows:
        buckets.setdefault(tuple(row[c] for c in columns), []).append(row)
    out = []
    for values in sorted(buckets, key=_group_sort_key):
        label = ", ".join(f"{c}={v}" for c, v in zip(columns, values))
        out.append((label, buckets[values]))
    return out


def _ratio_series(rows: list[dict[str, str]]) -> list[Series]:
    """Per-config reading/bound statistics, configs in sorted order.

    A zero bound contributes a zero ratio, mirroring how the generator's own
    comparison table handles rows the bound says nothing about.
    """
    require_columns(rows, ("config", "bound", "cs_opdiff_gauged"))
    by_config: dict[str, list[dict[str, str]]] = {}
    for row in rows:
        by_config.setdefault(row["config"], []).append(row)
    out = []
    for config in sorted(by_config):
        members = by_config[config]
        bounds = column_floats(members, "bound")
        values = column_floats(members, "cs_opdiff_gauged")
        ratios = np.where(bounds > 0, values / np.where(bounds > 0, bounds, 1.0), 0.0)
        stat = BinStat(
            x=0.0, mean=float(np.mean(ratios)), ci_half=ci95_half(ratios), count=ratios.size
        )
        out.append(Series(label=config, stats=[stat]))
    return out


def prepare(spec: FigureSpec, rows: list[dict[str, str]]) -> list[Series]:
    """Aggregate raw rows into the series the figure will draw."""
    if spec.kind == "bound-comparison":
        return _ratio_series(rows)

    if spec.kind == "welch":
        require_columns(rows, ("t", "welch_sum", "welch_bound"))
        out = []
        for label, members in _split_by_groups(rows, spec.groups):
            ts = column_floats(members, "t")
            prefix = f"{label}, " if label else ""
            out.append(
                Series(prefix + "observed", bin_stats(ts, column_floats(members, "welch_sum")))
            )
            out.append(
                Series(
                    prefix + "bound",
                    bin_stats(ts, column_floats(members, "welch_bound")),
                    dashed=True,
                )
            )
        return out

    x_col, y_col = _AXES[spec.kind]
    out = []
    for label, members in _split_by_groups(rows, spec.groups):
        xs = column_floats(members, x_col)
        ys = column_floats(members, y_col)
        out.append(Series(label, bin_stats(xs, ys)))
    return out


def _draw_line(ax, series: Series) -> None:
    xs = np.array([s.x for s in series.stats])
    means = np.array([s.mean for s in series.stats])
    halves = np.array([s.ci_half for s in series.stats])
    style = {"linestyle": "--"} if series.dashed else {}
    line, = ax.plot(xs, means, marker="o", markersize=3, label=series.label or None, **style)
    if np.any(halves > 0):
        ax.fill_between(xs, means - halves, means + halves, alpha=0.25, color=line.get_color())


_Y_LABELS = {
    "updates": "mean |update| / |parameter|",
    "perturbation": "gauged operator-difference reading",
    "training-sensitivity": "gauged operator-difference reading",
    "welch": "t-th moment spread sum",
}

_X_LABELS = {
    "updates": "iteration",
    "perturbation": "layers",
    "training-sensitivity": "iteration",
    "welch": "t",
}


def render(spec: FigureSpec) -> Path:
    """Read the CSV, aggregate it, and write the figure. Returns the path."""
    rows = read_rows(spec.input_path)
    series = prepare(spec, rows)
    with matplotlib.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            if spec.kind == "bound-comparison":
                positions = np.arange(len(series))
                means = [s.stats[0].mean for s in series]
                halves = [s.stats[0].ci_half for s in series]
                ax.errorbar(positions, means, yerr=halves, fmt="o", capsize=3)
                ax.axhline(1.0, linestyle="--", linewidth=1)
                ax.set_xticks(positions)
                ax.set_xticklabels([s.label for s in series], rotation=30, ha="right")
                ax.set_ylabel("reading / bound")
            else:
                for one in series:
                    _draw_line(ax, one)
                if spec.kind == "welch":
                    ax.set_yscale("log")
                ax.set_xlabel(_X_LABELS[spec.kind])
                ax.set_ylabel(_Y_LABELS[spec.kind])
                if any(s.label for s in series):
                    ax.legend(fontsize=8)
            fig.tight_layout()
            metadata = {"Date": None} if spec.output_path.suffix == ".svg" else None
            fig.savefig(spec.output_path, metadata=metadata)
        finally:
            plt.close(fig)
    return spec.output_path
