"""Sweep drivers and row-level serialization for sensitivity studies.

Two kinds of sweeps produce one flat row type:

* perturbation sweeps draw random parameter vectors, nudge a fraction of the
  entries by a relative scale, and record every sensitivity reading next to
  the triangle-inequality bound;
* training sweeps replay classifier runs and log the same readings for the
  actual Adam updates, iteration by iteration.

Rows serialize to CSV (with ``#`` metadata comments) or JSON. All randomness
is derived from ``default_rng((seed, domain, cell))`` so that any cell of a
sweep can be reproduced in isolation and whole files compare byte-for-byte
across reruns.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np

from .ansatz import AnsatzConfig, EntanglerKind, RotationKind
from .sensitivity import channel_sensitivity
from .training import Dataset, TrainHyper, prepare_dataset, train

_PERTURB_DOMAIN = 1
_TRAIN_DOMAIN = 2

ROTATION_PANELS: tuple[tuple[RotationKind, ...], ...] = (
    (RotationKind.RX,),
    (RotationKind.RY,),
    (RotationKind.RZ,),
    (RotationKind.RX, RotationKind.RY),
    (RotationKind.RY, RotationKind.RZ),
    (RotationKind.RX, RotationKind.RZ),
    (RotationKind.RX, RotationKind.RY, RotationKind.RZ),
)

ENTANGLER_PANELS: tuple[tuple[EntanglerKind, ...], ...] = (
    (EntanglerKind.CNOT,),
    (EntanglerKind.CZ,),
    (EntanglerKind.CNOT, EntanglerKind.CZ),
)


@dataclass(frozen=True)
class PerturbationSpec:
    """What to sweep: circuit grid, perturbation sizes, and sample counts."""

    qubits: tuple[int, ...] = (1, 2, 3, 4)
    layers: tuple[int, ...] = (1, 2, 3, 4, 5)
    rotation_panels: tuple[tuple[RotationKind, ...], ...] = ROTATION_PANELS
    entangler_panels: tuple[tuple[EntanglerKind, ...], ...] = ENTANGLER_PANELS
    fraction: float = 0.95
    scales: tuple[float, ...] = (0.01, 0.005, 0.001)
    samples_per_param: int = 100
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError(f"fraction must sit in (0, 1], got {self.fraction}")
        if self.samples_per_param < 0:
            raise ValueError("samples_per_param must be non-negative")
        if not self.qubits or not self.layers:
            raise ValueError("qubit and layer lists must be non-empty")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def config_grid(spec: PerturbationSpec) -> list[AnsatzConfig]:
    """All circuit shapes of a sweep, entangler choice varying fastest."""
    return [
        AnsatzConfig(n, layers, rotations, entanglers)
        for n in spec.qubits
        for layers in spec.layers
        for rotations in spec.rotation_panels
        for entanglers in spec.entangler_panels
    ]


@dataclass(frozen=True)
class ExperimentRow:
    """One measurement: a perturbation sample or one training iteration."""

    kind: str
    config: str
    n: int
    L: int
    rotations: str
    entanglers: str
    n_params: int
    params_per_layer: int
    scale: float | None
    dataset: str | None
    encoding: str | None
    run: int | None
    index: int
    seed: int
    delta_abs_sum: float
    bound: float
    cs_opdiff: float
    cs_opdiff_gauged: float
    cs_channel: float
    spectral_diff: float
    loss: float | None
    mean_abs_rel_change: float | None
    frac_params_changed: float | None


CSV_COLUMNS: tuple[str, ...] = (
    "kind",
    "config",
    "n",
    "L",
    "rotations",
    "entanglers",
    "n_params",
    "params_per_layer",
    "scale",
    "dataset",
    "encoding",
    "run",
    "index",
    "seed",
    "delta_abs_sum",
    "bound",
    "cs_opdiff",
    "cs_opdiff_gauged",
    "cs_channel",
    "spectral_diff",
    "loss",
    "mean_abs_rel_change",
    "frac_params_changed",
)

_INT_COLUMNS = {"n", "L", "n_params", "params_per_layer", "index", "seed", "run"}
_FLOAT_COLUMNS = {
    "scale",
    "delta_abs_sum",
    "bound",
    "cs_opdiff",
    "cs_opdiff_gauged",
    "cs_channel",
    "spectral_diff",
    "loss",
    "mean_abs_rel_change",
    "frac_params_changed",
}
# columns where an empty cell means "not applicable" rather than empty text
_NULLABLE_COLUMNS = {
    "scale",
    "dataset",
    "encoding",
    "run",
    "loss",
    "mean_abs_rel_change",
    "frac_params_changed",
}


def _kinds_text(kinds: Sequence) -> str:
    return "+".join(k.value for k in kinds)


def draw_perturbation(
    rng: np.random.Generator, theta: np.ndarray, fraction: float, scale: float
) -> np.ndarray:
    """Perturb a random subset of parameters, relative to their values.

    ``round(fraction · P)`` distinct entries (at least one) move by
    ``±scale·θ_j`` with an independent random sign each.
    """
    p = theta.size
    count = min(p, max(1, round(fraction * p)))
    chosen = rng.choice(p, size=count, replace=False)
    signs = rng.integers(0, 2, size=count) * 2 - 1
    delta = np.zeros(p)
    delta[chosen] = signs * scale * theta[chosen]
    return delta


def _require_seed(seed: int) -> None:
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")


def run_perturbation(spec: PerturbationSpec) -> list[ExperimentRow]:
    """Sweep the grid, sampling ``samples_per_param × P`` draws per cell.

    A cell is one (config, scale) pair with its own random stream, so the
    output is independent of execution order and fully reproducible.
    """
    rows: list[ExperimentRow] = []
    cells = [(cfg, scale) for cfg in config_grid(spec) for scale in spec.scales]
    for cell_index, (cfg, scale) in enumerate(cells):
        rng = np.random.default_rng((spec.seed, _PERTURB_DOMAIN, cell_index))
        p = cfg.param_count
        for sample in range(spec.samples_per_param * p):
            theta = rng.uniform(0.0, 2 * np.pi, size=p)
            delta = draw_perturbation(rng, theta, spec.fraction, scale)
            rec = channel_sensitivity(cfg, theta, delta)
            rows.append(
                ExperimentRow(
                    kind="perturb",
                    config=cfg.to_text(),
                    n=cfg.qubits,
                    L=cfg.layers,
                    rotations=_kinds_text(cfg.rotations),
                    entanglers=_kinds_text(cfg.entanglers),
                    n_params=p,
                    params_per_layer=len(cfg.rotations),
                    scale=scale,
                    dataset=None,
                    encoding=None,
                    run=None,
                    index=sample,
                    seed=spec.seed,
                    delta_abs_sum=rec.delta_abs_sum,
                    bound=rec.bound,
                    cs_opdiff=rec.cs_opdiff,
                    cs_opdiff_gauged=rec.cs_opdiff_gauged,
                    cs_channel=rec.cs_channel,
                    spectral_diff=rec.spectral_diff,
                    loss=None,
                    mean_abs_rel_change=None,
                    frac_params_changed=None,
                )
            )
    return rows


def run_training(
    configs: Sequence[AnsatzConfig],
    datasets: Sequence[tuple[str, Dataset]],
    encodings: Sequence[str],
    hyper: TrainHyper,
    runs: int,
    seed: int,
) -> list[ExperimentRow]:
    """Train every (config, dataset, encoding) combination ``runs`` times.

    Each run gets its own derived seed, so adding runs extends a sweep
    without disturbing earlier ones.
    """
    _require_seed(seed)
    rows: list[ExperimentRow] = []
    encoded_cache: dict[tuple[str, str, int], object] = {}
    cell_index = 0
    for cfg in configs:
        for name, data in datasets:
            for encoding in encodings:
                key = (name, encoding, cfg.qubits)
                if key not in encoded_cache:
                    encoded_cache[key] = prepare_dataset(data, cfg.qubits, encoding)
                encoded = encoded_cache[key]
                for run in range(runs):
                    trace = train(
                        cfg, encoded, hyper, seed=(seed, _TRAIN_DOMAIN, cell_index)
                    )
                    cell_index += 1
                    for iteration, rec in enumerate(trace.records):
                        rows.append(
                            ExperimentRow(
                                kind="train",
                                config=cfg.to_text(),
                                n=cfg.qubits,
                                L=cfg.layers,
                                rotations=_kinds_text(cfg.rotations),
                                entanglers=_kinds_text(cfg.entanglers),
                                n_params=cfg.param_count,
                                params_per_layer=len(cfg.rotations),
                                scale=None,
                                dataset=name,
                                encoding=encoding,
                                run=run,
                                index=iteration,
                                seed=seed,
                                delta_abs_sum=rec.sensitivity.delta_abs_sum,
                                bound=rec.sensitivity.bound,
                                cs_opdiff=rec.sensitivity.cs_opdiff,
                                cs_opdiff_gauged=rec.sensitivity.cs_opdiff_gauged,
                                cs_channel=rec.sensitivity.cs_channel,
                                spectral_diff=rec.sensitivity.spectral_diff,
                                loss=rec.loss,
                                mean_abs_rel_change=rec.mean_abs_rel_change,
                                frac_params_changed=rec.frac_params_changed,
                            )
                        )
    return rows


# --- aggregation ------------------------------------------------------------------


def _ci95(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(1.96 * np.std(values, ddof=1) / math.sqrt(values.size))


@dataclass(frozen=True)
class TrainingSummary:
    """Across-run statistics for one (config, dataset, encoding, iteration)."""

    config: str
    dataset: str
    encoding: str
    iteration: int
    n_runs: int
    loss_mean: float
    loss_ci95: float
    mean_abs_rel_change_mean: float
    mean_abs_rel_change_ci95: float
    frac_params_changed_mean: float
    frac_params_changed_ci95: float
    cs_opdiff_gauged_mean: float
    cs_opdiff_gauged_ci95: float
    cs_channel_mean: float
    cs_channel_ci95: float
    bound_mean: float
    bound_ci95: float


SUMMARY_COLUMNS: tuple[str, ...] = (
    "config",
    "dataset",
    "encoding",
    "iteration",
    "n_runs",
    "loss_mean",
    "loss_ci95",
    "mean_abs_rel_change_mean",
    "mean_abs_rel_change_ci95",
    "frac_params_changed_mean",
    "frac_params_changed_ci95",
    "cs_opdiff_gauged_mean",
    "cs_opdiff_gauged_ci95",
    "cs_channel_mean",
    "cs_channel_ci95",
    "bound_mean",
    "bound_ci95",
)


def summarize_training(rows: Iterable[ExperimentRow]) -> list[TrainingSummary]:
    """Collapse training rows over runs, keeping the iteration axis."""
    groups: dict[tuple[str, str, str, int], list[ExperimentRow]] = {}
    for row in rows:
        if row.kind != "train":
            continue
        groups.setdefault((row.config, row.dataset, row.encoding, row.index), []).append(row)
    out = []
    for key in sorted(groups):
        members = groups[key]
        stats = {}
        for metric in (
            "loss",
            "mean_abs_rel_change",
            "frac_params_changed",
            "cs_opdiff_gauged",
            "cs_channel",
            "bound",
        ):
            values = np.array([getattr(m, metric) for m in members], dtype=float)
            stats[f"{metric}_mean"] = float(np.mean(values))
            stats[f"{metric}_ci95"] = _ci95(values)
        out.append(
            TrainingSummary(
                config=key[0],
                dataset=key[1],
                encoding=key[2],
                iteration=key[3],
                n_runs=len(members),
                **stats,
            )
        )
    return out


@dataclass(frozen=True)
class BoundComparison:
    """How one sensitivity reading compares to the bound for one config."""

    config: str
    reading: str
    n_samples: int
    ratio_max: float
    ratio_mean: float
    ratio_ci95: float
    violations: int


COMPARE_COLUMNS: tuple[str, ...] = (
    "config",
    "reading",
    "n_samples",
    "ratio_max",
    "ratio_mean",
    "ratio_ci95",
    "violations",
)

_READINGS = ("cs_opdiff", "cs_opdiff_gauged", "cs_channel")

# the bound only claims dominance while the perturbation budget is this small
BOUND_REGIME_LIMIT = 2.0


def compare_bound(rows: Iterable[ExperimentRow]) -> list[BoundComparison]:
    """Per-config ratio statistics of every reading against the bound.

    A violation is a reading that exceeds its bound (beyond 1e-12) on a row
    within the perturbation regime ``Σ|δ| ≤ 2``; outside that regime the
    bound makes no promise and rows are excluded from the count.
    """
    groups: dict[str, list[ExperimentRow]] = {}
    for row in rows:
        groups.setdefault(row.config, []).append(row)
    out = []
    for config in sorted(groups):
        members = groups[config]
        bounds = np.array([m.bound for m in members])
        deltas = np.array([m.delta_abs_sum for m in members])
        for reading in _READINGS:
            values = np.array([getattr(m, reading) for m in members])
            ratios = np.where(bounds > 0, values / np.where(bounds > 0, bounds, 1.0), 0.0)
            in_regime = deltas <= BOUND_REGIME_LIMIT
            violations = int(np.sum(in_regime & (values > bounds + 1e-12)))
            out.append(
                BoundComparison(
                    config=config,
                    reading=reading,
                    n_samples=len(members),
                    ratio_max=float(np.max(ratios)),
                    ratio_mean=float(np.mean(ratios)),
                    ratio_ci95=_ci95(ratios),
                    violations=violations,
                )
            )
    return out


# --- serialization -----------------------------------------------------------------


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _open_for_write(target):
    if isinstance(target, (str, Path)):
        return open(target, "w", newline=""), True
    return target, False


def write_rows_csv(
    target: str | Path | TextIO,
    rows: Iterable,
    metadata: dict[str, str] | None = None,
    columns: tuple[str, ...] = CSV_COLUMNS,
) -> None:
    """Write rows as CSV: ``# key: value`` comment lines, header, data.

    Floats render through ``repr`` so the text round-trips to the same bits;
    ``None`` becomes an empty cell. Works for any row type whose attribute
    names match ``columns``.
    """
    fh, owned = _open_for_write(target)
    try:
        for key, value in (metadata or {}).items():
            fh.write(f"# {key}: {value}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(getattr(row, col)) for col in columns])
    finally:
        if owned:
            fh.close()


def write_rows_json(
    target: str | Path | TextIO,
    rows: Iterable,
    metadata: dict[str, str] | None = None,
    columns: tuple[str, ...] = CSV_COLUMNS,
) -> None:
    """Write ``{"metadata": ..., "rows": [...]}`` with one object per row."""
    payload = {
        "metadata": dict(metadata or {}),
        "rows": [{col: getattr(row, col) for col in columns} for row in rows],
    }
    fh, owned = _open_for_write(target)
    try:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    finally:
        if owned:
            fh.close()


def _parse_cell(column: str, text: str):
    if text == "" and column in _NULLABLE_COLUMNS:
        return None
    if column in _INT_COLUMNS:
        return int(text)
    if column in _FLOAT_COLUMNS:
        return float(text)
    return text


def read_rows_csv(source: str | Path) -> tuple[dict[str, str], list[ExperimentRow]]:
    """Inverse of :func:`write_rows_csv` for the measurement schema."""
    text = Path(source).read_text()
    metadata: dict[str, str] = {}
    body_lines = []
    for line in text.splitlines():
        if line.startswith("# ") and not body_lines:
            key, _, value = line[2:].partition(": ")
            metadata[key] = value
        else:
            body_lines.append(line)
    reader = csv.reader(io.StringIO("\n".join(body_lines)))
    header = next(reader, None)
    if header != list(CSV_COLUMNS):
        raise ValueError("unrecognized measurement CSV header")
    rows = []
    for record in reader:
        if not record:
            continue
        kwargs = {col: _parse_cell(col, cell) for col, cell in zip(CSV_COLUMNS, record)}
        rows.append(ExperimentRow(**kwargs))
    return metadata, rows
