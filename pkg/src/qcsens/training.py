"""Variational classifier training with per-iteration sensitivity tracking.

The pipeline is deliberately plain: CSV in, two most frequent classes kept,
features standardized, principal components taken with the in-house
eigensolver, and the reduced vectors written into circuit states either as
amplitudes or as R_Y rotation angles. Training minimizes a mean-squared
error against ±1 labels with parameter-shift gradients and Adam. Every
iteration also records how far the parameter update moved the circuit,
both as raw statistics and through :func:`qcsens.sensitivity.channel_sensitivity`.
"""

from __future__ import annotations

import csv
from collections import Counter
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Sequence

import numpy as np

from .ansatz import AnsatzConfig, build_unitary
from .errors import (
    DimensionMismatch,
    EmptyDataset,
    SingleClass,
    TooFewFeatures,
)
from .linalg import herm_eig
from .sensitivity import SensitivityRecord, channel_sensitivity

_CHANGE_EPS = 1e-12


@dataclass(frozen=True)
class Dataset:
    """Raw feature matrix with ±1 labels, straight from a CSV file."""

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...]


@dataclass(frozen=True)
class EncodedDataset:
    """Circuit-ready states (one row per sample) with ±1 labels."""

    states: np.ndarray
    labels: np.ndarray
    encoding: str


def load_dataset_csv(path: str | Path) -> Dataset:
    """Read a labelled CSV and keep the two most frequent classes.

    The file must have a ``label`` column; every other column is parsed as a
    float feature. Rows outside the two largest classes are dropped. Ties on
    class size break toward the lexicographically smaller label, and the two
    surviving labels map onto -1/+1 in sorted order.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames
        if names is None or "label" not in names:
            raise ValueError(f"{path}: expected a 'label' column")
        feature_names = tuple(c for c in names if c != "label")
        rows = list(reader)
    if not rows:
        raise EmptyDataset(f"{path}: no data rows")
    counts = Counter(row["label"] for row in rows)
    if len(counts) < 2:
        raise SingleClass(f"{path}: need two classes, found {sorted(counts)}")
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    kept = sorted(label for label, _ in ranked[:2])
    mapping = {kept[0]: -1.0, kept[1]: 1.0}
    features = []
    labels = []
    for row in rows:
        if row["label"] not in mapping:
            continue
        features.append([float(row[c]) for c in feature_names])
        labels.append(mapping[row["label"]])
    return Dataset(np.asarray(features, dtype=float), np.asarray(labels), feature_names)


def pca_components(standardized: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Top-``k`` principal components of already-standardized data.

    Returns ``(variances, components)`` with variances in descending order
    and components as orthonormal columns.
    """
    m = standardized.shape[0]
    cov = standardized.T @ standardized / m
    spec = herm_eig(cov)
    variances = spec.eigenvalues[:k].copy()
    components = np.real(spec.eigenvectors[:, :k]).copy()
    return variances, components


def amplitude_encode(components: np.ndarray) -> np.ndarray:
    """Normalize each row into a state vector of matching dimension."""
    comps = np.asarray(components, dtype=float)
    norms = np.linalg.norm(comps, axis=1)
    if np.any(norms < 1e-12):
        bad = int(np.argmin(norms))
        raise ValueError(f"sample {bad} has zero norm and cannot be a state")
    return (comps / norms[:, None]).astype(complex)


def ry_product_state(angles: Sequence[float]) -> np.ndarray:
    """Product state ⊗_q R_Y(angle_q)|0⟩, one qubit per angle."""
    factors = [
        np.array([np.cos(a / 2), np.sin(a / 2)], dtype=complex) for a in angles
    ]
    return reduce(np.kron, factors)


def angle_encode(components: np.ndarray) -> np.ndarray:
    """Map each feature column onto [0, π] and rotate one qubit per column.

    Scaling is min-max per column over the whole dataset; a constant column
    has no spread to use, so its angle is pinned to zero.
    """
    comps = np.asarray(components, dtype=float)
    lo = comps.min(axis=0)
    span = comps.max(axis=0) - lo
    angles = np.zeros_like(comps)
    usable = span > 1e-12
    angles[:, usable] = (comps[:, usable] - lo[usable]) / span[usable] * np.pi
    return np.stack([ry_product_state(row) for row in angles])


def prepare_dataset(data: Dataset, qubits: int, encoding: str) -> EncodedDataset:
    """Standardize, project onto principal components, and encode.

    Constant features are dropped before standardization (they would divide
    by zero and carry no information). Amplitude encoding needs ``2**qubits``
    usable features, angle encoding ``qubits``.
    """
    if encoding not in ("amplitude", "angle"):
        raise ValueError(f"unknown encoding {encoding!r}")
    x = data.features
    if x.shape[0] == 0:
        raise EmptyDataset("no samples to encode")
    if np.unique(data.labels).size < 2:
        raise SingleClass("need both classes present")
    std = x.std(axis=0)
    usable = std > 1e-12
    k = 2**qubits if encoding == "amplitude" else qubits
    if int(np.sum(usable)) < k:
        raise TooFewFeatures(
            f"{encoding} encoding on {qubits} qubits needs {k} varying features, "
            f"found {int(np.sum(usable))}"
        )
    xs = (x[:, usable] - x[:, usable].mean(axis=0)) / std[usable]
    _, comps = pca_components(xs, k)
    reduced = xs @ comps
    if encoding == "amplitude":
        states = amplitude_encode(reduced)
    else:
        states = angle_encode(reduced)
    return EncodedDataset(states=states, labels=data.labels.copy(), encoding=encoding)


# --- model evaluation ----------------------------------------------------------


def _z_signs(dim: int) -> np.ndarray:
    # Z on the first qubit: +1 on the upper half of the computational basis.
    signs = np.ones(dim)
    signs[dim // 2 :] = -1.0
    return signs


def expectation(unitary: np.ndarray, state: np.ndarray) -> float:
    """⟨ψ|U† (Z⊗I…I) U|ψ⟩ for one state."""
    u = np.asarray(unitary, dtype=complex)
    psi = np.asarray(state, dtype=complex)
    if u.shape[0] != psi.shape[0]:
        raise DimensionMismatch(
            f"unitary is {u.shape[0]}-dimensional but state has {psi.shape[0]}"
        )
    out = u @ psi
    return float(_z_signs(u.shape[0]) @ np.abs(out) ** 2)


def _predictions(config: AnsatzConfig, theta: np.ndarray, states: np.ndarray) -> np.ndarray:
    u = build_unitary(config, theta)
    rotated = states @ u.T  # row i becomes (U ψ_i)ᵀ
    return np.abs(rotated) ** 2 @ _z_signs(u.shape[0])


def loss_and_grad(
    config: AnsatzConfig, theta: Sequence[float], data: EncodedDataset
) -> tuple[float, np.ndarray]:
    """Mean-squared-error loss and its parameter-shift gradient.

    Each partial derivative is exact (not a finite difference): shifting one
    rotation angle by ±π/2 and halving the difference of the two predictions
    reproduces the true derivative of these sine/cosine circuits.
    """
    if data.states.shape[0] == 0:
        raise EmptyDataset("cannot evaluate loss on an empty dataset")
    th = np.asarray(theta, dtype=float)
    f = _predictions(config, th, data.states)
    residual = f - data.labels
    loss = float(np.mean(residual**2))
    grad = np.empty(th.size)
    for j in range(th.size):
        up = th.copy()
        up[j] += np.pi / 2
        down = th.copy()
        down[j] -= np.pi / 2
        df = (_predictions(config, up, data.states) - _predictions(config, down, data.states)) / 2
        grad[j] = float(np.mean(2 * residual * df))
    return loss, grad


# --- optimizer -------------------------------------------------------------------


@dataclass(frozen=True)
class TrainHyper:
    """Adam settings plus the iteration budget."""

    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.99
    epsilon: float = 1e-8
    iterations: int = 150

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("betas must lie strictly inside (0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


@dataclass(frozen=True)
class AdamState:
    theta: np.ndarray
    first_moment: np.ndarray
    second_moment: np.ndarray
    step: int


def adam_init(theta: np.ndarray) -> AdamState:
    th = np.asarray(theta, dtype=float)
    return AdamState(th.copy(), np.zeros_like(th), np.zeros_like(th), 0)


def adam_step(state: AdamState, grad: np.ndarray, hyper: TrainHyper) -> AdamState:
    g = np.asarray(grad, dtype=float)
    t = state.step + 1
    m = hyper.beta1 * state.first_moment + (1 - hyper.beta1) * g
    v = hyper.beta2 * state.second_moment + (1 - hyper.beta2) * g**2
    m_hat = m / (1 - hyper.beta1**t)
    v_hat = v / (1 - hyper.beta2**t)
    theta = state.theta - hyper.learning_rate * m_hat / (np.sqrt(v_hat) + hyper.epsilon)
    return AdamState(theta, m, v, t)


# --- training loop ----------------------------------------------------------------


@dataclass(frozen=True)
class IterationRecord:
    """One optimizer step: loss before the update, then how far it moved."""

    loss: float
    mean_abs_rel_change: float
    frac_params_changed: float
    sensitivity: SensitivityRecord


@dataclass(frozen=True)
class TrainingTrace:
    records: list[IterationRecord] = field(default_factory=list)
    final_theta: np.ndarray | None = None


def train(
    config: AnsatzConfig,
    data: EncodedDataset,
    hyper: TrainHyper,
    seed: int | tuple[int, ...],
) -> TrainingTrace:
    """Run Adam from a seeded uniform start and log every step.

    The returned trace is bit-for-bit reproducible for a fixed
    ``(config, data, hyper, seed)``: the only randomness is the initial
    parameter draw from ``default_rng(seed)``.
    """
    rng = np.random.default_rng(seed)
    theta0 = rng.uniform(0.0, 2 * np.pi, size=config.param_count)
    state = adam_init(theta0)
    records: list[IterationRecord] = []
    for _ in range(hyper.iterations):
        loss, grad = loss_and_grad(config, state.theta, data)
        new_state = adam_step(state, grad, hyper)
        delta = new_state.theta - state.theta
        rel = np.abs(delta) / np.maximum(np.abs(state.theta), _CHANGE_EPS)
        records.append(
            IterationRecord(
                loss=loss,
                mean_abs_rel_change=float(np.mean(rel)),
                frac_params_changed=float(np.mean(np.abs(delta) > _CHANGE_EPS)),
                sensitivity=channel_sensitivity(config, state.theta, delta),
            )
        )
        state = new_state
    return TrainingTrace(records=records, final_theta=state.theta)
