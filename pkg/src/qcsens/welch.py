"""Welch-bound diagnostics for ensembles of pure states.

For n unit vectors in dimension d and any t ≥ 1,

    Σ_{j,k} |⟨ψ_j|ψ_k⟩|^{2t}  ≥  n² / C(d+t−1, t),

with equality characterizing state t-designs. The sum here runs over all
ordered pairs including j = k (the convention is recorded in the report),
and the report also carries the max-form variant over off-diagonal pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzConfig, build_unitary


@dataclass(frozen=True)
class StateEnsemble:
    """A finite family of unit vectors with a provenance label."""

    dim: int
    states: np.ndarray  # (count, dim), complex rows of unit norm
    provenance: str

    def __post_init__(self):
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 2 or states.shape[1] != self.dim:
            raise ValueError(f"expected (count, {self.dim}) states, got {states.shape}")
        if states.shape[0] < 1:
            raise ValueError("an ensemble needs at least one state")
        norms = np.linalg.norm(states, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > 1e-10:
            raise ValueError(f"states must be normalized; worst deviation {worst:.3e}")
        object.__setattr__(self, "states", states)

    def __len__(self) -> int:
        return self.states.shape[0]


def haar_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """One Haar-random pure state: 2d standard normals, normalized."""
    if d < 1:
        raise ValueError("dimension must be positive")
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def haar_ensemble(d: int, count: int, seed: int) -> StateEnsemble:
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    states = np.stack([haar_state(d, rng) for _ in range(count)])
    return StateEnsemble(dim=d, states=states, provenance="haar")


def basis_ensemble(d: int) -> StateEnsemble:
    return StateEnsemble(dim=d, states=np.eye(d, dtype=complex), provenance="basis")


def ansatz_state_ensemble(config: AnsatzConfig, count: int, seed: int) -> StateEnsemble:
    """States U(θ)|0…0⟩ with θ uniform in [0, 2π]^P, one draw per state."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    states = np.empty((count, config.dim), dtype=complex)
    for i in range(count):
        theta = rng.uniform(0.0, 2.0 * np.pi, size=config.param_count)
        states[i] = build_unitary(config, theta)[:, 0]  # action on |0…0⟩
    return StateEnsemble(dim=config.dim, states=states, provenance=f"ansatz:{config.to_text()}")


def welch_sum(ensemble: StateEnsemble, t: int) -> float:
    """Σ over ordered pairs (j, k), diagonal included, of |⟨ψ_j|ψ_k⟩|^{2t}."""
    if t < 1:
        raise ValueError("t must be a positive integer")
    gram = ensemble.states @ ensemble.states.conj().T
    overlaps_sq = np.abs(gram) ** 2
    return float(np.sum(overlaps_sq**t))


def welch_bound(n: int, d: int, t: int) -> float:
    """n² / C(d+t−1, t); exact integer division when it fits, log-gamma beyond."""
    if n < 1 or d < 1 or t < 1:
        raise ValueError("n, d, t must all be positive integers")
    denom = math.comb(d + t - 1, t)
    if n * n <= 2**53 and denom <= 2**53:
        return (n * n) / denom
    return math.exp(2 * math.log(n) - (math.lgamma(d + t) - math.lgamma(d) - math.lgamma(t + 1)))


def _max_offdiag_overlap_sq(ensemble: StateEnsemble) -> float:
    n = len(ensemble)
    if n < 2:
        return math.nan
    gram = ensemble.states @ ensemble.states.conj().T
    overlaps_sq = np.abs(gram) ** 2
    np.fill_diagonal(overlaps_sq, -np.inf)
    return float(np.max(overlaps_sq))


def max_overlap_rhs(n: int, d: int, t: int) -> float:
    """Max-form bound: max_{j≠k} |⟨ψ_j|ψ_k⟩|^{2t} ≥ (n/C(d+t−1,t) − 1)/(n−1)."""
    if n < 2:
        return math.nan
    return (n / math.comb(d + t - 1, t) - 1.0) / (n - 1)


@dataclass(frozen=True)
class WelchRow:
    t: int
    n: int
    d: int
    welch_sum: float
    welch_bound: float
    ratio: float
    max_overlap_lhs: float
    max_overlap_rhs: float
    provenance: str


WELCH_COLUMNS: tuple[str, ...] = (
    "t",
    "n",
    "d",
    "welch_sum",
    "welch_bound",
    "ratio",
    "max_overlap_lhs",
    "max_overlap_rhs",
    "provenance",
)


def welch_report(ensemble: StateEnsemble, t_max: int) -> list[WelchRow]:
    """Rows for t = 1..t_max; ratio = sum/bound is ≥ 1 for every row."""
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    n, d = len(ensemble), ensemble.dim
    base_overlap = _max_offdiag_overlap_sq(ensemble)
    rows = []
    for t in range(1, t_max + 1):
        s = welch_sum(ensemble, t)
        b = welch_bound(n, d, t)
        rows.append(
            WelchRow(
                t=t,
                n=n,
                d=d,
                welch_sum=s,
                welch_bound=b,
                ratio=s / b,
                max_overlap_lhs=base_overlap**t if not math.isnan(base_overlap) else math.nan,
                max_overlap_rhs=max_overlap_rhs(n, d, t),
                provenance=ensemble.provenance,
            )
        )
    return rows
