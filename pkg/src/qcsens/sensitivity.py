"""Distinguishability of unitary channels under parameter perturbation.

Two readings of ‖U − V‖◇ are computed side by side and never merged:

* ``channel_diamond_distance`` — the distance between the conjugation
  channels X ↦ UXU† and X ↦ VXV†. For unitaries this has a closed form,
  2·√(1 − ν²) with ν the distance from the origin to the convex hull of
  the spectrum of U†V. Global phases drop out entirely.
* ``op_diff_diamond`` — the diamond norm of the *operator difference*
  map X ↦ (U−V)X(U−V)†, which equals ‖U−V‖₂². This one is phase
  sensitive, which is what the gauge-fixing step is for.

``channel_sensitivity`` bundles both, the spectral-norm difference, and
the analytic perturbation bound Σ|δ|/2 into one record per sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzConfig, build_unitary
from .errors import DimensionMismatch, DimensionTooLarge
from .linalg import hull_distance_to_origin, require_unitary, spectral_norm, unitary_spectrum

#: gauge fixing only fires when A†B is this close (Frobenius, relative to
#: √dim) to a global phase times the identity
DEFAULT_OVERLAP_THRESHOLD = 0.1

#: largest single-system dimension the brute-force maximizer will take on;
#: the search space is a sphere in d² complex dimensions
BRUTE_FORCE_MAX_DIM = 16


@dataclass(frozen=True)
class SensitivityRecord:
    """Every distinguishability quantity for one (θ, δ) sample."""

    bound: float
    cs_opdiff: float
    cs_opdiff_gauged: float
    cs_channel: float
    spectral_diff: float
    delta_abs_sum: float


def _unitary_pair(u, v) -> tuple[np.ndarray, np.ndarray]:
    a = require_unitary(u)
    b = require_unitary(v)
    if a.shape != b.shape:
        raise DimensionMismatch(f"operands have shapes {a.shape} and {b.shape}")
    return a, b


def channel_diamond_distance(u, v) -> float:
    """Diamond distance between the conjugation channels of two unitaries."""
    a, b = _unitary_pair(u, v)
    spec = unitary_spectrum(a.conj().T @ b)
    nu = hull_distance_to_origin(spec.eigenvalues)
    return 2.0 * math.sqrt(max(0.0, 1.0 - min(nu, 1.0) ** 2))


def gauge_fix(
    a,
    b,
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD,
    literal_sign: bool = False,
) -> np.ndarray:
    """Rotate B by a global phase so the overlap Tr(A†B) is real nonnegative.

    Only acts when A†B is within ``overlap_threshold`` of a pure global
    phase (Frobenius deviation relative to √dim); otherwise B is returned
    untouched. ``literal_sign=True`` switches to the as-published update
    θ* = +arctan(Im z / Re z), which rotates the overlap phase the wrong
    way — kept only for comparing against the original procedure.
    """
    a_, b_ = _unitary_pair(a, b)
    dim = a_.shape[0]
    overlap = a_.conj().T @ b_
    z = complex(np.trace(overlap))
    deviation = float(np.linalg.norm(overlap - (z / dim) * np.eye(dim)))
    if deviation / math.sqrt(dim) >= overlap_threshold:
        return b_
    if literal_sign:
        if z.real == 0.0:
            theta = 0.0 if z.imag == 0.0 else math.copysign(math.pi / 2, z.imag)
        else:
            theta = math.atan(z.imag / z.real)
    else:
        theta = -math.atan2(z.imag, z.real)
    return np.exp(1j * theta) * b_


def op_diff_diamond(u, v, gauged: bool = True) -> float:
    """Diamond norm of the conjugation by U − V, i.e. spectral_norm(U − V)²."""
    a, b = _unitary_pair(u, v)
    if gauged:
        b = gauge_fix(a, b)
    return spectral_norm(a - b) ** 2


def sensitivity_bound(delta) -> float:
    """Analytic perturbation bound Σ|δ_j| / 2."""
    return float(np.sum(np.abs(np.asarray(delta, dtype=float)))) / 2.0


def brute_force_distinguishability(u, v, restarts: int = 32, seed: int = 0) -> float:
    """Search for the most distinguishing input state, ancilla included.

    Maximizes 2·√(1 − |⟨ψ|(U†V ⊗ I_d)|ψ⟩|²) over pure states on the doubled
    system by random restarts plus projected gradient descent on |⟨ψ|M|ψ⟩|².
    The result only ever lower-bounds ``channel_diamond_distance``, which
    makes the pair a two-sided check on each other.
    """
    a, b = _unitary_pair(u, v)
    d = a.shape[0]
    if d > BRUTE_FORCE_MAX_DIM:
        raise DimensionTooLarge(
            f"dimension {d} exceeds the brute-force cap {BRUTE_FORCE_MAX_DIM}"
        )
    m = np.kron(a.conj().T @ b, np.eye(d, dtype=complex))
    mh = m.conj().T
    rng = np.random.default_rng(seed)

    def overlap_sq(psi):
        return abs(np.vdot(psi, m @ psi)) ** 2

    best = np.inf
    for _ in range(max(1, restarts)):
        psi = rng.standard_normal(d * d) + 1j * rng.standard_normal(d * d)
        psi /= np.linalg.norm(psi)
        f = overlap_sq(psi)
        step = 0.5
        for _ in range(2000):
            h = np.vdot(psi, m @ psi)
            grad = np.conj(h) * (m @ psi) + h * (mh @ psi)
            grad -= np.vdot(psi, grad) * psi  # keep the step tangent to the sphere
            gn = float(np.linalg.norm(grad))
            if gn < 1e-14:
                break
            direction = grad / gn
            improved = False
            while step > 1e-9:
                cand = psi - step * direction
                cand /= np.linalg.norm(cand)
                fc = overlap_sq(cand)
                if fc < f:
                    improved = fc < f - 1e-10
                    psi, f = cand, fc
                    step *= 1.5
                    break
                step *= 0.5
            if not improved:
                break
        best = min(best, f)
    return 2.0 * math.sqrt(max(0.0, 1.0 - min(best, 1.0)))


def channel_sensitivity(config: AnsatzConfig, theta, delta) -> SensitivityRecord:
    """All sensitivity readings for perturbing θ by δ on one circuit."""
    th = np.asarray(theta, dtype=float)
    dl = np.asarray(delta, dtype=float)
    u = build_unitary(config, th)
    v = build_unitary(config, th + dl)
    v_fixed = gauge_fix(u, v)
    spectral_diff = spectral_norm(u - v_fixed)
    return SensitivityRecord(
        bound=sensitivity_bound(dl),
        cs_opdiff=spectral_norm(u - v) ** 2,
        cs_opdiff_gauged=spectral_diff**2,
        cs_channel=channel_diamond_distance(u, v),
        spectral_diff=spectral_diff,
        delta_abs_sum=float(np.sum(np.abs(dl))),
    )
