"""Welch-bound machinery.

welch_sum is cross-checked against a naive double loop over ordered pairs;
bound values against hand-computed binomials; sampled ensembles against
moment identities with explicit standard-error budgets.
"""

import math

import numpy as np
import pytest

from qcsens.ansatz import AnsatzConfig, RotationKind
from qcsens.welch import (
    StateEnsemble,
    ansatz_state_ensemble,
    basis_ensemble,
    haar_ensemble,
    haar_state,
    welch_bound,
    welch_report,
    welch_sum,
)


def naive_welch_sum(states, t):
    # ordered pairs, diagonal included — straight from the definition
    total = 0.0
    for psi in states:
        for phi in states:
            total += abs(np.vdot(psi, phi)) ** (2 * t)
    return total


# --- sampling ----------------------------------------------------------------


def test_haar_state_one_dimensional():
    rng = np.random.default_rng(0)
    psi = haar_state(1, rng)
    assert psi.shape == (1,)
    assert abs(abs(psi[0]) - 1.0) < 1e-12


def test_haar_state_deterministic_stream():
    a = haar_state(4, np.random.default_rng(7))
    b = haar_state(4, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_haar_first_component_moment():
    # |⟨e0|ψ⟩|² is Beta(1, d−1): mean 1/d, var (d−1)/(d²(d+1))
    d, count = 4, 10_000
    rng = np.random.default_rng(11)
    vals = np.array([abs(haar_state(d, rng)[0]) ** 2 for _ in range(count)])
    stderr = math.sqrt((d - 1) / (d**2 * (d + 1)) / count)
    assert abs(vals.mean() - 1 / d) < 3 * stderr


def test_basis_ensemble_is_orthonormal():
    ens = basis_ensemble(4)
    assert ens.provenance == "basis"
    assert np.array_equal(ens.states, np.eye(4, dtype=complex))


def test_diagonal_circuit_pins_the_basis_state():
    cfg = AnsatzConfig(qubits=2, layers=2, rotations=(RotationKind.RZ,))
    ens = ansatz_state_ensemble(cfg, count=20, seed=3)
    assert ens.provenance == f"ansatz:{cfg.to_text()}"
    overlaps = np.abs(ens.states[:, 0])
    assert np.all(np.abs(overlaps - 1.0) < 1e-10)


def test_single_qubit_euler_matches_haar_first_moment():
    # averaging over uniform Euler angles gives E[ρ] = I/2 exactly; with
    # 10,000 samples each entry of the mean projector carries a standard
    # error below 0.005, so 0.02 is a comfortable 3σ+ gate
    cfg = AnsatzConfig(
        qubits=1, layers=1,
        rotations=(RotationKind.RX, RotationKind.RY, RotationKind.RZ),
    )
    ens = ansatz_state_ensemble(cfg, count=10_000, seed=5)
    mean_rho = np.einsum("ki,kj->ij", ens.states, ens.states.conj()) / len(ens.states)
    assert np.max(np.abs(mean_rho - np.eye(2) / 2)) < 0.02


def test_empty_ensemble_rejected():
    cfg = AnsatzConfig(qubits=1, layers=1, rotations=(RotationKind.RX,))
    with pytest.raises(ValueError):
        ansatz_state_ensemble(cfg, count=0, seed=1)
    with pytest.raises(ValueError):
        StateEnsemble(dim=2, states=np.empty((0, 2), dtype=complex), provenance="custom")


def test_unnormalized_states_rejected():
    with pytest.raises(ValueError):
        StateEnsemble(dim=2, states=np.array([[1.0, 1.0]], dtype=complex), provenance="custom")


# --- the sum and the bound ---------------------------------------------------


def test_orthonormal_basis_sum_is_diagonal_only():
    assert welch_sum(basis_ensemble(4), 1) == pytest.approx(4.0, abs=1e-12)
    assert welch_sum(basis_ensemble(4), 3) == pytest.approx(4.0, abs=1e-12)


def test_repeated_state_sum_counts_all_pairs():
    psi = np.array([1.0, 0.0], dtype=complex)
    ens = StateEnsemble(dim=2, states=np.stack([psi] * 3), provenance="custom")
    for t in (1, 2, 5):
        assert welch_sum(ens, t) == pytest.approx(9.0, abs=1e-10)


def test_welch_sum_matches_naive_loop():
    rng = np.random.default_rng(13)
    for d, count in [(2, 8), (3, 12), (4, 10)]:
        states = np.stack([haar_state(d, rng) for _ in range(count)])
        ens = StateEnsemble(dim=d, states=states, provenance="custom")
        for t in (1, 2, 3, 4):
            got = welch_sum(ens, t)
            want = naive_welch_sum(states, t)
            assert got == pytest.approx(want, rel=1e-10)


def test_welch_bound_hand_values():
    assert welch_bound(4, 4, 1) == 4.0
    assert welch_bound(4, 4, 2) == 1.6  # 16/10, one correctly rounded division
    assert welch_bound(100, 2, 3) == 2500.0


def test_welch_bound_log_gamma_branch_is_continuous():
    # same formula, two evaluation routes; they must agree where both apply
    for n, d, t in [(1000, 30, 6), (5000, 16, 5), (123, 7, 4)]:
        exact = (n * n) / math.comb(d + t - 1, t)
        via_lgamma = math.exp(
            2 * math.log(n) - (math.lgamma(d + t) - math.lgamma(d) - math.lgamma(t + 1))
        )
        assert welch_bound(n, d, t) == exact
        assert via_lgamma == pytest.approx(exact, rel=1e-12)


def test_welch_bound_huge_arguments_do_not_overflow():
    val = welch_bound(10**9, 50, 6)
    assert np.isfinite(val) and val > 0


def test_welch_bound_rejects_bad_arguments():
    with pytest.raises(ValueError):
        welch_bound(0, 4, 1)
    with pytest.raises(ValueError):
        welch_bound(4, 0, 1)
    with pytest.raises(ValueError):
        welch_bound(4, 4, 0)


def test_bound_decreases_with_t():
    for d in (2, 4, 8):
        vals = [welch_bound(50, d, t) for t in range(1, 7)]
        assert all(b < a for a, b in zip(vals, vals[1:]))


def test_haar_ensemble_satisfies_inequality():
    ens = haar_ensemble(4, 200, seed=17)
    s = welch_sum(ens, 2)
    assert s >= welch_bound(200, 4, 2)
    assert welch_bound(200, 4, 2) == 4000.0


def test_sum_never_below_diagonal_mass():
    rng = np.random.default_rng(19)
    for _ in range(10):
        d = int(rng.integers(2, 6))
        count = int(rng.integers(1, 30))
        ens = StateEnsemble(
            dim=d,
            states=np.stack([haar_state(d, rng) for _ in range(count)]),
            provenance="custom",
        )
        t = int(rng.integers(1, 5))
        assert welch_sum(ens, t) >= count - 1e-9


def test_sum_invariant_under_common_unitary():
    rng = np.random.default_rng(23)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    q, r = np.linalg.qr(z)
    u = q * (np.diagonal(r) / np.abs(np.diagonal(r)))
    ens = haar_ensemble(4, 60, seed=29)
    rotated = StateEnsemble(dim=4, states=ens.states @ u.T, provenance="custom")
    for t in (1, 2, 3):
        assert abs(welch_sum(ens, t) - welch_sum(rotated, t)) < 1e-9


# --- report ------------------------------------------------------------------


def test_report_orthonormal_basis_ratios():
    rows = welch_report(basis_ensemble(4), t_max=2)
    assert [r.t for r in rows] == [1, 2]
    assert rows[0].ratio == pytest.approx(1.0, abs=1e-12)  # tight frame at t = 1
    assert rows[1].ratio == pytest.approx(2.5, abs=1e-12)
    assert all(r.n == 4 and r.d == 4 for r in rows)


def test_report_haar_all_ratios_above_one():
    rows = welch_report(haar_ensemble(4, 200, seed=31), t_max=4)
    assert len(rows) == 4
    for row in rows:
        assert row.ratio >= 1.0
        assert row.welch_sum >= row.welch_bound


def test_report_repeated_state_ratio_grows_binomially():
    psi = np.zeros(3, dtype=complex)
    psi[1] = 1.0
    ens = StateEnsemble(dim=3, states=np.stack([psi] * 5), provenance="custom")
    rows = welch_report(ens, t_max=4)
    for row in rows:
        assert row.ratio == pytest.approx(math.comb(3 + row.t - 1, row.t), rel=1e-12)


def test_report_max_overlap_columns():
    # max-form check: max off-diagonal |overlap|^{2t} against its own bound
    ens = haar_ensemble(2, 40, seed=37)
    rows = welch_report(ens, t_max=3)
    for row in rows:
        assert row.max_overlap_lhs >= row.max_overlap_rhs - 1e-12
        assert 0.0 <= row.max_overlap_lhs <= 1.0


def test_report_single_state_has_no_offdiagonal():
    ens = StateEnsemble(
        dim=2, states=np.array([[1.0, 0.0]], dtype=complex), provenance="custom"
    )
    rows = welch_report(ens, t_max=2)
    for row in rows:
        assert math.isnan(row.max_overlap_lhs)
        assert math.isnan(row.max_overlap_rhs)
