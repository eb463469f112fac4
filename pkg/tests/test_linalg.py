"""Tests for the dense linear-algebra core.

Expected values come from oracles that do not share code with the
implementation: characteristic-polynomial roots (Faddeev-LeVerrier
coefficients fed to a companion-matrix root finder), numpy's SVD and
determinant, trigonometric closed forms, and a support-function sweep
for the hull distance.
"""

import numpy as np
import pytest

from qcsens.errors import DimensionTooLarge, NotHermitian, NotUnitary
from qcsens.linalg import herm_eig, hull_distance_to_origin, spectral_norm, unitary_spectrum

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def rz(theta):
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (m + m.conj().T) / 2


def random_unitary(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(m)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def charpoly_roots(a):
    """Oracle eigenvalues: Faddeev-LeVerrier coefficients + companion-matrix roots."""
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a, dtype=complex)
    eye = np.eye(n)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * eye
        coeffs.append(-np.trace(a @ m) / k)
    return np.roots(np.array(coeffs))


# ---------------------------------------------------------------- herm_eig

def test_herm_eig_identity():
    spec = herm_eig(np.eye(2))
    assert np.allclose(spec.eigenvalues, [1.0, 1.0], atol=1e-12)


def test_herm_eig_pauli_z():
    spec = herm_eig(SZ)
    assert np.allclose(spec.eigenvalues, [1.0, -1.0], atol=1e-12)


def test_herm_eig_matches_charpoly_roots_dim8():
    rng = np.random.default_rng(8)
    h = random_hermitian(rng, 8)
    spec = herm_eig(h)
    oracle = np.sort(charpoly_roots(h).real)[::-1]
    assert np.max(np.abs(spec.eigenvalues - oracle)) < 1e-7
    # trace and determinant identities
    assert abs(np.sum(spec.eigenvalues) - np.trace(h).real) < 1e-8
    assert abs(np.prod(spec.eigenvalues) - np.linalg.det(h).real) < 1e-7
    # reconstruction residual
    q, lam = spec.eigenvectors, spec.eigenvalues
    resid = np.linalg.norm(h - (q * lam) @ q.conj().T)
    assert resid <= 1e-8 * np.linalg.norm(h)


@pytest.mark.parametrize("dim", [2, 3, 5, 16, 32])
def test_herm_eig_orthonormal_descending(dim):
    rng = np.random.default_rng(100 + dim)
    h = random_hermitian(rng, dim)
    spec = herm_eig(h)
    vals, q = spec.eigenvalues, spec.eigenvectors
    assert np.all(np.diff(vals) <= 1e-12)
    assert np.linalg.norm(q.conj().T @ q - np.eye(dim)) <= 1e-9
    assert abs(np.sum(vals) - np.trace(h).real) < 1e-8
    resid = np.linalg.norm(h - (q * vals) @ q.conj().T)
    assert resid <= 1e-8 * np.linalg.norm(h)


def test_herm_eig_degenerate_spectrum():
    # block diag(2, 2, -1) hidden by a change of basis
    rng = np.random.default_rng(7)
    u = random_unitary(rng, 3)
    h = u @ np.diag([2.0, 2.0, -1.0]) @ u.conj().T
    h = (h + h.conj().T) / 2
    spec = herm_eig(h)
    assert np.allclose(spec.eigenvalues, [2.0, 2.0, -1.0], atol=1e-10)
    resid = np.linalg.norm(h - (spec.eigenvectors * spec.eigenvalues) @ spec.eigenvectors.conj().T)
    assert resid <= 1e-10


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_herm_eig_rejects_oversized():
    with pytest.raises(DimensionTooLarge):
        herm_eig(np.eye(65))


def test_herm_eig_deterministic():
    rng = np.random.default_rng(3)
    h = random_hermitian(rng, 6)
    a = herm_eig(h)
    b = herm_eig(h.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


# ---------------------------------------------------------- unitary_spectrum

def test_unitary_spectrum_identity():
    spec = unitary_spectrum(np.eye(4))
    assert np.allclose(spec.eigenvalues, np.ones(4), atol=1e-12)


def test_unitary_spectrum_pauli_x():
    spec = unitary_spectrum(SX)
    assert np.allclose(spec.eigenvalues, [1.0, -1.0], atol=1e-12)


def test_unitary_spectrum_rz_quarter_turn():
    spec = unitary_spectrum(rz(np.pi / 2))
    # sorted by descending real part, then descending imaginary part
    expected = np.array([np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)])
    assert np.max(np.abs(spec.eigenvalues - expected)) < 1e-12


@pytest.mark.parametrize("dim", [2, 4, 8, 16])
def test_unitary_spectrum_det_circle_reconstruction(dim):
    rng = np.random.default_rng(40 + dim)
    w = random_unitary(rng, dim)
    spec = unitary_spectrum(w)
    assert np.max(np.abs(np.abs(spec.eigenvalues) - 1.0)) < 1e-9
    assert abs(np.prod(spec.eigenvalues) - np.linalg.det(w)) < 1e-7
    q, lam = spec.eigenvectors, spec.eigenvalues
    resid = np.linalg.norm(w - (q * lam) @ q.conj().T)
    assert resid <= 1e-7 * np.sqrt(dim)


def test_unitary_spectrum_degenerate_pairs():
    # kron(R_Z(0.3), I) has each eigenvalue twice
    w = np.kron(rz(0.3), np.eye(2))
    spec = unitary_spectrum(w)
    expected = np.array([np.exp(1j * 0.15)] * 2 + [np.exp(-1j * 0.15)] * 2)
    order = np.lexsort((-expected.imag, -expected.real))
    assert np.max(np.abs(spec.eigenvalues - expected[order])) < 1e-10
    q, lam = spec.eigenvectors, spec.eigenvalues
    assert np.linalg.norm(w - (q * lam) @ q.conj().T) < 1e-9


def test_unitary_spectrum_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        unitary_spectrum(np.diag([1.0, 0.5]))


# ------------------------------------------------------------- spectral_norm

def test_spectral_norm_identity():
    assert abs(spectral_norm(np.eye(3)) - 1.0) < 1e-12


def test_spectral_norm_diagonal():
    assert abs(spectral_norm(np.diag([3.0, 1.0])) - 3.0) < 1e-10


def test_spectral_norm_rz_difference():
    val = spectral_norm(np.eye(2) - rz(0.2))
    assert abs(val - 2 * np.sin(0.05)) < 1e-10


def test_spectral_norm_zero_matrix():
    assert spectral_norm(np.zeros((4, 4))) == 0.0


@pytest.mark.parametrize("dim", [2, 4, 8])
def test_spectral_norm_unitary_is_one(dim):
    rng = np.random.default_rng(60 + dim)
    for _ in range(5):
        u = random_unitary(rng, dim)
        assert abs(spectral_norm(u) - 1.0) < 1e-9


def test_spectral_norm_scaling():
    rng = np.random.default_rng(9)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    base = spectral_norm(m)
    for c in [0.5, -2.0, 3.7j]:
        assert abs(spectral_norm(c * m) - abs(c) * base) < 1e-9 * abs(c) * base


def test_spectral_norm_matches_svd():
    rng = np.random.default_rng(11)
    for dim in [2, 3, 6, 12]:
        for _ in range(5):
            m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
            ours = spectral_norm(m)
            oracle = np.linalg.norm(m, 2)
            assert abs(ours - oracle) < 1e-9 * oracle


def test_spectral_norm_near_degenerate_top():
    # top two singular values split by 1e-8: needs the two-vector escalation
    rng = np.random.default_rng(13)
    u = random_unitary(rng, 4)
    v = random_unitary(rng, 4)
    m = u @ np.diag([1.0, 1.0 - 1e-8, 0.4, 0.1]) @ v
    assert abs(spectral_norm(m) - 1.0) < 1e-9


# --------------------------------------------------- hull_distance_to_origin

def test_hull_single_point():
    assert abs(hull_distance_to_origin([1.0 + 0j]) - 1.0) < 1e-15
    assert abs(hull_distance_to_origin([3.0 + 4.0j]) - 5.0) < 1e-12


def test_hull_segment_through_origin():
    assert hull_distance_to_origin([1.0 + 0j, -1.0 + 0j]) == 0.0


def test_hull_chord_midpoint():
    pts = [np.exp(1j * np.pi / 4), np.exp(-1j * np.pi / 4)]
    assert abs(hull_distance_to_origin(pts) - np.cos(np.pi / 4)) < 1e-12


def test_hull_origin_inside_polygon():
    pts = [1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]
    assert hull_distance_to_origin(pts) == 0.0


def test_hull_collinear_points():
    pts = [1 + 1j, 2 + 2j, 3 + 3j]
    assert abs(hull_distance_to_origin(pts) - np.sqrt(2)) < 1e-12


def test_hull_duplicate_points():
    assert abs(hull_distance_to_origin([2j, 2j, 2j]) - 2.0) < 1e-15


def test_hull_rotation_invariance():
    rng = np.random.default_rng(17)
    for _ in range(25):
        k = rng.integers(1, 12)
        pts = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        base = hull_distance_to_origin(pts)
        phi = rng.uniform(0, 2 * np.pi)
        rotated = hull_distance_to_origin(np.exp(1j * phi) * pts)
        assert abs(rotated - base) < 1e-10


def _support_sweep(xy, angles):
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    vals = np.clip(np.min(dirs @ xy.T, axis=1), 0.0, None)
    i = int(np.argmax(vals))
    return float(vals[i]), float(angles[i])


def test_hull_support_function_oracle():
    # oracle brackets: support-function sweep from below, convex samples from above
    rng = np.random.default_rng(19)
    coarse = np.linspace(0, 2 * np.pi, 20000, endpoint=False)
    step = coarse[1] - coarse[0]
    for _ in range(20):
        k = int(rng.integers(1, 10))
        pts = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        xy = np.stack([pts.real, pts.imag], axis=1)
        lower, best = _support_sweep(xy, coarse)
        # refine around the best coarse direction to shrink discretization error
        lower, _ = _support_sweep(xy, np.linspace(best - step, best + step, 4001))
        weights = rng.dirichlet(np.ones(k), size=200)
        upper = np.min(np.abs(weights @ pts))
        ours = hull_distance_to_origin(pts)
        assert ours >= lower - 1e-9
        assert ours <= upper + 1e-9
        assert ours - lower < 1e-6 * max(1.0, ours)
