"""Dense complex linear algebra for operators of dimension <= 64.

Everything here is sized for gate matrices rather than generic numerics:
a cyclic Jacobi eigensolver for Hermitian matrices, spectral decomposition
of unitary (normal) matrices through the Hermitian splitting W = A + iB,
a power-iteration spectral norm, and the Euclidean distance from the origin
to the convex hull of a planar point set. All functions are pure and work
on plain numpy arrays in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DimensionTooLarge, NotHermitian, NotUnitary

#: hard cap on matrix dimension; keeps the O(dim^3)-per-sweep Jacobi honest
MAX_DIM = 64

#: eigenvalues of A = (W+W†)/2 closer than this are treated as one eigenspace
#: when splitting a unitary; gate perturbations in the experiments are >= 1e-4,
#: far above this scale
EIGENSPACE_GROUP_TOL = 1e-8


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a matrix, and optionally eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def _square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError("matrix must be at least 1x1")
    if a.shape[0] > MAX_DIM:
        raise DimensionTooLarge(f"dimension {a.shape[0]} exceeds the dense cap {MAX_DIM}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def require_hermitian(m, tol: float = 1e-10) -> np.ndarray:
    a = _square(m)
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > tol:
        raise NotHermitian(f"max |H - H†| = {dev:.3e} exceeds {tol:.1e}")
    return a


def require_unitary(m, tol: float = 1e-9) -> np.ndarray:
    a = _square(m)
    dim = a.shape[0]
    dev = float(np.linalg.norm(a.conj().T @ a - np.eye(dim)))
    if dev > tol * np.sqrt(dim):
        raise NotUnitary(f"‖W†W - I‖_F = {dev:.3e} exceeds {tol:.1e}·√{dim}")
    return a


def herm_eig(h) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns real eigenvalues in descending order with orthonormal
    eigenvector columns. Column phases are normalized so the largest-
    magnitude entry of each eigenvector is real and positive, which makes
    the output deterministic.
    """
    a = require_hermitian(h).copy()
    n = a.shape[0]
    a = (a + a.conj().T) / 2  # kill roundoff asymmetry; diagonal becomes real
    q = np.eye(n, dtype=complex)

    scale = float(np.linalg.norm(a))
    if n > 1 and scale > 0.0:
        stop = 1e-14 * scale
        skip = stop / (n * n)
        for _sweep in range(100):
            off = float(np.linalg.norm(a - np.diag(np.diagonal(a))))
            if off <= stop:
                break
            for p in range(n - 1):
                for r in range(p + 1, n):
                    apr = a[p, r]
                    mag = abs(apr)
                    if mag <= skip:
                        continue
                    alpha = apr / mag
                    mu = (a[p, p].real - a[r, r].real) / (2.0 * mag)
                    sgn = 1.0 if mu >= 0.0 else -1.0
                    t = -sgn / (abs(mu) + np.hypot(1.0, mu))  # |rotation| <= π/4
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    # similarity transform by the plane rotation on (p, r)
                    colp, colr = a[:, p].copy(), a[:, r].copy()
                    a[:, p] = c * colp - s * np.conj(alpha) * colr
                    a[:, r] = s * alpha * colp + c * colr
                    rowp, rowr = a[p, :].copy(), a[r, :].copy()
                    a[p, :] = c * rowp - s * alpha * rowr
                    a[r, :] = s * np.conj(alpha) * rowp + c * rowr
                    a[p, r] = 0.0
                    a[r, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[r, r] = a[r, r].real
                    qcp, qcr = q[:, p].copy(), q[:, r].copy()
                    q[:, p] = c * qcp - s * np.conj(alpha) * qcr
                    q[:, r] = s * alpha * qcp + c * qcr
        else:
            raise ConvergenceFailure("Jacobi sweep cap reached")

    vals = np.real(np.diagonal(a)).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    q = q[:, order]
    for k in range(n):  # deterministic column phases
        i = int(np.argmax(np.abs(q[:, k])))
        piv = q[i, k]
        if abs(piv) > 0.0:
            q[:, k] = q[:, k] * (np.conj(piv) / abs(piv))
    return Spectrum(vals, q)


def unitary_spectrum(w) -> Spectrum:
    """Spectral decomposition of a unitary matrix.

    Splits W = A + iB with Hermitian A = (W+W†)/2 and B = (W−W†)/(2i),
    diagonalizes A, then diagonalizes B restricted to each (near-)eigenspace
    of A. Eigenvalues land on the unit circle and are sorted by descending
    real part, then descending imaginary part.
    """
    a = require_unitary(w)
    n = a.shape[0]
    ha = (a + a.conj().T) / 2
    hb = (a - a.conj().T) / 2j
    sa = herm_eig(ha)
    avals, q = sa.eigenvalues, sa.eigenvectors

    eigenvalues = np.empty(n, dtype=complex)
    vectors = np.empty((n, n), dtype=complex)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and avals[stop - 1] - avals[stop] <= EIGENSPACE_GROUP_TOL:
            stop += 1
        qg = q[:, start:stop]
        if stop - start == 1:
            v = qg[:, 0]
            bval = float(np.real(np.vdot(v, hb @ v)))
            eigenvalues[start] = avals[start] + 1j * bval
            vectors[:, start] = v
        else:
            bsub = qg.conj().T @ hb @ qg
            sb = herm_eig(bsub)
            vg = qg @ sb.eigenvectors
            for k in range(stop - start):
                v = vg[:, k]
                re = float(np.real(np.vdot(v, ha @ v)))
                eigenvalues[start + k] = re + 1j * sb.eigenvalues[k]
                vectors[:, start + k] = v
        start = stop

    order = np.lexsort((-eigenvalues.imag, -eigenvalues.real))
    return Spectrum(eigenvalues[order], vectors[:, order])


def _orthonormalize(cols: np.ndarray, rng, scale: float) -> np.ndarray:
    """Modified Gram-Schmidt; collapsed columns are replaced with fresh noise."""
    n, k = cols.shape
    out = np.empty_like(cols)
    for j in range(k):
        v = cols[:, j].copy()
        for _attempt in range(8):
            for i in range(j):
                v -= np.vdot(out[:, i], v) * out[:, i]
            nv = float(np.linalg.norm(v))
            if nv > 1e-12 * scale:
                out[:, j] = v / nv
                break
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        else:  # pragma: no cover - eight random draws cannot all collapse
            raise ConvergenceFailure("could not rebuild an orthonormal basis")
    return out


def spectral_norm(m) -> float:
    """Largest singular value via block power iteration on M†M.

    Starts as plain power iteration and doubles the block size whenever the
    Rayleigh estimate stagnates, which happens when the top singular values
    cluster. Once the block spans the cluster the top Ritz pair converges;
    at full dimension the projection is exact, so termination is
    unconditional. Relative accuracy 1e-10, iteration cap 10,000.
    """
    a = _square(m)
    n = a.shape[0]
    g = a.conj().T @ a
    fro2 = float(np.real(np.trace(g)))
    if fro2 <= 0.0:
        return 0.0

    cap = 10_000
    floor = fro2 / n  # λ_max ≥ ‖M‖_F²/n > 0
    rng = np.random.default_rng(181129)  # fixed stream keeps the function pure

    k = 1
    basis = _orthonormalize(
        rng.standard_normal((n, 1)) + 1j * rng.standard_normal((n, 1)), rng, 1.0
    )
    lam = 0.0
    resid = np.inf
    stall = 0
    phase_used = 0
    for _ in range(cap):
        phase_used += 1
        w = g @ basis
        if k == 1:
            new_lam = float(np.real(np.vdot(basis[:, 0], w[:, 0])))
            x = basis[:, 0]
            resid = float(np.linalg.norm(w[:, 0] - new_lam * x))
        else:
            t = basis.conj().T @ w
            ritz = herm_eig((t + t.conj().T) / 2)
            new_lam = float(ritz.eigenvalues[0])
            y = ritz.eigenvectors[:, 0]
            resid = float(np.linalg.norm(w @ y - new_lam * (basis @ y)))
        if resid <= 1e-11 * max(new_lam, floor):
            return float(np.sqrt(max(new_lam, 0.0)))
        stall = stall + 1 if new_lam - lam <= 1e-13 * max(new_lam, floor) else 0
        lam = new_lam
        if k < n and (stall >= 5 or phase_used >= 600):
            # top of the spectrum is clustered beyond the current block
            k = min(2 * k, n)
            extra = rng.standard_normal((n, k - basis.shape[1])) + 1j * rng.standard_normal(
                (n, k - basis.shape[1])
            )
            w = np.hstack([w, extra])
            stall = 0
            phase_used = 0
        basis = _orthonormalize(w, rng, float(np.sqrt(fro2)))

    if resid > 1e-8 * max(lam, floor):
        raise ConvergenceFailure(
            f"power iteration hit the {cap}-step cap with residual {resid:.3e}"
        )
    return float(np.sqrt(max(lam, 0.0)))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(pts: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Convex hull of >= 2 sorted unique points, counterclockwise."""
    lower: list[tuple[float, float]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[float, float]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _segment_distance_to_origin(a: tuple[float, float], b: tuple[float, float]) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    l2 = dx * dx + dy * dy
    if l2 == 0.0:
        return float(np.hypot(a[0], a[1]))
    t = (-a[0] * dx - a[1] * dy) / l2
    t = min(1.0, max(0.0, t))
    return float(np.hypot(a[0] + t * dx, a[1] + t * dy))


def hull_distance_to_origin(points) -> float:
    """Euclidean distance from the origin to the convex hull of the points.

    Points are complex numbers read as (real, imag) pairs; returns 0 when
    the origin lies inside or on the hull.
    """
    z = np.atleast_1d(np.asarray(points, dtype=complex)).ravel()
    if z.size == 0:
        raise ValueError("need at least one point")
    if not np.isfinite(z).all():
        raise ValueError("points must be finite")

    pts = sorted({(float(p.real), float(p.imag)) for p in z})
    if len(pts) == 1:
        return float(np.hypot(*pts[0]))
    hull = _monotone_chain(pts)
    if len(hull) == 1:
        return float(np.hypot(*hull[0]))
    if len(hull) == 2:
        return _segment_distance_to_origin(hull[0], hull[1])

    inside = True
    best = np.inf
    for i, a in enumerate(hull):
        b = hull[(i + 1) % len(hull)]
        if _cross(a, b, (0.0, 0.0)) < 0.0:
            inside = False
        best = min(best, _segment_distance_to_origin(a, b))
    return 0.0 if inside else float(best)
