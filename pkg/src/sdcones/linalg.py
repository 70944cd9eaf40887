"""Self-contained dense kernels: symmetric eigendecomposition, numeric rank,
null spaces, and the two spectral projections used by the rest of the package.

The eigensolver is a cyclic Jacobi iteration rather than a LAPACK call: at the
target sizes (n <= 50) it is fast enough, it is bit-deterministic for identical
input, and it keeps the numerical core of the package auditable.  All functions
are pure; there is no shared mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, PreconditionError

# Pairwise bound consumers of symmetric matrices enforce:
# |A_ij - A_ji| <= SYMMETRY_TOL * max(1, |A_ij|).
SYMMETRY_TOL = 1e-12

# Default relative cutoff separating numerical zeros from structural values.
DEFAULT_RANK_TOL = 1e-8

# Jacobi stops once the off-diagonal Frobenius mass drops below this fraction
# of ||A||_F.
_OFF_DIAG_TOL = 1e-13
_MAX_SWEEPS = 100


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d float array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise PreconditionError(f"expected a 2-d matrix, got ndim={m.ndim}")
    if m.size and not np.all(np.isfinite(m)):
        raise PreconditionError("matrix entries must be finite")
    return m


def asymmetry(a) -> float:
    """Largest |a_ij - a_ji| over all index pairs."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1] or m.size == 0:
        return float("inf") if m.shape[0] != m.shape[1] else 0.0
    return float(np.abs(m - m.T).max())


def require_symmetric(a) -> np.ndarray:
    """Validate square symmetric input and return its exact symmetrization.

    Rejection carries the measured asymmetry so callers can report how far
    the input was from symmetric.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise PreconditionError(f"expected a square matrix, got shape {m.shape}")
    if m.size == 0:
        return m
    gap = np.abs(m - m.T)
    bound = SYMMETRY_TOL * np.maximum(1.0, np.maximum(np.abs(m), np.abs(m.T)))
    if np.any(gap > bound):
        raise PreconditionError(
            f"matrix is not symmetric: measured asymmetry {asymmetry(m):.3e} "
            f"exceeds {SYMMETRY_TOL:g} * max(1, |entry|)"
        )
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral factorization A = Q diag(values) Q^T.

    values are sorted descending; vectors holds the matching orthonormal
    eigenvectors as columns, each with its first nonzero component positive.
    """

    values: np.ndarray
    vectors: np.ndarray


def sym_eigen(a) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Deterministic: the sweep order is fixed (row-major over the upper
    triangle), ties in the eigenvalue ordering are broken by the stable sort,
    and each eigenvector's sign is fixed by its first nonzero component.
    """
    w = require_symmetric(a)
    n = w.shape[0]
    if n == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)))
    w = w.copy()
    v = np.eye(n)
    fro = np.sqrt((w * w).sum())
    if n > 1 and fro > 0.0:
        target = _OFF_DIAG_TOL * fro
        # Rotations on entries this small cannot move the off-diagonal mass
        # above target, so they are skipped.
        skip = target / (2.0 * n)
        for _ in range(_MAX_SWEEPS):
            off = np.sqrt(2.0 * (np.triu(w, 1) ** 2).sum())
            if off <= target:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = w[p, q]
                    if abs(apq) <= skip:
                        continue
                    tau = (w[q, q] - w[p, p]) / (2.0 * apq)
                    t = (1.0 if tau >= 0.0 else -1.0) / (
                        abs(tau) + np.sqrt(1.0 + tau * tau)
                    )
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    app, aqq = w[p, p], w[q, q]
                    row_p = w[p].copy()
                    row_q = w[q].copy()
                    new_p = c * row_p - s * row_q
                    new_q = s * row_p + c * row_q
                    w[p, :] = new_p
                    w[:, p] = new_p
                    w[q, :] = new_q
                    w[:, q] = new_q
                    # Closed forms keep the pivot entries exact.
                    w[p, p] = app - t * apq
                    w[q, q] = aqq + t * apq
                    w[p, q] = 0.0
                    w[q, p] = 0.0
                    vp = v[:, p].copy()
                    vq = v[:, q].copy()
                    v[:, p] = c * vp - s * vq
                    v[:, q] = s * vp + c * vq
        else:
            raise ConvergenceError(
                f"Jacobi iteration did not converge in {_MAX_SWEEPS} sweeps"
            )
    vals = np.diag(w).copy()
    order = np.argsort(-vals, kind="stable")
    vals = vals[order]
    vecs = v[:, order]
    for j in range(n):
        col = vecs[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0.0:
            vecs[:, j] = -col
    return EigenDecomposition(vals, vecs)


def _one_sided_jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthogonalize the columns of a by plane rotations.

    Returns (singular values descending, right singular vectors as columns).
    Working on the matrix itself rather than its Gram matrix keeps small
    singular values at full relative accuracy, which the rank and null-space
    cutoffs depend on.
    """
    m = a.copy()
    k = m.shape[1]
    v = np.eye(k)
    # Columns whose norm falls to rounding noise relative to ||A||_F are
    # finished: their residual direction is meaningless and rotating against
    # it would chatter forever.
    floor = (1e-15 * np.sqrt((m * m).sum())) ** 2
    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p in range(k - 1):
            for q in range(p + 1, k):
                app = float(m[:, p] @ m[:, p])
                aqq = float(m[:, q] @ m[:, q])
                apq = float(m[:, p] @ m[:, q])
                if app <= floor or aqq <= floor:
                    continue
                if abs(apq) <= 1e-14 * np.sqrt(app * aqq):
                    continue
                rotated = True
                tau = (aqq - app) / (2.0 * apq)
                t = (1.0 if tau >= 0.0 else -1.0) / (
                    abs(tau) + np.sqrt(1.0 + tau * tau)
                )
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                mp = m[:, p].copy()
                mq = m[:, q].copy()
                m[:, p] = c * mp - s * mq
                m[:, q] = s * mp + c * mq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if not rotated:
            break
    else:
        raise ConvergenceError(
            f"one-sided Jacobi did not converge in {_MAX_SWEEPS} sweeps"
        )
    sv = np.sqrt((m * m).sum(axis=0))
    order = np.argsort(-sv, kind="stable")
    return sv[order], v[:, order]


def singular_values(a) -> np.ndarray:
    """Singular values, descending."""
    m = as_matrix(a)
    if m.size == 0:
        return np.zeros(0)
    return _one_sided_jacobi(m)[0]


def numeric_rank(a, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above tol * (largest singular value)."""
    s = singular_values(a)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def null_space(a, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the right null space, one basis vector per column.

    A direction counts as null when its singular value is at most
    tol * (largest singular value); for the zero matrix the whole space is
    returned.
    """
    m = as_matrix(a)
    if m.shape[1] == 0:
        return np.zeros((0, 0))
    if m.shape[0] == 0:
        return np.eye(m.shape[1])
    sv, v = _one_sided_jacobi(m)
    if sv.size and sv[0] > 0.0:
        keep = sv <= tol * sv[0]
    else:
        keep = np.ones(sv.shape, dtype=bool)
    basis = v[:, keep]
    for j in range(basis.shape[1]):
        col = basis[:, j]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0.0:
            basis[:, j] = -col
    return basis


def psd_project(a) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix: eigenvalues clipped at 0."""
    eig = sym_eigen(a)
    clipped = np.clip(eig.values, 0.0, None)
    b = (eig.vectors * clipped) @ eig.vectors.T
    return 0.5 * (b + b.T)


def low_rank_project(a, d: int) -> np.ndarray:
    """Keep the d largest nonnegative eigenvalues, zero the rest.

    This is the projection used inside the alternating rank-refinement loop;
    its use here is restricted to (near-)PSD iterates, hence the clipping.
    """
    eig = sym_eigen(a)
    n = eig.values.shape[0]
    if d < 1:
        raise PreconditionError(f"target rank must be >= 1, got {d}")
    if d > n:
        raise PreconditionError(f"target rank {d} exceeds matrix size {n}")
    kept = np.zeros(n)
    kept[:d] = np.clip(eig.values[:d], 0.0, None)
    b = (eig.vectors * kept) @ eig.vectors.T
    return 0.5 * (b + b.T)
