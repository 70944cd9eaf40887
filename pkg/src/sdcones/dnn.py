"""Doubly nonnegative matrix analysis.

Extreme rays of the DNN cone are certified through the tangent-space
criterion: with A = X X^T of rank k, the span W1 = {X Q X^T} is intersected
with the subspace W2 of matrices vanishing on A's zero pattern, and A
generates an extreme ray exactly when that intersection is the line through
A.  Membership verdicts for the completely positive and completely positive
semidefinite cones are structural rule applications gated on certified
hypotheses, never numerical searches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import PreconditionError
from .search import support_of

DEFAULT_DNN_TOL = 1e-9

# Null spaces of the intersection system are measured at this tolerance.
_INTERSECTION_TOL = 1e-8


def is_dnn(a, tol: float = DEFAULT_DNN_TOL) -> bool:
    """PSD and entrywise nonnegative, both within tol * max|entry|."""
    m = linalg.require_symmetric(a)
    if m.size == 0:
        return True
    scale = float(np.abs(m).max())
    if scale == 0.0:
        return True
    if m.min() < -tol * scale:
        return False
    return float(linalg.sym_eigen(m).values[-1]) >= -tol * scale


@dataclass
class ExtremalityReport:
    """Outcome of the W1/W2 intersection test.

    intersection_dim is always >= 1 (the matrix itself lies in both spaces);
    extreme means it equals 1.  borderline holds alternative dimensions at
    neighbouring ranks when the k-th eigenvalue sits within a factor 10 of
    the rank cutoff.
    """

    rank: int
    intersection_dim: int
    extreme: bool
    support_cycle5: bool
    borderline: dict[int, int] | None = None


def _sym_basis_images(x: np.ndarray) -> list[np.ndarray]:
    """Images X E X^T of an orthonormal basis E of symmetric k x k matrices,
    off-diagonal elements carrying the 1/sqrt(2) weight."""
    k = x.shape[1]
    images = []
    for p in range(k):
        for q in range(p, k):
            if p == q:
                b = np.outer(x[:, p], x[:, p])
            else:
                b = (np.outer(x[:, p], x[:, q]) + np.outer(x[:, q], x[:, p])) / np.sqrt(2.0)
            images.append(b)
    return images


def _intersection_dim(a: np.ndarray, eig: linalg.EigenDecomposition, k: int) -> int:
    """dim(W1 ∩ W2) for the rank-k factor from the top-k eigenpairs."""
    n = a.shape[0]
    vals = np.clip(eig.values[:k], 0.0, None)
    x = eig.vectors[:, :k] * np.sqrt(vals)
    images = _sym_basis_images(x)
    zero_mask = ~support_of(a)
    zeros = [(i, j) for i in range(n) for j in range(i, n) if zero_mask[i, j]]
    if not zeros:
        return len(images)
    # Upper-triangle vectorization with sqrt(2) off-diagonal weights makes the
    # Euclidean product of coefficient vectors the Frobenius product; the
    # weights do not change the null space but keep the scaling honest.
    c = np.zeros((len(zeros), len(images)))
    root2 = np.sqrt(2.0)
    for col, b in enumerate(images):
        for row, (i, j) in enumerate(zeros):
            c[row, col] = b[i, j] * (root2 if i != j else 1.0)
    return linalg.null_space(c, _INTERSECTION_TOL).shape[1]


def _is_cycle5(a: np.ndarray) -> bool:
    mask = support_of(a)
    np.fill_diagonal(mask, False)
    if a.shape[0] != 5:
        return False
    degrees = mask.sum(axis=1)
    if not np.all(degrees == 2):
        return False
    # Degree-2 everywhere means a disjoint union of cycles; on 5 vertices a
    # single component is the 5-cycle.
    seen = {0}
    frontier = [0]
    while frontier:
        i = frontier.pop()
        for j in np.nonzero(mask[i])[0]:
            if j not in seen:
                seen.add(int(j))
                frontier.append(int(j))
    return len(seen) == 5


def dnn_extremality(
    a,
    tol: float = DEFAULT_DNN_TOL,
    rank_tol: float = linalg.DEFAULT_RANK_TOL,
) -> ExtremalityReport:
    """Certify whether a DNN matrix generates an extreme ray of the DNN cone.

    When the smallest retained eigenvalue sits within 10x of the rank cutoff
    the report also carries the intersection dimensions at ranks k-1 and k+1
    instead of silently committing to one reading.
    """
    m = linalg.require_symmetric(a)
    if not is_dnn(m, tol):
        raise PreconditionError("matrix is not doubly nonnegative within tolerance")
    eig = linalg.sym_eigen(m)
    top = float(eig.values[0]) if eig.values.size else 0.0
    if top <= 0.0:
        raise PreconditionError("zero matrix has no extreme-ray certificate")
    k = int(np.count_nonzero(eig.values > rank_tol * top))
    dim = _intersection_dim(m, eig, k)
    borderline = None
    if eig.values[k - 1] <= 10.0 * rank_tol * top:
        borderline = {}
        for alt in (k - 1, k + 1):
            if 1 <= alt <= m.shape[0]:
                borderline[alt] = _intersection_dim(m, eig, alt)
    return ExtremalityReport(
        rank=k,
        intersection_dim=dim,
        extreme=(dim == 1),
        support_cycle5=_is_cycle5(m),
        borderline=borderline,
    )


def dnn5_classify(a, tol: float = DEFAULT_DNN_TOL) -> str:
    """Classify a 5x5 DNN matrix: 'rank1', 'pentagon_slack' (rank 3 with a
    5-cycle support, hence an extreme ray coming from a self-dual pentagon
    cone) or 'not_extreme'.

    The label is cross-checked against the W1/W2 certificate; a disagreement
    means the tolerances are inconsistent and is raised rather than hidden.
    """
    m = linalg.require_symmetric(a)
    if m.shape != (5, 5):
        raise PreconditionError("classification applies to 5x5 matrices")
    if not is_dnn(m, tol):
        raise PreconditionError("matrix is not doubly nonnegative within tolerance")
    r = linalg.numeric_rank(m)
    if r == 1:
        label = "rank1"
    elif r == 3 and _is_cycle5(m):
        label = "pentagon_slack"
    else:
        label = "not_extreme"
    report = dnn_extremality(m, tol)
    if report.extreme != (label != "not_extreme"):
        raise RuntimeError(
            f"classification {label!r} disagrees with the extremality "
            f"certificate (intersection_dim={report.intersection_dim})"
        )
    return label


@dataclass
class SlackVerdicts:
    """Membership verdicts for a certified PSD slack of a self-dual cone.

    Each verdict carries a machine-readable provenance naming the rule that
    produced it.
    """

    dnn_extreme: bool
    cp_member: bool
    cpsd_member: bool
    provenance: dict[str, str]


def classify_psd_slack(a, irreducible: bool, simplicial: bool) -> SlackVerdicts:
    """Apply the structural membership rules to a certified PSD slack.

    Hypotheses (the matrix is a PSD slack of a self-dual polyhedral cone, its
    irreducibility, its simpliciality) must be certified by the caller; the
    rules are:

    * irreducible      => the slack generates an extreme ray of the DNN cone
      (re-verified numerically here);
    * simplicial       => the slack has a diagonal representative, which is
      completely positive and completely positive semidefinite;
    * not simplicial   => the slack is non-diagonal, hence outside the
      completely positive semidefinite cone and a fortiori outside the
      completely positive cone.
    """
    m = linalg.require_symmetric(a)
    scale = float(np.abs(m).max()) if m.size else 0.0
    if scale == 0.0:
        raise PreconditionError("zero matrix is not a slack matrix")
    if not is_dnn(m):
        raise PreconditionError("a PSD slack must be doubly nonnegative")

    report = dnn_extremality(m)
    dnn_extreme = bool(irreducible)
    if report.extreme != dnn_extreme:
        raise RuntimeError(
            "irreducibility hypothesis disagrees with the numerical "
            f"extremality certificate (intersection_dim={report.intersection_dim})"
        )
    member = bool(simplicial)
    provenance = {
        "dnn_extreme": (
            "irreducible-psd-slack-extreme-ray; reverified: intersection-dim-1"
            if dnn_extreme
            else "reducible-slack-splits-as-block-sum; reverified: "
            f"intersection-dim-{report.intersection_dim}"
        ),
        "cp_member": (
            "diagonal-slack-is-completely-positive"
            if member
            else "nondiagonal-psd-slack-outside-cpsd-hence-outside-cp"
        ),
        "cpsd_member": (
            "diagonal-slack-is-completely-positive-semidefinite"
            if member
            else "nondiagonal-psd-slack-outside-cpsd"
        ),
    }
    return SlackVerdicts(
        dnn_extreme=dnn_extreme,
        cp_member=member,
        cpsd_member=member,
        provenance=provenance,
    )


def verify_congruence(a, m, b, tol: float = 1e-12) -> bool:
    """Check A = M B M^T with M entrywise nonnegative, in relative max norm."""
    am = linalg.as_matrix(a)
    mm = linalg.as_matrix(m)
    bm = linalg.as_matrix(b)
    if mm.shape[0] != am.shape[0] or mm.shape[1] != bm.shape[0]:
        raise PreconditionError(
            f"incompatible shapes: A {am.shape}, M {mm.shape}, B {bm.shape}"
        )
    if mm.min() < -tol:
        return False
    resid = float(np.abs(am - mm @ bm @ mm.T).max())
    scale = float(np.abs(am).max())
    return resid <= tol * max(scale, 1e-300)
