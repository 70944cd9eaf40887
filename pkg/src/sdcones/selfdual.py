"""Self-duality decisions through PSD slack scalings.

A pointed full-dimensional polyhedral cone is self-dual under some inner
product exactly when one (equivalently, up to row exchange and positive
column rescaling, every) slack matrix can be made symmetric positive
semidefinite.  The certificate search enumerates support-compatible row
permutations by backtracking, solves the column-scaling equations on a
spanning tree of the support graph, and verifies the result spectrally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry, linalg
from .errors import PreconditionError
from .search import involution_permutations, support_of

# Cycle-consistency tolerance for the scaling equations (relative).
SCALING_CYCLE_TOL = 1e-8

# A certificate's PSD matrix may dip this far below zero, relative to its
# largest entry, and still count as positive semidefinite.
PSD_EIG_TOL = 1e-9

# Symmetry tolerance of the scaled matrix, relative to its largest entry.
SCALED_SYMMETRY_TOL = 1e-9


@dataclass
class PsdSlackCertificate:
    """Witness that a slack matrix becomes PSD after reordering rows and
    rescaling columns.

    Row i of psd_matrix is row permutation[i] of the slack, columns scaled by
    the positive entries of scaling; min_eigenvalue is its smallest
    eigenvalue, re-verified by an independent eigendecomposition.
    """

    permutation: np.ndarray
    scaling: np.ndarray
    psd_matrix: np.ndarray
    min_eigenvalue: float


def _as_slack_array(slack) -> np.ndarray:
    if isinstance(slack, geometry.SlackMatrix):
        m = slack.matrix
    else:
        m = linalg.as_matrix(slack)
    if m.size == 0:
        raise PreconditionError("empty slack matrix")
    if m.min() < 0.0:
        raise PreconditionError("slack matrix must be nonnegative")
    nz = support_of(m)
    if np.any(nz.sum(axis=1) == 0) or np.any(nz.sum(axis=0) == 0):
        raise PreconditionError("slack matrix has a zero row or column")
    patterns = {tuple(row) for row in nz}
    if len(patterns) < m.shape[0]:
        raise PreconditionError("two slack rows share the same zero pattern")
    return m


def _solve_scaling(n_mat: np.ndarray) -> np.ndarray | None:
    """Positive column multipliers making a support-symmetric matrix
    symmetric, or None when some cycle of the support graph is inconsistent.

    The equations N_ij d_j = N_ji d_i determine d up to one factor per
    connected component; each component is rooted at its smallest index with
    d = 1 and the remaining equations are checked as cycle conditions.
    """
    n = n_mat.shape[0]
    mask = support_of(n_mat)
    d = np.zeros(n)
    seen = np.zeros(n, dtype=bool)
    for root in range(n):
        if seen[root]:
            continue
        d[root] = 1.0
        seen[root] = True
        stack = [root]
        while stack:
            i = stack.pop()
            for j in np.nonzero(mask[i])[0]:
                if seen[j]:
                    continue
                d[j] = d[i] * n_mat[j, i] / n_mat[i, j]
                seen[j] = True
                stack.append(int(j))
    scaled = n_mat * d[None, :]
    gap = np.abs(scaled - scaled.T)
    ref = np.maximum(np.abs(scaled), np.abs(scaled.T))
    bad = gap > SCALING_CYCLE_TOL * np.maximum(ref, 1e-300)
    if np.any(bad & mask):
        return None
    return d


def find_psd_scaling(slack) -> PsdSlackCertificate | None:
    """Search for a row permutation and positive column scaling making the
    slack PSD.

    Absence is returned only after every support-compatible permutation has
    been tried; the first certificate in lexicographic permutation order is
    returned, with the gauge freedom fixed so the PSD matrix's largest
    diagonal entry equals the largest diagonal entry of the input.
    """
    m = _as_slack_array(slack)
    if m.shape[0] != m.shape[1]:
        return None
    z = support_of(m).astype(np.uint8)
    target_diag = float(np.diag(m).max())
    for perm in involution_permutations(z.T):
        n_mat = m[perm, :]
        d = _solve_scaling(n_mat)
        if d is None:
            continue
        scaled = n_mat * d[None, :]
        top = float(np.diag(scaled).max())
        if top <= 0.0:
            continue
        if target_diag > 0.0:
            gauge = target_diag / top
            d = d * gauge
            scaled = scaled * gauge
        asym = float(np.abs(scaled - scaled.T).max())
        scale = float(np.abs(scaled).max())
        if asym > SCALED_SYMMETRY_TOL * max(scale, 1e-300):
            continue
        sym = 0.5 * (scaled + scaled.T)
        min_eig = float(linalg.sym_eigen(sym).values[-1])
        if min_eig < -PSD_EIG_TOL * max(scale, 1e-300):
            continue
        return PsdSlackCertificate(
            permutation=np.asarray(perm, dtype=int),
            scaling=d,
            psd_matrix=sym,
            min_eigenvalue=min_eig,
        )
    return None


def is_self_dual(
    cone: geometry.PolyhedralCone, tol: float = geometry.DEFAULT_FACET_TOL
) -> tuple[bool, PsdSlackCertificate | None]:
    """Decide self-duality of a cone (with respect to *some* inner product).

    True exactly when the PSD-scaling search succeeds on a slack matrix; the
    certificate is attached.  A non-square slack (facet count differs from
    ray count) settles the question immediately.
    """
    slack = geometry.slack_matrix(cone, tol)
    if slack.matrix.shape[0] != slack.matrix.shape[1]:
        return False, None
    cert = find_psd_scaling(slack)
    return cert is not None, cert


def is_irreducible(a) -> bool:
    """Connectivity of the support graph G(A): vertices 1..n, an edge per
    nonzero off-diagonal entry."""
    m = linalg.require_symmetric(a)
    n = m.shape[0]
    if n == 0:
        return True
    mask = support_of(m)
    np.fill_diagonal(mask, False)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        i = stack.pop()
        for j in np.nonzero(mask[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def is_simplicial(obj) -> bool:
    """True when the cone is linearly isomorphic to a nonnegative orthant.

    Accepts a PolyhedralCone (as many generators as dimensions, spanning) or
    a slack matrix (square with a permutation zero pattern, the only patterns
    diagonal representatives can have).
    """
    if isinstance(obj, geometry.PolyhedralCone):
        return obj.n_rays == obj.dim and geometry.is_full_dimensional(obj)
    if isinstance(obj, geometry.SlackMatrix):
        m = obj.matrix
        if m.shape[0] != m.shape[1] or m.shape[0] != obj.cone_dim:
            return False
    else:
        m = linalg.as_matrix(obj)
        if m.shape[0] != m.shape[1]:
            return False
    nz = support_of(m)
    return bool(np.all(nz.sum(axis=1) == 1) and np.all(nz.sum(axis=0) == 1))
