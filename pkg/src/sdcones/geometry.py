"""V-representation polyhedral cone calculus at desk scale.

Cones are stored as unit-normalized generator rows.  Facets are enumerated by
an exhaustive scan over (d-1)-subsets of generators: O(n^(d-1)) subsets, which
is perfectly adequate for d <= 6 and n <= 20 and keeps the kernel free of any
double-description machinery.  Slack matrices are therefore defined up to
positive row/column scaling, and every pattern comparison in this package is
scale-free.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ParseError, PreconditionError

# Two directions count as the same ray when their cosine reaches this.
DUPLICATE_COSINE = 1.0 - 1e-9

# Absolute clamp for slack entries after unit normalization.  Sits between
# the magnitudes the numerical pipeline treats as zero (~1e-13) and the
# smallest structural entries it produces (~1e-4).
ZERO_CLAMP = 1e-10

# Default orientation tolerance for the facet scan: how far on the wrong side
# of a candidate hyperplane a generator may sit before the facet is rejected.
DEFAULT_FACET_TOL = 1e-7


class PolyhedralCone:
    """Cone in R^d given by generator rows, unit-normalized and deduplicated.

    Generators that are positive multiples of an earlier one are merged;
    antipodal directions are kept (the cone may legitimately contain a line,
    and pointedness is a queried property, not a constructor invariant).
    """

    def __init__(self, generators, dim: int | None = None):
        g = linalg.as_matrix(generators)
        if g.shape[0] == 0:
            raise PreconditionError("a cone needs at least one generator")
        if dim is not None and dim != g.shape[1]:
            raise PreconditionError(
                f"generator width {g.shape[1]} does not match dim={dim}"
            )
        norms = np.sqrt((g * g).sum(axis=1))
        if np.any(norms < 1e-300):
            raise PreconditionError("zero generator is not a valid ray")
        g = g / norms[:, None]
        keep: list[int] = []
        for i in range(g.shape[0]):
            dup = False
            for j in keep:
                if float(g[i] @ g[j]) >= DUPLICATE_COSINE:
                    dup = True
                    break
            if not dup:
                keep.append(i)
        self.generators = g[keep]

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @property
    def n_rays(self) -> int:
        return self.generators.shape[0]

    def __repr__(self) -> str:  # pragma: no cover
        return f"PolyhedralCone(dim={self.dim}, n_rays={self.n_rays})"


@dataclass
class SlackMatrix:
    """Inner products between cone generators (rows) and dual generators
    (columns), clamped to exact zero below ZERO_CLAMP."""

    matrix: np.ndarray
    cone_dim: int
    row_labels: list[int] = field(default_factory=list)
    col_labels: list[int] = field(default_factory=list)

    @property
    def shape(self):
        return self.matrix.shape


def _contains_direction(rows: list[np.ndarray], v: np.ndarray) -> bool:
    for r in rows:
        if float(r @ v) >= DUPLICATE_COSINE:
            return True
    return False


def _facet_scan(gen: np.ndarray, tol: float) -> np.ndarray:
    """Unit facet normals of cone(gen rows), assuming gen spans its space.

    A (d-1)-subset of generators with one-dimensional null space proposes a
    hyperplane; the normal is kept, oriented inward, when every generator
    sits on its nonnegative side up to tol.
    """
    n, d = gen.shape
    if d == 1:
        col = gen[:, 0]
        if col.min() > 0.0:
            return np.array([[1.0]])
        if col.max() < 0.0:
            return np.array([[-1.0]])
        return np.zeros((0, 1))
    found: list[np.ndarray] = []
    for combo in itertools.combinations(range(n), d - 1):
        basis = linalg.null_space(gen[list(combo)])
        if basis.shape[1] != 1:
            continue
        v = basis[:, 0]
        prods = gen @ v
        if prods.min() >= -tol:
            pass
        elif prods.max() <= tol:
            v = -v
        else:
            continue
        if not _contains_direction(found, v):
            found.append(v)
    if not found:
        return np.zeros((0, d))
    return np.vstack(found)


def _row_space_basis(g: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the row space of g."""
    gram = g.T @ g
    eig = linalg.sym_eigen(0.5 * (gram + gram.T))
    s = np.sqrt(np.clip(eig.values, 0.0, None))
    if s.size == 0 or s[0] <= 0.0:
        return np.zeros((g.shape[1], 0))
    keep = s > linalg.DEFAULT_RANK_TOL * s[0]
    return eig.vectors[:, keep]


def is_full_dimensional(cone: PolyhedralCone) -> bool:
    """True when the generators span the whole ambient space."""
    return linalg.numeric_rank(cone.generators) == cone.dim


def is_pointed(cone: PolyhedralCone, tol: float = DEFAULT_FACET_TOL) -> bool:
    """True when the cone contains no line.

    Decided through the rank of the Euclidean dual's generators: the cone is
    pointed exactly when its facet normals span the span of the cone.  For
    generators that do not span R^d the scan runs in row-space coordinates.
    """
    g = cone.generators
    basis = _row_space_basis(g)
    r = basis.shape[1]
    coords = g @ basis
    if r == 1:
        col = coords[:, 0]
        return bool(col.min() > 0.0 or col.max() < 0.0)
    normals = _facet_scan(coords, tol)
    return normals.shape[0] > 0 and linalg.numeric_rank(normals) == r


def facet_normals(cone: PolyhedralCone, tol: float = DEFAULT_FACET_TOL) -> np.ndarray:
    """Unit inward normals of all facets of a pointed full-dimensional cone.

    Rows are returned in enumeration order (lexicographic over generator
    subsets), deduplicated by cosine similarity.
    """
    if not is_full_dimensional(cone):
        raise PreconditionError("cone is not full-dimensional")
    normals = _facet_scan(cone.generators, tol)
    if normals.shape[0] == 0 or linalg.numeric_rank(normals) < cone.dim:
        raise PreconditionError("cone is not pointed")
    return normals


def dual_cone(cone: PolyhedralCone, tol: float = DEFAULT_FACET_TOL) -> PolyhedralCone:
    """Euclidean dual cone, generated by the facet normals."""
    return PolyhedralCone(facet_normals(cone, tol))


def extreme_rays(generators, tol: float = DEFAULT_FACET_TOL) -> PolyhedralCone:
    """Reduce a generating set to the extreme rays of its cone.

    A generator is extreme exactly when the facets it lies on have normals of
    rank d-1.  Duplicate directions are merged by the constructor.
    """
    cone = PolyhedralCone(generators)
    d = cone.dim
    if linalg.numeric_rank(cone.generators) < d:
        raise PreconditionError("generators do not span the ambient space")
    if d == 1:
        if not is_pointed(cone, tol):
            raise PreconditionError("cone is not pointed")
        return cone
    normals = _facet_scan(cone.generators, tol)
    if normals.shape[0] == 0 or linalg.numeric_rank(normals) < d:
        raise PreconditionError("cone is not pointed")
    prods = cone.generators @ normals.T
    kept = []
    for i in range(cone.n_rays):
        active = normals[np.abs(prods[i]) <= tol]
        if active.shape[0] >= d - 1 and linalg.numeric_rank(active) == d - 1:
            kept.append(i)
    if not kept:
        raise PreconditionError("no extreme rays found; input cone degenerate")
    return PolyhedralCone(cone.generators[kept])


def slack_matrix(cone: PolyhedralCone, tol: float = DEFAULT_FACET_TOL) -> SlackMatrix:
    """Slack matrix of a pointed full-dimensional cone with extreme generators.

    Entry (i, j) is the inner product of generator i with dual generator j;
    entries below ZERO_CLAMP are clamped to exact zero so pattern logic can
    compare supports without tolerance bookkeeping.
    """
    normals = facet_normals(cone, tol)
    m = cone.generators @ normals.T
    if m.min() < -ZERO_CLAMP:
        raise PreconditionError(
            f"negative slack entry {m.min():.3e}; generators are not extreme "
            "rays of a pointed cone at this tolerance"
        )
    m = m.copy()
    m[m < ZERO_CLAMP] = 0.0
    _validate_slack(m, cone.dim)
    return SlackMatrix(
        matrix=m,
        cone_dim=cone.dim,
        row_labels=list(range(m.shape[0])),
        col_labels=list(range(m.shape[1])),
    )


def _validate_slack(m: np.ndarray, d: int) -> None:
    if np.any((m != 0.0).sum(axis=1) == 0):
        raise PreconditionError("slack matrix has a zero row")
    if np.any((m != 0.0).sum(axis=0) == 0):
        raise PreconditionError("slack matrix has a zero column")
    patterns = {tuple(row) for row in (m != 0.0)}
    if len(patterns) < m.shape[0]:
        raise PreconditionError("two slack rows share the same zero pattern")
    r = linalg.numeric_rank(m)
    if r != d:
        raise PreconditionError(f"slack matrix has rank {r}, expected {d}")


def slack_necessary_check(m, d: int) -> tuple[bool, list[str]]:
    """Pattern-based necessary conditions for being a slack matrix in R^d.

    Checks rank d, at least d-1 zeros per row, no zero rows/columns and no
    duplicated row zero-patterns; returns (verdict, reasons for rejection).
    """
    a = linalg.as_matrix(m)
    if a.size == 0:
        return False, ["empty matrix"]
    if a.min() < 0.0:
        raise PreconditionError("slack candidates must be nonnegative")
    scale = a.max()
    nz = a > (ZERO_CLAMP * max(scale, 1e-300))
    reasons: list[str] = []
    r = linalg.numeric_rank(a)
    if r != d:
        reasons.append(f"rank is {r}, expected {d}")
    zero_counts = (~nz).sum(axis=1)
    bad_rows = np.nonzero(zero_counts < d - 1)[0]
    for i in bad_rows:
        reasons.append(
            f"row {i} has only {int(zero_counts[i])} zeros, "
            f"need at least {d - 1}"
        )
    if np.any(nz.sum(axis=1) == 0):
        reasons.append("matrix has a zero row")
    if np.any(nz.sum(axis=0) == 0):
        reasons.append("matrix has a zero column")
    seen: dict[tuple, int] = {}
    for i, row in enumerate(map(tuple, nz)):
        if row in seen:
            reasons.append(f"rows {seen[row]} and {i} share the same zero pattern")
        else:
            seen[row] = i
    return (not reasons), reasons


def cone_over_polytope(vertices, tol: float = DEFAULT_FACET_TOL) -> PolyhedralCone:
    """Homogenization cone of a full-dimensional polytope with 0 interior.

    Vertices v in R^d become generators (1, v) in R^(d+1).  The interiority
    check is by facet enumeration: every facet normal of the lifted cone must
    have a strictly positive first coordinate.
    """
    v = linalg.as_matrix(vertices)
    lifted = np.hstack([np.ones((v.shape[0], 1)), v])
    cone = PolyhedralCone(lifted)
    if not is_full_dimensional(cone):
        raise PreconditionError("polytope is not full-dimensional")
    normals = _facet_scan(cone.generators, tol)
    if normals.shape[0] == 0 or linalg.numeric_rank(normals) < cone.dim:
        raise PreconditionError("lifted cone is degenerate")
    if normals[:, 0].min() <= tol:
        raise PreconditionError("origin is not in the interior of the polytope")
    return cone


def cone_from_factorization(m, d: int) -> PolyhedralCone:
    """Cone generated by the rows of the top-d spectral factor of a PSD matrix.

    When m is a PSD slack matrix of some cone, the result is linearly
    isomorphic to that cone and is self-dual under the Euclidean inner
    product.
    """
    a = linalg.require_symmetric(m)
    r = linalg.numeric_rank(a)
    if r != d:
        raise PreconditionError(f"matrix has numeric rank {r}, expected {d}")
    eig = linalg.sym_eigen(a)
    vals = np.clip(eig.values[:d], 0.0, None)
    if vals.min() <= 0.0:
        raise PreconditionError("matrix is not PSD of the requested rank")
    x = eig.vectors[:, :d] * np.sqrt(vals)
    return PolyhedralCone(x)


def match_generators(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray | None:
    """Bijection from rows of b onto rows of a by cosine similarity.

    Returns mapping[j] = i meaning row j of b matches row i of a with cosine
    at least 1 - tol, or None when no bijective matching exists.  Inputs are
    expected row-normalized.
    """
    if a.shape != b.shape:
        return None
    cos = b @ a.T
    mapping = np.argmax(cos, axis=1)
    if len(set(mapping.tolist())) != a.shape[0]:
        return None
    if cos[np.arange(b.shape[0]), mapping].min() < 1.0 - tol:
        return None
    return mapping


# ---------------------------------------------------------------------------
# Text formats.  Cone file: "d n" header then n generator rows.  Matrix file:
# "rows cols" header then the rows.  17 significant digits round-trip floats.
# ---------------------------------------------------------------------------

def _format_row(row) -> str:
    return " ".join(f"{x:.17g}" for x in row)


def save_cone(path, generators) -> None:
    g = linalg.as_matrix(generators)
    lines = [f"{g.shape[1]} {g.shape[0]}"]
    lines += [_format_row(row) for row in g]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_cone(path) -> PolyhedralCone:
    rows = _load_numeric(path, kind="cone")
    return PolyhedralCone(rows)


def save_matrix(path, matrix) -> None:
    m = linalg.as_matrix(matrix)
    lines = [f"{m.shape[0]} {m.shape[1]}"]
    lines += [_format_row(row) for row in m]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    return _load_numeric(path, kind="matrix")


def _load_numeric(path, kind: str) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ParseError(f"cannot read {kind} file {path}: {exc}") from exc
    if not raw:
        raise ParseError(f"{kind} file {path} is empty")
    head = raw[0].split()
    if len(head) != 2:
        raise ParseError(f"{kind} file {path}: header must hold two integers")
    try:
        a, b = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ParseError(f"{kind} file {path}: bad header {raw[0]!r}") from exc
    if kind == "cone":
        width, count = a, b
    else:
        count, width = a, b
    if len(raw) - 1 != count:
        raise ParseError(
            f"{kind} file {path}: expected {count} rows, found {len(raw) - 1}"
        )
    rows = []
    for ln in raw[1:]:
        parts = ln.split()
        if len(parts) != width:
            raise ParseError(
                f"{kind} file {path}: expected {width} values per row, "
                f"found {len(parts)}"
            )
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise ParseError(f"{kind} file {path}: bad value in {ln!r}") from exc
    return np.asarray(rows, dtype=float)
