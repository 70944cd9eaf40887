"""Semidefinite search for self-dual realizations of a combinatorial type.

Pipeline: a strongly-involutive support check, a first-order feasibility
solver for the semidefinite program

    max sum c_ij X_ij   s.t.  X_ij = 0 off support,  X_ii = 1,  X PSD,

randomized-objective retries, alternating-projection rank refinement, and
extraction of cone generators from the refined Gram matrix.  Every success is
certified end to end; a failure only ever means "no realization found".
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry, linalg
from .errors import ParseError, PreconditionError

# Relative threshold deciding which entries count as structural zeros.
SUPPORT_CLAMP = 1e-10

# Success gates for the refined Gram matrix, matching the magnitudes the
# numerical experiments produce: structural entries clear 1e-4, trailing
# eigenvalues drop below 1e-8.
MIN_STRUCTURAL_ENTRY = 1e-4
TRAILING_EIG_TOL = 1e-8
REFINE_STOP_TOL = 1e-12

DEFAULT_VERIFY_TOL = 1e-6


def support_of(a, rel: float = SUPPORT_CLAMP) -> np.ndarray:
    """Boolean support of a matrix, zeros decided relative to the max entry."""
    m = np.abs(linalg.as_matrix(a))
    scale = m.max() if m.size else 0.0
    if scale <= 0.0:
        return np.zeros(m.shape, dtype=bool)
    return m > rel * scale


@dataclass(frozen=True)
class SupportPattern:
    """Symmetric 0/1 matrix with unit diagonal: the combinatorial input."""

    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits)
        if b.ndim != 2 or b.shape[0] != b.shape[1]:
            raise PreconditionError("support pattern must be square")
        if not np.isin(b, (0, 1)).all():
            raise PreconditionError("support pattern entries must be 0 or 1")
        b = b.astype(np.uint8)
        if np.any(b != b.T):
            raise PreconditionError("support pattern must be symmetric")
        if np.any(np.diag(b) != 1):
            raise PreconditionError("support pattern must have a unit diagonal")
        object.__setattr__(self, "bits", b)

    @property
    def n(self) -> int:
        return self.bits.shape[0]

    @property
    def mask(self) -> np.ndarray:
        return self.bits.astype(bool)

    @classmethod
    def from_matrix(cls, a, rel: float = SUPPORT_CLAMP) -> "SupportPattern":
        return cls(support_of(a, rel).astype(np.uint8))


@dataclass
class SearchParams:
    """Knobs of the pipeline; the defaults reproduce the bundled examples."""

    target_rank: int
    max_iter: int = 2000
    step_size: float | None = None
    psd_tol: float = 1e-9
    support_tol: float = 1e-9
    rank_tol: float = 1e-8
    seed: int = 0
    retries: int = 20

    def __post_init__(self):
        if self.target_rank < 1:
            raise PreconditionError("target_rank must be >= 1")
        if self.max_iter < 1:
            raise PreconditionError("max_iter must be >= 1")
        if self.retries < 1:
            raise PreconditionError("retries must be >= 1")
        for name in ("psd_tol", "support_tol", "rank_tol"):
            if getattr(self, name) <= 0.0:
                raise PreconditionError(f"{name} must be positive")
        if self.step_size is not None and self.step_size <= 0.0:
            raise PreconditionError("step_size must be positive")

    def to_dict(self) -> dict:
        return {
            "target_rank": self.target_rank,
            "max_iter": self.max_iter,
            "step_size": self.step_size,
            "psd_tol": self.psd_tol,
            "support_tol": self.support_tol,
            "rank_tol": self.rank_tol,
            "seed": self.seed,
            "retries": self.retries,
        }


# ---------------------------------------------------------------------------
# Strongly involutive combinatorial self-duality.
# ---------------------------------------------------------------------------

def involution_permutations(s: np.ndarray):
    """Yield all column permutations sigma with S[i, sigma(j)] == S[j, sigma(i)]
    for all i, j and S[i, sigma(i)] == 1, in lexicographic order.

    Backtracking with two prunes: a column can only land on a position with
    matching nonzero count, and the degree multisets of its support must
    agree (the same invariants a graph-isomorphism search would use).
    """
    n = s.shape[0]
    row_counts = s.sum(axis=1)
    col_counts = s.sum(axis=0)
    # Position j ends up as row j of the permuted matrix; its column in the
    # symmetric result must have rowcount(j) entries.
    row_profile = [
        tuple(sorted(col_counts[np.nonzero(s[j])[0]])) for j in range(n)
    ]
    col_profile = [
        tuple(sorted(row_counts[np.nonzero(s[:, c])[0]])) for c in range(n)
    ]
    candidates = [
        [
            c
            for c in range(n)
            if s[j, c] == 1
            and col_counts[c] == row_counts[j]
            and col_profile[c] == row_profile[j]
        ]
        for j in range(n)
    ]
    sigma = np.full(n, -1, dtype=int)
    used = np.zeros(n, dtype=bool)

    def extend(j: int):
        if j == n:
            yield sigma.copy()
            return
        for c in candidates[j]:
            if used[c]:
                continue
            ok = True
            for i in range(j):
                if s[i, c] != s[j, sigma[i]]:
                    ok = False
                    break
            if not ok:
                continue
            sigma[j] = c
            used[c] = True
            yield from extend(j + 1)
            used[c] = False
            sigma[j] = -1

    yield from extend(0)


def sisd_check(s) -> np.ndarray | None:
    """First column permutation making the support symmetric with a nonzero
    diagonal, or None when the exhaustive pruned search finds none."""
    a = np.asarray(s)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise PreconditionError("support must be a square matrix")
    if not np.isin(a, (0, 1)).all():
        raise PreconditionError("support entries must be 0 or 1")
    a = a.astype(np.uint8)
    if np.any(a.sum(axis=1) == 0) or np.any(a.sum(axis=0) == 0):
        raise PreconditionError("support must have no zero rows or columns")
    for sigma in involution_permutations(a):
        return sigma
    return None


def apply_sisd(s: np.ndarray, sigma: np.ndarray) -> SupportPattern:
    """Support pattern obtained by reordering columns with sigma."""
    a = np.asarray(s).astype(np.uint8)
    return SupportPattern(a[:, sigma])


# ---------------------------------------------------------------------------
# First-order SDP feasibility.
# ---------------------------------------------------------------------------

@dataclass
class SdpResult:
    matrix: np.ndarray
    objective: float
    objective_trace: list[float]
    residuals: dict
    converged: bool
    iterations: int


def _affine_project(x: np.ndarray, on: np.ndarray) -> np.ndarray:
    """Closed-form projection onto {X_ij = 0 off support, X_ii = 1}."""
    y = x.copy()
    y[~on] = 0.0
    np.fill_diagonal(y, 1.0)
    return y


def sdp_feasibility(pattern: SupportPattern, weights, params: SearchParams) -> SdpResult:
    """Projected-gradient ascent on sum c_ij X_ij over the feasible set.

    Each outer iteration takes a gradient step of the base size 1/n, then
    reprojects through the affine set and the PSD cone.  A step that would
    lower the monitored objective is rejected and retried at half the size,
    so the recorded objective trace is non-decreasing by construction.  A
    pure alternating-projection polish then drives the iterate to
    feasibility within the configured tolerances.
    """
    on = pattern.mask
    n = pattern.n
    c = linalg.as_matrix(weights)
    if c.shape != (n, n):
        raise PreconditionError(f"weights must be {n}x{n}")
    if c.min() < 0.0:
        raise PreconditionError("weights must be nonnegative")
    c = np.where(on, 0.5 * (c + c.T), 0.0)

    base_step = params.step_size if params.step_size is not None else 1.0 / n
    step = base_step
    x = np.eye(n)
    trace = [float((c * x).sum())]
    ascent_iters = 0
    while ascent_iters < params.max_iter:
        ascent_iters += 1
        y = linalg.psd_project(_affine_project(x + step * c, on))
        obj = float((c * y).sum())
        if obj < trace[-1] - 1e-12 * max(1.0, abs(trace[-1])):
            step *= 0.5
            if step < 1e-6 * base_step:
                break
            continue
        x = y
        trace.append(obj)
        step = min(step * 1.5, base_step)
        if len(trace) > 60 and trace[-1] - trace[-60] < 1e-10 * max(
            1.0, abs(trace[-1])
        ):
            break

    x = _affine_project(x, on)
    converged = False
    min_eig = 0.0
    polish_iters = 0
    for polish_iters in range(1, params.max_iter + 1):
        eig = linalg.sym_eigen(x)
        min_eig = float(eig.values[-1])
        if min_eig >= -params.psd_tol:
            converged = True
            break
        clipped = np.clip(eig.values, 0.0, None)
        z = (eig.vectors * clipped) @ eig.vectors.T
        x = _affine_project(0.5 * (z + z.T), on)

    residuals = {
        "psd_margin": min_eig,
        "diag_gap": float(np.abs(np.diag(x) - 1.0).max()),
        "off_support_max": float(np.abs(x[~on]).max()) if (~on).any() else 0.0,
    }
    return SdpResult(
        matrix=x,
        objective=trace[-1],
        objective_trace=trace,
        residuals=residuals,
        converged=converged,
        iterations=ascent_iters + polish_iters,
    )


# ---------------------------------------------------------------------------
# Rank refinement by alternating projections.
# ---------------------------------------------------------------------------

@dataclass
class RefineResult:
    matrix: np.ndarray
    converged: bool
    iterations: int
    rank_residuals: list[float]
    affine_residuals: list[float]
    reason: str | None = None


def rank_refine(
    x,
    d: int,
    params: SearchParams,
    pattern: SupportPattern | None = None,
) -> RefineResult:
    """Alternate the rank-d spectral truncation with exact reimposition of
    the support zeros and the unit diagonal.

    Stops when both half-step residuals fall below 1e-12; declares stagnation
    when the residual has not improved by 1e-16 over 100 iterations.  On
    success the returned matrix has an exact diagonal and support, trailing
    eigenvalues below 1e-8 and structural entries clearing 1e-4 in absolute
    value.
    """
    a = linalg.require_symmetric(x)
    if pattern is None:
        pattern = SupportPattern.from_matrix(a)
    on = pattern.mask
    if a.shape[0] != pattern.n:
        raise PreconditionError("matrix and support sizes disagree")

    y = _affine_project(a, on)
    rank_res: list[float] = []
    aff_res: list[float] = []
    history: list[float] = []
    converged = False
    iterations = 0
    for it in range(1, params.max_iter + 1):
        iterations = it
        low = linalg.low_rank_project(y, d)
        r_rank = float(np.abs(y - low).max())
        z = _affine_project(low, on)
        r_aff = float(np.abs(z - low).max())
        rank_res.append(r_rank)
        aff_res.append(r_aff)
        history.append(max(r_rank, r_aff))
        y = z
        if r_rank < REFINE_STOP_TOL and r_aff < REFINE_STOP_TOL:
            converged = True
            break
        if it > 100 and history[it - 101] - history[it - 1] < 1e-16:
            return RefineResult(
                y, False, it, rank_res, aff_res, reason="stagnation"
            )

    if not converged:
        return RefineResult(
            y, False, iterations, rank_res, aff_res, reason="max_iter"
        )

    eig = linalg.sym_eigen(y)
    trailing = float(np.abs(eig.values[d:]).max()) if pattern.n > d else 0.0
    if trailing >= TRAILING_EIG_TOL:
        return RefineResult(
            y, False, iterations, rank_res, aff_res,
            reason=f"trailing eigenvalue {trailing:.3e}",
        )
    off = on & ~np.eye(pattern.n, dtype=bool)
    if off.any() and float(np.abs(y[off]).min()) < MIN_STRUCTURAL_ENTRY:
        return RefineResult(
            y, False, iterations, rank_res, aff_res,
            reason="structural entry below 1e-4",
        )
    return RefineResult(y, True, iterations, rank_res, aff_res)


# ---------------------------------------------------------------------------
# Randomized retries.
# ---------------------------------------------------------------------------

@dataclass
class AttemptRecord:
    index: int
    sdp_converged: bool
    sdp_iterations: int
    objective: float
    objective_trace: list[float]
    sdp_residuals: dict
    refine_converged: bool
    refine_iterations: int
    refine_reason: str | None
    refine_rank_residuals: list[float]
    refine_affine_residuals: list[float]
    nonnegative: bool
    certified: bool | None = None
    certify_reason: str | None = None


@dataclass
class RetryResult:
    matrix: np.ndarray | None
    success: bool
    attempts: list[AttemptRecord]
    certificate: object | None = None

    @property
    def winning_attempt(self) -> int | None:
        return self.attempts[-1].index if self.success else None


def randomized_retry(
    pattern: SupportPattern,
    params: SearchParams,
    certify=None,
) -> RetryResult:
    """Run the feasibility solver with random positive weights, retrying with
    fresh weights until rank refinement yields a nonnegative Gram matrix.

    Weights are drawn uniformly from [0.5, 1.5) so the uniform-weight optimum
    stays in the basin; the stream is owned by this call and seeded from
    params.seed, so identical inputs give identical transcripts.

    An optional certify(matrix) hook may veto an otherwise successful
    attempt by returning (None, reason); the pipeline uses it to keep
    retrying when a refined matrix extracts to a cone that fails the
    self-duality verification (a refined matrix need not be a slack matrix
    at all, so refinement success alone is not proof of a realization).
    """
    rng = np.random.default_rng(params.seed)
    n = pattern.n
    attempts: list[AttemptRecord] = []
    for index in range(params.retries):
        weights = rng.uniform(0.5, 1.5, size=(n, n))
        sdp = sdp_feasibility(pattern, weights, params)
        refined = None
        nonneg = False
        if sdp.converged:
            refined = rank_refine(sdp.matrix, params.target_rank, params, pattern)
            # A valid slack is entrywise nonnegative; a refined matrix with
            # negative structural entries is a dead end, not a realization.
            nonneg = bool(refined.matrix.min() >= -SUPPORT_CLAMP)
        record = AttemptRecord(
            index=index,
            sdp_converged=sdp.converged,
            sdp_iterations=sdp.iterations,
            objective=sdp.objective,
            objective_trace=sdp.objective_trace,
            sdp_residuals=sdp.residuals,
            refine_converged=bool(refined and refined.converged),
            refine_iterations=refined.iterations if refined else 0,
            refine_reason=refined.reason if refined else "sdp did not converge",
            refine_rank_residuals=refined.rank_residuals if refined else [],
            refine_affine_residuals=refined.affine_residuals if refined else [],
            nonnegative=nonneg,
        )
        attempts.append(record)
        if refined is not None and refined.converged and nonneg:
            if certify is None:
                return RetryResult(refined.matrix, True, attempts)
            outcome, reason = certify(refined.matrix)
            record.certified = outcome is not None
            record.certify_reason = reason
            if outcome is not None:
                return RetryResult(refined.matrix, True, attempts, certificate=outcome)
    return RetryResult(matrix=None, success=False, attempts=attempts)


# ---------------------------------------------------------------------------
# Extraction and verification.
# ---------------------------------------------------------------------------

@dataclass
class Realization:
    """Numeric self-dual realization: generator rows with first coordinate 1,
    their Gram matrix, and the residuals of the certification checks."""

    dim: int
    generators: np.ndarray
    gram: np.ndarray
    residuals: dict

    @property
    def cone(self) -> geometry.PolyhedralCone:
        return geometry.PolyhedralCone(self.generators)


def extract_realization(x, d: int) -> Realization:
    """Factor a refined Gram matrix into cone generators.

    The top-d spectral factor has a constant-sign leading column whenever the
    support is irreducible (a Perron argument); dividing each row by its
    first entry yields generators of the form (1, w).
    """
    a = linalg.require_symmetric(x)
    scale = np.abs(a).max()
    if a.min() < -SUPPORT_CLAMP * max(scale, 1e-300):
        raise PreconditionError("matrix must be entrywise nonnegative")
    mask = support_of(a)
    diagonal = not (mask & ~np.eye(mask.shape[0], dtype=bool)).any()
    if not diagonal and not _connected(mask):
        raise PreconditionError("support graph is not connected")
    r = linalg.numeric_rank(a)
    if r != d:
        raise PreconditionError(f"matrix has numeric rank {r}, expected {d}")
    eig = linalg.sym_eigen(a)
    vals = np.clip(eig.values[:d], 0.0, None)
    factor = eig.vectors[:, :d] * np.sqrt(vals)
    if diagonal:
        # Diagonal Gram: the factor rows are already mutually orthogonal
        # generators of an orthant image; there is no Perron rescaling.
        wbar = factor
    else:
        lead = factor[:, 0]
        lead_scale = np.abs(lead).max()
        if np.abs(lead).min() <= 1e-10 * lead_scale or (
            lead.min() < 0.0 < lead.max()
        ):
            raise PreconditionError(
                "leading eigenvector does not have constant sign; support is "
                "not irreducible enough to extract generators"
            )
        if lead[0] < 0.0:
            # Per-column sign is a gauge freedom of the factorization.
            factor[:, 0] = -factor[:, 0]
        wbar = factor / factor[:, :1]
        wbar[:, 0] = 1.0
    gram = wbar @ wbar.T
    off_zero = ~support_of(a)
    residuals = {
        "psd_margin": float(linalg.sym_eigen(gram).values[-1]),
        "support_violation": float(np.abs(gram[off_zero]).max())
        if off_zero.any()
        else 0.0,
        "selfdual_gap": float("nan"),
    }
    return Realization(dim=d, generators=wbar, gram=gram, residuals=residuals)


def _connected(mask: np.ndarray) -> bool:
    n = mask.shape[0]
    if n == 0:
        return True
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(mask[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


@dataclass
class VerificationReport:
    generator_match: bool
    support_match: bool
    entries_positive: bool
    worst_cosine: float
    min_structural_ratio: float
    max_off_support_ratio: float
    details: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.generator_match and self.support_match and self.entries_positive


def verify_realization(
    real: Realization,
    pattern: SupportPattern,
    tol: float = DEFAULT_VERIFY_TOL,
) -> VerificationReport:
    """Certify a realization against its target support.

    (a) the Euclidean dual's generators must match the primal generators
    bijectively with cosine >= 1 - tol; (b) the slack support, with columns
    aligned through that matching, must equal the pattern; (c) structural
    slack entries must clear 1e-4 of the largest entry.
    """
    details: list[str] = []
    cone = real.cone
    gens = cone.generators
    if cone.n_rays != pattern.n:
        return VerificationReport(
            False, False, False, 0.0, 0.0, 1.0,
            [f"{cone.n_rays} generators for a {pattern.n}-point support"],
        )
    try:
        duals = geometry.facet_normals(cone, tol)
    except PreconditionError as exc:
        return VerificationReport(False, False, False, 0.0, 0.0, 1.0, [str(exc)])

    worst = 0.0
    mapping = None
    if duals.shape[0] == gens.shape[0]:
        cos = duals @ gens.T
        cand = np.argmax(cos, axis=1)
        worst = float(cos[np.arange(duals.shape[0]), cand].min())
        if len(set(cand.tolist())) == gens.shape[0] and worst >= 1.0 - tol:
            mapping = cand
    gen_match = mapping is not None
    if not gen_match:
        details.append(
            f"dual generators do not match primal generators bijectively "
            f"({duals.shape[0]} facets, worst cosine {worst:.12f})"
        )
        return VerificationReport(False, False, False, worst, 0.0, 1.0, details)

    raw = gens @ duals.T
    aligned = np.zeros_like(raw)
    aligned[:, mapping] = raw
    scale = aligned.max()
    on = pattern.mask
    off_max = float(np.abs(aligned[~on]).max() / scale) if (~on).any() else 0.0
    on_min = float(aligned[on].min() / scale)
    support_ok = off_max <= tol and on_min > tol
    if not support_ok:
        details.append(
            f"slack support mismatch: off-support ratio {off_max:.3e}, "
            f"smallest on-support ratio {on_min:.3e}"
        )
    positive_ok = on_min >= MIN_STRUCTURAL_ENTRY
    if not positive_ok:
        details.append(
            f"smallest structural slack ratio {on_min:.3e} below "
            f"{MIN_STRUCTURAL_ENTRY:g}"
        )
    return VerificationReport(
        generator_match=True,
        support_match=support_ok,
        entries_positive=positive_ok,
        worst_cosine=worst,
        min_structural_ratio=on_min,
        max_off_support_ratio=off_max,
        details=details,
    )


# ---------------------------------------------------------------------------
# End-to-end pipeline.
# ---------------------------------------------------------------------------

@dataclass
class PipelineResult:
    params: SearchParams
    sisd_permutation: np.ndarray | None
    pattern: SupportPattern | None
    retry: RetryResult | None
    realization: Realization | None
    verification: VerificationReport | None
    success: bool
    failure: str | None = None


def run_pipeline(
    support,
    params: SearchParams,
    verify_tol: float = DEFAULT_VERIFY_TOL,
) -> PipelineResult:
    """Full search: involution check, randomized SDP retries with refinement,
    extraction, verification.

    An attempt only counts as a success once its realization passes
    verification, so a reported failure always means "no certified
    realization found", never a silent acceptance.
    """
    sigma = sisd_check(support)
    if sigma is None:
        return PipelineResult(
            params, None, None, None, None, None, False,
            failure="support is not strongly involutive",
        )
    pattern = apply_sisd(np.asarray(support), sigma)

    def certify(matrix):
        try:
            real = extract_realization(matrix, params.target_rank)
        except PreconditionError as exc:
            return None, f"extraction failed: {exc}"
        report = verify_realization(real, pattern, verify_tol)
        real.residuals["selfdual_gap"] = 1.0 - report.worst_cosine
        if not report.passed:
            return None, "verification failed: " + "; ".join(report.details)
        return (real, report), None

    retry = randomized_retry(pattern, params, certify=certify)
    if not retry.success:
        return PipelineResult(
            params, sigma, pattern, retry, None, None, False,
            failure=f"no realization found in {params.retries} attempts",
        )
    real, report = retry.certificate
    return PipelineResult(params, sigma, pattern, retry, real, report, True)


# ---------------------------------------------------------------------------
# Support-pattern text format: "n" header then n lines of n characters.
# ---------------------------------------------------------------------------

def save_support(path, bits) -> None:
    b = np.asarray(bits).astype(np.uint8)
    lines = [str(b.shape[0])]
    lines += ["".join(str(int(x)) for x in row) for row in b]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_support(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ParseError(f"cannot read support file {path}: {exc}") from exc
    if not raw:
        raise ParseError(f"support file {path} is empty")
    try:
        n = int(raw[0])
    except ValueError as exc:
        raise ParseError(f"support file {path}: bad header {raw[0]!r}") from exc
    if len(raw) - 1 != n:
        raise ParseError(f"support file {path}: expected {n} rows")
    rows = []
    for ln in raw[1:]:
        if len(ln) != n or any(ch not in "01" for ch in ln):
            raise ParseError(
                f"support file {path}: rows must be {n} characters of 0/1"
            )
        rows.append([int(ch) for ch in ln])
    return np.asarray(rows, dtype=np.uint8)
