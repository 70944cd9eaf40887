from __future__ import annotations

import numpy as np
import pytest

from sdcones import data

# One line per acceptance criterion, echoed in the terminal summary so the
# verdicts stay visible under pytest's output capture.
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)


def random_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_pointed_cone_generators(
    rng: np.random.Generator, d: int, n: int
) -> np.ndarray:
    """n unit generators strictly inside a halfspace, spanning R^d."""
    while True:
        axis = rng.normal(size=d)
        axis /= np.linalg.norm(axis)
        vecs = rng.normal(size=(n, d))
        vecs /= np.linalg.norm(vecs, axis=1)[:, None]
        gens = vecs + 1.15 * axis[None, :]
        gens /= np.linalg.norm(gens, axis=1)[:, None]
        if np.linalg.matrix_rank(gens) == d:
            return gens


def support_pattern_of(m: np.ndarray, rel: float = 1e-10) -> np.ndarray:
    a = np.abs(np.asarray(m, dtype=float))
    scale = a.max() if a.size else 0.0
    if scale == 0.0:
        return np.zeros(a.shape, dtype=bool)
    return a > rel * scale


def match_columns_by_pattern(p1: np.ndarray, p2: np.ndarray) -> np.ndarray | None:
    """Permutation sigma with p2[:, sigma[j]] == p1[:, j], by unique patterns."""
    if p1.shape != p2.shape:
        return None
    cols2 = {tuple(p2[:, j]): j for j in range(p2.shape[1])}
    if len(cols2) != p2.shape[1]:
        return None
    sigma = []
    for j in range(p1.shape[1]):
        key = tuple(p1[:, j])
        if key not in cols2:
            return None
        sigma.append(cols2[key])
    return np.asarray(sigma)


def equal_up_to_scaling(
    m1: np.ndarray, m2: np.ndarray, tol: float = 1e-8, rows: bool = True
) -> bool:
    """True when m2 = diag(r) m1 diag(c) for positive r, c (r = 1 if not rows).

    Solved in log space by propagating potentials over the bipartite support
    graph, then checking every entry; supports must match exactly.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    if m1.shape != m2.shape:
        return False
    p1 = support_pattern_of(m1)
    if not np.array_equal(p1, support_pattern_of(m2)):
        return False
    n, m = m1.shape
    ratio = np.zeros_like(m1)
    ratio[p1] = np.log(m2[p1] / m1[p1])
    if not rows:
        cols = np.full(m, np.nan)
        for j in range(m):
            vals = ratio[p1[:, j], j]
            if vals.size == 0:
                return False
            if np.abs(vals - vals[0]).max() > tol:
                return False
            cols[j] = vals[0]
        return True
    # Bipartite potentials: row node i gets rho_i, column node j gets gamma_j,
    # ratio_ij = rho_i + gamma_j on the support.
    rho = np.full(n, np.nan)
    gamma = np.full(m, np.nan)
    for start in range(n):
        if not np.isnan(rho[start]):
            continue
        rho[start] = 0.0
        frontier = [("r", start)]
        while frontier:
            kind, idx = frontier.pop()
            if kind == "r":
                for j in np.nonzero(p1[idx])[0]:
                    if np.isnan(gamma[j]):
                        gamma[j] = ratio[idx, j] - rho[idx]
                        frontier.append(("c", int(j)))
            else:
                for i in np.nonzero(p1[:, idx])[0]:
                    if np.isnan(rho[i]):
                        rho[i] = ratio[i, idx] - gamma[idx]
                        frontier.append(("r", int(i)))
    pred = rho[:, None] + gamma[None, :]
    return bool(np.abs((pred - ratio)[p1]).max() <= tol)


@pytest.fixture
def pentagon_slack():
    return data.pentagon_slack()


@pytest.fixture
def pentagon_rays():
    return data.pentagon_rays()


@pytest.fixture
def prism_slack():
    return data.prism_slack()


@pytest.fixture
def prism_rays():
    return data.prism_rays()


@pytest.fixture
def nonslack_extreme():
    return data.nonslack_extreme_matrix()
