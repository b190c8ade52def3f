"""Shared test fixtures and independent oracles.

The oracles here deliberately avoid the library's own vectorized code paths:
metric oracles enumerate pairs in pure Python straight from the definitions,
and optimum oracles enumerate complete permutation/assignment spaces.
"""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from graphsym.graphs import Graph, Permutation


# ---------------------------------------------------------------------------
# metric oracles (pure python, definition-level)
# ---------------------------------------------------------------------------


def oracle_relabel(adj: list[list[int]], img: list[int]) -> list[list[int]]:
    """Relabeled adjacency: out[img[i]][img[j]] = adj[i][j]."""
    n = len(img)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            out[img[i]][img[j]] = adj[i][j]
    return out


def oracle_mismatch(adj: list[list[int]], img: list[int]) -> int:
    """Count unordered pairs where the graph and its relabeling disagree."""
    n = len(img)
    out = oracle_relabel(adj, img)
    return sum(
        1 for i in range(n) for j in range(i + 1, n) if adj[i][j] != out[i][j]
    )


def oracle_epsilon(adj, img) -> float:
    return oracle_mismatch(adj, img) / 2


# ---------------------------------------------------------------------------
# exhaustive optimum oracles (n small)
# ---------------------------------------------------------------------------


def all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def epsilon_all_perms(adj: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """epsilon for every permutation of 0..n-1. Returns (perms, eps)."""
    n = adj.shape[0]
    perms = all_permutations(n)
    relabeled = adj[perms[:, :, None], perms[:, None, :]]
    # ordered disagreement count is twice the pair count; epsilon is half that
    mism = (relabeled != adj[None, :, :]).sum(axis=(1, 2)) // 2
    return perms, mism // 2


def brute_min_epsilon_nonidentity(adj: np.ndarray) -> int:
    """Minimum epsilon over all non-identity permutations (n <= 8)."""
    n = adj.shape[0]
    perms, eps = epsilon_all_perms(adj)
    nonid = ~(perms == np.arange(n)).all(axis=1)
    return int(eps[nonid].min())


def brute_lap_min(cost: np.ndarray) -> float:
    """Exhaustive minimum assignment cost (n <= 8)."""
    n = cost.shape[0]
    perms = all_permutations(n)
    totals = cost[np.arange(n)[None, :], perms].sum(axis=1)
    return float(totals.min())


# ---------------------------------------------------------------------------
# random instance factories
# ---------------------------------------------------------------------------


def random_graph(rng: np.random.Generator, n: int, p: float | None = None) -> Graph:
    if p is None:
        p = float(rng.uniform(0.1, 0.9))
    adj = np.zeros((n, n), dtype=np.int8)
    iu = np.triu_indices(n, k=1)
    vals = (rng.random(iu[0].shape[0]) < p).astype(np.int8)
    adj[iu] = vals
    adj += adj.T
    return Graph(adj)


def random_permutation(rng: np.random.Generator, n: int) -> Permutation:
    return Permutation(rng.permutation(n).astype(np.int64))


def path_graph(n: int) -> Graph:
    adj = np.zeros((n, n), dtype=np.int8)
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = 1
    return Graph(adj)


def cycle_graph(n: int) -> Graph:
    adj = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        adj[i, (i + 1) % n] = adj[(i + 1) % n, i] = 1
    return Graph(adj)


def complete_graph(n: int) -> Graph:
    adj = np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8)
    return Graph(adj)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
