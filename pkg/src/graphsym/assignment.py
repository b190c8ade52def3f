"""Exact linear assignment, used for descent directions and projection.

Backed by scipy's linear_sum_assignment (a Jonker-Volgenant-family O(n^3)
shortest-augmenting-path solver): exact, deterministic, seed-independent.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment

from graphsym.graphs import Permutation

__all__ = ["lap_min", "project_to_permutation"]

ROW_COL_TOL = 1e-6
ENTRY_TOL = -1e-12


def lap_min(cost) -> tuple[Permutation, float]:
    """Minimize sum_i C[i, perm(i)] over permutations; returns (perm, cost).

    Ties are broken deterministically by the solver's fixed scan order (an
    all-zero matrix yields the identity).
    """
    C = np.asarray(cost, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("cost matrix must be square")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost matrix entries must be finite")
    rows, cols = linear_sum_assignment(C)
    perm = Permutation(cols.astype(np.int64))
    return perm, float(C[rows, cols].sum())


def project_to_permutation(D) -> Permutation:
    """Nearest permutation to a doubly stochastic matrix in Frobenius distance,
    i.e. the permutation maximizing <D, P>; computed as lap_min(-D)."""
    X = np.asarray(D, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix entries must be finite")
    if X.min() < ENTRY_TOL:
        raise ValueError(f"matrix has an entry below {ENTRY_TOL}")
    rows = X.sum(axis=1)
    cols = X.sum(axis=0)
    if np.abs(rows - 1.0).max() > ROW_COL_TOL or np.abs(cols - 1.0).max() > ROW_COL_TOL:
        raise ValueError("row/column sums are not within 1e-6 of 1")
    perm, _ = lap_min(-X)
    return perm
