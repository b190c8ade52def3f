"""Ingest weighted connectivity matrices and reduce them to binary graphs.

Input files are plain text: one row per line, values separated by commas
or whitespace (sniffed from the first data line). The matrix must be
square with nonnegative finite weights. Near-symmetric input is averaged
with its transpose; input that is asymmetric beyond a 10% relative
tolerance (Frobenius) is rejected rather than silently mangled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graphsym.graphs import Graph, Permutation

__all__ = [
    "WeightedMatrix",
    "load_matrix",
    "matrix_from_text",
    "binarize_density",
    "lr_halves",
    "lr_from_file",
    "connected_components",
]

ASYMMETRY_TOL = 0.10


@dataclass(frozen=True)
class WeightedMatrix:
    """Symmetrized nonnegative weight matrix with a zeroed diagonal."""

    weights: np.ndarray

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be square")
        if w.shape[0] < 2:
            raise ValueError("need at least 2 nodes")

    @property
    def n(self) -> int:
        return self.weights.shape[0]


def matrix_from_text(text: str) -> WeightedMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    delim = "," if "," in lines[0] else None  # None splits on any whitespace
    rows = []
    for ln in lines:
        parts = ln.split(delim)
        try:
            rows.append([float(p) for p in parts if p.strip() != ""])
        except ValueError:
            raise ValueError(f"non-numeric value in row: {ln.strip()!r}") from None
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"ragged matrix: row {i} has {len(row)} values, row 0 has {width}")
    w = np.array(rows, dtype=np.float64)
    if w.shape[0] != w.shape[1]:
        raise ValueError(f"matrix is {w.shape[0]}x{w.shape[1]}, not square")
    if not np.all(np.isfinite(w)):
        raise ValueError("matrix has non-finite values")
    if np.any(w < 0):
        raise ValueError("matrix has negative weights")
    norm = np.linalg.norm(w)
    if norm > 0:
        asym = np.linalg.norm(w - w.T) / norm
        if asym > ASYMMETRY_TOL:
            raise ValueError(f"matrix is asymmetric beyond tolerance ({asym:.3f} > {ASYMMETRY_TOL})")
    sym = (w + w.T) / 2.0
    np.fill_diagonal(sym, 0.0)
    sym.setflags(write=False)
    return WeightedMatrix(sym)


def load_matrix(path) -> WeightedMatrix:
    with open(path, "r", encoding="utf-8") as f:
        return matrix_from_text(f.read())


def binarize_density(wm: WeightedMatrix, rho: float) -> Graph:
    """Keep the ceil-free top share of node pairs by weight.

    The edge budget is round-half-up of rho * C(n, 2). Ties break on
    (heavier weight, lower i, lower j) so the cut is reproducible; pairs
    with zero weight never become edges even when the budget allows.
    """
    if not (0.0 < rho <= 1.0):
        raise ValueError(f"density must be in (0, 1], got {rho}")
    n = wm.n
    pairs = n * (n - 1) // 2
    budget = int(rho * pairs + 0.5)
    iu, ju = np.triu_indices(n, k=1)
    w = wm.weights[iu, ju]
    order = np.lexsort((ju, iu, -w))  # last key is primary
    adj = np.zeros((n, n), dtype=np.int8)
    taken = 0
    for idx in order:
        if taken >= budget:
            break
        if w[idx] <= 0.0:
            break  # order is weight-descending, all the rest are zero too
        i, j = int(iu[idx]), int(ju[idx])
        adj[i, j] = adj[j, i] = 1
        taken += 1
    return Graph(adj)


def lr_halves(n: int) -> Permutation:
    """The half-swap involution i <-> i + n/2 on an even number of nodes."""
    if n % 2 != 0:
        raise ValueError(f"need an even node count, got {n}")
    half = n // 2
    img = np.concatenate([np.arange(half, n), np.arange(half)])
    return Permutation(img)


def lr_from_file(path, n: int) -> Permutation:
    """Permutation file (single line of images); must have exactly n entries."""
    from graphsym.graphs import load_permutation

    p = load_permutation(path)
    if p.n != n:
        raise ValueError(f"permutation has {p.n} entries, graph has {n} nodes")
    return p


def connected_components(g: Graph) -> int:
    """Number of connected components (iterative DFS)."""
    seen = np.zeros(g.n, dtype=bool)
    count = 0
    for start in range(g.n):
        if seen[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = True
        while stack:
            v = stack.pop()
            for u in np.nonzero(g.adj[v])[0]:
                if not seen[u]:
                    seen[u] = True
                    stack.append(int(u))
    return count
