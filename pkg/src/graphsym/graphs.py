"""Core types and metrics for approximate graph symmetry.

A permutation p is judged as a symmetry of a graph by counting the unordered
node pairs whose adjacency disagrees between the graph and its relabeling
under p. Half that count is the error epsilon; normalizing epsilon by half
the number of pairs gives the symmetry coefficient S in [0, 1], with S = 0
exactly for automorphisms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "Graph",
    "Permutation",
    "as_penalty",
    "permutation_matrix",
    "permute_graph",
    "mismatch_count",
    "epsilon",
    "symmetry_coefficient",
    "asp_objective",
    "hamming",
    "fixed_points",
    "graph_to_text",
    "graph_from_text",
    "save_graph",
    "load_graph",
    "permutation_to_text",
    "permutation_from_text",
    "save_permutation",
    "load_permutation",
]


class DimensionError(ValueError):
    """Operands disagree on size."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on nodes 0..n-1 with dense 0/1 adjacency."""

    adj: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adj)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if a.size and not np.isin(a, (0, 1)).all():
            raise ValueError("adjacency entries must be 0 or 1")
        a = a.astype(np.int8, copy=True)
        if np.any(np.diagonal(a)):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def m(self) -> int:
        """Number of edges."""
        return int(self.adj.sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1, dtype=np.int64)

    def edges(self) -> list[tuple[int, int]]:
        """Edge list as sorted (i, j) pairs with i < j, lexicographic order."""
        ii, jj = np.nonzero(np.triu(self.adj, k=1))
        return list(zip(ii.tolist(), jj.tolist()))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and np.array_equal(self.adj, other.adj)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True, eq=False)
class Permutation:
    """Bijection of 0..n-1 stored as the image array: img[i] is where i goes."""

    img: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.img)
        if v.ndim != 1:
            raise ValueError("permutation must be a 1-d image array")
        if v.size and not np.issubdtype(v.dtype, np.integer):
            raise ValueError("permutation images must be integers")
        v = v.astype(np.int64, copy=True)
        n = v.shape[0]
        seen = np.zeros(n, dtype=bool)
        if n:
            if v.min() < 0 or v.max() >= n:
                raise ValueError("permutation images out of range")
            seen[v] = True
            if not seen.all():
                raise ValueError("not a bijection: duplicate image")
        v.setflags(write=False)
        object.__setattr__(self, "img", v)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return self.img.shape[0]

    def __call__(self, i: int) -> int:
        return int(self.img[i])

    def inverse(self) -> "Permutation":
        inv = np.empty(self.n, dtype=np.int64)
        inv[self.img] = np.arange(self.n)
        return Permutation(inv)

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self.compose(other))(i) = self(other(i))."""
        if self.n != other.n:
            raise DimensionError("length mismatch")
        return Permutation(self.img[other.img])

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.img, np.arange(self.n)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.img, other.img)

    def __repr__(self) -> str:
        return f"Permutation({self.img.tolist()})"


def _check_sizes(g: Graph, p: Permutation) -> None:
    if g.n != p.n:
        raise DimensionError(f"graph has {g.n} nodes, permutation has {p.n}")


def as_penalty(c, n: int) -> np.ndarray:
    """Normalize a fixed-point penalty to a nonnegative length-n vector.

    Accepts None (zeros), a scalar (uniform), or a length-n sequence.
    """
    if c is None:
        return np.zeros(n)
    v = np.asarray(c, dtype=np.float64)
    if v.ndim == 0:
        v = np.full(n, float(v))
    if v.shape != (n,):
        raise DimensionError(f"penalty vector must have length {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError("penalty entries must be finite")
    if np.any(v < 0):
        raise ValueError("penalty entries must be nonnegative")
    return v


def permutation_matrix(p: Permutation) -> np.ndarray:
    """The 0/1 matrix P with P[i, p(i)] = 1."""
    P = np.zeros((p.n, p.n))
    P[np.arange(p.n), p.img] = 1.0
    return P


def permute_graph(g: Graph, p: Permutation) -> Graph:
    """Relabel nodes: result.adj[p(i), p(j)] = g.adj[i, j]."""
    _check_sizes(g, p)
    out = np.zeros_like(g.adj)
    out[np.ix_(p.img, p.img)] = g.adj
    return Graph(out)


def mismatch_count(g: Graph, p: Permutation) -> int:
    """Unordered pairs whose adjacency disagrees between g and its relabeling.

    Counted as |{ {i,j} : adj[i,j] != adj[p(i),p(j)] }|, which equals the
    disagreement count between g and permute_graph(g, p). Always even, since
    relabeling conserves the edge count.
    """
    _check_sizes(g, p)
    b = g.adj[np.ix_(p.img, p.img)]
    return int(np.count_nonzero(np.triu(g.adj != b, k=1)))


def epsilon(g: Graph, p: Permutation) -> int:
    """Symmetry error: mismatch_count / 2, an exact integer."""
    return mismatch_count(g, p) // 2


def symmetry_coefficient(g: Graph, p: Permutation) -> float:
    """epsilon normalized by half the pair count; 0 iff p is an automorphism."""
    if g.n < 2:
        raise ValueError("symmetry coefficient needs n >= 2")
    pairs = g.n * (g.n - 1) // 2
    return mismatch_count(g, p) / pairs


def asp_objective(g: Graph, x, c=None) -> float:
    """Penalized matching objective -tr(A X A^T X^T) + sum_i c[i] * X[i,i].

    x may be a Permutation or a doubly stochastic matrix. For a permutation
    with c = 0 this equals 2*epsilon - ||A||_F^2 (integer-exact).
    """
    A = g.adj
    cvec = as_penalty(c, g.n)
    if isinstance(x, Permutation):
        _check_sizes(g, x)
        b = A[np.ix_(x.img, x.img)]
        tr = int(np.sum(A.astype(np.int64) * b))
        pen = float(cvec[x.img == np.arange(g.n)].sum())
        return float(-tr + pen)
    X = np.asarray(x, dtype=np.float64)
    if X.shape != (g.n, g.n):
        raise DimensionError("matrix size does not match graph")
    Af = A.astype(np.float64)
    tr = float(np.sum((Af @ X @ Af.T) * X))
    return -tr + float(np.sum(cvec * np.diagonal(X)))


def hamming(a: Permutation, b: Permutation) -> int:
    """Number of positions where the two image arrays differ (0 or 2..n)."""
    if a.n != b.n:
        raise DimensionError("length mismatch")
    return int(np.count_nonzero(a.img != b.img))


def fixed_points(p: Permutation) -> int:
    return int(np.count_nonzero(p.img == np.arange(p.n)))


# ---------------------------------------------------------------------------
# text formats
#
# Graph: first line "n m", then m lines "i j" with 0 <= i < j < n, emitted in
# lexicographic order. Permutation: one line of n space-separated images.
# Both forms are byte-stable for fixed inputs.
# ---------------------------------------------------------------------------


def graph_to_text(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{i} {j}" for i, j in g.edges())
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"bad graph header {lines[0]!r}: expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ValueError(f"bad graph header {lines[0]!r}") from None
    if n < 1 or m < 0:
        raise ValueError(f"bad graph header values n={n} m={m}")
    if len(lines) - 1 != m:
        raise ValueError(f"expected {m} edge lines, found {len(lines) - 1}")
    adj = np.zeros((n, n), dtype=np.int8)
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"bad edge line {ln!r}") from None
        if not (0 <= i < j < n):
            raise ValueError(f"edge ({i},{j}) out of range for n={n}")
        if adj[i, j]:
            raise ValueError(f"duplicate edge ({i},{j})")
        adj[i, j] = adj[j, i] = 1
    return Graph(adj)


def save_graph(path, g: Graph) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(graph_to_text(g))


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as f:
        return graph_from_text(f.read())


def permutation_to_text(p: Permutation) -> str:
    return " ".join(str(v) for v in p.img.tolist()) + "\n"


def permutation_from_text(text: str) -> Permutation:
    parts = text.split()
    if not parts:
        raise ValueError("empty permutation file")
    try:
        img = [int(v) for v in parts]
    except ValueError:
        raise ValueError("permutation file has non-integer entries") from None
    return Permutation(np.asarray(img, dtype=np.int64))


def save_permutation(path, p: Permutation) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(permutation_to_text(p))


def load_permutation(path) -> Permutation:
    with open(path, "r", encoding="utf-8") as f:
        return permutation_from_text(f.read())
