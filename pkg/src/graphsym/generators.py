"""Random and structured graph models, plus permutation perturbation helpers.

Every generator is a pure function of (parameters, seed): it owns a private
numpy Generator derived from the seed, so identical calls reproduce identical
graphs byte-for-byte in serialized form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from graphsym.graphs import Graph, Permutation, fixed_points, mismatch_count

__all__ = [
    "LrmInstance",
    "DistortedLrmInstance",
    "gen_grid",
    "gen_er",
    "gen_ba",
    "gen_sbm",
    "gen_lrm",
    "rewire_k",
    "distort_lrm",
    "reshuffle_perm",
    "random_perm_max_fp",
]


@dataclass(frozen=True, eq=False)
class LrmInstance:
    """A mirrored random graph together with its half-swapping automorphism."""

    graph: Graph
    lr: Permutation
    half: int


@dataclass(frozen=True, eq=False)
class DistortedLrmInstance:
    """A mirrored graph extended with twin sets that break exact symmetry.

    Twins on each side share one anchor neighborhood; a clique over the first
    half of the left twins and over the second half of the right twins makes
    the natural half-swap map err on exactly 2*C(t/2,2) pairs, while a true
    automorphism still exists (cross-swap the twin halves).
    """

    graph: Graph
    lr: Permutation
    twins_left: tuple[int, ...]
    twins_right: tuple[int, ...]
    anchors_left: tuple[int, ...]
    anchors_right: tuple[int, ...]
    r: int
    t: int


def _empty_adj(n: int) -> np.ndarray:
    return np.zeros((n, n), dtype=np.int8)


def _add_edge(adj: np.ndarray, i: int, j: int) -> None:
    adj[i, j] = adj[j, i] = 1


def gen_grid(dims) -> Graph:
    """Grid graph: Cartesian product of paths, one per entry of dims.

    Nodes are coordinate tuples in row-major order; two nodes are adjacent
    iff they differ by exactly 1 in exactly one coordinate.
    """
    dims = [int(d) for d in dims]
    if not dims:
        raise ValueError("dims must be non-empty")
    if any(d < 1 for d in dims):
        raise ValueError("every grid dimension must be >= 1")
    n = int(np.prod(dims))
    if n > 10_000:
        raise ValueError(f"grid too large ({n} nodes)")
    adj = _empty_adj(n)
    strides = np.ones(len(dims), dtype=np.int64)
    for k in range(len(dims) - 2, -1, -1):
        strides[k] = strides[k + 1] * dims[k + 1]
    for idx in range(n):
        # neighbors with coordinate +1 along each axis
        rem = idx
        for k, d in enumerate(dims):
            coord = rem // strides[k]
            rem -= coord * strides[k]
            if coord + 1 < d:
                _add_edge(adj, idx, idx + int(strides[k]))
    return Graph(adj)


def gen_er(n: int, p: float, seed: int) -> Graph:
    """Uniform random graph: each pair is an edge independently w.p. p."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be in [0, 1]")
    rng = np.random.default_rng(seed)
    adj = _empty_adj(n)
    iu = np.triu_indices(n, k=1)
    adj[iu] = (rng.random(iu[0].shape[0]) < p).astype(np.int8)
    adj += adj.T
    return Graph(adj)


def gen_ba(n: int, m_attach: int, seed: int) -> Graph:
    """Preferential-attachment graph grown from a complete seed graph.

    Starts from the complete graph on m_attach+1 nodes; each later node picks
    m_attach distinct existing targets with probability proportional to their
    degree (degrees frozen while one node attaches). Edge count is therefore
    exactly C(m_attach+1, 2) + (n - m_attach - 1) * m_attach.
    """
    if m_attach < 1:
        raise ValueError("m_attach must be >= 1")
    if n <= m_attach:
        raise ValueError("n must exceed m_attach")
    rng = np.random.default_rng(seed)
    adj = _empty_adj(n)
    core = m_attach + 1
    adj[:core, :core] = 1 - np.eye(core, dtype=np.int8)
    deg = adj.sum(axis=1).astype(np.float64)
    for v in range(core, n):
        weights = deg[:v].copy()
        for _ in range(m_attach):
            total = weights.sum()
            # seed graph guarantees positive degree for every existing node
            target = int(np.searchsorted(np.cumsum(weights), rng.random() * total, side="right"))
            target = min(target, v - 1)
            _add_edge(adj, v, target)
            weights[target] = 0.0  # without replacement
        deg[:v + 1] = adj[:v + 1].sum(axis=1)  # recompute after the node, not each edge
    return Graph(adj)


def gen_sbm(sizes, probs, seed: int) -> Graph:
    """Stochastic block model with consecutive blocks of the given sizes."""
    sizes = [int(s) for s in sizes]
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be positive")
    P = np.asarray(probs, dtype=np.float64)
    r = len(sizes)
    if P.shape != (r, r):
        raise ValueError(f"probs must be {r}x{r} to match sizes")
    if not np.allclose(P, P.T, atol=1e-12):
        raise ValueError("probs must be symmetric")
    if P.min() < 0.0 or P.max() > 1.0:
        raise ValueError("probs entries must be in [0, 1]")
    rng = np.random.default_rng(seed)
    n = sum(sizes)
    bounds = np.cumsum([0] + sizes)
    block = np.empty(n, dtype=np.int64)
    for b in range(r):
        block[bounds[b]:bounds[b + 1]] = b
    adj = _empty_adj(n)
    iu = np.triu_indices(n, k=1)
    pair_p = P[block[iu[0]], block[iu[1]]]
    adj[iu] = (rng.random(iu[0].shape[0]) < pair_p).astype(np.int8)
    adj += adj.T
    return Graph(adj)


def gen_lrm(n: int, p: float, q: float, seed: int) -> LrmInstance:
    """Mirrored random graph: two identical halves plus random cross links.

    One G(n/2, p) sample occupies both index ranges [0, n/2) and [n/2, n);
    each mirror pair (i, i+n/2) is joined independently w.p. q. The half-swap
    map i <-> i+n/2 is an automorphism by construction.
    """
    if n % 2 != 0 or n < 2:
        raise ValueError("n must be even and >= 2")
    if not (0.0 <= p <= 1.0 and 0.0 <= q <= 1.0):
        raise ValueError("p and q must be in [0, 1]")
    rng = np.random.default_rng(seed)
    half = n // 2
    adj = _empty_adj(n)
    iu = np.triu_indices(half, k=1)
    vals = (rng.random(iu[0].shape[0]) < p).astype(np.int8)
    adj[iu] = vals
    adj[:half, :half] += adj[:half, :half].T
    adj[half:, half:] = adj[:half, :half]
    cross = rng.random(half) < q
    for i in np.nonzero(cross)[0]:
        _add_edge(adj, int(i), int(i) + half)
    lr = lr_permutation(n)
    return LrmInstance(graph=Graph(adj), lr=lr, half=half)


def lr_permutation(n: int) -> Permutation:
    """The involution i <-> i + n/2."""
    if n % 2 != 0:
        raise ValueError("n must be even")
    half = n // 2
    img = np.concatenate([np.arange(half, n), np.arange(half)])
    return Permutation(img.astype(np.int64))


def rewire_k(g: Graph, k: int, seed: int) -> Graph:
    """k sequential rewires: drop a uniform random edge, add a uniform random
    currently-absent pair. Edge count is conserved."""
    if k < 0:
        raise ValueError("k must be >= 0")
    n = g.n
    total_pairs = n * (n - 1) // 2
    if k > 0 and (g.m == 0 or g.m == total_pairs):
        raise ValueError("cannot rewire an empty or complete graph")
    rng = np.random.default_rng(seed)
    adj = g.adj.copy()
    edges = g.edges()
    present = set(edges)
    for _ in range(k):
        idx = int(rng.integers(len(edges)))
        u, v = edges[idx]
        edges[idx] = edges[-1]
        edges.pop()
        present.remove((u, v))
        adj[u, v] = adj[v, u] = 0
        while True:
            i = int(rng.integers(n))
            j = int(rng.integers(n))
            if i == j:
                continue
            if i > j:
                i, j = j, i
            if (i, j) not in present:
                break
        present.add((i, j))
        edges.append((i, j))
        adj[i, j] = adj[j, i] = 1
    return Graph(adj)


def distort_lrm(base: LrmInstance, r: int, t: int, seed: int) -> DistortedLrmInstance:
    """Append t twin nodes per side, anchored to a size-r seed neighborhood.

    Twins are adjacent to exactly their side's anchor set; then the first t/2
    left twins and the second t/2 right twins are each completed into cliques.
    Each clique edge maps to a non-edge under the half-swap and vice versa, so
    the map errs on 4*C(t/2,2) vertex pairs, an error count of 2*C(t/2,2).
    """
    if t < 2 or t % 2 != 0:
        raise ValueError("t must be even and >= 2")
    half = base.half
    if not 1 <= r <= half:
        raise ValueError("r must satisfy 1 <= r <= n/2")
    rng = np.random.default_rng(seed)
    n0 = base.graph.n
    anchors_left = np.sort(rng.choice(half, size=r, replace=False)).astype(np.int64)
    anchors_right = anchors_left + half
    n = n0 + 2 * t
    adj = _empty_adj(n)
    adj[:n0, :n0] = base.graph.adj
    twins_left = list(range(n0, n0 + t))
    twins_right = list(range(n0 + t, n0 + 2 * t))
    for v in twins_left:
        for x in anchors_left:
            _add_edge(adj, v, int(x))
    for v in twins_right:
        for x in anchors_right:
            _add_edge(adj, v, int(x))
    halfclique = t // 2
    for a in range(halfclique):
        for b in range(a + 1, halfclique):
            _add_edge(adj, twins_left[a], twins_left[b])
    for a in range(halfclique, t):
        for b in range(a + 1, t):
            _add_edge(adj, twins_right[a], twins_right[b])
    img = np.empty(n, dtype=np.int64)
    img[:half] = np.arange(half) + half
    img[half:n0] = np.arange(half)
    img[twins_left] = twins_right
    img[twins_right] = twins_left
    graph = Graph(adj)
    inst = DistortedLrmInstance(
        graph=graph,
        lr=Permutation(img),
        twins_left=tuple(twins_left),
        twins_right=tuple(twins_right),
        anchors_left=tuple(int(x) for x in anchors_left),
        anchors_right=tuple(int(x) for x in anchors_right),
        r=r,
        t=t,
    )
    expect = 4 * (halfclique * (halfclique - 1) // 2)
    got = mismatch_count(graph, inst.lr)
    if got != expect:
        raise AssertionError(f"twin construction broke its invariant: {got} != {expect}")
    return inst


def reshuffle_perm(p: Permutation, l: int, seed: int) -> Permutation:
    """Apply l uniform transpositions of two distinct positions' images."""
    if l < 0:
        raise ValueError("l must be >= 0")
    if l > 0 and p.n < 2:
        raise ValueError("need n >= 2 to swap")
    rng = np.random.default_rng(seed)
    img = p.img.copy()
    n = p.n
    for _ in range(l):
        i = int(rng.integers(n))
        j = int(rng.integers(n - 1))
        if j >= i:
            j += 1
        img[i], img[j] = img[j], img[i]
    return Permutation(img)


def random_perm_max_fp(n: int, max_fp: int, seed: int) -> Permutation:
    """Uniform permutation conditioned on having at most max_fp fixed points,
    drawn by rejection sampling."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= max_fp <= n:
        raise ValueError("max_fp must be in [0, n]")
    # a permutation cannot have exactly n-1 fixed points, so a cap of n-1 is
    # treated as an infeasible request rather than silently meaning n-2
    if max_fp < n and n - max_fp == 1:
        raise ValueError(f"infeasible fixed-point cap {max_fp} for n={n}")
    rng = np.random.default_rng(seed)
    while True:
        p = Permutation(rng.permutation(n).astype(np.int64))
        if fixed_points(p) <= max_fp:
            return p
