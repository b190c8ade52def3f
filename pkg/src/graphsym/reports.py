"""Shared solver plumbing: initialization specs, run reports, seed derivation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from graphsym.graphs import (
    Graph,
    Permutation,
    epsilon,
    fixed_points,
    symmetry_coefficient,
)
from graphsym.generators import random_perm_max_fp

__all__ = ["InitSpec", "SolverReport", "stable_seed"]


def stable_seed(*parts) -> int:
    """Platform/process-stable 64-bit seed from arbitrary labeled parts.

    Python's builtin hash() is salted per process, so a keyed blake2b digest
    is used instead.
    """
    text = "|".join(str(p) for p in parts)
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True)
class InitSpec:
    """Where a solver starts.

    kind: "identity", "random", or "perm" (user-supplied permutation).
    blend: for the relaxed solver only; mix weight of the uniform barycenter
    into the starting vertex, X0 = (1-blend)*P + blend*J/n. None picks the
    kind's default (0.5 for random starts, 0 otherwise). The annealer ignores
    blend and starts at the permutation itself.
    """

    kind: str = "random"
    perm: Permutation | None = None
    blend: float | None = None

    def __post_init__(self):
        if self.kind not in ("identity", "random", "perm"):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.kind == "perm" and self.perm is None:
            raise ValueError("init kind 'perm' requires a permutation")
        if self.blend is not None and not 0.0 <= self.blend <= 1.0:
            raise ValueError("blend must be in [0, 1]")

    def resolve(self, n: int, seed: int, max_fp: int | None = None) -> Permutation:
        """The starting permutation this spec denotes for an n-node graph.

        max_fp, when given, caps the fixed points of the start (the annealer's
        feasibility constraint); a supplied permutation violating the cap is an
        error rather than silently resampled.
        """
        if self.kind == "identity":
            p = Permutation.identity(n)
        elif self.kind == "perm":
            p = self.perm
            if p.n != n:
                raise ValueError(f"init permutation has length {p.n}, graph has {n}")
        else:
            p = random_perm_max_fp(n, n if max_fp is None else max_fp, stable_seed(seed, "init"))
        if max_fp is not None and fixed_points(p) > max_fp:
            raise ValueError(
                f"init permutation has {fixed_points(p)} fixed points, cap is {max_fp}"
            )
        return p

    def start_matrix(self, n: int, seed: int) -> np.ndarray:
        """Doubly stochastic starting point for the relaxed solver."""
        p = self.resolve(n, seed)
        lam = self.blend
        if lam is None:
            lam = 0.5 if self.kind == "random" else 0.0
        X = np.zeros((n, n))
        X[np.arange(n), p.img] = 1.0
        if lam > 0.0:
            X = (1.0 - lam) * X + lam * np.full((n, n), 1.0 / n)
        return X


@dataclass(frozen=True)
class SolverReport:
    """Outcome of one solver run. S and epsilon always agree with a fresh
    recomputation from (graph, final); objective_trace is non-increasing."""

    final: Permutation
    epsilon: int
    S: float
    objective_trace: tuple[float, ...]
    iters: int
    fixed_point_count: int
    is_identity: bool
    wall_ms: int
    seed: int

    @classmethod
    def build(
        cls,
        g: Graph,
        final: Permutation,
        objective_trace,
        iters: int,
        wall_ms: int,
        seed: int,
    ) -> "SolverReport":
        return cls(
            final=final,
            epsilon=epsilon(g, final),
            S=symmetry_coefficient(g, final),
            objective_trace=tuple(float(v) for v in objective_trace),
            iters=iters,
            fixed_point_count=fixed_points(final),
            is_identity=final.is_identity(),
            wall_ms=wall_ms,
            seed=seed,
        )

    def to_dict(self, include_wall_ms: bool = False) -> dict:
        """Plain-data form for serialization.

        Serialized artifacts must be byte-identical across reruns, so the
        nondeterministic wall_ms measurement is zeroed unless asked for.
        """
        return {
            "final": self.final.img.tolist(),
            "epsilon": int(self.epsilon),
            "S": float(self.S),
            "objective_trace": list(self.objective_trace),
            "iters": int(self.iters),
            "fixed_point_count": int(self.fixed_point_count),
            "is_identity": bool(self.is_identity),
            "wall_ms": int(self.wall_ms) if include_wall_ms else 0,
            "seed": int(self.seed),
        }
