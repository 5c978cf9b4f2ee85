"""Least-squares block-model estimation of the hyperedge probability tensor.

The estimator assigns vertices to communities, sets every block probability
to the mean of the adjacency entries in that block, and reads the estimated
tensor off the block probabilities. Assignments are searched by the
incidence-ratio update (collapse-based alternating pass) from a spectral or
random initialization, keeping the best assignment seen under the empirical
least-squares loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .rng import derive_rng
from .tensor import (
    AdjacencyTensor,
    ProbabilityTensor,
    collapse,
    hyperedge_table,
    num_hyperedges,
    rank_rows,
)
from .validation import ensure_adjacency, ensure_labels

__all__ = [
    "BlockProbabilities",
    "FitResult",
    "HypergraphBlockModel",
    "block_model_loss",
    "block_theta",
    "blockwise_means",
    "community_sizes",
    "fit_block_model",
    "incidence_capacity",
    "incidence_counts",
    "multiset_rank",
    "multiset_table",
    "num_multisets",
    "rate_optimal_k",
    "spectral_init",
    "update_assignments",
]


def num_multisets(k: int, m: int) -> int:
    return math.comb(k + m - 1, m)


@lru_cache(maxsize=None)
def multiset_table(k: int, m: int) -> np.ndarray:
    """(C(k+m-1, m), m) array; row r is the ascending size-m multiset of rank r."""
    table = hyperedge_table(k + m - 1, m) - np.arange(m, dtype=np.int64)[None, :]
    table.setflags(write=False)
    return table


def multiset_rank(labels: Sequence[int]) -> int:
    """Rank of a size-m multiset over [k], matching :func:`multiset_table` rows."""
    ordered = np.sort(np.asarray(labels, dtype=np.int64))
    return int(rank_rows((ordered + np.arange(len(ordered)))[None, :])[0])


def _edge_block_ranks(z: np.ndarray, n: int, m: int) -> np.ndarray:
    """Multiset rank of the community labels of every increasing hyperedge."""
    rows = np.sort(z[hyperedge_table(n, m)], axis=1)
    return rank_rows(rows + np.arange(m, dtype=np.int64)[None, :])


def _block_counts(a: AdjacencyTensor, z: np.ndarray, k: int):
    """Per-block totals, present counts, and per-edge block ranks."""
    ranks = _edge_block_ranks(z, a.n, a.m)
    nb = num_multisets(k, a.m)
    totals = np.bincount(ranks, minlength=nb)
    present = np.bincount(ranks, weights=a.indicator, minlength=nb)
    return totals, present, ranks


def community_sizes(z: np.ndarray, k: int) -> np.ndarray:
    return np.bincount(z, minlength=k)


@dataclass(frozen=True, eq=False)
class BlockProbabilities:
    """Symmetric block probability tensor, stored once per community multiset."""

    k: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if vals.shape != (num_multisets(self.k, self.m),):
            raise ValueError(
                f"expected {num_multisets(self.k, self.m)} block values, got {vals.shape}"
            )
        if len(vals) and (vals.min() < 0.0 or vals.max() > 1.0):
            raise ValueError("block probabilities outside [0, 1]")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def value(self, labels: Sequence[int]) -> float:
        return float(self.values[multiset_rank(labels)])

    def relabeled(self, perm: Sequence[int]) -> "BlockProbabilities":
        """Apply a community relabeling (perm[old] = new)."""
        perm = np.asarray(perm, dtype=np.int64)
        rows = np.sort(perm[multiset_table(self.k, self.m)], axis=1)
        out = np.empty_like(self.values)
        out[rank_rows(rows + np.arange(self.m, dtype=np.int64)[None, :])] = self.values
        return BlockProbabilities(self.k, self.m, out)


def blockwise_means(a: AdjacencyTensor, z: Sequence[int], k: int) -> BlockProbabilities:
    """Mean adjacency value per community multiset; empty blocks get 0.

    For every multiset the value is (present hyperedges in the block) divided
    by (increasing hyperedges in the block), the least-squares optimum for a
    fixed assignment.
    """
    z = ensure_labels(z, a.n, k)
    totals, present, _ = _block_counts(a, z, k)
    q = np.where(totals > 0, present / np.maximum(totals, 1), 0.0)
    return BlockProbabilities(k, a.m, q)


def block_model_loss(a: AdjacencyTensor, z: Sequence[int], q: BlockProbabilities) -> float:
    """Sum of squared residuals over increasing hyperedges.

    Accumulated from integer per-block counts with exact summation, so the
    value is invariant under vertex relabeling and community relabeling.
    """
    z = ensure_labels(z, a.n, q.k)
    if q.m != a.m:
        raise ValueError(f"order mismatch: tensor m={a.m}, blocks m={q.m}")
    totals, present, _ = _block_counts(a, z, q.k)
    vals = q.values
    terms = totals * vals * vals - 2.0 * vals * present + present
    return math.fsum(terms.tolist())


def block_theta(z: Sequence[int], q: BlockProbabilities, n: int) -> ProbabilityTensor:
    """Probability tensor induced by an assignment and block probabilities."""
    z = ensure_labels(z, n, q.k)
    ranks = _edge_block_ranks(z, n, q.m)
    return ProbabilityTensor(n, q.m, q.values[ranks])


def _incidence_from_edges(edge_arr: np.ndarray, z: np.ndarray, k: int, n: int, m: int) -> np.ndarray:
    counts = np.zeros((n, k), dtype=np.int64)
    if len(edge_arr):
        for p in range(m):
            for q_col in range(m):
                if p != q_col:
                    np.add.at(counts, (edge_arr[:, p], z[edge_arr[:, q_col]]), 1)
    return counts * math.factorial(m - 2)


def incidence_counts(a: AdjacencyTensor, z: Sequence[int], k: int) -> np.ndarray:
    """(n, k) ordered-tuple incidence counts between vertices and communities.

    Entry (i, c) sums the symmetric extension over all tuples that start with
    i, continue with a member of community c, and are completed by any
    ordered choice of the remaining m-2 indices. A hyperedge is counted once
    per member it has in community c, times (m-2)! for the orderings.
    """
    z = ensure_labels(z, a.n, k)
    return _incidence_from_edges(a.edge_array, z, k, a.n, a.m)


def incidence_capacity(size: int, n: int, m: int) -> int:
    """Weighted count of possible hyperedges through a vertex and a community.

    A candidate hyperedge contributes once per member it would have in the
    community, matching the overcounting of :func:`incidence_counts`. Zero
    for an empty community.
    """
    if size < 0 or size > n:
        raise ValueError(f"community size {size} out of range for n={n}")
    return sum(
        math.factorial(t) * math.comb(size, t) * math.comb(n - size, m - 1 - t)
        for t in range(1, m)
    )


def update_assignments(
    counts: np.ndarray,
    sizes: np.ndarray,
    n: int,
    m: int,
    current: np.ndarray | None = None,
) -> np.ndarray:
    """Reassign every vertex to the community with the best capacity-normalized count.

    Ties break toward the smallest community index. Empty communities score
    -inf and are never chosen; if every score in a row is -inf the vertex
    keeps its current label (community 0 when no current assignment is given).
    """
    counts = np.asarray(counts, dtype=np.float64)
    kappa = np.array([incidence_capacity(int(s), n, m) for s in sizes], dtype=np.float64)
    scores = np.where(kappa > 0, counts / np.where(kappa == 0, 1.0, kappa), -np.inf)
    z_new = np.argmax(scores, axis=1).astype(np.int64)
    dead = ~np.isfinite(scores).any(axis=1)
    if dead.any() and current is not None:
        z_new[dead] = np.asarray(current, dtype=np.int64)[dead]
    return z_new


def _lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int = 100) -> np.ndarray:
    labels = None
    centers = centers.copy()
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = np.argmin(d2, axis=1)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for j in range(len(centers)):
            mask = labels == j
            if mask.any():
                centers[j] = points[mask].mean(axis=0)
    return labels.astype(np.int64)


def spectral_init(a: AdjacencyTensor, k: int, seed: int | None = None) -> np.ndarray:
    """Community labels from the spectrum of the collapsed matrix.

    The k eigenvectors with largest absolute eigenvalue are scaled by those
    eigenvalues and the rows are clustered with Lloyd iterations (at most
    100), seeded at the centroids of equal-frequency buckets along the
    leading coordinate. The procedure is deterministic; ``seed`` is accepted
    for interface uniformity with the random initializer.
    """
    ensure_adjacency(a)
    if k < 1 or k > a.n:
        raise ValueError(f"k must lie in [1, n]={a.n}, got {k}")
    matrix = collapse(a).astype(np.float64)
    eigvals, eigvecs = np.linalg.eigh(matrix)
    order = np.argsort(-np.abs(eigvals), kind="stable")[:k]
    embedding = eigvecs[:, order] * np.abs(eigvals[order])[None, :]
    lead = embedding[:, 0]
    if lead.sum() < 0:
        lead = -lead
        embedding = embedding.copy()
        embedding[:, 0] = lead
    buckets = np.array_split(np.argsort(lead, kind="stable"), k)
    centers = np.stack([embedding[idx].mean(axis=0) for idx in buckets])
    return _lloyd(embedding, centers)


def rate_optimal_k(n: int, m: int, rho: float) -> int:
    """Block count balancing approximation bias against estimation variance."""
    if n < m:
        raise ValueError(f"need at least m={m} vertices, got n={n}")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    k = math.ceil((rho * n**m) ** (1.0 / (m + 2)) - 1e-9)
    return min(max(k, 1), n)


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of a block-model fit."""

    labels: np.ndarray
    block_probs: BlockProbabilities
    theta: ProbabilityTensor
    loss: float
    n_iter: int
    converged: bool


def _initial_labels(a, k, init, restart, seed):
    if isinstance(init, str):
        if init == "spectral":
            return spectral_init(a, k)
        if init == "random":
            return derive_rng(seed, "restart", restart).integers(0, k, a.n).astype(np.int64)
        raise ValueError(f"unknown init {init!r}")
    return ensure_labels(init, a.n, k)


def _fit_restarts(
    a: AdjacencyTensor,
    k: int,
    init,
    restarts: int,
    max_iters: int,
    seed,
    count_edges: np.ndarray,
    q_step: Callable[[np.ndarray], BlockProbabilities],
    loss_fn: Callable[[np.ndarray, BlockProbabilities], float],
    callback=None,
) -> FitResult:
    n, m = a.n, a.m
    if restarts < 1 or max_iters < 1:
        raise ValueError("restarts and max_iters must be at least 1")
    # spectral and explicit initializations are deterministic, so extra
    # restarts would retrace the same trajectory
    if not (isinstance(init, str) and init == "random"):
        restarts = 1
    best = None
    for restart in range(restarts):
        z = _initial_labels(a, k, init, restart, seed)
        q = q_step(z)
        loss = loss_fn(z, q)
        z_best, q_best, loss_best = z, q, loss
        iters = 0
        converged = False
        for it in range(1, max_iters + 1):
            sizes = community_sizes(z, k)
            counts = _incidence_from_edges(count_edges, z, k, n, m)
            z_new = update_assignments(counts, sizes, n, m, current=z)
            iters = it
            if np.array_equal(z_new, z):
                converged = True
                break
            z = z_new
            q = q_step(z)
            loss = loss_fn(z, q)
            if callback is not None:
                callback(it, loss)
            if loss < loss_best:
                z_best, q_best, loss_best = z, q, loss
        candidate = (loss_best, restart, z_best, q_best, iters, converged)
        if best is None or candidate[0] < best[0]:
            best = candidate
    loss_best, _, z_best, q_best, iters, converged = best
    theta = block_theta(z_best, q_best, n)
    return FitResult(z_best, q_best, theta, loss_best, iters, converged)


def fit_block_model(
    a: AdjacencyTensor,
    k: int,
    *,
    init="spectral",
    restarts: int = 10,
    max_iters: int = 100,
    seed: int | None = 0,
    callback=None,
) -> FitResult:
    """Fit a k-community block model to an adjacency tensor.

    ``init`` is ``"spectral"``, ``"random"``, or an explicit label array.
    Each restart runs the incidence-ratio assignment update until the labels
    stop changing or ``max_iters`` passes, evaluating the least-squares loss
    (with block probabilities at their blockwise means) after every pass; the
    best assignment seen anywhere, across all restarts, is returned. Only
    random initialization draws fresh restarts; the other modes are
    deterministic and run once. ``callback(iteration, loss)`` is invoked
    after each assignment update.
    """
    ensure_adjacency(a)
    if k < 1 or k > a.n:
        raise ValueError(f"k must lie in [1, n]={a.n}, got {k}")
    return _fit_restarts(
        a,
        k,
        init,
        restarts,
        max_iters,
        seed,
        a.edge_array,
        q_step=lambda z: blockwise_means(a, z, k),
        loss_fn=lambda z, q: block_model_loss(a, z, q),
        callback=callback,
    )


class HypergraphBlockModel(BaseEstimator):
    """Block-model estimator with the scikit-learn parameter protocol.

    Parameters
    ----------
    k : int
        Number of communities.
    init : {"spectral", "random"} or array-like
        Initial assignment strategy, or an explicit label vector.
    restarts : int
        Independent restarts when ``init="random"``.
    max_iters : int
        Cap on assignment updates per restart.
    seed : int
        Stream key for all randomness in the fit.

    Attributes (after :meth:`fit`)
    ------------------------------
    labels_, block_probs_, theta_, loss_, n_iter_, converged_
    """

    def __init__(self, k=2, init="spectral", restarts=10, max_iters=100, seed=0):
        self.k = k
        self.init = init
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed

    def fit(self, A, y=None):
        result = fit_block_model(
            A,
            self.k,
            init=self.init,
            restarts=self.restarts,
            max_iters=self.max_iters,
            seed=self.seed,
        )
        self.n_ = A.n
        self.m_ = A.m
        self.labels_ = result.labels
        self.block_probs_ = result.block_probs
        self.theta_ = result.theta
        self.loss_ = result.loss
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        return self

    def predict_proba(self, edges=None) -> np.ndarray:
        """Estimated probabilities for the given hyperedges (all, if omitted)."""
        if edges is None:
            return self.theta_.values.copy()
        return np.array([self.theta_.value(e) for e in edges])

    def predict(self, edges=None) -> np.ndarray:
        """Presence calls at the 0.5 threshold."""
        return (self.predict_proba(edges) > 0.5).astype(np.int64)

    def score(self, A=None, y=None) -> float:
        """Negative least-squares loss (higher is better)."""
        if A is None:
            return -self.loss_
        return -block_model_loss(A, self.labels_, self.block_probs_)
