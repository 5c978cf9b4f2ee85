"""Hyperedge prediction from partially observed adjacency tensors.

Fitting under an observation mask reuses the alternating assignment search
with sums restricted to observed entries; the block probabilities come from
the stationary point of the masked quadratic objective, clipped to [0, 1].
Held-out hyperedges are scored by the fitted tensor and called present above
the 0.5 threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .estimator import (
    BlockProbabilities,
    FitResult,
    _edge_block_ranks,
    _fit_restarts,
    num_multisets,
)
from .rng import derive_rng
from .tensor import (
    AdjacencyTensor,
    ProbabilityTensor,
    hyperedge_table,
    make_hyperedge,
    num_hyperedges,
    rank_rows,
)
from .validation import ensure_adjacency, ensure_labels, ensure_mask_shape, ensure_unit

__all__ = [
    "MissingEdgePredictor",
    "ObservationMask",
    "PredictionResult",
    "auc",
    "fit_missing",
    "load_hyperedge_list",
    "masked_block_probabilities",
    "predict_missing",
    "sample_mask",
    "save_predictions",
]


@dataclass(frozen=True)
class ObservationMask:
    """Subset of increasing hyperedges whose adjacency entries are observed."""

    n: int
    m: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        if not self.edges:
            raise ValueError("observation mask must contain at least one hyperedge")

    @classmethod
    def from_edges(cls, n: int, m: int, edges: Iterable[Sequence[int]]) -> "ObservationMask":
        canon = set()
        for e in edges:
            edge = make_hyperedge(e, n=n)
            if len(edge) != m:
                raise ValueError(f"hyperedge {e!r} has {len(edge)} vertices, expected {m}")
            canon.add(edge)
        return cls(n, m, frozenset(canon))

    @property
    def num_observed(self) -> int:
        return len(self.edges)

    @cached_property
    def observed_flags(self) -> np.ndarray:
        flags = np.zeros(num_hyperedges(self.n, self.m), dtype=bool)
        arr = np.array(sorted(self.edges), dtype=np.int64).reshape(-1, self.m)
        flags[rank_rows(arr)] = True
        flags.setflags(write=False)
        return flags

    def unobserved_edges(self) -> np.ndarray:
        """Held-out hyperedges as an array of rows, in rank order."""
        return hyperedge_table(self.n, self.m)[~self.observed_flags]


def sample_mask(n: int, m: int, fraction: float, seed: int | None = 0) -> ObservationMask:
    """Uniformly random mask observing floor(fraction * C(n, m)) hyperedges."""
    fraction = ensure_unit(fraction, "fraction", open_left=True)
    total = num_hyperedges(n, m)
    count = int(fraction * total)
    if count < 1:
        raise ValueError(f"fraction {fraction} observes no hyperedges out of {total}")
    rng = derive_rng(seed, "mask")
    ranks = np.sort(rng.choice(total, size=count, replace=False))
    edges = frozenset(map(tuple, hyperedge_table(n, m)[ranks].tolist()))
    return ObservationMask(n, m, edges)


def _observed_present_array(a: AdjacencyTensor, mask: ObservationMask) -> np.ndarray:
    common = sorted(a.edges & mask.edges)
    return np.array(common, dtype=np.int64).reshape(len(common), a.m)


def _masked_block_counts(a: AdjacencyTensor, mask: ObservationMask, z: np.ndarray, k: int):
    """Per-block counts restricted to observed entries, plus full slot counts."""
    ranks = _edge_block_ranks(z, a.n, a.m)
    nb = num_multisets(k, a.m)
    flags = mask.observed_flags
    slots = np.bincount(ranks, minlength=nb)
    observed = np.bincount(ranks[flags], minlength=nb)
    present = np.bincount(
        ranks[flags], weights=a.indicator[flags], minlength=nb
    )
    return slots, observed, present


def masked_block_probabilities(
    a: AdjacencyTensor, mask: ObservationMask, z: Sequence[int], k: int
) -> BlockProbabilities:
    """Minimizer of the masked quadratic objective over block-structured tensors.

    Per block the unconstrained stationary point is
    ``n^m / (m! |observed|) * (observed present count) / (block slot count)``;
    the [0, 1] constraint clips it. Blocks with no hyperedges get 0.
    """
    ensure_adjacency(a)
    ensure_mask_shape(mask, a)
    z = ensure_labels(z, a.n, k)
    slots, _, present = _masked_block_counts(a, mask, z, k)
    scale = a.n**a.m / (math.factorial(a.m) * mask.num_observed)
    q = np.where(slots > 0, scale * present / np.maximum(slots, 1), 0.0)
    return BlockProbabilities(k, a.m, np.clip(q, 0.0, 1.0))


def fit_missing(
    a: AdjacencyTensor,
    mask: ObservationMask,
    k: int,
    *,
    init="spectral",
    restarts: int = 10,
    max_iters: int = 100,
    seed: int | None = 0,
    callback=None,
) -> FitResult:
    """Block-model fit using only the observed entries.

    Same alternating scheme as :func:`hgon.estimator.fit_block_model` with
    incidence counts restricted to observed present hyperedges, the masked
    block probabilities as the Q-step, and the loss reported over observed
    entries only. With a full mask the assignment trajectory matches the
    unmasked fit under the same seed.
    """
    ensure_adjacency(a)
    ensure_mask_shape(mask, a)
    if k < 1 or k > a.n:
        raise ValueError(f"k must lie in [1, n]={a.n}, got {k}")

    def loss_fn(z, q):
        _, observed, present = _masked_block_counts(a, mask, z, k)
        vals = q.values
        terms = observed * vals * vals - 2.0 * vals * present + present
        return math.fsum(terms.tolist())

    return _fit_restarts(
        a,
        k,
        init,
        restarts,
        max_iters,
        seed,
        _observed_present_array(a, mask),
        q_step=lambda z: masked_block_probabilities(a, mask, z, k),
        loss_fn=loss_fn,
        callback=callback,
    )


@dataclass(frozen=True, eq=False)
class PredictionResult:
    """Scores and presence calls for the held-out hyperedges, in rank order."""

    edges: list
    scores: np.ndarray
    labels: np.ndarray


def predict_missing(theta: ProbabilityTensor, mask: ObservationMask) -> PredictionResult:
    """Score unobserved hyperedges by the fitted tensor; call present above 0.5.

    A full mask yields an empty (still valid) prediction set. The threshold
    is strict: a score of exactly 0.5 is called absent.
    """
    ensure_mask_shape(mask, theta)
    held_out = mask.unobserved_edges()
    scores = theta.values[~mask.observed_flags].copy()
    labels = (scores > 0.5).astype(np.int64)
    return PredictionResult([tuple(e) for e in held_out.tolist()], scores, labels)


def auc(scores: Sequence[float], truth: Sequence[int]) -> float:
    """Area under the ROC curve, ties counted half, exact over all pairs."""
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth)
    if scores.shape != truth.shape or scores.ndim != 1:
        raise ValueError("scores and truth must be 1-d arrays of equal length")
    pos = truth.astype(bool)
    n_pos = int(pos.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("degenerate labels: need both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    rank_sum = float(ranks[pos].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


class MissingEdgePredictor(BaseEstimator):
    """Masked block-model fit plus thresholded hyperedge prediction.

    ``fit(A, mask)`` estimates the probability tensor from the observed
    entries; ``decision_function()`` returns the scores of the held-out
    hyperedges and ``predict()`` the presence calls at the 0.5 threshold.
    """

    def __init__(self, k=2, init="spectral", restarts=10, max_iters=100, seed=0):
        self.k = k
        self.init = init
        self.restarts = restarts
        self.max_iters = max_iters
        self.seed = seed

    def fit(self, A, mask):
        result = fit_missing(
            A,
            mask,
            self.k,
            init=self.init,
            restarts=self.restarts,
            max_iters=self.max_iters,
            seed=self.seed,
        )
        self.mask_ = mask
        self.labels_ = result.labels
        self.block_probs_ = result.block_probs
        self.theta_ = result.theta
        self.loss_ = result.loss
        self.n_iter_ = result.n_iter
        self.converged_ = result.converged
        return self

    def prediction(self) -> PredictionResult:
        return predict_missing(self.theta_, self.mask_)

    def decision_function(self) -> np.ndarray:
        return self.prediction().scores

    def predict(self) -> np.ndarray:
        return self.prediction().labels


# Hyperedge-list files reuse the adjacency text format; a trailing "?" marks
# a hyperedge whose status is unknown (excluded from the observation mask).
# Unlisted hyperedges are observed absent.


def load_hyperedge_list(path) -> tuple[AdjacencyTensor, ObservationMask]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("expected header line 'n m'")
        n, m = int(header[0]), int(header[1])
        present, unknown = [], []
        for line in fh:
            toks = line.split()
            if not toks:
                continue
            body = toks[:-1] if toks[-1] == "?" else toks
            edge = make_hyperedge(body, n=n)
            if len(edge) != m:
                raise ValueError(f"hyperedge {body!r} has {len(edge)} vertices, expected {m}")
            (unknown if toks[-1] == "?" else present).append(edge)
    a = AdjacencyTensor.from_edges(n, m, present)
    observed = set(map(tuple, hyperedge_table(n, m).tolist())) - set(unknown)
    return a, ObservationMask.from_edges(n, m, observed)


def save_predictions(result: PredictionResult, path) -> None:
    """CSV with one row per held-out hyperedge: hyperedge, score, label."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("hyperedge,score,label\n")
        for edge, score, label in zip(result.edges, result.scores, result.labels):
            fh.write(f"{' '.join(str(v) for v in edge)},{score:.12g},{int(label)}\n")
