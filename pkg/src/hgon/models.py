"""Hypergraphon models and the samplers that turn them into random hypergraphs.

Two families are implemented. Simple models depend only on one latent
coordinate per vertex; the full three-uniform model additionally depends on
one latent coordinate per vertex pair and is piecewise constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rng import derive_rng
from .tensor import AdjacencyTensor, ProbabilityTensor, hyperedge_table, num_hyperedges

__all__ = [
    "FullHypergraphon",
    "HypergraphSample",
    "SimpleHypergraphon",
    "constant_model",
    "logistic_kernel",
    "logistic_model",
    "model_from_config",
    "product_kernel",
    "product_model",
]


def product_kernel(u, v, w):
    """Edge probability equal to the product of the three node coordinates."""
    return u * v * w


def logistic_kernel(u, v, w, c1=1.0, c2=1.0, c3=1.0):
    """Logistic link applied to a weighted sum of squared node coordinates."""
    return 1.0 / (1.0 + np.exp(-(c1 * u**2 + c2 * v**2 + c3 * w**2)))


@dataclass(frozen=True, eq=False)
class HypergraphSample:
    """Latent coordinates, hyperedge probability tensor, and realized tensor."""

    node_latents: np.ndarray
    pair_latents: np.ndarray | None
    theta: ProbabilityTensor
    adjacency: AdjacencyTensor


def _bernoulli_tensor(n: int, m: int, theta_values: np.ndarray, rng) -> AdjacencyTensor:
    draws = rng.random(len(theta_values))
    present = draws < theta_values
    return AdjacencyTensor.from_edge_array(n, m, hyperedge_table(n, m)[present])


def _check_rho(rho: float) -> float:
    rho = float(rho)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"sparsity rho must lie in [0, 1], got {rho}")
    return rho


@dataclass(frozen=True)
class SimpleHypergraphon:
    """Symmetric function of the m node coordinates, mapping [0,1]^m to [0,1].

    ``fn`` must accept m numpy arrays and evaluate elementwise; the catalog
    models (:func:`product_model`, :func:`logistic_model`,
    :func:`constant_model`) all do.
    """

    m: int
    fn: Callable
    label: str = "custom"

    def probability(self, *coords):
        if len(coords) != self.m:
            raise ValueError(f"expected {self.m} coordinates, got {len(coords)}")
        # canonical coordinate order makes the symmetry bit-exact
        arrays = np.broadcast_arrays(*(np.asarray(c, dtype=np.float64) for c in coords))
        ordered = np.sort(np.stack(arrays, axis=-1), axis=-1)
        return self.fn(*(ordered[..., i] for i in range(self.m)))

    def sample(self, n: int, rho: float = 1.0, seed: int | None = 0) -> HypergraphSample:
        """Draw latents, the probability tensor, and a Bernoulli realization.

        Deterministic given the seed; node latents and edge flips come from
        independent streams.
        """
        rho = _check_rho(rho)
        if n < self.m:
            raise ValueError(f"need at least m={self.m} vertices, got n={n}")
        latents = derive_rng(seed, "nodes").random(n)
        table = hyperedge_table(n, self.m)
        vals = np.asarray(
            self.probability(*(latents[table[:, i]] for i in range(self.m))),
            dtype=np.float64,
        )
        if vals.min() < -1e-9 or vals.max() > 1 + 1e-9:
            raise ValueError(f"model '{self.label}' produced values outside [0, 1]")
        theta = ProbabilityTensor(n, self.m, rho * np.clip(vals, 0.0, 1.0))
        adjacency = _bernoulli_tensor(n, self.m, theta.values, derive_rng(seed, "edges"))
        return HypergraphSample(latents, None, theta, adjacency)


def product_model() -> SimpleHypergraphon:
    return SimpleHypergraphon(3, product_kernel, "case1")


def logistic_model(c1: float, c2: float, c3: float) -> SimpleHypergraphon:
    def fn(u, v, w):
        return logistic_kernel(u, v, w, c1, c2, c3)

    return SimpleHypergraphon(3, fn, "case2")


def constant_model(value: float, m: int = 3) -> SimpleHypergraphon:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"constant model value must lie in [0, 1], got {value}")

    def fn(*coords):
        return np.full_like(np.asarray(coords[0], dtype=np.float64), value)

    return SimpleHypergraphon(m, fn, "constant")


def bucket_index(x, k: int):
    """Half-open bucket of x in [0,1] among k equal intervals; 1.0 maps to the last."""
    return np.minimum((np.asarray(x, dtype=np.float64) * k).astype(np.int64), k - 1)


def _pair_rank(u, v):
    # colex rank of the pair (u, v) with u < v
    return u + v * (v - 1) // 2


@dataclass(frozen=True)
class FullHypergraphon:
    """Piecewise-constant three-uniform model on node and pair coordinates.

    Vertices fall into ``k_comm`` buckets of their node coordinate. Each pair
    coordinate is compared against ``p1`` when its two vertices share a bucket
    and against ``q1`` otherwise; the hyperedge probability is ``p2`` when all
    three pair coordinates clear their thresholds and ``q2`` otherwise.
    """

    p1: float
    q1: float
    p2: float
    q2: float
    k_comm: int

    m = 3

    def __post_init__(self):
        for name in ("p1", "q1", "p2", "q2"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if self.k_comm < 1:
            raise ValueError(f"k_comm must be positive, got {self.k_comm}")

    def _values(self, x1, x2, x3, x12, x13, x23):
        b1, b2, b3 = (bucket_index(x, self.k_comm) for x in (x1, x2, x3))
        t12 = np.where(b1 == b2, self.p1, self.q1)
        t13 = np.where(b1 == b3, self.p1, self.q1)
        t23 = np.where(b2 == b3, self.p1, self.q1)
        inside = (x12 < t12) & (x13 < t13) & (x23 < t23)
        return np.where(inside, self.p2, self.q2)

    def probability(self, x1, x2, x3, x12, x13, x23) -> float:
        coords = [float(c) for c in (x1, x2, x3, x12, x13, x23)]
        if any(c < 0.0 or c > 1.0 for c in coords):
            raise ValueError(f"coordinates must lie in [0, 1], got {coords}")
        return float(self._values(*(np.asarray(c) for c in coords)))

    def sample(self, n: int, rho: float = 1.0, seed: int | None = 0) -> HypergraphSample:
        """Draw node and pair latents, the probability tensor, and a realization."""
        rho = _check_rho(rho)
        if n < 3:
            raise ValueError(f"need at least 3 vertices, got n={n}")
        node = derive_rng(seed, "nodes").random(n)
        pair = derive_rng(seed, "pairs").random(num_hyperedges(n, 2))
        table = hyperedge_table(n, 3)
        i, j, l = table[:, 0], table[:, 1], table[:, 2]
        vals = self._values(
            node[i], node[j], node[l],
            pair[_pair_rank(i, j)], pair[_pair_rank(i, l)], pair[_pair_rank(j, l)],
        )
        theta = ProbabilityTensor(n, 3, rho * vals)
        adjacency = _bernoulli_tensor(n, 3, theta.values, derive_rng(seed, "edges"))
        return HypergraphSample(node, pair, theta, adjacency)


def model_from_config(cfg: dict):
    """Build a model from the flat config vocabulary.

    Recognized forms: ``{"model": "case1"}``, ``{"model": "case2", "c": [c1,
    c2, c3]}``, ``{"model": "constant", "value": c}``, ``{"model": "full",
    "p1": .., "q1": .., "p2": .., "q2": .., "k_comm": ..}``.
    """
    name = cfg.get("model")
    if name == "case1":
        return product_model()
    if name == "case2":
        c = cfg.get("c")
        if not isinstance(c, (list, tuple)) or len(c) != 3:
            raise ValueError('model "case2" requires "c": [c1, c2, c3]')
        return logistic_model(*(float(x) for x in c))
    if name == "constant":
        if "value" not in cfg:
            raise ValueError('model "constant" requires "value"')
        return constant_model(float(cfg["value"]), m=int(cfg.get("m", 3)))
    if name == "full":
        missing = [key for key in ("p1", "q1", "p2", "q2", "k_comm") if key not in cfg]
        if missing:
            raise ValueError(f'model "full" missing keys: {missing}')
        return FullHypergraphon(
            float(cfg["p1"]), float(cfg["q1"]), float(cfg["p2"]), float(cfg["q2"]),
            int(cfg["k_comm"]),
        )
    raise ValueError(f"unknown model {name!r}")
