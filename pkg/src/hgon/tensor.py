"""Symmetric m-uniform tensors stored over increasing hyperedges.

A binary adjacency tensor keeps the set of present hyperedges; a probability
tensor keeps one float per increasing hyperedge, indexed by colexicographic
rank. The symmetric extension over ordered index tuples (m! copies of every
hyperedge, zeros on repeated indices) is virtual and never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "AdjacencyTensor",
    "ProbabilityTensor",
    "collapse",
    "frobenius_sq_diff",
    "hyperedge_rank",
    "hyperedge_table",
    "hyperedges",
    "load_adjacency",
    "load_probability",
    "make_hyperedge",
    "num_hyperedges",
    "rank_rows",
    "save_adjacency",
    "save_probability",
]


def make_hyperedge(vertices: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Canonical hyperedge: ascending tuple of at least two distinct vertex ids."""
    vs = tuple(sorted(int(v) for v in vertices))
    if len(vs) < 2:
        raise ValueError(f"hyperedge needs at least 2 vertices, got {vertices!r}")
    if len(set(vs)) != len(vs):
        raise ValueError(f"repeated vertex in hyperedge {vertices!r}")
    if vs[0] < 0:
        raise ValueError(f"negative vertex id in hyperedge {vertices!r}")
    if n is not None and vs[-1] >= n:
        raise ValueError(f"vertex id {vs[-1]} out of range for n={n}")
    return vs


def num_hyperedges(n: int, m: int) -> int:
    return math.comb(n, m)


def hyperedges(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """All increasing m-tuples over range(n), in colexicographic order."""

    def rec(limit, size):
        if size == 0:
            yield ()
            return
        for last in range(size - 1, limit):
            for rest in rec(last, size - 1):
                yield rest + (last,)

    return rec(n, m)


def hyperedge_rank(edge: Sequence[int]) -> int:
    """Colexicographic rank of an increasing tuple among all such tuples."""
    return sum(math.comb(v, i + 1) for i, v in enumerate(edge))


@lru_cache(maxsize=None)
def hyperedge_table(n: int, m: int) -> np.ndarray:
    """(C(n,m), m) array whose row r is the increasing tuple of rank r."""
    table = np.fromiter(
        (v for edge in hyperedges(n, m) for v in edge),
        dtype=np.int64,
        count=num_hyperedges(n, m) * m,
    ).reshape(num_hyperedges(n, m), m)
    table.setflags(write=False)
    return table


def rank_rows(rows: np.ndarray) -> np.ndarray:
    """Vectorized colexicographic ranks for rows of strictly increasing indices."""
    rows = np.asarray(rows, dtype=np.int64)
    out = np.zeros(len(rows), dtype=np.int64)
    for t in range(rows.shape[1]):
        v = rows[:, t]
        c = np.ones(len(rows), dtype=np.int64)
        for s in range(t + 1):
            c = c * np.maximum(v - s, 0) // (s + 1)
        out += c
    return out


def _check_shape(n: int, m: int) -> None:
    if m < 2:
        raise ValueError(f"uniformity m must be at least 2, got {m}")
    if n < m:
        raise ValueError(f"need at least m={m} vertices, got n={n}")


@dataclass(frozen=True)
class AdjacencyTensor:
    """Binary symmetric m-uniform tensor over n vertices.

    Only the set of present increasing hyperedges is stored. Queries at any
    ordered index tuple resolve through symmetry, with value 0 on tuples that
    repeat a vertex. Instances are immutable and safe to share across workers.
    """

    n: int
    m: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        _check_shape(self.n, self.m)
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))

    @classmethod
    def from_edges(cls, n: int, m: int, edges: Iterable[Sequence[int]]) -> "AdjacencyTensor":
        """Build from unordered vertex collections, validating every hyperedge."""
        canon = set()
        for e in edges:
            edge = make_hyperedge(e, n=n)
            if len(edge) != m:
                raise ValueError(f"hyperedge {e!r} has {len(edge)} vertices, expected {m}")
            canon.add(edge)
        return cls(n, m, frozenset(canon))

    @classmethod
    def from_edge_array(cls, n: int, m: int, arr: np.ndarray) -> "AdjacencyTensor":
        """Build from an integer array of ascending rows (validated vectorized)."""
        arr = np.asarray(arr, dtype=np.int64).reshape(-1, m)
        if len(arr):
            if (np.diff(arr, axis=1) <= 0).any():
                raise ValueError("edge rows must be strictly increasing")
            if arr[:, 0].min() < 0 or arr[:, -1].max() >= n:
                raise ValueError("vertex id out of range")
        tensor = cls(n, m, frozenset(map(tuple, arr.tolist())))
        sorted_arr = np.unique(arr, axis=0) if len(arr) else arr
        sorted_arr.setflags(write=False)
        tensor.__dict__["edge_array"] = sorted_arr
        return tensor

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def density(self) -> float:
        return self.num_edges / num_hyperedges(self.n, self.m)

    def value(self, vertices: Sequence[int]) -> int:
        """Entry of the symmetric extension at an arbitrary ordered index tuple."""
        vs = tuple(sorted(int(v) for v in vertices))
        if len(vs) != self.m:
            raise ValueError(f"expected {self.m} indices, got {len(vs)}")
        if any(v < 0 or v >= self.n for v in vs):
            raise ValueError(f"index out of range in {vertices!r}")
        if len(set(vs)) != len(vs):
            return 0
        return 1 if vs in self.edges else 0

    @cached_property
    def edge_array(self) -> np.ndarray:
        arr = np.array(sorted(self.edges), dtype=np.int64).reshape(self.num_edges, self.m)
        arr.setflags(write=False)
        return arr

    @cached_property
    def indicator(self) -> np.ndarray:
        """Dense {0,1} vector over increasing hyperedges in rank order."""
        ind = np.zeros(num_hyperedges(self.n, self.m))
        if self.num_edges:
            ind[rank_rows(self.edge_array)] = 1.0
        ind.setflags(write=False)
        return ind

    def as_probability(self) -> "ProbabilityTensor":
        return ProbabilityTensor(self.n, self.m, self.indicator.copy())

    def relabeled(self, perm: Sequence[int]) -> "AdjacencyTensor":
        """Apply a vertex permutation (perm[old] = new)."""
        perm = np.asarray(perm, dtype=np.int64)
        edges = frozenset(tuple(sorted(perm[list(e)].tolist())) for e in self.edges)
        return AdjacencyTensor(self.n, self.m, edges)

    def to_dense(self) -> np.ndarray:
        """Full ordered n^m tensor; intended for small oracle checks."""
        if self.n**self.m > 10**7:
            raise ValueError("dense expansion too large")
        dense = np.zeros((self.n,) * self.m)
        from itertools import permutations

        for e in self.edges:
            for p in permutations(e):
                dense[p] = 1.0
        return dense


@dataclass(frozen=True, eq=False)
class ProbabilityTensor:
    """Symmetric real tensor with entries in [0,1], one per increasing hyperedge."""

    n: int
    m: int
    values: np.ndarray

    def __post_init__(self):
        _check_shape(self.n, self.m)
        vals = np.asarray(self.values, dtype=np.float64).copy()
        if vals.shape != (num_hyperedges(self.n, self.m),):
            raise ValueError(
                f"expected {num_hyperedges(self.n, self.m)} values, got shape {vals.shape}"
            )
        if len(vals) and (vals.min() < -1e-9 or vals.max() > 1 + 1e-9):
            raise ValueError("probability values outside [0, 1]")
        np.clip(vals, 0.0, 1.0, out=vals)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, n: int, m: int, value: float) -> "ProbabilityTensor":
        return cls(n, m, np.full(num_hyperedges(n, m), float(value)))

    def value(self, vertices: Sequence[int]) -> float:
        """Entry of the symmetric extension at an arbitrary ordered index tuple."""
        vs = tuple(sorted(int(v) for v in vertices))
        if len(vs) != self.m:
            raise ValueError(f"expected {self.m} indices, got {len(vs)}")
        if any(v < 0 or v >= self.n for v in vs):
            raise ValueError(f"index out of range in {vertices!r}")
        if len(set(vs)) != len(vs):
            return 0.0
        return float(self.values[hyperedge_rank(vs)])

    def relabeled(self, perm: Sequence[int]) -> "ProbabilityTensor":
        perm = np.asarray(perm, dtype=np.int64)
        table = hyperedge_table(self.n, self.m)
        new_rows = np.sort(perm[table], axis=1)
        out = np.empty_like(self.values)
        out[rank_rows(new_rows)] = self.values
        return ProbabilityTensor(self.n, self.m, out)


def collapse(a: AdjacencyTensor) -> np.ndarray:
    """Sum the symmetric extension over all but the first two indices.

    Returns the n-by-n integer matrix whose (i, j) entry counts ordered
    (m-2)-tuples completing a present hyperedge through i and j; for m=2 this
    is the adjacency matrix itself.
    """
    out = np.zeros((a.n, a.n), dtype=np.int64)
    if a.num_edges == 0:
        return out
    arr = a.edge_array
    weight = math.factorial(a.m - 2)
    for p in range(a.m):
        for q in range(a.m):
            if p != q:
                np.add.at(out, (arr[:, p], arr[:, q]), weight)
    return out


def _check_same_shape(p: ProbabilityTensor, r: ProbabilityTensor) -> None:
    if (p.n, p.m) != (r.n, r.m):
        raise ValueError(f"shape mismatch: ({p.n},{p.m}) vs ({r.n},{r.m})")


def frobenius_sq_diff(p: ProbabilityTensor, r: ProbabilityTensor) -> float:
    """Squared Frobenius distance over the symmetric extension.

    Equals m! times the sum of squared entry differences over increasing
    hyperedges. Summands are sorted before accumulation so the result is
    bit-identical under vertex relabeling.
    """
    _check_same_shape(p, r)
    diff = p.values - r.values
    sq = np.sort(diff * diff)
    return math.factorial(p.m) * float(np.sum(sq))


# Line-oriented text format: header "n m", then one hyperedge per line as
# space-separated ascending vertex ids (probability files append the value).


def save_adjacency(a: AdjacencyTensor, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{a.n} {a.m}\n")
        for edge in sorted(a.edges):
            fh.write(" ".join(str(v) for v in edge) + "\n")


def load_adjacency(path) -> AdjacencyTensor:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("expected header line 'n m'")
        n, m = int(header[0]), int(header[1])
        edges = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            edges.append([int(tok) for tok in line.split()])
    return AdjacencyTensor.from_edges(n, m, edges)


def save_probability(p: ProbabilityTensor, path) -> None:
    table = hyperedge_table(p.n, p.m)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{p.n} {p.m}\n")
        for row, val in zip(table, p.values):
            fh.write(" ".join(str(v) for v in row) + f" {float(val)!r}\n")


def load_probability(path) -> ProbabilityTensor:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("expected header line 'n m'")
        n, m = int(header[0]), int(header[1])
        values = np.zeros(num_hyperedges(n, m))
        for line in fh:
            toks = line.split()
            if not toks:
                continue
            if len(toks) != m + 1:
                raise ValueError(f"expected {m} vertex ids and a value: {line!r}")
            edge = make_hyperedge(toks[:m], n=n)
            values[hyperedge_rank(edge)] = float(toks[-1])
    return ProbabilityTensor(n, m, values)
