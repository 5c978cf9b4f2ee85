"""Shared brute-force oracles for the test suite.

Everything here works on the full ordered symmetric extension with plain
loops, independently of the package's rank-indexed storage, so the fast
implementations can be checked against first principles on small instances.
"""

import math
from itertools import combinations, permutations, product

import numpy as np
import pytest

from hgon.tensor import AdjacencyTensor


def dense_from_edges(n, m, edges):
    dense = np.zeros((n,) * m)
    for e in edges:
        for p in permutations(e):
            dense[p] = 1.0
    return dense


def brute_collapse(dense):
    n = dense.shape[0]
    m = dense.ndim
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if m == 2:
                out[i, j] = dense[i, j]
            else:
                for rest in product(range(n), repeat=m - 2):
                    out[i, j] += dense[(i, j) + rest]
    return out


def brute_incidence(dense, z, k):
    n = dense.shape[0]
    m = dense.ndim
    counts = np.zeros((n, k))
    for i in range(n):
        for j2 in range(n):
            a = z[j2]
            if m == 2:
                counts[i, a] += dense[i, j2]
            else:
                for rest in product(range(n), repeat=m - 2):
                    counts[i, a] += dense[(i, j2) + rest]
    return counts


def brute_capacity(size, n, m):
    # ground set: `size` members of the community, n - size others; a
    # candidate (m-1)-subset counts once per community member it contains
    members = [1] * size + [0] * (n - size)
    total = 0
    for subset in combinations(range(n), m - 1):
        t = sum(members[v] for v in subset)
        if t >= 1:
            total += math.factorial(t)
    return total


def brute_blockwise(n, m, edges, z, k):
    """Mean adjacency per community multiset, by exhaustive enumeration."""
    edges = {tuple(sorted(e)) for e in edges}
    sums, counts = {}, {}
    for combo in combinations(range(n), m):
        key = tuple(sorted(z[v] for v in combo))
        counts[key] = counts.get(key, 0) + 1
        sums[key] = sums.get(key, 0) + (1 if combo in edges else 0)
    return {key: sums[key] / counts[key] for key in counts}


def brute_loss(n, m, edges, z, q_lookup):
    edges = {tuple(sorted(e)) for e in edges}
    total = 0.0
    for combo in combinations(range(n), m):
        key = tuple(sorted(z[v] for v in combo))
        val = 1.0 if combo in edges else 0.0
        total += (val - q_lookup(key)) ** 2
    return total


def brute_auc(scores, truth):
    scores = np.asarray(scores, dtype=float)
    truth = np.asarray(truth, dtype=bool)
    pos = scores[truth]
    neg = scores[~truth]
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def random_adjacency(rng, n, m, density=0.4):
    table = list(combinations(range(n), m))
    mask = rng.random(len(table)) < density
    edges = [table[i] for i in np.nonzero(mask)[0]]
    return AdjacencyTensor.from_edges(n, m, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
