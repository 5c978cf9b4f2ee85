import math
from itertools import permutations

import numpy as np
import pytest

from conftest import brute_collapse, dense_from_edges, random_adjacency
from hgon.tensor import (
    AdjacencyTensor,
    ProbabilityTensor,
    collapse,
    frobenius_sq_diff,
    hyperedge_rank,
    hyperedge_table,
    hyperedges,
    load_adjacency,
    load_probability,
    make_hyperedge,
    num_hyperedges,
    rank_rows,
    save_adjacency,
    save_probability,
)


class TestMakeHyperedge:
    def test_sorts(self):
        assert make_hyperedge({3, 1, 2}, n=5) == (1, 2, 3)

    def test_already_sorted_pair(self):
        assert make_hyperedge([0, 4], n=5) == (0, 4)

    def test_repeated_vertex(self):
        with pytest.raises(ValueError, match="repeated vertex"):
            make_hyperedge([1, 1, 2])

    def test_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            make_hyperedge([0, 1, 7], n=5)

    def test_negative(self):
        with pytest.raises(ValueError):
            make_hyperedge([-1, 2])


class TestRanking:
    @pytest.mark.parametrize("n,m", [(5, 2), (6, 3), (7, 4), (4, 4)])
    def test_rank_matches_enumeration_order(self, n, m):
        for r, edge in enumerate(hyperedges(n, m)):
            assert hyperedge_rank(edge) == r

    def test_table_row_is_rank(self):
        table = hyperedge_table(6, 3)
        assert table.shape == (num_hyperedges(6, 3), 3)
        assert rank_rows(table).tolist() == list(range(len(table)))

    def test_table_cached_and_readonly(self):
        assert hyperedge_table(6, 3) is hyperedge_table(6, 3)
        with pytest.raises(ValueError):
            hyperedge_table(6, 3)[0, 0] = 9


class TestAdjacencyTensor:
    def test_symmetry_closure(self, rng):
        a = random_adjacency(rng, 6, 3)
        for edge in list(a.edges)[:5]:
            for perm in permutations(edge):
                assert a.value(perm) == 1
        assert a.value((0, 0, 1)) == 0

    def test_from_edges_validates(self):
        with pytest.raises(ValueError, match="repeated vertex"):
            AdjacencyTensor.from_edges(4, 3, [(0, 0, 1)])
        with pytest.raises(ValueError, match="expected 3"):
            AdjacencyTensor.from_edges(4, 3, [(0, 1)])

    def test_from_edge_array_matches_from_edges(self, rng):
        a = random_adjacency(rng, 6, 3)
        b = AdjacencyTensor.from_edge_array(6, 3, a.edge_array)
        assert a == b
        assert np.array_equal(a.indicator, b.indicator)

    def test_indicator_and_density(self):
        a = AdjacencyTensor.from_edges(4, 3, [(0, 1, 2)])
        assert a.indicator.sum() == 1
        assert a.density == 0.25

    def test_relabel_keeps_edge_count(self, rng):
        a = random_adjacency(rng, 6, 3)
        perm = rng.permutation(6)
        assert a.relabeled(perm).num_edges == a.num_edges

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            AdjacencyTensor(2, 3)
        with pytest.raises(ValueError):
            AdjacencyTensor(5, 1)


class TestCollapse:
    def test_single_triangle(self):
        a = AdjacencyTensor.from_edges(3, 3, [(0, 1, 2)])
        expected = np.ones((3, 3)) - np.eye(3)
        assert np.array_equal(collapse(a), expected)

    def test_empty(self):
        a = AdjacencyTensor(4, 3)
        assert not collapse(a).any()

    def test_two_edges_counts(self):
        a = AdjacencyTensor.from_edges(4, 3, [(0, 1, 2), (0, 1, 3)])
        m = collapse(a)
        assert m[0, 1] == 2
        for i, j, want in [(0, 2, 1), (1, 2, 1), (0, 3, 1), (1, 3, 1), (2, 3, 0)]:
            assert m[i, j] == want
            assert m[j, i] == want

    @pytest.mark.parametrize("n,m", [(5, 2), (6, 3), (6, 4)])
    def test_matches_brute_force(self, n, m, rng):
        for _ in range(5):
            a = random_adjacency(rng, n, m)
            dense = dense_from_edges(n, m, a.edges)
            got = collapse(a)
            assert np.array_equal(got, brute_collapse(dense))
            assert np.array_equal(got, got.T)
            assert not got.diagonal().any()


class TestFrobenius:
    def test_identity(self):
        p = ProbabilityTensor.constant(4, 3, 0.3)
        assert frobenius_sq_diff(p, p) == 0.0

    def test_single_triple(self):
        assert frobenius_sq_diff(
            ProbabilityTensor.constant(3, 3, 1.0), ProbabilityTensor.constant(3, 3, 0.0)
        ) == 6.0

    def test_constant_half(self):
        assert frobenius_sq_diff(
            ProbabilityTensor.constant(4, 3, 0.5), ProbabilityTensor.constant(4, 3, 0.0)
        ) == pytest.approx(6.0)

    def test_symmetry_and_triangle(self, rng):
        n, m = 5, 3
        size = num_hyperedges(n, m)
        for _ in range(10):
            p, q, r = (ProbabilityTensor(n, m, rng.random(size)) for _ in range(3))
            assert frobenius_sq_diff(p, q) == frobenius_sq_diff(q, p)
            d_pq = math.sqrt(frobenius_sq_diff(p, q))
            d_qr = math.sqrt(frobenius_sq_diff(q, r))
            d_pr = math.sqrt(frobenius_sq_diff(p, r))
            assert d_pr <= d_pq + d_qr + 1e-9

    def test_relabel_invariance_exact(self, rng):
        n, m = 6, 3
        size = num_hyperedges(n, m)
        p = ProbabilityTensor(n, m, rng.random(size))
        r = ProbabilityTensor(n, m, rng.random(size))
        for _ in range(5):
            perm = rng.permutation(n)
            assert frobenius_sq_diff(p.relabeled(perm), r.relabeled(perm)) == \
                frobenius_sq_diff(p, r)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            frobenius_sq_diff(
                ProbabilityTensor.constant(4, 3, 0.5), ProbabilityTensor.constant(5, 3, 0.5)
            )


class TestProbabilityTensor:
    def test_symmetric_query(self, rng):
        n, m = 5, 3
        p = ProbabilityTensor(n, m, rng.random(num_hyperedges(n, m)))
        for perm in permutations((0, 2, 4)):
            assert p.value(perm) == p.value((0, 2, 4))
        assert p.value((1, 1, 2)) == 0.0

    def test_range_validation(self):
        with pytest.raises(ValueError, match="outside"):
            ProbabilityTensor(4, 3, np.full(4, 1.5))

    def test_relabel_roundtrip(self, rng):
        n, m = 6, 3
        p = ProbabilityTensor(n, m, rng.random(num_hyperedges(n, m)))
        perm = rng.permutation(n)
        inverse = np.argsort(perm)
        assert np.array_equal(p.relabeled(perm).relabeled(inverse).values, p.values)


class TestSerialization:
    def test_adjacency_roundtrip(self, tmp_path, rng):
        a = random_adjacency(rng, 7, 3)
        path = tmp_path / "adj.txt"
        save_adjacency(a, path)
        assert load_adjacency(path) == a
        first = path.read_bytes()
        save_adjacency(a, path)
        assert path.read_bytes() == first

    def test_probability_roundtrip(self, tmp_path, rng):
        p = ProbabilityTensor(5, 3, rng.random(num_hyperedges(5, 3)))
        path = tmp_path / "prob.txt"
        save_probability(p, path)
        loaded = load_probability(path)
        assert np.array_equal(loaded.values, p.values)

    def test_format_shape(self, tmp_path):
        a = AdjacencyTensor.from_edges(4, 3, [(2, 1, 0)])
        path = tmp_path / "adj.txt"
        save_adjacency(a, path)
        assert path.read_text() == "4 3\n0 1 2\n"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("nonsense\n")
        with pytest.raises(ValueError, match="header"):
            load_adjacency(path)
