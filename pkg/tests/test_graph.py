import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cutkit.errors import GraphFormatError, InvalidCutError, InvalidInputError
from cutkit.graph import (Edge, WeightedGraph, as_members, complement, complete_graph,
                          cut_value, erdos_renyi, format_graph, parse_graph, read_graph,
                          weighted_random, write_graph)

from helpers import graph_and_set, graphs, naive_cut


class TestConstruction:
    def test_pairs_are_normalized(self):
        g = WeightedGraph(3, {(2, 0): 1.5})
        assert g.weight(0, 2) == 1.5
        assert g.weight(2, 0) == 1.5
        assert list(g.edges()) == [Edge(0, 2, 1.5)]

    def test_zero_weights_are_dropped(self):
        g = WeightedGraph(3, {(0, 1): 0.0, (1, 2): 2.0})
        assert g.num_edges == 1
        assert g.weight(0, 1) == 0.0

    @pytest.mark.parametrize("weights", [
        {(0, 0): 1.0},
        {(0, 5): 1.0},
        {(0, 1): -1.0},
        {(0, 1): math.nan},
        {(0, 1): math.inf},
        {(0, 1): 1.0, (1, 0): 2.0},
    ])
    def test_rejects_bad_weights(self, weights):
        with pytest.raises(InvalidInputError):
            WeightedGraph(3, weights)

    def test_rejects_empty_vertex_set(self):
        with pytest.raises(InvalidInputError):
            WeightedGraph(0)

    def test_from_edges_rejects_duplicates(self):
        with pytest.raises(InvalidInputError):
            WeightedGraph.from_edges(3, [(0, 1, 1.0), (1, 0, 1.0)])

    def test_from_adjacency_roundtrip(self):
        g = WeightedGraph(4, {(0, 1): 1.0, (2, 3): 4.0, (0, 3): 0.5})
        assert WeightedGraph.from_adjacency(g.adjacency()) == g

    def test_from_adjacency_requires_symmetry(self):
        with pytest.raises(InvalidInputError):
            WeightedGraph.from_adjacency(np.array([[0, 1], [2, 0]]))

    def test_adjacency_is_read_only(self):
        adj = complete_graph(3).adjacency()
        with pytest.raises(ValueError):
            adj[0, 1] = 5.0

    def test_totals_and_degrees(self):
        g = WeightedGraph(3, {(0, 1): 1.0, (1, 2): 2.0})
        assert g.total_weight() == 3.0
        assert g.degrees().tolist() == [1.0, 3.0, 2.0]

    def test_induced_relabels(self):
        g = WeightedGraph(4, {(0, 1): 1.0, (1, 3): 2.0, (2, 3): 3.0})
        h = g.induced([1, 3])
        assert h.n == 2
        assert h.weight(0, 1) == 2.0


class TestCutValue:
    def test_trivial_sets_are_zero(self):
        g = complete_graph(5)
        assert cut_value(g, []) == 0.0
        assert cut_value(g, range(5)) == 0.0

    def test_complete_graph(self):
        assert cut_value(complete_graph(6), [0, 1]) == 8.0

    def test_out_of_range(self):
        with pytest.raises(InvalidCutError):
            cut_value(complete_graph(3), [3])
        with pytest.raises(InvalidCutError):
            as_members([-1], 3)

    def test_duplicates_collapse(self):
        assert as_members([2, 2, 0], 3).tolist() == [0, 2]

    @given(graph_and_set())
    def test_matches_reference(self, gs):
        g, s = gs
        assert math.isclose(cut_value(g, s), naive_cut(g, s), abs_tol=1e-9)

    @given(graph_and_set())
    def test_symmetric(self, gs):
        g, s = gs
        assert math.isclose(cut_value(g, s), cut_value(g, complement(s, g.n)), abs_tol=1e-9)

    @given(graphs(min_n=2), st.data())
    def test_submodular(self, g, data):
        a = data.draw(st.sets(st.integers(0, g.n - 1)))
        b = data.draw(st.sets(st.integers(0, g.n - 1)))
        lhs = cut_value(g, a) + cut_value(g, b)
        rhs = cut_value(g, a | b) + cut_value(g, a & b)
        assert lhs >= rhs - 1e-9


class TestFileFormat:
    def test_parse_with_comments(self):
        g = parse_graph("# header\n3 2\n0 1 1.5  # first\n\n1 2 2\n")
        assert g.weight(0, 1) == 1.5
        assert g.weight(1, 2) == 2.0

    @pytest.mark.parametrize("text", [
        "",
        "3\n",
        "3 1\n",
        "3 1\n0 1\n",
        "3 1\n0 0 1\n",
        "3 1\n0 3 1\n",
        "3 1\n0 1 -2\n",
        "3 1\n0 1 nan\n",
        "3 2\n0 1 1\n1 0 1\n",
        "x 1\n0 1 1\n",
        "3 1\n0 1 abc\n",
    ])
    def test_rejects_malformed(self, text):
        with pytest.raises(GraphFormatError):
            parse_graph(text)

    @given(graphs(integer=False))
    def test_roundtrip(self, g):
        assert parse_graph(format_graph(g)) == g

    def test_file_roundtrip(self, tmp_path):
        g = weighted_random(7, 0.6, 1, 100, np.random.default_rng(3))
        path = tmp_path / "g.txt"
        write_graph(g, path)
        assert read_graph(path) == g


class TestGenerators:
    def test_complete(self):
        g = complete_graph(8)
        assert g.num_edges == 28
        assert g.total_weight() == 28.0

    def test_erdos_renyi_extremes(self):
        rng = np.random.default_rng(0)
        assert erdos_renyi(6, 0.0, rng).num_edges == 0
        assert erdos_renyi(6, 1.0, rng) == complete_graph(6)

    def test_erdos_renyi_seeded(self):
        a = erdos_renyi(20, 0.3, np.random.default_rng(5))
        b = erdos_renyi(20, 0.3, np.random.default_rng(5))
        assert a == b

    def test_weighted_range(self):
        g = weighted_random(15, 0.7, 3.0, 9.0, np.random.default_rng(1))
        assert all(3.0 <= e.weight <= 9.0 for e in g.edges())

    @pytest.mark.parametrize("args", [(5, 1.5, 1, 2), (5, 0.5, 3, 2), (5, 0.5, -1, 2)])
    def test_weighted_rejects(self, args):
        with pytest.raises(InvalidInputError):
            weighted_random(*args, rng=np.random.default_rng(0))
