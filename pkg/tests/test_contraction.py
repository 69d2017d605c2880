import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cutkit.contraction import ContractionState, ceil_log2, multinomial_splitter
from cutkit.errors import AlignmentError, InvalidInputError, NoEdgeError
from cutkit.graph import WeightedGraph, complete_graph
from cutkit.oracle import CutQueryOracle

from helpers import chi2_critical, graphs, random_weighted, sampling_tree_distribution


def uncontracted(g: WeightedGraph, st_: ContractionState, vertices=None) -> dict:
    """Reference: weights of pairs inside ``vertices`` whose ends lie in different supernodes."""
    vs = set(range(g.n)) if vertices is None else set(vertices)
    return {(u, v): w for (u, v), w in g.weights.items()
            if u in vs and v in vs and st_.supernode_of(u) != st_.supernode_of(v)}


def charged(o, fn, *args):
    before = o.count
    out = fn(*args)
    return out, o.count - before


class TestBookkeeping:
    def test_initialize_costs_n(self):
        o = CutQueryOracle(complete_graph(7))
        ContractionState(o)
        assert o.count == 7

    def test_contract_costs_one(self):
        o = CutQueryOracle(complete_graph(6))
        s = ContractionState(o)
        sid, cost = charged(o, s.contract, [3, 1])
        assert sid == 1
        assert cost == 1
        assert s.supernodes() == [frozenset({0}), frozenset({1, 3}), frozenset({2}),
                                  frozenset({4}), frozenset({5})]
        assert s.degree(1) == 8.0

    def test_contract_everything_is_free(self):
        o = CutQueryOracle(complete_graph(4))
        s = ContractionState(o)
        _, cost = charged(o, s.contract, range(4))
        assert cost == 0
        assert s.num_supernodes == 1
        assert s.get_total_weight() == 0.0

    def test_contract_needs_two_supernodes(self):
        s = ContractionState(CutQueryOracle(complete_graph(4)))
        s.contract([0, 1])
        with pytest.raises(InvalidInputError):
            s.contract([0, 1])

    def test_alignment(self):
        s = ContractionState(CutQueryOracle(complete_graph(5)))
        s.contract([0, 1])
        with pytest.raises(AlignmentError):
            s.contract([1, 2])
        with pytest.raises(AlignmentError):
            s.get_total_weight([0, 3])
        assert s.resolve([0, 1, 3]) == [0, 3]

    def test_total_weight(self):
        g = WeightedGraph(4, {(0, 1): 2.0, (1, 2): 3.0, (2, 3): 4.0})
        o = CutQueryOracle(g)
        s = ContractionState(o)
        w, cost = charged(o, s.get_total_weight)
        assert (w, cost) == (9.0, 0)  # the full set is free
        w, cost = charged(o, s.get_total_weight, [0, 1, 2])
        assert (w, cost) == (5.0, 1)
        s.contract([1, 2])
        assert s.get_total_weight() == 6.0
        assert s.get_total_weight([1, 2]) == 0.0


class TestGetEdge:
    def test_no_edge(self):
        s = ContractionState(CutQueryOracle(WeightedGraph(3)))
        with pytest.raises(NoEdgeError):
            s.get_edge()

    def test_picks_heavy_edge(self):
        g = WeightedGraph(5, {(0, 1): 1.0, (2, 4): 100.0, (1, 3): 1.0})
        s = ContractionState(CutQueryOracle(g))
        assert tuple(s.get_edge()) == (2, 4, 100.0)

    @given(graphs(min_n=2, max_n=10), st.randoms(use_true_random=False))
    def test_heavy_and_within_ceiling(self, g, rnd):
        o = CutQueryOracle(g)
        s = ContractionState(o)
        limit = 4 * ceil_log2(g.n) + 1
        while True:
            live = uncontracted(g, s)
            total = sum(live.values())
            if total == 0:
                with pytest.raises(NoEdgeError):
                    s.get_edge()
                return
            e, cost = charged(o, s.get_edge)
            assert cost <= limit
            assert (e.u, e.v) in live
            assert math.isclose(e.weight, live[(e.u, e.v)], rel_tol=1e-9)
            assert e.weight >= 2 * total / g.n ** 2 * (1 - 1e-9)
            ids = [s.supernode_of(e.u), s.supernode_of(e.v)]
            s.contract(np.concatenate([s.members(i) for i in ids]))
            if rnd.random() < 0.3 and s.num_supernodes > 2:
                a, b = rnd.sample(s.supernode_ids(), 2)
                s.contract(np.concatenate([s.members(a), s.members(b)]))


class TestSampling:
    def test_no_edge(self):
        s = ContractionState(CutQueryOracle(WeightedGraph(4, {(2, 3): 1.0})))
        with pytest.raises(NoEdgeError):
            s.sample([0, 1, 2], np.random.default_rng(0))
        with pytest.raises(NoEdgeError):
            s.sample([0], np.random.default_rng(0))

    def test_single_edge(self):
        s = ContractionState(CutQueryOracle(WeightedGraph(4, {(1, 3): 2.5})))
        assert tuple(s.sample(range(4), np.random.default_rng(0))) == (1, 3, 2.5)

    @settings(max_examples=40)
    @given(graphs(min_n=2, max_n=6, max_weight=9), st.randoms(use_true_random=False))
    def test_exact_probability_tree(self, g, rnd):
        s = ContractionState(CutQueryOracle(g))
        if g.n > 3 and rnd.random() < 0.5:
            s.contract(rnd.sample(range(g.n), 2))
        live = uncontracted(g, s)
        total = sum(live.values())
        if total == 0:
            return
        dist = sampling_tree_distribution(s, range(g.n))
        assert set(dist) == set(live)
        for pair, w in live.items():
            assert math.isclose(dist[pair], w / total, rel_tol=1e-9)

    def test_exact_tree_on_subset(self):
        g = random_weighted(8, 0.8, 1, 10, np.random.default_rng(4), integer=True)
        s = ContractionState(CutQueryOracle(g))
        s.contract([1, 5])
        verts = [1, 2, 4, 5, 6]
        live = uncontracted(g, s, verts)
        total = sum(live.values())
        dist = sampling_tree_distribution(s, verts)
        assert set(dist) == set(live)
        for pair, w in live.items():
            assert math.isclose(dist[pair], w / total, rel_tol=1e-9)

    @given(graphs(min_n=2, max_n=12), st.integers(0, 2**32 - 1))
    def test_single_draw_ceiling(self, g, seed):
        o = CutQueryOracle(g)
        s = ContractionState(o)
        if g.total_weight() == 0:
            return
        e, cost = charged(o, s.sample, range(g.n), np.random.default_rng(seed))
        assert cost <= 6 * ceil_log2(g.n) + 1
        assert g.weight(e.u, e.v) == e.weight

    @pytest.mark.parametrize("share", [True, False])
    def test_chi_square(self, share):
        g = WeightedGraph(5, {(0, 1): 1.0, (0, 2): 2.0, (1, 3): 3.0, (2, 4): 4.0,
                              (3, 4): 5.0, (1, 2): 0.5})
        s = ContractionState(CutQueryOracle(g))
        draws = 100_000 if share else 20_000
        hits = s.sample_many(range(5), draws, np.random.default_rng(11), share_queries=share)
        assert sum(c for _, c in hits) == draws
        total = g.total_weight()
        observed = {(e.u, e.v): c for e, c in hits}
        stat = sum((observed.get(p, 0) - draws * w / total) ** 2 / (draws * w / total)
                   for p, w in g.weights.items())
        assert stat < chi2_critical(len(g.weights) - 1)

    def test_shared_batch_saves_queries(self):
        g = random_weighted(16, 0.5, 1, 5, np.random.default_rng(2))
        o = CutQueryOracle(g)
        s = ContractionState(o)
        before = o.count
        s.sample_many(range(16), 200, np.random.default_rng(0))
        shared = o.count - before
        before = o.count
        s.sample_many(range(16), 200, np.random.default_rng(0), share_queries=False)
        separate = o.count - before
        assert shared < separate

    def test_multinomial_splitter_sums(self):
        split = multinomial_splitter(np.random.default_rng(0))
        w = np.array([1.0, 0.0, 3.0])
        for count in (1, 5, 100):
            out = split(count, w)
            assert out.sum() == count
            assert out[1] == 0


@given(graphs(min_n=2, max_n=9, integer=False), st.integers(0, 2 ** 32 - 1), st.data())
def test_float_weights_never_yield_non_edges(g, seed, data):
    s = ContractionState(CutQueryOracle(g))
    rng = np.random.default_rng(seed)
    verts = sorted(data.draw(st.sets(st.integers(0, g.n - 1), min_size=1)))
    try:
        e = s.sample(verts, rng)
    except NoEdgeError:
        assert not any(w > 0 for (u, v), w in g.weights.items() if u in verts and v in verts)
        return
    assert g.weight(e.u, e.v) > 0
    assert e.u in verts and e.v in verts
