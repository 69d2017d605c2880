"""Reference implementations and hypothesis strategies shared by the tests.

The reference functions are written as plain loops over edges and subsets so
that they share no code with the library they check.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from hypothesis import strategies as st

from cutkit.graph import WeightedGraph


def naive_cut(g: WeightedGraph, s) -> float:
    s = set(s)
    return sum(w for (u, v), w in g.weights.items() if (u in s) != (v in s))


def naive_max_cut(g: WeightedGraph) -> float:
    best = 0.0
    for bits in itertools.product([0, 1], repeat=g.n - 1):
        s = {0} | {v + 1 for v, b in enumerate(bits) if b}
        best = max(best, naive_cut(g, s))
    return best


def naive_min_cut(g: WeightedGraph, verts=None) -> float:
    verts = sorted(range(g.n) if verts is None else verts)
    rest = verts[1:]
    best = float("inf")
    for r in range(len(rest)):
        for extra in itertools.combinations(rest, r):
            s = {verts[0], *extra}
            val = sum(w for (u, v), w in g.weights.items()
                      if u in verts and v in verts and (u in s) != (v in s))
            best = min(best, val)
    return best


def naive_strength(g: WeightedGraph, u: int, v: int) -> float:
    others = [x for x in range(g.n) if x not in (u, v)]
    best = 0.0
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            best = max(best, naive_min_cut(g, [u, v, *extra]))
    return best


def random_weighted(n: int, p: float, lo: float, hi: float, rng: np.random.Generator,
                    integer: bool = False) -> WeightedGraph:
    weights = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = rng.uniform(lo, hi)
                weights[(i, j)] = float(round(w)) if integer else float(w)
    return WeightedGraph(n, weights)


@st.composite
def graphs(draw, min_n: int = 1, max_n: int = 8, max_weight: int = 20,
           integer: bool = True) -> WeightedGraph:
    n = draw(st.integers(min_n, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if integer:
        wts = st.integers(0, max_weight).map(float)
    else:
        # cut queries cannot resolve a weight below rounding of the cuts around
        # it, so positive float weights stay within a 1e-6 dynamic range
        wts = st.one_of(st.just(0.0), st.floats(1e-6 * max_weight, max_weight))
    ws = draw(st.lists(wts, min_size=len(pairs), max_size=len(pairs)))
    return WeightedGraph(n, dict(zip(pairs, ws)))


@st.composite
def graph_and_set(draw, **kw):
    g = draw(graphs(**kw))
    members = draw(st.sets(st.integers(0, g.n - 1)))
    return g, members


def sampling_tree_distribution(state, vertices) -> dict[tuple[int, int], float]:
    """Exact output distribution of one draw, by walking every path of the tree.

    A scripted splitter replays a fixed prefix of branch choices and then
    takes the first positive branch, queueing every other positive branch as
    a new prefix. Each completed path contributes the product of its branch
    probabilities to the edge it ends on.
    """
    ids = state.resolve(vertices)
    dist: dict[tuple[int, int], float] = {}
    pending: list[tuple[int, ...]] = [()]
    while pending:
        prefix = pending.pop()
        taken: list[int] = []
        prob = [1.0]

        def split(count, weights, prefix=prefix, taken=taken, prob=prob):
            positive = [i for i in range(len(weights)) if weights[i] > 0]
            if len(taken) < len(prefix):
                choice = prefix[len(taken)]
            else:
                choice = positive[0]
                for alt in positive[1:]:
                    pending.append(tuple(taken) + (alt,))
            prob[0] *= weights[choice] / weights.sum()
            taken.append(choice)
            out = np.zeros(len(weights), dtype=np.int64)
            out[choice] = count
            return out

        hits = state.descend(ids, 1, split)
        ((u, v, _w), _c), = hits.items()
        dist[(u, v)] = dist.get((u, v), 0.0) + prob[0]
    return dist


def chi2_critical(df: int, z: float = 2.3263478740408408) -> float:
    """Upper quantile of chi-square by the Wilson-Hilferty cube approximation.

    The default ``z`` is the standard normal 99% quantile.
    """
    c = 2.0 / (9.0 * df)
    return df * (1.0 - c + z * math.sqrt(c)) ** 3


def max_cut_deviation(g: WeightedGraph, h: WeightedGraph) -> float:
    """Largest ``|F_h(S) - F_g(S)| / F_g(S)`` over every nontrivial cut.

    A cut that is zero in ``g`` but positive in ``h`` counts as infinite.
    """
    from cutkit.exact import all_cut_values

    gv = all_cut_values(g)[:-1]
    hv = all_cut_values(h)[:-1]
    worst = 0.0
    for a, b in zip(gv, hv):
        if a > 0:
            worst = max(worst, abs(b - a) / a)
        elif b > 1e-9:
            return math.inf
    return worst


def log_uniform_weighted(n: int, p: float, decades: float, rng: np.random.Generator) -> WeightedGraph:
    """G(n, p) with integer weights ``round(10**U)``, ``U`` uniform on ``[0, decades]``."""
    weights = {}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                weights[(i, j)] = float(round(10 ** rng.uniform(0, decades)))
    return WeightedGraph(n, weights)
