"""Supernode contraction over a cut-query oracle.

A :class:`ContractionState` partitions the vertices into supernodes and
caches the cut value of every supernode. Edges inside a supernode count as
contracted and are invisible to every operation here. Edges between
different supernodes stay separate even when they join the same pair of
supernodes.

Query costs per call:

* construction / :meth:`initialize`: ``n`` (one per vertex)
* :meth:`contract`: 1 (0 when merging everything, since ``F(V)`` is free)
* :meth:`get_total_weight`: 1 (0 for a single supernode)
* :meth:`get_edge`: at most ``4 * ceil(log2 n) + 1``
* :meth:`sample`: at most ``6 * ceil(log2 n) + 1``

Halving always puts the first ``ceil(k/2)`` items (smallest ids) in the
first half, and ties go to the first half.
"""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Callable, Iterable

import numpy as np

from .errors import AlignmentError, InvalidInputError, NoEdgeError
from .graph import Edge, as_members
from .oracle import SNAP, CutQueryOracle, half_difference as _half_diff

# splitter(count, weights) -> integer counts per branch, summing to count
Splitter = Callable[[int, np.ndarray], np.ndarray]


def multinomial_splitter(rng: np.random.Generator) -> Splitter:
    """Split ``count`` draws across branches proportionally to ``weights``."""

    def split(count: int, weights: np.ndarray) -> np.ndarray:
        total = weights.sum()
        if count == 1:
            # one categorical draw; cheaper than a multinomial call
            u = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(weights), u, side="right"))
            idx = min(idx, weights.size - 1)
            while weights[idx] <= 0:
                idx -= 1
            out = np.zeros(weights.size, dtype=np.int64)
            out[idx] = 1
            return out
        return rng.multinomial(count, weights / total)

    return split


def ceil_log2(n: int) -> int:
    return max(0, math.ceil(math.log2(n))) if n > 1 else 0


def _halve(k: int) -> int:
    return (k + 1) // 2


def _rest(total: float, *parts: float) -> float:
    """``total - sum(parts)`` with rounding residue snapped to zero."""
    x = total - math.fsum(parts)
    return x if x > SNAP * abs(total) else 0.0


class ContractionState:
    """Partition of the vertices into supernodes with cached supernode cuts."""

    def __init__(self, oracle: CutQueryOracle):
        self.oracle = oracle
        self.n = oracle.n
        self.initialize()

    # ------------------------------------------------------------------
    # bookkeeping

    def initialize(self) -> None:
        """Reset to singletons and query every vertex once."""
        n = self.n
        self._owner = np.arange(n, dtype=np.intp)
        self._members: dict[int, np.ndarray] = {v: np.array([v], dtype=np.intp) for v in range(n)}
        self.vertex_degree = np.array([self._f(np.array([v])) for v in range(n)], dtype=float)
        self._degree: dict[int, float] = {v: float(self.vertex_degree[v]) for v in range(n)}

    def _f(self, vertices: np.ndarray) -> float:
        mask = np.zeros(self.n, dtype=bool)
        mask[vertices] = True
        return self.oracle.query_mask(mask)

    def _f_set(self, vertices: np.ndarray) -> float:
        """Cut value of a vertex set, free for singletons."""
        if vertices.size == 1:
            return float(self.vertex_degree[vertices[0]])
        return self._f(vertices)

    @property
    def num_supernodes(self) -> int:
        return len(self._members)

    def supernode_ids(self) -> list[int]:
        """Supernode ids (their smallest vertex), ascending."""
        return sorted(self._members)

    def supernodes(self) -> list[frozenset[int]]:
        return [frozenset(int(v) for v in self._members[i]) for i in self.supernode_ids()]

    def members(self, sid: int) -> np.ndarray:
        return self._members[sid]

    def supernode_of(self, v: int) -> int:
        return int(self._owner[v])

    def degree(self, sid: int) -> float:
        """Cached cut value of supernode ``sid``."""
        return self._degree[sid]

    def owner_array(self) -> np.ndarray:
        return self._owner.copy()

    def resolve(self, vertices: Iterable[int]) -> list[int]:
        """Supernode ids making up ``vertices``; raises if it splits one."""
        arr = as_members(vertices, self.n)
        if arr.size == 0:
            return []
        ids = np.unique(self._owner[arr])
        covered = sum(self._members[int(i)].size for i in ids)
        if covered != arr.size:
            raise AlignmentError("vertex set is not a union of supernodes")
        return [int(i) for i in ids]

    def _union(self, ids: list[int]) -> np.ndarray:
        if len(ids) == 1:
            return self._members[ids[0]]
        return np.concatenate([self._members[i] for i in ids])

    # ------------------------------------------------------------------
    # primitives

    def contract(self, vertices: Iterable[int]) -> int:
        """Merge the supernodes covering ``vertices``; returns the new id."""
        ids = self.resolve(vertices)
        if len(ids) < 2:
            raise InvalidInputError("contract needs at least two supernodes")
        verts = np.sort(self._union(ids))
        value = self._f(verts)
        new = ids[0]
        for i in ids:
            del self._members[i]
            del self._degree[i]
        self._members[new] = verts
        self._degree[new] = value
        self._owner[verts] = new
        return new

    def inner(self, ids: list[int]) -> tuple[float, float]:
        """(uncontracted weight inside, cut value) of a union of supernodes."""
        if len(ids) == 1:
            return 0.0, self._degree[ids[0]]
        cut = self._f(self._union(ids))
        deg = math.fsum(self._degree[i] for i in ids)
        return _half_diff(deg, 0.0, cut), cut

    def get_total_weight(self, vertices: Iterable[int] | None = None) -> float:
        """Uncontracted weight with both endpoints in ``vertices`` (all by default)."""
        ids = self.supernode_ids() if vertices is None else self.resolve(vertices)
        if not ids:
            return 0.0
        return self.inner(ids)[0]

    def get_edge(self) -> Edge:
        """A heavy uncontracted edge, weight at least ``2 W / n**2``.

        The supernode with the largest cut per available pair is fixed first,
        then the rest of the vertices are halved toward the larger average
        weight to that supernode, then the supernode itself is halved toward
        the larger weight to the chosen vertex. The returned weight is
        measured with one pair query using cached singleton values.
        """
        n = self.n
        ids = self.supernode_ids()
        total2 = math.fsum(self._degree[i] for i in ids)
        if len(ids) < 2 or total2 <= 0.0:
            raise NoEdgeError("no uncontracted edge remains")
        best, best_score = ids[0], -1.0
        for i in ids:
            size = self._members[i].size
            score = self._degree[i] / (size * (n - size))
            if score > best_score:
                best, best_score = i, score
        s_verts = self._members[best]
        fs = self._degree[best]
        in_s = np.zeros(n, dtype=bool)
        in_s[s_verts] = True
        t_verts = np.flatnonzero(~in_s)
        val = fs
        while t_verts.size > 1:
            h = _halve(t_verts.size)
            t1, t2 = t_verts[:h], t_verts[h:]
            v1 = _half_diff(fs, self._f_set(t1), self._f(np.concatenate((s_verts, t1))))
            v1 = min(v1, val)
            v2 = _rest(val, v1)
            if v1 * t2.size >= v2 * t1.size:
                t_verts, val = t1, v1
            else:
                t_verts, val = t2, v2
        t = int(t_verts[0])
        dt = float(self.vertex_degree[t])
        u_verts = s_verts
        while u_verts.size > 1:
            h = _halve(u_verts.size)
            u1, u2 = u_verts[:h], u_verts[h:]
            v1 = _half_diff(dt, self._f_set(u1), self._f(np.append(u1, t)))
            v1 = min(v1, val)
            v2 = _rest(val, v1)
            if v1 * u2.size >= v2 * u1.size:
                u_verts, val = u1, v1
            else:
                u_verts, val = u2, v2
        s = int(u_verts[0])
        w = _half_diff(dt, float(self.vertex_degree[s]), self._f(np.array([s, t])))
        return Edge(min(s, t), max(s, t), w)

    def sample(self, vertices: Iterable[int], rng: np.random.Generator) -> Edge:
        """One uncontracted edge inside ``vertices``, drawn proportionally to weight."""
        (edge, _count), = self.sample_many(vertices, 1, rng)
        return edge

    def sample_many(self, vertices: Iterable[int], count: int, rng: np.random.Generator,
                    total: float | None = None, share_queries: bool = True
                    ) -> list[tuple[Edge, int]]:
        """``count`` independent weight-proportional draws, grouped by edge.

        With ``share_queries`` the draws descend the halving tree together and
        every cut value is queried at most once per call; the joint
        distribution is the same as ``count`` separate calls. ``total`` may
        pass an already known weight of ``vertices`` to save one query.
        Results are ``(edge, multiplicity)`` sorted by edge.
        """
        ids = self.resolve(vertices)
        splitter = multinomial_splitter(rng)
        if share_queries:
            hits = self.descend(ids, count, splitter, total)
        else:
            hits = defaultdict(int)
            weights = {}
            for _ in range(count):
                for (u, v, w), c in self.descend(ids, 1, splitter, total).items():
                    hits[(u, v)] += c
                    weights[(u, v)] = w
            hits = {(u, v, weights[(u, v)]): c for (u, v), c in hits.items()}
        return [(Edge(u, v, w), c) for (u, v, w), c in sorted(hits.items())]

    # ------------------------------------------------------------------
    # the sampling tree

    def descend(self, ids: list[int], count: int, splitter: Splitter,
                total: float | None = None) -> dict[tuple[int, int, float], int]:
        """Route ``count`` draws through the halving tree over supernodes ``ids``.

        At a group of supernodes the draws split three ways: inside the first
        half, inside the second half, or across. Cross draws then halve the
        second half's vertices by weight to the first half, and finally halve
        the first half's vertices by weight to the chosen vertex. Every branch
        is weighted by its exact total, so each edge is reached with
        probability weight / total.
        """
        if count < 1:
            return {}
        if total is None:
            total = self.inner(ids)[0] if ids else 0.0
        if len(ids) < 2 or total <= 0.0:
            raise NoEdgeError("no uncontracted edge inside the sampled set")
        hits: dict[tuple[int, int, float], int] = defaultdict(int)
        stack: list[tuple[list[int], float, int]] = [(ids, total, count)]
        while stack:
            group, weight, cnt = stack.pop()
            if len(group) < 2:
                raise NoEdgeError("numerical drift routed a draw into a single supernode")
            h = _halve(len(group))
            a, b = group[:h], group[h:]
            w1, f1 = self.inner(a)
            w2, _f2 = self.inner(b)
            wb = _rest(weight, w1, w2)
            split = splitter(cnt, _branch_weights(w1, w2, wb))
            if split[1]:
                stack.append((b, w2, int(split[1])))
            if split[0]:
                stack.append((a, w1, int(split[0])))
            if split[2]:
                self._cross(np.sort(self._union(a)), np.sort(self._union(b)),
                            f1, wb, int(split[2]), splitter, hits)
        return dict(hits)

    def _cross(self, side_a: np.ndarray, side_b: np.ndarray, f_a: float, weight: float,
               cnt: int, splitter: Splitter, hits: dict) -> None:
        leaves: list[tuple[int, float, int]] = []
        stack = [(0, side_b.size, weight, cnt)]
        while stack:
            lo, hi, val, c = stack.pop()
            if hi - lo == 1:
                leaves.append((int(side_b[lo]), val, c))
                continue
            mid = lo + _halve(hi - lo)
            x1 = side_b[lo:mid]
            v1 = min(_half_diff(f_a, self._f_set(x1), self._f(np.concatenate((side_a, x1)))), val)
            v2 = _rest(val, v1)
            split = splitter(c, _branch_weights(v1, v2))
            if split[1]:
                stack.append((mid, hi, v2, int(split[1])))
            if split[0]:
                stack.append((lo, mid, v1, int(split[0])))
        memo: dict[tuple[int, int], float] = {}
        for t, val, c in leaves:
            dt = float(self.vertex_degree[t])
            stack = [(0, side_a.size, val, c)]
            while stack:
                lo, hi, v, k = stack.pop()
                if hi - lo == 1:
                    s = int(side_a[lo])
                    hits[(min(s, t), max(s, t), v)] += k
                    continue
                mid = lo + _halve(hi - lo)
                y1 = side_a[lo:mid]
                fy = memo.get((lo, mid))
                if fy is None:
                    fy = memo[(lo, mid)] = self._f_set(y1)
                v1 = min(_half_diff(dt, fy, self._f(np.append(y1, t))), v)
                v2 = _rest(v, v1)
                split = splitter(k, _branch_weights(v1, v2))
                if split[1]:
                    stack.append((mid, hi, v2, int(split[1])))
                if split[0]:
                    stack.append((lo, mid, v1, int(split[0])))


def _branch_weights(*ws: float) -> np.ndarray:
    arr = np.array(ws, dtype=float)
    if arr.sum() <= 0.0:
        raise NoEdgeError("every branch has zero weight")
    return arr
