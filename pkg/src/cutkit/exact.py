"""Offline exact routines over a fully known graph.

Everything here reads the adjacency matrix directly. These functions serve as
ground truth in tests and as the query-free subroutines that the sparsifier
runs on the graphs it builds from samples. None of them touch an oracle.
"""

from __future__ import annotations

import os
from typing import Iterable

import numpy as np

from .errors import InvalidForestError, InvalidInputError, SizeLimitError
from .graph import Edge, WeightedGraph

DEFAULT_MAX_BRUTE = 24
DEFAULT_MAX_STRENGTH = 12
ENUMERATION_MIN_CUT_LIMIT = 10


def max_brute_limit() -> int:
    """Brute-force enumeration limit, overridable by ``CUTKIT_MAX_BRUTE``."""
    raw = os.environ.get("CUTKIT_MAX_BRUTE")
    if raw is None:
        return DEFAULT_MAX_BRUTE
    try:
        value = int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"CUTKIT_MAX_BRUTE must be an integer, got {raw!r}") from exc
    if value < 1:
        raise InvalidInputError(f"CUTKIT_MAX_BRUTE must be positive, got {value}")
    return value


# --------------------------------------------------------------------------
# cut enumeration


def cut_values_from_adjacency(adj: np.ndarray) -> np.ndarray:
    """Values of every cut that puts vertex 0 on the member side.

    Entry ``mask`` of the result is the value of ``{0} | {v : bit v-1 of mask}``,
    so the array has ``2**(k-1)`` entries for a ``k``-vertex matrix. The array
    is built by doubling: adding vertex ``v`` to every existing set changes the
    cut by ``deg(v) - 2 w(v, S)``.
    """
    k = adj.shape[0]
    deg = adj.sum(axis=1)
    vals = np.array([deg[0]], dtype=float)
    for v in range(1, k):
        row = adj[v]
        attach = np.array([row[0]], dtype=float)
        for u in range(1, v):
            attach = np.concatenate((attach, attach + row[u]))
        vals = np.concatenate((vals, vals + (deg[v] - 2.0 * attach)))
    return vals


def all_cut_values(g: WeightedGraph) -> np.ndarray:
    """``cut_values_from_adjacency`` on ``g``, guarded by the brute-force limit."""
    limit = max_brute_limit()
    if g.n > limit:
        raise SizeLimitError(f"n={g.n} exceeds the brute-force limit {limit}")
    return cut_values_from_adjacency(g.adjacency())


def mask_members(mask: int, n: int) -> frozenset[int]:
    """Member set encoded by ``mask`` under the vertex-0-fixed convention."""
    return frozenset([0] + [v for v in range(1, n) if (mask >> (v - 1)) & 1])


def members_mask(members: Iterable[int], n: int) -> int:
    """Inverse of ``mask_members``; a set without vertex 0 is complemented first."""
    s = set(members)
    if 0 not in s:
        s = set(range(n)) - s
    return sum(1 << (v - 1) for v in s if v != 0)


def _lex_smallest(masks: np.ndarray) -> int:
    """Mask whose sorted member tuple is lexicographically smallest.

    All sets contain vertex 0, so the comparison starts at bit 0 (vertex 1).
    A proper prefix is smaller than its extensions.
    """
    cands = masks.astype(np.int64)
    rem = cands.copy()
    while True:
        done = rem == 0
        if done.any():
            return int(cands[np.argmax(done)])
        low = rem & -rem
        m = low.min()
        keep = low == m
        cands = cands[keep]
        rem = rem[keep] ^ m


def tie_tolerance(values: np.ndarray) -> float:
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    return 1e-9 * scale


def brute_force_max_cut(g: WeightedGraph) -> tuple[frozenset[int], float]:
    """Maximum cut by enumerating every set containing vertex 0.

    Cuts whose value is within relative ``1e-9`` of the best count as ties;
    among them the lexicographically smallest member set wins.
    """
    if g.n == 1:
        return frozenset([0]), 0.0
    vals = all_cut_values(g)
    best = float(vals.max())
    ties = np.flatnonzero(vals >= best - tie_tolerance(vals))
    mask = _lex_smallest(ties)
    return mask_members(mask, g.n), float(vals[mask])


def enumerate_min_cut(adj: np.ndarray) -> float:
    """Global min cut of a small dense matrix by enumeration (nontrivial cuts)."""
    k = adj.shape[0]
    if k < 2:
        raise InvalidInputError("min cut needs at least two vertices")
    vals = cut_values_from_adjacency(adj)
    # mask == all ones is the full vertex set, which is not a cut
    return float(vals[:-1].min())


# --------------------------------------------------------------------------
# Stoer-Wagner


def stoer_wagner(adj: np.ndarray) -> tuple[float, np.ndarray]:
    """Global min cut of a dense symmetric weight matrix.

    Returns the value and a boolean mask of one side. Runs ``k-1`` maximum
    adjacency phases, each merging the last two vertices of the ordering.
    """
    a = np.array(adj, dtype=float)
    k = a.shape[0]
    if k < 2:
        raise InvalidInputError("min cut needs at least two vertices")
    np.fill_diagonal(a, 0.0)
    groups = [[v] for v in range(k)]
    alive = np.ones(k, dtype=bool)
    best_val = np.inf
    best_side: list[int] = []
    for _ in range(k - 1):
        idx = np.flatnonzero(alive)
        keys = a[idx[0]].copy()
        visited = ~alive
        visited[idx[0]] = True
        prev, last = idx[0], idx[0]
        for _step in range(idx.size - 1):
            masked = np.where(visited, -np.inf, keys)
            nxt = int(np.argmax(masked))
            prev, last = last, nxt
            visited[nxt] = True
            keys += a[nxt]
        # every other vertex precedes ``last``, so its cut of the phase is its degree
        phase_val = float(a[last][alive].sum())
        if phase_val < best_val:
            best_val = phase_val
            best_side = list(groups[last])
        # merge last into prev
        a[prev] += a[last]
        a[:, prev] += a[:, last]
        a[prev, prev] = 0.0
        a[last, :] = 0.0
        a[:, last] = 0.0
        alive[last] = False
        groups[prev].extend(groups[last])
        groups[last] = []
    side = np.zeros(k, dtype=bool)
    side[best_side] = True
    return max(best_val, 0.0), side


def min_cut_value(adj: np.ndarray) -> float:
    """Global min cut: enumeration for tiny matrices, Stoer-Wagner otherwise."""
    if adj.shape[0] <= ENUMERATION_MIN_CUT_LIMIT:
        return enumerate_min_cut(adj)
    return stoer_wagner(adj)[0]


def brute_force_min_cut(g: WeightedGraph) -> float:
    """Global min cut value of ``g`` by Stoer-Wagner; 0 when disconnected."""
    if g.n < 2:
        raise InvalidInputError("min cut needs at least two vertices")
    return stoer_wagner(g.adjacency())[0]


# --------------------------------------------------------------------------
# strongly connected pieces at a threshold


def _find_light_cut(adj: np.ndarray, tau: float) -> np.ndarray | None:
    """A vertex mask whose cut in ``adj`` is at most ``tau``, or None.

    Maximum adjacency orderings are run on a progressively contracted copy.
    Every prefix of an ordering is a real cut and its value is the sum of the
    keys still outside, so light prefixes are caught directly. If none is
    light, each consecutive pair whose attachment key exceeds ``tau`` has
    local connectivity above ``tau`` and can be merged safely; at least the
    final pair always qualifies, so every phase shrinks the graph.
    """
    k0 = adj.shape[0]
    groups = [np.array([v]) for v in range(k0)]
    a = adj
    while True:
        k = a.shape[0]
        if k < 2:
            return None
        order = np.empty(k, dtype=np.intp)
        attach = np.empty(k)
        keys = a[0].copy()
        visited = np.zeros(k, dtype=bool)
        visited[0] = True
        order[0] = 0
        attach[0] = np.inf
        outside = keys.sum()
        for i in range(1, k):
            if outside <= tau:
                mask = np.zeros(k0, dtype=bool)
                mask[np.concatenate([groups[j] for j in order[:i]])] = True
                return mask
            masked = np.where(visited, -np.inf, keys)
            nxt = int(np.argmax(masked))
            order[i] = nxt
            attach[i] = keys[nxt]
            visited[nxt] = True
            keys += a[nxt]
            outside = keys[~visited].sum()
        # merge consecutive heavy pairs
        label = np.empty(k, dtype=np.intp)
        cur = -1
        for i in range(k):
            if attach[i] <= tau or i == 0:
                cur += 1
            label[order[i]] = cur
        count = cur + 1
        p = np.zeros((k, count))
        p[np.arange(k), label] = 1.0
        merged = p.T @ a @ p
        np.fill_diagonal(merged, 0.0)
        new_groups: list[list[np.ndarray]] = [[] for _ in range(count)]
        for v in range(k):
            new_groups[label[v]].append(groups[v])
        groups = [np.concatenate(gs) for gs in new_groups]
        a = merged


def strong_partition(adj: np.ndarray, tau: float) -> list[np.ndarray]:
    """Split vertices into the maximal pieces whose induced min cut exceeds ``tau``.

    Repeatedly cutting any component along a cut of value at most ``tau``
    ends in the same partition regardless of which cuts are chosen: a set
    whose induced min cut exceeds ``tau`` can never be separated by such a
    cut, and every final piece has no such cut. Vertices whose degree is at
    most ``tau`` are peeled off first since each is a light cut on its own.
    Pieces are returned as sorted index arrays, ordered by smallest member.
    """
    k = adj.shape[0]
    a = np.asarray(adj, dtype=float)
    out: list[np.ndarray] = []
    stack = [np.arange(k)]
    while stack:
        part = stack.pop()
        sub = a[np.ix_(part, part)]
        keep = np.ones(part.size, dtype=bool)
        while True:
            deg = sub[keep][:, keep].sum(axis=1)
            light = deg <= tau
            if not light.any():
                break
            idx = np.flatnonzero(keep)[light]
            keep[idx] = False
            if not keep.any():
                break
        for v in part[~keep]:
            out.append(np.array([v]))
        part = part[keep]
        if part.size == 0:
            continue
        if part.size == 1:
            out.append(part)
            continue
        side = _find_light_cut(a[np.ix_(part, part)], tau)
        if side is None:
            out.append(part)
        else:
            stack.append(part[side])
            stack.append(part[~side])
    out.sort(key=lambda arr: int(arr.min()))
    return [np.sort(arr) for arr in out]


# --------------------------------------------------------------------------
# edge strength


def _strength_limit_check(n: int) -> None:
    if n > DEFAULT_MAX_STRENGTH:
        raise SizeLimitError(f"n={n} exceeds the strength enumeration limit {DEFAULT_MAX_STRENGTH}")


def brute_force_all_strengths(g: WeightedGraph) -> np.ndarray:
    """Matrix of pair strengths by enumerating every induced subgraph.

    Entry ``(i, j)`` is the largest min cut over vertex sets containing both.
    """
    _strength_limit_check(g.n)
    n = g.n
    adj = g.adjacency()
    k = np.zeros((n, n))
    for mask in range(1, 1 << n):
        if mask & (mask - 1) == 0:
            continue
        members = np.array([v for v in range(n) if (mask >> v) & 1])
        value = enumerate_min_cut(adj[np.ix_(members, members)])
        block = np.ix_(members, members)
        k[block] = np.maximum(k[block], value)
    np.fill_diagonal(k, 0.0)
    return k


def brute_force_edge_strength(g: WeightedGraph, e: Edge | tuple[int, int]) -> float:
    """Strength of the pair ``(e.u, e.v)`` by brute force."""
    _strength_limit_check(g.n)
    u, v = int(e[0]), int(e[1])
    if u == v:
        raise InvalidInputError("edge endpoints must differ")
    n = g.n
    adj = g.adjacency()
    others = [x for x in range(n) if x != u and x != v]
    best = 0.0
    for mask in range(1 << len(others)):
        members = [u, v] + [others[b] for b in range(len(others)) if (mask >> b) & 1]
        best = max(best, enumerate_min_cut(adj[np.ix_(members, members)]))
    return best


def edge_strengths(g: WeightedGraph) -> np.ndarray:
    """Pair strengths by recursive min-cut splitting (no size limit).

    Pairs separated by a min cut of a connected piece have strength equal to
    that min cut; pairs on the same side get the larger of it and their
    strength inside that side.
    """
    n = g.n
    adj = g.adjacency()
    k = np.zeros((n, n))
    stack: list[tuple[np.ndarray, float]] = [(np.arange(n), 0.0)]
    while stack:
        part, floor = stack.pop()
        if part.size < 2:
            continue
        sub = adj[np.ix_(part, part)]
        value, side = stoer_wagner(sub)
        level = max(value, floor)
        a_idx, b_idx = part[side], part[~side]
        k[np.ix_(a_idx, b_idx)] = level
        k[np.ix_(b_idx, a_idx)] = level
        stack.append((a_idx, level))
        stack.append((b_idx, level))
    np.fill_diagonal(k, 0.0)
    return k


# --------------------------------------------------------------------------
# spanning forests


class _DSU:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if ra > rb:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def exact_max_spanning_forest(g: WeightedGraph) -> set[Edge]:
    """Kruskal on positive-weight edges, heaviest first, ties by pair order."""
    dsu = _DSU(g.n)
    forest: set[Edge] = set()
    for e in sorted(g.edges(), key=lambda e: (-e.weight, e.u, e.v)):
        if dsu.union(e.u, e.v):
            forest.add(e)
    return forest


def _forest_vertices(forest: Iterable[Edge], n: int | None) -> int:
    top = -1
    for e in forest:
        top = max(top, e[0], e[1])
    return max(top + 1, n or 0)


def _check_acyclic(forest: list[Edge], n: int) -> None:
    dsu = _DSU(n)
    for e in forest:
        if e[0] == e[1] or not dsu.union(int(e[0]), int(e[1])):
            raise InvalidForestError(f"edge ({e[0]}, {e[1]}) closes a cycle")


def path_min_weight(forest: Iterable[Edge], i: int, j: int) -> float:
    """Smallest weight on the forest path between ``i`` and ``j``; 0 if none."""
    edges = list(forest)
    n = _forest_vertices(edges, max(i, j) + 1)
    _check_acyclic(edges, n)
    if i == j:
        raise InvalidInputError("path endpoints must differ")
    nbrs: dict[int, list[tuple[int, float]]] = {}
    for u, v, w in edges:
        nbrs.setdefault(int(u), []).append((int(v), float(w)))
        nbrs.setdefault(int(v), []).append((int(u), float(w)))
    best = {i: np.inf}
    stack = [i]
    while stack:
        x = stack.pop()
        if x == j:
            return float(best[x])
        for y, w in nbrs.get(x, ()):
            if y not in best:
                best[y] = min(best[x], w)
                stack.append(y)
    return 0.0


def all_pairs_path_min(forest: Iterable[Edge], n: int) -> np.ndarray:
    """Matrix of ``path_min_weight`` for every pair, in one Kruskal sweep.

    Forest edges are joined heaviest first; the edge that first connects two
    vertices is the lightest edge on their path.
    """
    edges = list(forest)
    _check_acyclic(edges, n)
    out = np.zeros((n, n))
    members = {v: [v] for v in range(n)}
    dsu = _DSU(n)
    for u, v, w in sorted(edges, key=lambda e: (-e[2], e[0], e[1])):
        ru, rv = dsu.find(int(u)), dsu.find(int(v))
        a, b = members.pop(ru), members.pop(rv)
        out[np.ix_(a, b)] = w
        out[np.ix_(b, a)] = w
        dsu.union(ru, rv)
        members[dsu.find(ru)] = a + b
    return out
