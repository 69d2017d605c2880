"""Max-cut dimension and max-tree dimension of small graphs, with exact rank.

Both dimensions are ranks of 0/1 matrices whose columns are the
positive-weight pairs of the graph: one row per maximum cut (the pairs it
separates) or one row per maximum spanning tree (the pairs it uses).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SizeLimitError
from .exact import all_cut_values, tie_tolerance
from .graph import WeightedGraph

MAX_CUT_DIM_N = 16
MAX_TREE_DIM_N = 7


@dataclass
class IndicatorMatrix:
    rows: np.ndarray
    edge_index: dict[tuple[int, int], int]

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.edge_index, key=self.edge_index.get)


def edge_index(g: WeightedGraph) -> dict[tuple[int, int], int]:
    """Column of every positive-weight pair, in lexicographic pair order."""
    return {(e.u, e.v): k for k, e in enumerate(g.edges())}


def bareiss_rank(matrix) -> int:
    """Rank of an integer matrix by fraction-free elimination.

    Works on Python integers throughout, so there is no rounding. Every
    division in the update is exact by Sylvester's identity.
    """
    rows = [[int(x) for x in row] for row in np.asarray(matrix, dtype=object).tolist()]
    if not rows or not rows[0]:
        return 0
    m, n = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for col in range(n):
        pivot = next((r for r in range(rank, m) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        for r in range(rank + 1, m):
            a = rows[r][col]
            row_r = rows[r]
            row_p = rows[rank]
            for c in range(col + 1, n):
                row_r[c] = (p * row_r[c] - a * row_p[c]) // prev
            row_r[col] = 0
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def exact_rank(rows: np.ndarray) -> int:
    """Exact rank of a 0/1 matrix.

    Tall matrices are reduced to their Gram matrix first; ``M^T M`` has the
    same rank as ``M`` over the rationals and is much smaller here.
    """
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        return 0
    if rows.shape[0] > rows.shape[1]:
        rows = rows.T @ rows
    return bareiss_rank(rows)


# --------------------------------------------------------------------------
# max cuts


def max_cut_indicators(g: WeightedGraph) -> IndicatorMatrix:
    """Separated-pair indicators of every maximum cut (vertex 0 fixed on one side)."""
    if g.n > MAX_CUT_DIM_N:
        raise SizeLimitError(f"n={g.n} exceeds the cut enumeration limit {MAX_CUT_DIM_N}")
    index = edge_index(g)
    if g.n < 2:
        return IndicatorMatrix(np.zeros((0, len(index)), dtype=np.int8), index)
    vals = all_cut_values(g)[:-1]  # the last mask is the full set
    best = vals.max()
    masks = np.flatnonzero(vals >= best - tie_tolerance(vals))
    # side[v] for each max cut: vertex 0 is always in, vertex v uses bit v-1
    bits = ((masks[:, None] >> np.arange(g.n - 1)[None, :]) & 1).astype(bool)
    side = np.concatenate([np.ones((masks.size, 1), dtype=bool), bits], axis=1)
    pairs = np.array(list(index), dtype=np.intp).reshape(-1, 2)
    rows = (side[:, pairs[:, 0]] != side[:, pairs[:, 1]]).astype(np.int8)
    return IndicatorMatrix(rows, index)


def max_cut_dimension(g: WeightedGraph) -> int:
    """Rank of the indicator vectors of all maximum cuts."""
    return exact_rank(max_cut_indicators(g).rows)


def max_cut_space_membership(g: WeightedGraph, z, tol: float = 1e-8) -> bool:
    """Whether ``z`` (one entry per positive-weight pair) is in the max-cut span.

    Solved by least squares; ``z`` is a member when the residual norm is
    below ``tol`` times ``max(1, |z|)``.
    """
    mat = max_cut_indicators(g)
    z = np.asarray(z, dtype=float)
    if z.shape != (len(mat.edge_index),):
        raise InvalidInputError(f"z must have {len(mat.edge_index)} entries, got shape {z.shape}")
    if not np.any(z):
        return True
    if mat.rows.shape[0] == 0:
        return False
    basis = mat.rows.T.astype(float)
    coef, *_ = np.linalg.lstsq(basis, z, rcond=None)
    resid = np.linalg.norm(basis @ coef - z)
    return bool(resid < tol * max(1.0, float(np.linalg.norm(z))))


# --------------------------------------------------------------------------
# spanning trees


def spanning_trees(g: WeightedGraph) -> list[tuple[int, ...]]:
    """Every spanning tree as a sorted tuple of edge indices into ``g.edges()``.

    Deletion/contraction with an explicit stack: the first live edge is
    either kept (its endpoints are merged) or dropped, and dropping is
    skipped when the edge is a bridge of what remains.
    """
    n = g.n
    if n > MAX_TREE_DIM_N:
        raise SizeLimitError(f"n={n} exceeds the tree enumeration limit {MAX_TREE_DIM_N}")
    edges = [(e.u, e.v) for e in g.edges()]
    if n == 1:
        return [()]
    if not _connected(n, edges, list(range(len(edges))), list(range(n))):
        raise InvalidInputError("graph is disconnected")
    out: list[tuple[int, ...]] = []
    # state: (label per vertex, live edge indices, chosen edge indices)
    stack = [(list(range(n)), list(range(len(edges))), ())]
    while stack:
        label, live, chosen = stack.pop()
        if len(chosen) == n - 1:
            out.append(tuple(sorted(chosen)))
            continue
        live = [k for k in live if label[edges[k][0]] != label[edges[k][1]]]
        if not live:
            continue
        k, rest = live[0], live[1:]
        if _connected(n, edges, rest, label):
            stack.append((label, rest, chosen))
        a, b = label[edges[k][0]], label[edges[k][1]]
        merged = [a if x == b else x for x in label]
        stack.append((merged, rest, chosen + (k,)))
    out.sort()
    return out


def _connected(n: int, edges, live, label) -> bool:
    groups = sorted(set(label))
    if len(groups) <= 1:
        return True
    parent = {x: x for x in groups}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    parts = len(groups)
    for k in live:
        a, b = find(label[edges[k][0]]), find(label[edges[k][1]])
        if a != b:
            parent[a] = b
            parts -= 1
            if parts == 1:
                return True
    return parts == 1


def max_tree_indicators(g: WeightedGraph) -> IndicatorMatrix:
    """Edge indicators of every maximum-weight spanning tree."""
    index = edge_index(g)
    trees = spanning_trees(g)
    weights = np.array([e.weight for e in g.edges()])
    totals = np.array([weights[list(t)].sum() if t else 0.0 for t in trees])
    best = totals.max()
    keep = [t for t, w in zip(trees, totals) if w >= best - tie_tolerance(totals)]
    rows = np.zeros((len(keep), len(index)), dtype=np.int8)
    for r, t in enumerate(keep):
        rows[r, list(t)] = 1
    return IndicatorMatrix(rows, index)


def max_tree_dimension(g: WeightedGraph) -> int:
    """Rank of the edge indicators of all maximum spanning trees."""
    return exact_rank(max_tree_indicators(g).rows)
