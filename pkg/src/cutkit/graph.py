"""Weighted undirected graphs, the cut function, the edge-list file format and
a few seeded generators.

Vertices are the integers ``0 .. n-1``. Weights are stored once per unordered
pair with ``u < v``; absent pairs have weight zero and zero weights are never
stored.
"""

from __future__ import annotations

import io
import math
import os
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

from .errors import GraphFormatError, InvalidCutError, InvalidInputError

REL_TOL = 1e-9


class Edge(NamedTuple):
    u: int
    v: int
    weight: float


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


class WeightedGraph:
    """Immutable weighted graph on ``n`` vertices.

    ``weights`` maps unordered pairs to non-negative weights. Pairs may be
    given in either orientation; they are normalized to ``(min, max)``.
    """

    __slots__ = ("_n", "_weights", "_adj")

    def __init__(self, n: int, weights: Mapping[tuple[int, int], float] | None = None):
        if not isinstance(n, (int, np.integer)) or n < 1:
            raise InvalidInputError(f"vertex count must be a positive integer, got {n!r}")
        self._n = int(n)
        norm: dict[tuple[int, int], float] = {}
        for (i, j), w in (weights or {}).items():
            i, j = int(i), int(j)
            if i == j:
                raise InvalidInputError(f"self-loop on vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise InvalidInputError(f"edge ({i}, {j}) out of range for n={n}")
            w = float(w)
            if not math.isfinite(w) or w < 0:
                raise InvalidInputError(f"weight of ({i}, {j}) must be finite and >= 0, got {w}")
            key = _pair(i, j)
            if key in norm:
                raise InvalidInputError(f"duplicate pair {key}")
            if w > 0:
                norm[key] = w
        self._weights = norm
        self._adj = None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]]) -> "WeightedGraph":
        weights: dict[tuple[int, int], float] = {}
        for u, v, w in edges:
            key = _pair(int(u), int(v))
            if key in weights:
                raise InvalidInputError(f"duplicate pair {key}")
            weights[key] = w
        return cls(n, weights)

    @classmethod
    def from_adjacency(cls, adj: np.ndarray) -> "WeightedGraph":
        adj = np.asarray(adj, dtype=float)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidInputError("adjacency matrix must be square")
        if not np.allclose(adj, adj.T, rtol=0, atol=0):
            raise InvalidInputError("adjacency matrix must be symmetric")
        iu, ju = np.nonzero(np.triu(adj, 1))
        return cls(adj.shape[0], {(int(i), int(j)): float(adj[i, j]) for i, j in zip(iu, ju)})

    @property
    def n(self) -> int:
        return self._n

    @property
    def weights(self) -> Mapping[tuple[int, int], float]:
        return self._weights

    def weight(self, i: int, j: int) -> float:
        return self._weights.get(_pair(i, j), 0.0)

    def edges(self) -> Iterator[Edge]:
        """Positive-weight edges in lexicographic pair order."""
        for (u, v) in sorted(self._weights):
            yield Edge(u, v, self._weights[(u, v)])

    @property
    def num_edges(self) -> int:
        return len(self._weights)

    def total_weight(self) -> float:
        return math.fsum(self._weights.values())

    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency matrix (read-only, cached)."""
        if self._adj is None:
            a = np.zeros((self._n, self._n))
            if self._weights:
                ij = np.array(list(self._weights.keys()), dtype=np.intp)
                w = np.fromiter(self._weights.values(), dtype=float, count=len(self._weights))
                a[ij[:, 0], ij[:, 1]] = w
                a[ij[:, 1], ij[:, 0]] = w
            a.setflags(write=False)
            self._adj = a
        return self._adj

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def induced(self, vertices: Iterable[int]) -> "WeightedGraph":
        """Subgraph induced on ``vertices``, relabelled ``0..k-1`` in sorted order."""
        vs = sorted(set(int(v) for v in vertices))
        index = {v: k for k, v in enumerate(vs)}
        sub = {
            (index[u], index[v]): w
            for (u, v), w in self._weights.items()
            if u in index and v in index
        }
        return WeightedGraph(len(vs), sub)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self._n == other._n and self._weights == other._weights

    def __hash__(self) -> int:
        return hash((self._n, frozenset(self._weights.items())))

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self._n}, edges={len(self._weights)})"


def as_members(s: Iterable[int], n: int) -> np.ndarray:
    """Validate a vertex set and return its distinct members as a sorted array."""
    arr = np.unique(np.fromiter((int(v) for v in s), dtype=np.intp)) if not isinstance(
        s, np.ndarray) else np.unique(s.astype(np.intp, copy=False))
    if arr.size and (arr[0] < 0 or arr[-1] >= n):
        bad = arr[0] if arr[0] < 0 else arr[-1]
        raise InvalidCutError(f"vertex {int(bad)} outside [0, {n})")
    return arr


def cut_value(g: WeightedGraph, s: Iterable[int]) -> float:
    """Total weight of pairs with exactly one endpoint in ``s``."""
    members = as_members(s, g.n)
    if members.size == 0 or members.size == g.n:
        return 0.0
    mask = np.zeros(g.n, dtype=bool)
    mask[members] = True
    if 2 * members.size > g.n:
        mask = ~mask
    return float(g.adjacency()[mask][:, ~mask].sum())


def complement(s: Iterable[int], n: int) -> frozenset[int]:
    return frozenset(range(n)) - frozenset(int(v) for v in s)


# --------------------------------------------------------------------------
# edge-list text format: "n m" then m lines "u v w"


def parse_graph(text: str) -> WeightedGraph:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphFormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError(f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError(f"bad header {lines[0]!r}") from exc
    if n < 1 or m < 0:
        raise GraphFormatError(f"bad header {lines[0]!r}")
    if len(lines) - 1 != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(lines) - 1}")
    weights: dict[tuple[int, int], float] = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise GraphFormatError(f"line {lineno}: expected 'u v w', got {ln!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: cannot parse {ln!r}") from exc
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"line {lineno}: invalid pair ({u}, {v})")
        if not math.isfinite(w) or w < 0:
            raise GraphFormatError(f"line {lineno}: weight must be a finite decimal >= 0")
        key = _pair(u, v)
        if key in weights:
            raise GraphFormatError(f"line {lineno}: duplicate pair {key}")
        weights[key] = w
    return WeightedGraph(n, weights)


def format_graph(g: WeightedGraph) -> str:
    buf = io.StringIO()
    buf.write(f"{g.n} {g.num_edges}\n")
    for u, v, w in g.edges():
        buf.write(f"{u} {v} {w!r}\n")
    return buf.getvalue()


def read_graph(path: str | os.PathLike) -> WeightedGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(g: WeightedGraph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(g))


# --------------------------------------------------------------------------
# generators


def complete_graph(n: int, weight: float = 1.0) -> WeightedGraph:
    return WeightedGraph(n, {(i, j): weight for i in range(n) for j in range(i + 1, n)})


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> WeightedGraph:
    """Unit-weight G(n, p)."""
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"edge probability must lie in [0, 1], got {p}")
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    return WeightedGraph(n, {(int(i), int(j)): 1.0 for i, j in zip(iu[keep], ju[keep])})


def weighted_random(n: int, p: float, wmin: float, wmax: float,
                    rng: np.random.Generator) -> WeightedGraph:
    """G(n, p) with independent uniform weights in ``[wmin, wmax]``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"edge probability must lie in [0, 1], got {p}")
    if not 0.0 <= wmin <= wmax:
        raise InvalidInputError(f"need 0 <= wmin <= wmax, got {wmin}, {wmax}")
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    w = rng.uniform(wmin, wmax, size=iu.size)
    return WeightedGraph(n, {(int(i), int(j)): float(x)
                             for i, j, x, k in zip(iu, ju, w, keep) if k})
