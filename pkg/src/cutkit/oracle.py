"""Cut-query oracle: the only channel from algorithms to the hidden graph."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import InvalidCutError, InvalidInputError
from .graph import WeightedGraph, as_members

DEFAULT_LOG_CAP = 1_000_000

# A weight recovered as a difference of cut values carries rounding error of
# a few ulps of the operands; anything below this relative size is zero.
SNAP = 64 * np.finfo(float).eps


def half_difference(a: float, b: float, c: float) -> float:
    """``(a + b - c) / 2`` with rounding residue snapped to zero.

    This is the weight between two disjoint sets given their cut values
    ``a``, ``b`` and the cut value ``c`` of their union.
    """
    x = 0.5 * (a + b - c)
    return x if x > SNAP * (abs(a) + abs(b)) else 0.0


class CutQueryOracle:
    """Answers cut queries on a hidden graph and counts them.

    Each call to :meth:`query` on a nontrivial set costs one query. The empty
    set and the full vertex set are answered with 0 for free. Repeated
    identical queries are charged every time; callers cache what they reuse.

    The query log records the member tuples of charged queries when
    ``keep_log`` is set, up to ``log_cap`` entries.
    """

    def __init__(self, graph: WeightedGraph, *, keep_log: bool = False,
                 log_cap: int = DEFAULT_LOG_CAP):
        self._graph = graph
        self._adj = graph.adjacency()
        self._count = 0
        self._keep_log = keep_log
        self._log_cap = log_cap
        self._log: list[tuple[int, ...]] = []

    @property
    def n(self) -> int:
        return self._graph.n

    @property
    def count(self) -> int:
        return self._count

    @property
    def log(self) -> list[tuple[int, ...]]:
        return list(self._log)

    def reset(self) -> None:
        self._count = 0
        self._log.clear()

    def query(self, s: Iterable[int]) -> float:
        """Cut value of ``s`` on the hidden graph."""
        members = as_members(s, self.n)
        return self._query_members(members)

    def query_mask(self, mask: np.ndarray) -> float:
        """Like :meth:`query` but takes a boolean membership vector of length n."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.n,):
            raise InvalidCutError(f"mask must have shape ({self.n},), got {mask.shape}")
        return self._query_bool(mask, int(np.count_nonzero(mask)))

    def _query_members(self, members: np.ndarray) -> float:
        inside = np.zeros(self.n, dtype=bool)
        inside[members] = True
        return self._query_bool(inside, members.size)

    def _query_bool(self, inside: np.ndarray, k: int) -> float:
        n = self.n
        if k == 0 or k == n:
            return 0.0
        self._count += 1
        if self._keep_log and len(self._log) < self._log_cap:
            self._log.append(tuple(int(v) for v in np.flatnonzero(inside)))
        if 2 * k > n:
            inside = ~inside
        return float(self._adj[inside][:, ~inside].sum())

    def cross_weight(self, s: Iterable[int], t: Iterable[int]) -> float:
        """Total weight between disjoint nonempty sets; three queries."""
        a = as_members(s, self.n)
        b = as_members(t, self.n)
        if a.size == 0 or b.size == 0:
            raise InvalidCutError("cross_weight needs two nonempty sets")
        if np.intersect1d(a, b).size:
            raise InvalidCutError("cross_weight needs disjoint sets")
        fs = self._query_members(a)
        ft = self._query_members(b)
        fu = self._query_members(np.union1d(a, b))
        return half_difference(fs, ft, fu)

    def pair_weight(self, i: int, j: int) -> float:
        """Weight of pair ``(i, j)`` from three queries."""
        if i == j:
            raise InvalidInputError("pair_weight needs distinct vertices")
        return self.cross_weight([i], [j])
