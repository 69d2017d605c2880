"""Max-cut algorithms that see the graph only through cut queries.

Every routine returns a :class:`MaxCutResult` whose ``queries`` field is the
exact number of oracle calls charged during the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConstructionError, InvalidInputError, SizeLimitError
from .exact import brute_force_max_cut, max_brute_limit
from .graph import WeightedGraph
from .oracle import CutQueryOracle, half_difference
from .sparsifier import (Sparsifier, SubsampleConfig, fast_weighted_subsample,
                         naive_weighted_subsample)

DEFAULT_RETRY_CAP = 64


@dataclass
class MaxCutResult:
    cut: frozenset[int]
    value: float
    queries: int
    method: str
    seed: int | None = None
    details: dict = field(default_factory=dict)
    learned: WeightedGraph | None = field(default=None, repr=False, compare=False)

    def to_record(self) -> dict:
        rec = {"method": self.method, "seed": self.seed, "queries": self.queries,
               "value": self.value, "cut": sorted(self.cut)}
        rec.update(self.details)
        return rec


@dataclass
class PseudorandomCutFamily:
    """``q`` cuts, stored as a ``(q, n)`` boolean membership matrix."""

    cuts: np.ndarray
    c: float
    n: int

    @property
    def q(self) -> int:
        return int(self.cuts.shape[0])

    def separation_counts(self) -> np.ndarray:
        """``(n, n)`` matrix: how many cuts put ``i`` and ``j`` on opposite sides."""
        x = self.cuts.astype(np.int64)
        ones = x.sum(axis=0)
        both = x.T @ x
        return ones[:, None] + ones[None, :] - 2 * both

    def required(self) -> int:
        return math.ceil(self.c * self.q - 1e-12)

    def is_valid(self) -> bool:
        """Whether every pair is separated by at least ``ceil(c q)`` cuts."""
        if self.cuts.ndim != 2 or self.cuts.shape[1] != self.n:
            return False
        if self.n < 2:
            return True
        sep = self.separation_counts()
        iu = np.triu_indices(self.n, 1)
        return bool(sep[iu].min() >= self.required())


# --------------------------------------------------------------------------
# exact learning


def learn_graph(o: CutQueryOracle) -> WeightedGraph:
    """Recover every weight from singleton and pair queries."""
    n = o.n
    single = np.array([o.query([v]) for v in range(n)])
    weights = {}
    for i in range(n):
        for j in range(i + 1, n):
            w = half_difference(single[i], single[j], o.query([i, j]))
            if w > 0:
                weights[(i, j)] = w
    return WeightedGraph(n, weights)


def learn_graph_exact(o: CutQueryOracle) -> MaxCutResult:
    """Learn the whole graph with ``n + n(n-1)/2`` queries and brute-force its max cut.

    At ``n = 2`` the only pair is the full vertex set, whose query is free,
    so the count there is 2.
    """
    limit = max_brute_limit()
    if o.n > limit:
        raise SizeLimitError(f"n={o.n} exceeds the brute-force limit {limit}")
    start = o.count
    g = learn_graph(o)
    cut, value = brute_force_max_cut(g)
    return MaxCutResult(cut, value, o.count - start, "learn-exact", learned=g)


# --------------------------------------------------------------------------
# random cuts


def uniform_random_cut(n: int, rng: np.random.Generator) -> np.ndarray:
    """Membership mask of a uniformly random subset (trivial sets included)."""
    return rng.random(n) < 0.5


def random_nontrivial_cut(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform over subsets other than the empty and the full set (``n >= 2``)."""
    while True:
        mask = uniform_random_cut(n, rng)
        k = int(mask.sum())
        if 0 < k < n:
            return mask


def repetitions(c: float, p: float) -> int:
    """``ceil(ln(1/p) / ln(2 - 2c))``."""
    if not 0.0 < c < 0.5:
        raise InvalidInputError(f"c must lie in (0, 1/2), got {c}")
    if not 0.0 < p < 1.0:
        raise InvalidInputError(f"p must lie in (0, 1), got {p}")
    return math.ceil(math.log(1.0 / p) / math.log(2.0 - 2.0 * c))


def random_cut_maxcut(o: CutQueryOracle, c: float, p: float, rng: np.random.Generator,
                      seed: int | None = None) -> MaxCutResult:
    """Best of ``repetitions(c, p)`` random cuts.

    Cuts are drawn uniformly among nontrivial sets so that each one is a
    charged query. On a single vertex every set is trivial and nothing is
    charged.
    """
    q = repetitions(c, p)
    start = o.count
    n = o.n
    best_mask, best_val = None, -1.0
    for _ in range(q):
        mask = random_nontrivial_cut(n, rng) if n >= 2 else uniform_random_cut(n, rng)
        val = o.query_mask(mask)
        if val > best_val:
            best_mask, best_val = mask, val
    cut = frozenset(int(v) for v in np.flatnonzero(best_mask)) if best_mask is not None else frozenset()
    return MaxCutResult(cut, max(best_val, 0.0), o.count - start, "random", seed,
                        {"c": c, "p": p, "q": q})


# --------------------------------------------------------------------------
# pseudorandom families


def family_size(n: int, c: float) -> int:
    """``ceil(4 / (1 - 2c)^2 * ln n)``."""
    if not 0.0 < c < 0.5:
        raise InvalidInputError(f"c must lie in (0, 1/2), got {c}")
    if n < 1:
        raise InvalidInputError("n must be positive")
    return math.ceil(4.0 / (1.0 - 2.0 * c) ** 2 * math.log(n))


def build_pseudorandom_family(n: int, c: float, rng: np.random.Generator,
                              retry_cap: int = DEFAULT_RETRY_CAP) -> PseudorandomCutFamily:
    """Random nontrivial cuts, resampled until every pair is separated often enough.

    The check is offline and costs no queries. Each attempt fails with
    probability below 1/2, so ``retry_cap`` failures in a row raise
    :class:`ConstructionError`.
    """
    q = family_size(n, c)
    for _ in range(retry_cap):
        if n >= 2:
            cuts = np.array([random_nontrivial_cut(n, rng) for _ in range(q)], dtype=bool)
        else:
            cuts = np.zeros((q, n), dtype=bool)
        fam = PseudorandomCutFamily(cuts.reshape(q, n), c, n)
        if fam.is_valid():
            return fam
    raise ConstructionError(f"no valid family for n={n}, c={c} after {retry_cap} attempts")


def deterministic_logn_maxcut(o: CutQueryOracle, c: float,
                              family: PseudorandomCutFamily) -> MaxCutResult:
    """Query every family cut once and keep the best (first on ties)."""
    if family.n != o.n or family.c != c or not family.is_valid():
        raise InvalidInputError("cut family is not valid for this oracle and c")
    start = o.count
    best_idx, best_val = -1, -1.0
    for k in range(family.q):
        val = o.query_mask(family.cuts[k])
        if val > best_val:
            best_idx, best_val = k, val
    if best_idx < 0:
        cut, best_val = frozenset([0]), 0.0
    else:
        cut = frozenset(int(v) for v in np.flatnonzero(family.cuts[best_idx]))
    return MaxCutResult(cut, best_val, o.count - start, "deterministic-logn",
                        details={"c": c, "q": family.q})


# --------------------------------------------------------------------------
# greedy


def greedy_half_maxcut(o: CutQueryOracle) -> MaxCutResult:
    """Place each vertex opposite the side it is more attached to.

    Vertex 0 starts side S for free. Vertex ``i`` costs ``F({i})`` plus one
    query per nonempty side; attraction to an empty side is 0. Ties go to S.
    The cut values of both sides are cached, so each vertex costs at most 3
    queries against a ceiling of 5.
    """
    n = o.n
    start = o.count
    in_s = np.zeros(n, dtype=bool)
    in_t = np.zeros(n, dtype=bool)
    in_s[0] = True
    f_s, f_t = o.query_mask(in_s), 0.0
    for i in range(1, n):
        single = np.zeros(n, dtype=bool)
        single[i] = True
        f_i = o.query_mask(single)
        in_s[i] = True
        f_si = o.query_mask(in_s)
        in_s[i] = False
        att_s = 0.5 * (f_s + f_i - f_si)
        if in_t.any():
            in_t[i] = True
            f_ti = o.query_mask(in_t)
            in_t[i] = False
            att_t = 0.5 * (f_t + f_i - f_ti)
        else:
            f_ti, att_t = f_i, 0.0
        if att_s > att_t:
            in_t[i] = True
            f_t = f_ti
        else:
            in_s[i] = True
            f_s = f_si
    queries = o.count - start
    cut = frozenset(int(v) for v in np.flatnonzero(in_s))
    return MaxCutResult(cut, f_s, queries, "greedy",
                        details={"query_ceiling": 5 * n})


# --------------------------------------------------------------------------
# sparsifier based


SparsifierBuilder = Callable[[CutQueryOracle, SubsampleConfig, np.random.Generator], Sparsifier]


def _build_full(o: CutQueryOracle, cfg: SubsampleConfig, rng: np.random.Generator) -> Sparsifier:
    return fast_weighted_subsample(o, cfg, rng)


def _build_early_stop(o: CutQueryOracle, cfg: SubsampleConfig,
                      rng: np.random.Generator) -> Sparsifier:
    return naive_weighted_subsample(o, float(o.n) ** 3, cfg, rng)


VARIANTS: dict[str, SparsifierBuilder] = {"full": _build_full, "early_stop": _build_early_stop}


def sparsifier_maxcut(o: CutQueryOracle, epsilon: float, cfg: SubsampleConfig | None = None,
                      rng: np.random.Generator | None = None, variant: str = "full",
                      builder: SparsifierBuilder | None = None,
                      seed: int | None = None) -> MaxCutResult:
    """Max cut of a sparsifier found offline, then measured with one query.

    ``variant`` picks the full pipeline or the early-stopped one. A custom
    ``builder`` replaces both, which is how tests plug in an exact graph.
    """
    limit = max_brute_limit()
    if o.n > limit:
        raise SizeLimitError(f"n={o.n} exceeds the brute-force limit {limit}")
    if builder is None:
        if variant not in VARIANTS:
            raise InvalidInputError(f"unknown variant {variant!r}")
        builder = VARIANTS[variant]
    base = cfg or SubsampleConfig()
    cfg = SubsampleConfig(**{**base.to_dict(), "epsilon": epsilon})
    rng = rng if rng is not None else np.random.default_rng(seed)
    start = o.count
    sp = builder(o, cfg, rng)
    cut, estimate = brute_force_max_cut(sp.graph)
    value = o.query(cut)
    return MaxCutResult(cut, value, o.count - start, f"sparsifier-{variant}", seed,
                        {"epsilon": epsilon, "sparsifier_value": estimate,
                         "sparsifier_queries": sp.query_cost,
                         "sparsifier_edges": sp.graph.num_edges,
                         "rounds": sp.diagnostics.get("rounds", 0),
                         "kappa_schedule": sp.diagnostics.get("kappa_schedule", [])})
