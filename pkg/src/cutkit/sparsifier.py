"""Strength estimation and cut sparsification through a cut-query oracle.

The pipeline has two stages. The first assigns every edge a strength
estimate by repeatedly subsampling at a scale ``kappa``, keeping the pieces
that stay well connected, and contracting them (:func:`estimate_and_contract`).
The resulting ledger of ``(vertex set, estimate)`` entries drives the second
stage (:func:`construct_sparsifier`), which samples each set's edges in
proportion to weight over estimate and reweights the survivors.

:func:`naive_weighted_subsample` slides ``kappa`` down from the total weight
one halving at a time, so its round count grows with the weight range.
:func:`fast_weighted_subsample` first builds an approximate maximum spanning
forest (:func:`approximate_kruskal`) whose path minima bound every strength
within a polynomial factor, and only visits scales near those bounds.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .contraction import ContractionState
from .errors import (AlignmentError, IncompleteLedgerError, InvalidInputError, LedgerError,
                     NoEdgeError)
from .exact import (DEFAULT_MAX_STRENGTH, all_pairs_path_min, brute_force_all_strengths,
                    edge_strengths, strong_partition)
from .graph import Edge, WeightedGraph, format_graph
from .oracle import CutQueryOracle


@dataclass(frozen=True)
class SubsampleConfig:
    """Constants for the subsampling pipeline.

    ``c0`` scales the estimation samples and ``c1`` the sparsifier samples.
    Pieces of the sampled graph are cut apart while they have a cut of at
    most ``delta * kappa``. ``d`` is the failure exponent used by the
    theory-scaled constants. ``share_sample_queries`` lets each batch of
    draws reuse the cut values it has already queried.
    """

    c0: float = 2.0
    c1: float = 2.0
    delta: float = 0.9
    d: float = 6.0
    epsilon: float = 0.25
    max_rounds: int = 4096
    share_sample_queries: bool = True

    def __post_init__(self):
        if not 0.5 < self.delta < 1.0:
            raise InvalidInputError(f"delta must lie in (1/2, 1), got {self.delta}")
        if not 0.0 < self.epsilon < 1.0:
            raise InvalidInputError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if not (self.c0 > 0 and self.c1 > 0):
            raise InvalidInputError("c0 and c1 must be positive")
        if not self.d > 5:
            raise InvalidInputError(f"d must exceed 5, got {self.d}")
        if self.max_rounds < 1:
            raise InvalidInputError("max_rounds must be positive")

    @classmethod
    def faithful(cls, **overrides) -> "SubsampleConfig":
        """Constants set to ``3 (d + 3)``, the magnitude the concentration bounds use."""
        d = overrides.get("d", cls.d)
        scale = 3.0 * (d + 3.0)
        overrides.setdefault("c0", scale)
        overrides.setdefault("c1", scale)
        return cls(**overrides)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class LedgerEntry:
    vertices: frozenset[int]
    beta: float


class StrengthLedger:
    """Ordered list of contracted vertex sets with their strength estimates."""

    def __init__(self, entries: Iterable[tuple[Iterable[int], float]] = ()):
        self._entries: list[LedgerEntry] = []
        for vertices, beta in entries:
            self.append(vertices, beta)

    def append(self, vertices: Iterable[int], beta: float) -> None:
        beta = float(beta)
        if not beta > 0 or not math.isfinite(beta):
            raise LedgerError(f"strength estimate must be positive and finite, got {beta}")
        vs = frozenset(int(v) for v in vertices)
        if not vs:
            raise LedgerError("ledger entries need a nonempty vertex set")
        self._entries.append(LedgerEntry(vs, beta))

    def __iter__(self) -> Iterator[LedgerEntry]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __getitem__(self, i: int) -> LedgerEntry:
        return self._entries[i]

    def copy(self) -> "StrengthLedger":
        out = StrengthLedger()
        out._entries = list(self._entries)
        return out

    def validate(self) -> None:
        """Raise ``LedgerError`` unless the sets are laminar with subsets first."""
        for j, later in enumerate(self._entries):
            for i in range(j):
                earlier = self._entries[i].vertices
                common = earlier & later.vertices
                if not common:
                    continue
                if earlier <= later.vertices:
                    continue
                if later.vertices < earlier:
                    raise LedgerError(f"entry {j} is a subset of the earlier entry {i}")
                raise LedgerError(f"entries {i} and {j} overlap without nesting")

    def is_valid(self) -> bool:
        try:
            self.validate()
        except LedgerError:
            return False
        return True

    def to_list(self) -> list[dict]:
        return [{"vertices": sorted(e.vertices), "beta": e.beta} for e in self._entries]

    def __repr__(self) -> str:
        return f"StrengthLedger({len(self._entries)} entries)"


@dataclass
class Sparsifier:
    graph: WeightedGraph
    query_cost: int
    ledger: StrengthLedger
    diagnostics: dict = field(default_factory=dict)

    def sidecar(self, seed: int | None = None, config: SubsampleConfig | None = None) -> dict:
        return {
            "query_cost": self.query_cost,
            "rounds": self.diagnostics.get("rounds", 0),
            "kappa_schedule": self.diagnostics.get("kappa_schedule", []),
            "seed": seed,
            "config": config.to_dict() if config is not None else None,
        }


def save_sparsifier(sp: Sparsifier, path: str | os.PathLike, seed: int | None = None,
                    config: SubsampleConfig | None = None) -> str:
    """Write the edge list to ``path`` and the JSON sidecar next to it; returns the sidecar path."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_graph(sp.graph))
    side = f"{os.fspath(path)}.json"
    with open(side, "w", encoding="utf-8") as fh:
        json.dump(sp.sidecar(seed, config), fh, sort_keys=True)
        fh.write("\n")
    return side


@dataclass
class CrudeStrengthTable:
    """Approximate maximum spanning forest and its path-minimum table."""

    forest: list[Edge]
    dtilde: np.ndarray
    queries: int = 0

    def value(self, i: int, j: int) -> float:
        return float(self.dtilde[i, j])


# --------------------------------------------------------------------------
# helpers


def inclusion_probability(w: float | np.ndarray, total: float, draws: int) -> np.ndarray:
    """Chance that an item of weight ``w`` shows up in ``draws`` proportional draws."""
    x = np.minimum(np.asarray(w, dtype=float) / total, 1.0)
    with np.errstate(divide="ignore"):
        return -np.expm1(draws * np.log1p(-x))


def sample_count(scale: float, weight: float) -> int:
    """``ceil(scale * weight)``, at least 1 when ``weight`` is positive."""
    if weight <= 0:
        return 0
    return max(1, math.ceil(scale * weight))


def next_power_of_two(x: float) -> float:
    """Smallest power of two that is at least ``x`` (``x > 0``)."""
    mant, exp = math.frexp(x)
    return math.ldexp(1.0, exp - 1) if mant == 0.5 else math.ldexp(1.0, exp)


def _log_sq(n: int) -> float:
    return math.log(n) ** 2 if n > 1 else 0.0


# --------------------------------------------------------------------------
# stage one


def estimate_and_contract(st: ContractionState, contracted: list[frozenset[int]], kappa: float,
                          ledger: StrengthLedger, cfg: SubsampleConfig,
                          rng: np.random.Generator, scope: Iterable[int] | None = None) -> dict:
    """One subsample-and-contract pass at scale ``kappa`` over ``scope``.

    Draws ``ceil(c0 ln(n)^2 W / kappa)`` edges of the contracted graph inside
    ``scope``, reweights each distinct draw by its inclusion probability,
    and splits the sampled graph until every piece has all cuts above
    ``delta * kappa``. Pieces with two or more supernodes are recorded with
    estimate ``kappa / 2`` and contracted. ``contracted`` is kept as the
    list of disjoint multi-vertex contracted sets.
    """
    if not kappa > 0:
        raise InvalidInputError(f"kappa must be positive, got {kappa}")
    ids = st.supernode_ids() if scope is None else st.resolve(scope)
    info = {"kappa": kappa, "weight": 0.0, "draws": 0, "pieces": 0}
    if len(ids) < 2:
        return info
    weight = st.inner(ids)[0]
    info["weight"] = weight
    if weight <= 0:
        return info
    draws = sample_count(cfg.c0 * _log_sq(st.n) / kappa, weight)
    info["draws"] = draws
    hits = st.sample_many(np.concatenate([st.members(i) for i in ids]), draws, rng,
                          total=weight, share_queries=cfg.share_sample_queries)
    index = {sid: k for k, sid in enumerate(ids)}
    k = len(ids)
    sampled = np.zeros((k, k))
    ws = np.array([e.weight for e, _ in hits])
    p = inclusion_probability(ws, weight, draws)
    for (e, _c), w, pe in zip(hits, ws, p):
        a, b = index[st.supernode_of(e.u)], index[st.supernode_of(e.v)]
        value = w / pe if pe > 0 else 0.0
        sampled[a, b] += value
        sampled[b, a] += value
    for piece in strong_partition(sampled, cfg.delta * kappa):
        if piece.size < 2:
            continue
        members = np.concatenate([st.members(ids[j]) for j in piece])
        vs = frozenset(int(v) for v in members)
        ledger.append(vs, kappa / 2.0)
        st.contract(members)
        contracted[:] = [c for c in contracted if not c <= vs]
        contracted.append(vs)
        info["pieces"] += 1
    return info


# --------------------------------------------------------------------------
# stage two


def construct_sparsifier(oracle: CutQueryOracle, ledger: StrengthLedger, cfg: SubsampleConfig,
                         rng: np.random.Generator) -> Sparsifier:
    """Sample each ledger set in order with fresh contractions and reweight.

    Entry ``i`` draws ``ceil(c1 ln(n)^2 W(C_i) / (epsilon^2 beta_i))`` edges
    from the weight still uncontracted inside ``C_i``; every distinct draw
    enters the output with weight ``w / p``. Entries whose remaining weight
    is zero are skipped.
    """
    ledger.validate()
    start = oracle.count
    st = ContractionState(oracle)
    n = oracle.n
    scale = cfg.c1 * _log_sq(n) / (cfg.epsilon ** 2)
    out: dict[tuple[int, int], float] = {}
    draws_total = 0
    for entry in ledger:
        members = np.array(sorted(entry.vertices), dtype=np.intp)
        ids = st.resolve(members)
        if len(ids) < 2:
            continue
        weight = st.inner(ids)[0]
        if weight > 0:
            draws = sample_count(scale / entry.beta, weight)
            draws_total += draws
            hits = st.sample_many(members, draws, rng, total=weight,
                                  share_queries=cfg.share_sample_queries)
            ws = np.array([e.weight for e, _ in hits])
            p = inclusion_probability(ws, weight, draws)
            for (e, _c), w, pe in zip(hits, ws, p):
                key = (e.u, e.v)
                if key in out:
                    raise LedgerError(f"pair {key} sampled from two ledger entries")
                if pe > 0 and w > 0:
                    out[key] = float(w / pe)
        st.contract(members)
    graph = WeightedGraph(n, out)
    diag = {"sparsifier_draws": draws_total, "sparsifier_edges": graph.num_edges,
            "construct_queries": oracle.count - start}
    return Sparsifier(graph, oracle.count - start, ledger, diag)


# --------------------------------------------------------------------------
# drivers


def naive_weighted_subsample(oracle: CutQueryOracle, T: float = math.inf,
                             cfg: SubsampleConfig | None = None,
                             rng: np.random.Generator | None = None) -> Sparsifier:
    """Halve ``kappa`` from the total weight until everything is contracted.

    The loop also stops once ``kappa`` drops to ``W_tot / T``; a finite ``T``
    gives the early-stopped variant, whose output need not be a sparsifier.
    """
    cfg = cfg or SubsampleConfig()
    rng = rng if rng is not None else np.random.default_rng()
    if not T > 0:
        raise InvalidInputError(f"T must be positive, got {T}")
    start = oracle.count
    st = ContractionState(oracle)
    ledger = StrengthLedger()
    contracted: list[frozenset[int]] = []
    total = st.get_total_weight()
    schedule: list[float] = []
    rounds = 0
    if total > 0:
        kappa = next_power_of_two(total)
        remaining = total
        while remaining > 0 and kappa > total / T:
            if rounds >= cfg.max_rounds:
                raise IncompleteLedgerError(
                    f"stopped after {rounds} rounds with weight left", ledger=ledger)
            estimate_and_contract(st, contracted, kappa, ledger, cfg, rng)
            schedule.append(kappa)
            rounds += 1
            kappa /= 2.0
            remaining = st.get_total_weight()
    estimate_queries = oracle.count - start
    sp = construct_sparsifier(oracle, ledger, cfg, rng)
    sp.query_cost = oracle.count - start
    sp.diagnostics.update({"rounds": rounds, "kappa_schedule": schedule,
                           "estimate_queries": estimate_queries, "variant": "naive",
                           "T": T})
    return sp


def approximate_kruskal(oracle: CutQueryOracle) -> CrudeStrengthTable:
    """Grow a forest by repeatedly taking a heavy edge and contracting it."""
    start = oracle.count
    st = ContractionState(oracle)
    forest: list[Edge] = []
    while st.num_supernodes > 1:
        try:
            e = st.get_edge()
        except NoEdgeError:
            break
        forest.append(e)
        # contracting an edge merges the two supernodes holding its endpoints
        st.contract(np.concatenate((st.members(st.supernode_of(e.u)),
                                    st.members(st.supernode_of(e.v)))))
    n = oracle.n
    dtilde = all_pairs_path_min(forest, n)
    return CrudeStrengthTable(forest, dtilde, oracle.count - start)


class _PairTracker:
    """Pairs with positive path minimum whose endpoints are still in different supernodes."""

    def __init__(self, forest: list[Edge], n: int):
        self.n = n
        self.order = sorted(forest, key=lambda e: (-e.weight, e.u, e.v))

    def components(self, threshold: float) -> list[np.ndarray]:
        """Forest components using only edges of weight at least ``threshold``."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.order:
            if e.weight < threshold:
                break
            ra, rb = find(e.u), find(e.v)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        roots = np.array([find(v) for v in range(self.n)])
        return [np.flatnonzero(roots == r) for r in np.unique(roots)]

    def state(self, owner: np.ndarray) -> tuple[int, float]:
        """(number of pairs left, largest path minimum among them)."""
        comps = self.components(0.0)
        size = sum(c.size * (c.size - 1) // 2 for c in comps)
        _, counts = np.unique(owner, return_counts=True)
        size -= int(sum(c * (c - 1) // 2 for c in counts))
        if size == 0:
            return 0, 0.0
        parent = list(range(self.n))
        group = {v: int(owner[v]) for v in range(self.n)}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.order:
            ra, rb = find(e.u), find(e.v)
            # every earlier merge stayed inside one supernode, so each side is tagged by one
            if group[ra] != group[rb]:
                return size, e.weight
            parent[max(ra, rb)] = min(ra, rb)
        raise AlignmentError("remaining pairs found but no forest edge separates supernodes")


def fast_weighted_subsample(oracle: CutQueryOracle, cfg: SubsampleConfig | None = None,
                            rng: np.random.Generator | None = None) -> Sparsifier:
    """Strength estimation guided by the approximate forest, then sparsification.

    Each outer round takes the largest remaining path minimum ``D``, splits
    the vertices into forest components over edges of weight at least
    ``D / (2 n^5)``, and runs estimate-and-contract on each component for
    every ``kappa`` from the smallest power of two at least ``n^4 D / 2``
    down to ``D / (2 n)``. ``kappa`` never increases between rounds.
    """
    cfg = cfg or SubsampleConfig()
    rng = rng if rng is not None else np.random.default_rng()
    start = oracle.count
    n = oracle.n
    crude = approximate_kruskal(oracle)
    tracker = _PairTracker(crude.forest, n)
    st = ContractionState(oracle)
    ledger = StrengthLedger()
    contracted: list[frozenset[int]] = []
    kappa = math.inf
    schedule: list[float] = []
    l_sizes: list[int] = []
    rounds = 0
    outer = 0
    stalls = 0
    stalled = False
    size, top = tracker.state(st.owner_array())
    while size > 0:
        l_sizes.append(size)
        outer += 1
        pieces = tracker.components(top / (2.0 * n ** 5))
        kappa = min(kappa, next_power_of_two(n ** 4 * top / 2.0))
        # after a round that removed no pair, keep halving once more so the
        # loop cannot spin on the same scale
        while kappa >= top / (2.0 * n) or stalled:
            stalled = False
            if rounds >= cfg.max_rounds:
                raise IncompleteLedgerError(
                    f"stopped after {rounds} rounds with pairs left", ledger=ledger)
            for piece in pieces:
                estimate_and_contract(st, contracted, kappa, ledger, cfg, rng, scope=piece)
            schedule.append(kappa)
            rounds += 1
            kappa /= 2.0
        new_size, top = tracker.state(st.owner_array())
        if new_size >= size:
            stalls += 1
            stalled = True
        size = new_size
    estimate_queries = oracle.count - start
    sp = construct_sparsifier(oracle, ledger, cfg, rng)
    sp.query_cost = oracle.count - start
    sp.diagnostics.update({"rounds": rounds, "outer_rounds": outer, "kappa_schedule": schedule,
                           "l_sizes": l_sizes, "stalled_rounds": stalls,
                           "kruskal_queries": crude.queries,
                           "estimate_queries": estimate_queries, "variant": "fast"})
    return sp


# --------------------------------------------------------------------------
# offline check


@dataclass
class StrengthReport:
    checked: int
    violations: list[dict]
    unlabeled: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.violations


def corrected_strength_check(ledger: StrengthLedger, g: WeightedGraph,
                             rel_tol: float = 1e-9) -> StrengthReport:
    """Compare each edge's estimate against its exact strength.

    The estimate of an edge is the ``beta`` of the first entry holding both
    endpoints. It must lie in ``[k / 4, k]``. Edges no entry covers are
    listed as unlabeled.
    """
    k = brute_force_all_strengths(g) if g.n <= DEFAULT_MAX_STRENGTH else edge_strengths(g)
    violations: list[dict] = []
    unlabeled: list[tuple[int, int]] = []
    checked = 0
    for e in g.edges():
        beta = next((x.beta for x in ledger if e.u in x.vertices and e.v in x.vertices), None)
        if beta is None:
            unlabeled.append((e.u, e.v))
            continue
        checked += 1
        ke = float(k[e.u, e.v])
        lo, hi = ke / 4.0 * (1 - rel_tol), ke * (1 + rel_tol)
        if not lo <= beta <= hi:
            violations.append({"edge": (e.u, e.v), "beta": beta, "strength": ke})
    return StrengthReport(checked, violations, unlabeled)
