"""Command line driver: run cut-query experiments and print JSON lines.

Examples::

    cutkit maxcut --method greedy --gen K:8
    cutkit cutdim --gen K:5
    cutkit bench --method fast-sparsify --gen er:64:0.5 --seeds 1..20
    cutkit audit --gen wr:12:0.5:1:1000000 --seeds 1..5

Exit status is 0 on success, 2 for a bad command line or input file, and 1
when an algorithm fails (a JSON error record is printed first).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from typing import Callable, TextIO

import numpy as np

from .dimension import max_cut_dimension, max_cut_indicators, max_tree_dimension, \
    max_tree_indicators
from .errors import CutKitError, GraphFormatError, InvalidInputError
from .exact import all_cut_values, brute_force_max_cut, max_brute_limit
from .graph import (WeightedGraph, complete_graph, cut_value, erdos_renyi, read_graph,
                    weighted_random)
from .maxcut import (MaxCutResult, build_pseudorandom_family, deterministic_logn_maxcut,
                     greedy_half_maxcut, learn_graph_exact, random_cut_maxcut,
                     sparsifier_maxcut)
from .oracle import CutQueryOracle
from .sparsifier import (Sparsifier, SubsampleConfig, fast_weighted_subsample,
                         naive_weighted_subsample, save_sparsifier)

MAXCUT_METHODS = ("exact", "greedy", "random", "deterministic", "sparsifier-full",
                  "sparsifier-early")
SPARSIFY_METHODS = ("fast", "naive", "early-stop")
BENCH_METHODS = MAXCUT_METHODS + tuple(f"{m}-sparsify" for m in SPARSIFY_METHODS)
AUDIT_RANDOM_CUTS = 1000


class UsageError(Exception):
    """Bad command line or input; maps to exit status 2."""


# --------------------------------------------------------------------------
# argument parsing helpers


def parse_seeds(text: str) -> list[int]:
    """``"1..20"`` (inclusive range), ``"1,2,5"`` or a single integer."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                a, b = int(lo), int(hi)
                if b < a:
                    raise UsageError(f"empty seed range {part!r}")
                seeds.extend(range(a, b + 1))
            else:
                seeds.append(int(part))
        except ValueError as exc:
            raise UsageError(f"bad seed list {text!r}") from exc
    if not seeds:
        raise UsageError("seed list is empty")
    return seeds


def generate_graph(spec: str, seed: int) -> WeightedGraph:
    """Build a graph from ``K:n``, ``er:n:p`` or ``wr:n:p:wmin:wmax``."""
    parts = spec.split(":")
    kind = parts[0].lower()
    try:
        if kind == "k" and len(parts) == 2:
            n = int(parts[1])
            _check_n(n)
            return complete_graph(n)
        if kind == "er" and len(parts) == 3:
            n, p = int(parts[1]), float(parts[2])
            _check_n(n)
            _check_p(p)
            return erdos_renyi(n, p, np.random.default_rng(seed))
        if kind == "wr" and len(parts) == 5:
            n, p = int(parts[1]), float(parts[2])
            wmin, wmax = float(parts[3]), float(parts[4])
            _check_n(n)
            _check_p(p)
            if not (0 <= wmin <= wmax and math.isfinite(wmax)):
                raise UsageError(f"need 0 <= wmin <= wmax in {spec!r}")
            return weighted_random(n, p, wmin, wmax, np.random.default_rng(seed))
    except ValueError as exc:
        raise UsageError(f"bad generator spec {spec!r}") from exc
    raise UsageError(f"unknown generator spec {spec!r}; use K:n, er:n:p or wr:n:p:wmin:wmax")


def _check_n(n: int) -> None:
    if n < 1:
        raise UsageError(f"vertex count must be positive, got {n}")


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise UsageError(f"edge probability must lie in [0, 1], got {p}")


def load_graph(args) -> WeightedGraph:
    if args.graph:
        try:
            return read_graph(args.graph)
        except OSError as exc:
            raise UsageError(f"cannot read {args.graph}: {exc.strerror}") from exc
        except GraphFormatError as exc:
            raise UsageError(f"{args.graph}: {exc}") from exc
    return generate_graph(args.gen, args.gen_seed)


def build_config(args) -> SubsampleConfig:
    overrides = {}
    for name in ("c0", "c1", "delta", "d", "epsilon", "max_rounds"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "no_share_queries", False):
        overrides["share_sample_queries"] = False
    try:
        if getattr(args, "faithful", False):
            return SubsampleConfig.faithful(**overrides)
        return SubsampleConfig(**overrides)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutkit", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="edge-list file ('n m' header, then 'u v w' lines)")
    src.add_argument("--gen", help="generator: K:n, er:n:p or wr:n:p:wmin:wmax")
    common.add_argument("--gen-seed", type=int, default=0, help="seed for the graph generator")
    common.add_argument("--seeds", default="0", help="algorithm seeds, e.g. 1..20 or 1,2,5")
    common.add_argument("--out", default="-", help="output file for JSON lines ('-' = stdout)")
    common.add_argument("--timing", action="store_true", help="add wall_ms to every record")

    cfg = argparse.ArgumentParser(add_help=False)
    cfg.add_argument("--epsilon", type=float, help="sparsifier accuracy")
    cfg.add_argument("--c0", type=float, help="estimation sampling constant")
    cfg.add_argument("--c1", type=float, help="sparsifier sampling constant")
    cfg.add_argument("--delta", type=float, help="cut threshold factor in (1/2, 1)")
    cfg.add_argument("--d", type=float, help="failure exponent (> 5)")
    cfg.add_argument("--max-rounds", type=int, help="round guard")
    cfg.add_argument("--faithful", action="store_true",
                     help="set c0 and c1 to 3(d+3) unless given explicitly")
    cfg.add_argument("--no-share-queries", action="store_true",
                     help="query every sample separately instead of sharing within a batch")

    p = sub.add_parser("maxcut", parents=[common, cfg], help="run a max-cut algorithm")
    p.add_argument("--method", choices=MAXCUT_METHODS, required=True)
    p.add_argument("--c", type=float, default=0.25, help="target ratio for random/deterministic")
    p.add_argument("--p", type=float, default=0.1, help="failure probability for random")

    p = sub.add_parser("sparsify", parents=[common, cfg], help="build a sparsifier")
    p.add_argument("--method", choices=SPARSIFY_METHODS, default="fast")
    p.add_argument("--T", type=float, default=None,
                   help="stop scale for naive (default: infinity; early-stop uses n^3)")
    p.add_argument("--save", help="write the sparsifier edge list here plus a .json sidecar")

    p = sub.add_parser("cutdim", parents=[common], help="max-cut dimension")
    p = sub.add_parser("treedim", parents=[common], help="max-tree dimension")

    p = sub.add_parser("bench", parents=[common, cfg], help="any method, one record per seed")
    p.add_argument("--method", choices=BENCH_METHODS, required=True)
    p.add_argument("--c", type=float, default=0.25)
    p.add_argument("--p", type=float, default=0.1)
    p.add_argument("--T", type=float, default=None)

    p = sub.add_parser("audit", parents=[common, cfg],
                       help="check a sparsifier's cuts against the input graph")
    p.add_argument("--method", choices=SPARSIFY_METHODS, default="fast")
    p.add_argument("--sparsifier", help="audit this edge-list file instead of building one")
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--cuts", type=int, default=AUDIT_RANDOM_CUTS,
                   help="random cuts to check when n is above the enumeration limit")
    p.add_argument("--tolerance", type=float, default=None,
                   help="allowed relative deviation (default 2*epsilon)")
    return parser


# --------------------------------------------------------------------------
# runners: each returns the record for one seed


def _true_max(g: WeightedGraph, cache: dict) -> float | None:
    if g.n > max_brute_limit():
        return None
    if "true_max" not in cache:
        cache["true_max"] = brute_force_max_cut(g)[1]
    return cache["true_max"]


def _maxcut_record(g: WeightedGraph, res: MaxCutResult, cache: dict) -> dict:
    rec = {"n": g.n, "queries": res.queries, "value": res.value, "cut": sorted(res.cut)}
    rec.update(res.details)
    best = _true_max(g, cache)
    if best is not None:
        rec["true_max"] = best
        rec["ratio"] = res.value / best if best > 0 else 1.0
    return rec


def run_maxcut(g: WeightedGraph, method: str, seed: int, args, cfg: SubsampleConfig,
               cache: dict) -> dict:
    o = CutQueryOracle(g)
    rng = np.random.default_rng(seed)
    if method == "exact":
        res = learn_graph_exact(o)
    elif method == "greedy":
        res = greedy_half_maxcut(o)
    elif method == "random":
        res = random_cut_maxcut(o, args.c, args.p, rng, seed)
    elif method == "deterministic":
        family = build_pseudorandom_family(g.n, args.c, rng)
        res = deterministic_logn_maxcut(o, args.c, family)
    else:
        variant = "full" if method == "sparsifier-full" else "early_stop"
        res = sparsifier_maxcut(o, cfg.epsilon, cfg, rng, variant)
    rec = _maxcut_record(g, res, cache)
    if method.startswith("sparsifier"):
        rec["config"] = cfg.to_dict()
    return rec


def _sparsify(g: WeightedGraph, method: str, seed: int, args,
              cfg: SubsampleConfig) -> tuple[CutQueryOracle, Sparsifier]:
    o = CutQueryOracle(g)
    rng = np.random.default_rng(seed)
    if method == "fast":
        sp = fast_weighted_subsample(o, cfg, rng)
    elif method == "naive":
        sp = naive_weighted_subsample(o, args.T if args.T is not None else math.inf, cfg, rng)
    else:
        sp = naive_weighted_subsample(o, args.T if args.T is not None else float(g.n) ** 3, cfg, rng)
    return o, sp


def _sparsify_record(g: WeightedGraph, sp: Sparsifier, cfg: SubsampleConfig) -> dict:
    d = sp.diagnostics
    rec = {"n": g.n, "queries": sp.query_cost, "edges": sp.graph.num_edges,
           "rounds": d.get("rounds", 0), "kappa_schedule": d.get("kappa_schedule", []),
           "ledger_size": len(sp.ledger), "config": cfg.to_dict()}
    if "l_sizes" in d:
        rec["l_sizes"] = d["l_sizes"]
    return rec


def run_sparsify(g, method, seed, args, cfg, cache) -> dict:
    _o, sp = _sparsify(g, method, seed, args, cfg)
    rec = _sparsify_record(g, sp, cfg)
    if getattr(args, "save", None):
        path = args.save if len(cache["seeds"]) == 1 else f"{args.save}.seed{seed}"
        save_sparsifier(sp, path, seed, cfg)
        rec["saved"] = path
    return rec


def audit_cuts(g: WeightedGraph, h: WeightedGraph, rng: np.random.Generator,
               count: int) -> tuple[float, list[int], int]:
    """Largest relative cut deviation of ``h`` from ``g`` and the worst cut.

    All cuts are compared when ``n`` is within the enumeration limit,
    otherwise ``count`` random nonempty proper subsets. A cut that is zero in
    ``g`` but not in ``h`` counts as infinite deviation.
    """
    n = g.n
    if n < 2:
        return 0.0, [0], 0
    if n <= max_brute_limit():
        gv = all_cut_values(g)[:-1]
        hv = all_cut_values(h)[:-1]
        masks = np.arange(gv.size)
    else:
        masks = None
        sets = []
        while len(sets) < count:
            m = rng.random(n) < 0.5
            if 0 < m.sum() < n:
                sets.append(m)
        gv = np.array([cut_value(g, np.flatnonzero(m)) for m in sets])
        hv = np.array([cut_value(h, np.flatnonzero(m)) for m in sets])
    with np.errstate(divide="ignore", invalid="ignore"):
        dev = np.where(gv > 0, np.abs(hv - gv) / np.where(gv > 0, gv, 1.0),
                       np.where(hv > 0, np.inf, 0.0))
    k = int(np.argmax(dev))
    if masks is not None:
        worst = [0] + [v for v in range(1, n) if (int(masks[k]) >> (v - 1)) & 1]
    else:
        worst = [int(v) for v in np.flatnonzero(sets[k])]
    return float(dev[k]), worst, int(gv.size)


def run_audit(g, method, seed, args, cfg, cache) -> dict:
    if args.sparsifier:
        try:
            h = read_graph(args.sparsifier)
        except (OSError, GraphFormatError) as exc:
            raise UsageError(f"cannot load sparsifier {args.sparsifier}: {exc}") from exc
        if h.n != g.n:
            raise UsageError(f"sparsifier has {h.n} vertices, graph has {g.n}")
        rec = {"n": g.n, "sparsifier": args.sparsifier}
    else:
        _o, sp = _sparsify(g, method, seed, args, cfg)
        h = sp.graph
        rec = _sparsify_record(g, sp, cfg)
    tol = args.tolerance if args.tolerance is not None else 2.0 * cfg.epsilon
    dev, worst, checked = audit_cuts(g, h, np.random.default_rng(seed), args.cuts)
    rec.update({"cuts_checked": checked, "worst_cut": worst, "tolerance": tol,
                "max_deviation": dev if math.isfinite(dev) else None,
                "ok": bool(dev <= tol)})
    return rec


def run_cutdim(g, _method, _seed, _args, _cfg, _cache) -> dict:
    mat = max_cut_indicators(g)
    return {"n": g.n, "dimension": max_cut_dimension(g), "max_cuts": int(mat.rows.shape[0]),
            "columns": len(mat.edge_index)}


def run_treedim(g, _method, _seed, _args, _cfg, _cache) -> dict:
    mat = max_tree_indicators(g)
    return {"n": g.n, "dimension": max_tree_dimension(g), "max_trees": int(mat.rows.shape[0]),
            "columns": len(mat.edge_index)}


def run_bench(g, method, seed, args, cfg, cache) -> dict:
    if method.endswith("-sparsify"):
        return run_sparsify(g, method[: -len("-sparsify")], seed, args, cfg, cache)
    return run_maxcut(g, method, seed, args, cfg, cache)


RUNNERS: dict[str, Callable] = {"maxcut": run_maxcut, "sparsify": run_sparsify,
                                "audit": run_audit, "cutdim": run_cutdim,
                                "treedim": run_treedim, "bench": run_bench}
SEEDLESS = ("cutdim", "treedim")


# --------------------------------------------------------------------------
# entry point


def _emit(out: TextIO, rec: dict) -> None:
    out.write(json.dumps(rec, sort_keys=True) + "\n")
    out.flush()


def execute(args, out: TextIO) -> int:
    g = load_graph(args)
    seeds = [None] if args.command in SEEDLESS else parse_seeds(args.seeds)
    cfg = build_config(args) if hasattr(args, "c0") else SubsampleConfig()
    cache: dict = {"seeds": seeds}
    runner = RUNNERS[args.command]
    method = getattr(args, "method", None)
    for seed in seeds:
        start = time.perf_counter()
        try:
            body = runner(g, method, seed, args, cfg, cache)
        except UsageError:
            raise
        except CutKitError as exc:
            _emit(out, {"command": args.command, "method": method, "seed": seed,
                        "error": type(exc).__name__, "message": str(exc)})
            return 1
        rec = {"command": args.command, "method": method, "seed": seed}
        rec.update(body)
        if args.timing:
            rec["wall_ms"] = round((time.perf_counter() - start) * 1000.0, 3)
        _emit(out, rec)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "method", None) in ("fast", "fast-sparsify") and getattr(args, "T", None) is not None:
        parser.error("--T applies to the naive and early-stop methods only")
    try:
        if args.out == "-":
            return execute(args, sys.stdout)
        with open(args.out, "w", encoding="utf-8") as fh:
            return execute(args, fh)
    except UsageError as exc:
        parser.error(str(exc))
    except OSError as exc:
        parser.error(f"cannot write {args.out}: {exc.strerror}")
    return 2
