"""``ebc`` command-line interface.

Exit codes: 0 success, 2 usage error (bad flags, missing dataset), 1 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from privebc.analysis import (
    ExperimentSpec,
    quality_error_bound,
    required_budget,
    rows_csv,
    run_sweep,
    summarize,
    summary_csv,
    utility_bound_probability,
)
from privebc.config import ConfigError, RunConfig, load_config_file
from privebc.graph import GraphError, exact_ebc, generate_graph, partition_uniform
from privebc.io import FORMATS, LoadedGraph, ParseError, load_edge_list, write_edge_list, write_mapping
from privebc.mechanisms import MechanismError
from privebc.protocol import ProtocolOrderError, run_private_ebc
from privebc.seeds import derive_seed

log = logging.getLogger("privebc")


class UsageError(Exception):
    pass


def _floats(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x]


def _ints(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x]


def _graph_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--edges", help="edge-list file")
    src.add_argument("--gen", choices=["erdos-renyi", "barabasi-albert"], help="synthetic graph model")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--n", type=int, help="node count for --gen")
    p.add_argument("--p", type=float, help="edge probability (erdos-renyi)")
    p.add_argument("--m", type=int, help="edges per new node (barabasi-albert)")
    p.add_argument("--graph-seed", type=int)
    p.add_argument("--mapping", help="write the label -> dense id map here")


def _protocol_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--partition-seed", type=int)
    p.add_argument("--split", type=_floats, help="eps1,eps2,eps3 fractions of the total")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--noiseless", action="store_true", default=None)
    p.add_argument("--pseudocode-scales", action="store_true", default=None,
                   help="double both Laplace scales")
    p.add_argument("--reciprocal", choices=["ego-offset", "literal"])
    p.add_argument("--sampler", choices=["normalized", "literal"],
                   help="'literal' reproduces the unnormalized quality-level sampler (not DP)")
    p.add_argument("--precision", choices=["double", "mpmath"])
    p.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ebc", description=__doc__)
    parser.add_argument("--config", help="JSON file of RunConfig fields; flags override it")
    parser.add_argument("-q", "--quiet", action="store_true", help="do not log the effective config")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact egocentric betweenness of one node")
    _graph_args(p)
    p.add_argument("--ego")

    p = sub.add_parser("private", help="one run of the private multi-party protocol")
    _graph_args(p)
    _protocol_args(p)
    p.add_argument("--ego")
    p.add_argument("--parties", type=_ints)
    p.add_argument("--epsilon", type=_floats, help="total budget")
    p.add_argument("--transcript", help="write the message transcript here")

    p = sub.add_parser("sweep", help="median relative error over random egos")
    _graph_args(p)
    _protocol_args(p)
    p.add_argument("--parties", type=_ints, help="comma-separated party counts")
    p.add_argument("--epsilon", type=_floats, help="comma-separated total budgets")
    p.add_argument("--egos", type=int, help="number of sampled egos")
    p.add_argument("--min-degree", type=int)
    p.add_argument("--timing", action="store_true", default=None,
                   help="record wall time (output is then not byte-reproducible)")
    p.add_argument("--out", help="per-ego CSV (default stdout)")
    p.add_argument("--summary", help="aggregate CSV")

    p = sub.add_parser("bound", help="evaluate the utility bounds")
    p.add_argument("--gamma", type=float, help="relative error target (with --alpha)")
    p.add_argument("--alpha", type=float, help="ego network fraction of the graph")
    p.add_argument("--epsilon", type=_floats)
    p.add_argument("--ego-size", type=float)
    p.add_argument("--universe", type=int)
    p.add_argument("--t", type=float)
    p.add_argument("--quality", type=int)

    p = sub.add_parser("gen", help="write a synthetic graph")
    p.add_argument("--gen", "--model", dest="gen", choices=["erdos-renyi", "barabasi-albert"])
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", dest="graph_seed", type=int)
    p.add_argument("--out")
    return parser


def make_config(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    values = {}
    if ns.config:
        values.update(load_config_file(ns.config))
    values.update({k: v for k, v in vars(ns).items() if v is not None and k in RunConfig.fields()})
    cfg = RunConfig(**values)
    try:
        cfg.validate()
    except ConfigError as exc:
        parser.error(str(exc))
    return cfg


def load_graph(cfg: RunConfig) -> LoadedGraph:
    if cfg.edges:
        loaded = load_edge_list(cfg.edges, cfg.format)
    elif cfg.gen:
        if cfg.n is None:
            raise UsageError("--gen needs --n")
        g = generate_graph(cfg.gen, cfg.n, p=cfg.p, m=cfg.m, seed=cfg.graph_seed)
        loaded = LoadedGraph(g, tuple(str(i) for i in range(g.n)))
    else:
        raise UsageError("give a graph with --edges FILE or --gen MODEL")
    if cfg.mapping:
        write_mapping(loaded.labels, cfg.mapping)
    return loaded


def _ego(cfg: RunConfig, loaded: LoadedGraph) -> int:
    if cfg.ego is None:
        raise UsageError("--ego is required")
    try:
        return loaded.node_id(cfg.ego)
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def cmd_exact(cfg: RunConfig) -> None:
    log.info("config %s", cfg.to_json())
    loaded = load_graph(cfg)
    print(repr(float(exact_ebc(loaded.graph, _ego(cfg, loaded)))))


def cmd_private(cfg: RunConfig) -> None:
    loaded = load_graph(cfg)
    ego = _ego(cfg, loaded)
    if len(cfg.parties) != 1 or len(cfg.epsilon) != 1:
        raise UsageError("private takes a single --parties and a single --epsilon")
    k, eps = cfg.parties[0], cfg.epsilon[0]
    pg = partition_uniform(loaded.graph, k, cfg.partition_seed)
    budget = cfg.budget(eps)
    cfg.derived.update(budget=[budget.eps1, budget.eps2, budget.eps3],
                       party_sizes=[len(pg.nodes_of(b)) for b in range(k)])
    log.info("config %s", cfg.to_json())
    est, transcript = run_private_ebc(pg, ego, budget, cfg.calibration(), seed=cfg.seed,
                                      workers=cfg.workers)
    print(f"private_ebc {est!r}")
    print(f"released_nodes {len(transcript.released)}")
    print(f"transcript {transcript.summary()}")
    for b in range(k):
        print(f"party {b} epsilon_spent {transcript.budget_spent(b)!r}")
    if cfg.transcript:
        with open(cfg.transcript, "w") as fh:
            transcript.write(fh)


def cmd_sweep(cfg: RunConfig) -> None:
    loaded = load_graph(cfg)
    spec = ExperimentSpec(epsilons=tuple(cfg.epsilon), parties=tuple(cfg.parties),
                          n_egos=cfg.egos, min_degree=cfg.min_degree, seed=cfg.seed,
                          split=tuple(cfg.split), calibration=cfg.calibration(),
                          timing=cfg.timing, workers=cfg.workers)
    cfg.derived["partition_seed"] = derive_seed(cfg.seed, "partition")
    log.info("config %s", cfg.to_json())
    rows = run_sweep(loaded.graph, spec)
    text = rows_csv(rows)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    agg = summary_csv(summarize(rows))
    if cfg.summary:
        with open(cfg.summary, "w") as fh:
            fh.write(agg)
    if not cfg.out:
        sys.stdout.write(text)
    elif not cfg.summary:
        sys.stdout.write(agg)


def cmd_bound(cfg: RunConfig) -> None:
    log.info("config %s", cfg.to_json())
    if cfg.gamma is not None or cfg.alpha is not None:
        if cfg.gamma is None or cfg.alpha is None:
            raise UsageError("--gamma and --alpha go together")
        print(repr(required_budget(cfg.gamma, cfg.alpha)))
    elif cfg.quality is not None:
        if cfg.universe is None or cfg.ego_size is None:
            raise UsageError("--quality needs --universe and --ego-size")
        print(repr(quality_error_bound(cfg.universe, cfg.quality, cfg.ego_size)))
    elif cfg.t is not None:
        if cfg.universe is None or cfg.ego_size is None:
            raise UsageError("--t needs --epsilon, --universe and --ego-size")
        print(repr(utility_bound_probability(cfg.epsilon[0], cfg.ego_size, cfg.universe, cfg.t)))
    else:
        raise UsageError("bound needs --gamma/--alpha, --t, or --quality")


def cmd_gen(cfg: RunConfig) -> None:
    if not cfg.gen or cfg.n is None or not cfg.out:
        raise UsageError("gen needs --model, --n and --out")
    log.info("config %s", cfg.to_json())
    g = generate_graph(cfg.gen, cfg.n, p=cfg.p, m=cfg.m, seed=cfg.graph_seed)
    write_edge_list(g, cfg.out)
    print(f"wrote {g.n} nodes, {g.num_edges} edges to {cfg.out}")


COMMANDS = {"exact": cmd_exact, "private": cmd_private, "sweep": cmd_sweep,
            "bound": cmd_bound, "gen": cmd_gen}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = make_config(argv)
    except ConfigError as exc:
        print(f"ebc: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    quiet = "-q" in argv or "--quiet" in argv
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        COMMANDS[cfg.command](cfg)
    except (UsageError, FileNotFoundError) as exc:
        print(f"ebc: error: {exc}", file=sys.stderr)
        return 2
    except (GraphError, MechanismError, ParseError, ProtocolOrderError, ValueError) as exc:
        print(f"ebc: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
