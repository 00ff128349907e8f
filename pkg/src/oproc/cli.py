"""``design`` command line: studies, single solves and path inspection."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import bench
from .net_model import default_table, generate_traffic, load_traffic, load_transceivers, resolve_topology
from .pathing import disjoint_pairs, k_shortest_paths
from .solver import PARADIGMS, SCOPES, DesignInstance, solve_exact, solve_greedy

log = logging.getLogger("oproc")


def _destinations(value):
    return value if value == "all" else int(value)


def _table(path):
    if path is None:
        return default_table()
    with open(path) as fh:
        return load_transceivers(fh.read())


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_run(args):
    spec = bench.StudySpec(
        study=args.study,
        topology=args.topology,
        n_sets=args.sets,
        seed=args.seed,
        k=args.k,
        rate_gbps=args.rate,
        n_destinations=args.destinations,
        protected=not args.unprotected,
        agg_scope=args.agg_scope,
        same_dst=not args.any_dst,
        per_source=args.per_source,
        table=_table(args.transceivers),
    )
    result = bench.run_study(spec, jobs=args.jobs)
    _write(bench.emit(result, args.format), args.out)
    if args.format == "csv" and args.out not in (None, "-"):
        sys.stderr.write(bench.to_text(result))


def cmd_solve(args):
    topology = resolve_topology(args.topology)
    with open(args.traffic) as fh:
        demands = load_traffic(fh.read())
    instance = DesignInstance(
        topology, demands, _table(args.transceivers), args.paradigm, args.k, args.agg_scope,
        not args.any_dst,
    )
    solution = (solve_greedy if args.greedy else solve_exact)(instance)
    doc = solution.to_dict()
    doc["stats"] = solution.stats
    _write(json.dumps(doc, indent=1) + "\n", args.out)


def cmd_traffic(args):
    topology = resolve_topology(args.topology)
    demands = generate_traffic(
        topology, args.destinations, args.rate, not args.unprotected, args.seed, args.per_source
    )
    _write(demands.to_json() + "\n", args.out)


def cmd_paths(args):
    topology = resolve_topology(args.topology)
    for p in k_shortest_paths(topology, args.src, args.dst, args.k):
        print(f"{p.hop_count}  {' '.join(p.nodes)}")
    if args.pairs:
        print()
        for pair in disjoint_pairs(topology, args.src, args.dst, args.k):
            print(f"{pair.hop_count}  [{' '.join(pair.working.nodes)}] / [{' '.join(pair.protection.nodes)}]")


def build_parser():
    parser = argparse.ArgumentParser(prog="design", description=__doc__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="bypass vs optical-processing study")
    run.add_argument("--study", choices=sorted(bench.STUDIES), required=True)
    run.add_argument("--topology", help="bundled name (cost239, nsfnet) or JSON file")
    run.add_argument("--sets", type=int, default=10)
    run.add_argument("--seed", type=int, default=1, help="seed of the first set; set i uses seed+i")
    run.add_argument("--k", type=int, default=5)
    run.add_argument("--rate", type=int, help="demand rate in Gbps")
    run.add_argument("--destinations", type=_destinations, help="count or 'all'")
    run.add_argument("--per-source", action="store_true", help="deal destinations between the sources")
    run.add_argument("--agg-scope", choices=SCOPES, default="both")
    run.add_argument("--any-dst", action="store_true", help="let aggregation pair different destinations")
    run.add_argument("--unprotected", action="store_true")
    run.add_argument("--transceivers", help="transceiver table JSON")
    run.add_argument("--jobs", type=int, default=1)
    run.add_argument("--out")
    run.add_argument("--format", choices=("csv", "text"), default="csv")
    run.set_defaults(func=cmd_run)

    solve = sub.add_parser("solve", help="solve one traffic file, print a Solution JSON")
    solve.add_argument("--topology", required=True)
    solve.add_argument("--traffic", required=True)
    solve.add_argument("--paradigm", choices=PARADIGMS, default="bypass")
    solve.add_argument("--k", type=int, default=5)
    solve.add_argument("--agg-scope", choices=SCOPES, default="both")
    solve.add_argument("--any-dst", action="store_true")
    solve.add_argument("--greedy", action="store_true")
    solve.add_argument("--transceivers")
    solve.add_argument("--out")
    solve.set_defaults(func=cmd_solve)

    traffic = sub.add_parser("traffic", help="generate a two-to-many traffic set")
    traffic.add_argument("--topology", required=True)
    traffic.add_argument("--destinations", type=_destinations, default="all")
    traffic.add_argument("--rate", type=int, default=100)
    traffic.add_argument("--seed", type=int, default=1)
    traffic.add_argument("--per-source", action="store_true")
    traffic.add_argument("--unprotected", action="store_true")
    traffic.add_argument("--out")
    traffic.set_defaults(func=cmd_traffic)

    paths = sub.add_parser("paths", help="list k-shortest paths between two nodes")
    paths.add_argument("--topology", required=True)
    paths.add_argument("--src", required=True)
    paths.add_argument("--dst", required=True)
    paths.add_argument("--k", type=int, default=5)
    paths.add_argument("--pairs", action="store_true", help="also list link-disjoint pairs")
    paths.set_defaults(func=cmd_paths)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, KeyError, LookupError, OSError, RuntimeError) as e:
        print(f"design: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
