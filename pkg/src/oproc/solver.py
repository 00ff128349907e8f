"""Exact and heuristic selection of provisioning configurations.

The decision space is the set of candidate configurations built over
k-shortest routes: one bypass configuration per demand, or one combined
(aggregated or encoded) configuration shared by a pair of demands.
:func:`solve_exact` finds a minimum-cost exact cover of the demands by
depth-first branch-and-bound; :func:`brute_force` enumerates the same space
exhaustively and serves as its test oracle.
"""

from __future__ import annotations

import itertools
import logging
import time
from dataclasses import dataclass

from . import pathing
from .net_model import DemandSet, Topology, TransceiverTable
from .provision import (
    HEURISTIC,
    PROVEN_OPTIMAL,
    ProvisionError,
    Solution,
    build_aggregated,
    build_bypass,
    build_encoded,
    demand_signal,
    merge_routes,
    merge_segment,
)

log = logging.getLogger(__name__)

PARADIGMS = ("bypass", "aggregation", "xor")
SCOPES = ("working", "protection", "both")
BRUTE_FORCE_LIMIT = 6


class InfeasibleError(RuntimeError):
    pass


class InstanceTooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class DesignInstance:
    topology: Topology
    demands: DemandSet
    table: TransceiverTable
    paradigm: str = "bypass"
    k: int = 5
    agg_scope: str = "both"
    # aggregation may pair demands with different destinations when False
    same_dst: bool = True
    # encoded pairs must carry identical (rate, format) signals
    strict_xor: bool = True

    def __post_init__(self):
        if self.paradigm not in PARADIGMS:
            raise ValueError(f"unknown paradigm {self.paradigm!r}")
        if self.agg_scope not in SCOPES:
            raise ValueError(f"unknown aggregation scope {self.agg_scope!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")

    def with_paradigm(self, paradigm: str) -> "DesignInstance":
        return DesignInstance(
            self.topology, self.demands, self.table, paradigm,
            self.k, self.agg_scope, self.same_dst, self.strict_xor,
        )


@dataclass
class Candidates:
    solo: dict  # demand id -> [config]
    pairs: dict  # (demand id, demand id) -> [config], key in demand order
    order: tuple  # demand ids in instance order

    @property
    def total(self) -> int:
        return sum(map(len, self.solo.values())) + sum(map(len, self.pairs.values()))


def _routes(instance, demand):
    if demand.protected:
        return pathing.disjoint_pairs(instance.topology, demand.src, demand.dst, instance.k)
    return pathing.k_shortest_paths(instance.topology, demand.src, demand.dst, instance.k)


def _split(route):
    if isinstance(route, pathing.PathPair):
        return route.working, route.protection
    return route, None


def _pairable(instance, a, b) -> bool:
    if a.protected != b.protected:
        return False
    table = instance.table
    if instance.paradigm == "xor":
        if a.dst != b.dst or not a.protected:
            return False
        sa, sb = demand_signal(a, table), demand_signal(b, table)
        if instance.strict_xor and sa != sb:
            return False
        return table.xor(sa, sb) is not None
    if instance.paradigm == "aggregation":
        if instance.same_dst and a.dst != b.dst:
            return False
        for fa in table.formats_for(a.rate_gbps):
            for fb in table.formats_for(b.rate_gbps):
                if table.aggregate((a.rate_gbps, fa), (b.rate_gbps, fb)) is not None:
                    return True
    return False


def _aggregated_configs(instance, pair, ra, rb):
    wa, pa = _split(ra)
    wb, pb = _split(rb)
    merge = merge_routes if pair[0].dst == pair[1].dst else merge_segment
    mixes = {}
    if instance.agg_scope in ("working", "both"):
        mixes["working"] = merge(wa, wb)
    if instance.agg_scope in ("protection", "both") and pa is not None:
        mixes["protection"] = merge(pa, pb)
    available = [c for c, m in mixes.items() if m is not None]
    out = []
    # larger subsets first: with a rule that saves slices they are cheaper
    for n in range(len(available), 0, -1):
        for subset in itertools.combinations(available, n):
            working = mixes["working"] if "working" in subset else (wa, wb)
            if pa is None:
                protection = None
            else:
                protection = mixes["protection"] if "protection" in subset else (pa, pb)
            try:
                out.append(build_aggregated(pair, instance.table, working, protection))
            except (ProvisionError, ValueError):
                continue
    return out


def _encoded_configs(instance, pair, ra, rb):
    wa, pa = _split(ra)
    wb, pb = _split(rb)
    mixed = merge_routes(pa, pb)
    if mixed is None:
        return []
    try:
        return [build_encoded(pair, instance.table, (wa, wb), mixed, instance.strict_xor)]
    except (ProvisionError, ValueError):
        return []


def enumerate_candidates(instance: DesignInstance) -> Candidates:
    """All bypass configs per demand and all combined configs per eligible pair."""
    demands = list(instance.demands)
    routes = {}
    solo = {}
    for d in demands:
        try:
            routes[d.id] = _routes(instance, d)
        except pathing.NoPathError:
            routes[d.id] = []
        solo[d.id] = [build_bypass(d, r, instance.table) for r in routes[d.id]]
        if not solo[d.id]:
            kind = "link-disjoint route pair" if d.protected else "route"
            raise InfeasibleError(f"demand {d.id} ({d.src}->{d.dst}) has no {kind} among k={instance.k}")
    pairs = {}
    if instance.paradigm != "bypass":
        build = _encoded_configs if instance.paradigm == "xor" else _aggregated_configs
        for a, b in itertools.combinations(demands, 2):
            if not _pairable(instance, a, b):
                continue
            seen = set()
            configs = []
            for ra in routes[a.id]:
                for rb in routes[b.id]:
                    for c in build(instance, (a, b), ra, rb):
                        sig = c.signature()
                        if sig not in seen:
                            seen.add(sig)
                            configs.append(c)
            if configs:
                pairs[(a.id, b.id)] = configs
    return Candidates(solo, pairs, tuple(d.id for d in demands))


def _cheapest(configs):
    """Lowest-cost config, lowest index among ties."""
    return min(enumerate(configs), key=lambda t: (t[1].cost, t[0]))[1]


def _finish(instance, configs, optimality, stats) -> Solution:
    rank = {did: i for i, did in enumerate(d.id for d in instance.demands)}
    configs = sorted(configs, key=lambda c: rank[c.demand_ids[0]])
    return Solution(tuple(instance.demands), tuple(configs), optimality, stats)


def _stats(instance, cands, nodes, t0, optimality, **extra) -> dict:
    stats = {
        "paradigm": instance.paradigm,
        "k": instance.k,
        "candidates_total": cands.total,
        "nodes_explored": nodes,
        "runtime_ms": round((time.perf_counter() - t0) * 1000.0, 3),
        "optimality": optimality,
    }
    stats.update(extra)
    return stats


def solve_exact(instance: DesignInstance, candidates: Candidates | None = None) -> Solution:
    """Minimum-cost cover by depth-first branch-and-bound.

    Lower bound: every uncovered demand pays at least its cheapest solo
    config or half of its cheapest pair config with another uncovered
    demand. Costs are doubled internally so the bound stays integral.
    """
    t0 = time.perf_counter()
    cands = candidates or enumerate_candidates(instance)
    order = cands.order
    idx = {did: i for i, did in enumerate(order)}
    solo = {did: _cheapest(cs) for did, cs in cands.solo.items()}
    best_pair = {key: _cheapest(cs) for key, cs in cands.pairs.items()}
    partners = {did: [] for did in order}
    for (a, b), c in best_pair.items():
        partners[a].append((b, c))
        partners[b].append((a, c))
    for did in order:
        partners[did].sort(key=lambda t: idx[t[0]])

    n = len(order)
    best_cost = None
    best_choice = None
    explored = 0
    covered = [False] * n
    chosen = []

    def bound2(cost):
        total = 2 * cost
        for i, did in enumerate(order):
            if covered[i]:
                continue
            lb = 2 * solo[did].cost
            for other, c in partners[did]:
                if not covered[idx[other]] and c.cost < lb:
                    lb = c.cost
            total += lb
        return total

    def search(cost):
        nonlocal best_cost, best_choice, explored
        explored += 1
        if best_cost is not None and bound2(cost) >= 2 * best_cost:
            return
        first = next((i for i in range(n) if not covered[i]), None)
        if first is None:
            best_cost, best_choice = cost, list(chosen)
            return
        did = order[first]
        options = [(solo[did].cost, -1, solo[did], None)]
        for rank, (other, c) in enumerate(partners[did]):
            j = idx[other]
            if not covered[j]:
                options.append((c.cost - solo[other].cost, rank, c, j))
        # most promising branch first: cost net of the partner's solo price
        options.sort(key=lambda o: (o[0], o[1]))
        for _, _, config, j in options:
            covered[first] = True
            if j is not None:
                covered[j] = True
            chosen.append(config)
            search(cost + config.cost)
            chosen.pop()
            covered[first] = False
            if j is not None:
                covered[j] = False

    search(0)
    stats = _stats(instance, cands, explored, t0, PROVEN_OPTIMAL, bound="half-pair additive")
    log.debug("solve_exact %s: cost=%s nodes=%d", instance.paradigm, best_cost, explored)
    return _finish(instance, best_choice, PROVEN_OPTIMAL, stats)


def solve_greedy(instance: DesignInstance, candidates: Candidates | None = None) -> Solution:
    """Commit the combined config with the largest saving over solo provisioning, repeatedly."""
    t0 = time.perf_counter()
    cands = candidates or enumerate_candidates(instance)
    solo = {did: _cheapest(cs) for did, cs in cands.solo.items()}
    pool = []
    for (a, b), configs in cands.pairs.items():
        for c in configs:
            pool.append((solo[a].cost + solo[b].cost - c.cost, len(pool), c))
    pool.sort(key=lambda t: (-t[0], t[1]))
    locked = set()
    chosen = []
    steps = 0
    for saving, _, c in pool:
        if saving <= 0:
            break
        steps += 1
        if locked.isdisjoint(c.demand_ids):
            chosen.append(c)
            locked.update(c.demand_ids)
    chosen += [solo[did] for did in cands.order if did not in locked]
    stats = _stats(instance, cands, steps, t0, HEURISTIC)
    return _finish(instance, chosen, HEURISTIC, stats)


def pairings(ids, eligible) -> list:
    """Every way to group ``ids`` into singletons and eligible pairs."""
    ids = list(ids)
    if not ids:
        return [[]]
    head, rest = ids[0], ids[1:]
    out = [[(head,)] + p for p in pairings(rest, eligible)]
    for other in rest:
        if frozenset((head, other)) in eligible:
            remaining = [x for x in rest if x != other]
            out += [[(head, other)] + p for p in pairings(remaining, eligible)]
    return out


def brute_force(instance: DesignInstance, candidates: Candidates | None = None) -> Solution:
    """Exhaustive minimum over every pairing and every candidate choice."""
    if len(instance.demands) > BRUTE_FORCE_LIMIT:
        raise InstanceTooLargeError(
            f"brute force is limited to {BRUTE_FORCE_LIMIT} demands, got {len(instance.demands)}"
        )
    t0 = time.perf_counter()
    cands = candidates or enumerate_candidates(instance)
    by_block = {(did,): cs for did, cs in cands.solo.items()}
    by_block.update(cands.pairs)
    eligible = {frozenset(key) for key in cands.pairs}
    best = None
    visited = 0
    for grouping in pairings(cands.order, eligible):
        blocks = [by_block[b] for b in grouping]
        for choice in itertools.product(*blocks):
            visited += 1
            cost = sum(c.cost for c in choice)
            if best is None or cost < best[0]:
                best = (cost, list(choice))
    stats = _stats(instance, cands, visited, t0, PROVEN_OPTIMAL)
    return _finish(instance, best[1], PROVEN_OPTIMAL, stats)
