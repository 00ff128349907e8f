"""Provisioning configurations under bypass, aggregation and XOR coding.

A :class:`ProvisionConfig` is one complete way of serving a demand (bypass)
or a pair of demands (aggregated/encoded) as a set of lightpaths. Its cost
is the wavelength-link metric: slices times hop count, summed over its
lightpaths.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .net_model import Demand, Topology, TransceiverTable
from .pathing import Path, PathPair

BYPASS = "bypass"
AGGREGATED = "aggregated"
ENCODED = "encoded"

WORKING = "working"
PROTECTION = "protection"
FEED = "feed"
ROLE_AGGREGATED = "aggregated"
ROLE_ENCODED = "encoded"

UNAFFECTED = "unaffected"
RECOVERED_PROTECTION = "recovered-via-protection"
RECOVERED_DECODE = "recovered-via-decode"
LOST = "LOST"

PROVEN_OPTIMAL = "proven-optimal-over-candidates"
HEURISTIC = "heuristic"


class ProvisionError(ValueError):
    pass


class MissingRuleError(ProvisionError):
    pass


class MixNodeError(ProvisionError):
    pass


class DisjointnessError(ProvisionError):
    def __init__(self, message, link=None):
        super().__init__(message)
        self.link = link


class SignalMismatchError(ProvisionError):
    pass


class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class Lightpath:
    route: Path
    rate_gbps: int
    format: str
    slices: int
    role: str
    carries: frozenset
    # which copy of the carried demands this lightpath belongs to
    chain: str = WORKING
    id: str = ""

    @property
    def cost(self) -> int:
        return self.slices * self.route.hop_count

    def to_dict(self) -> dict:
        return {
            "route": list(self.route.nodes),
            "rate_gbps": self.rate_gbps,
            "format": self.format,
            "slices": self.slices,
            "role": self.role,
            "chain": self.chain,
            "carries": sorted(self.carries),
        }


def _lightpath(table, route, signal, role, carries, chain) -> Lightpath:
    rate, fmt = signal
    return Lightpath(route, rate, fmt, table.slices_for(rate, fmt), role, frozenset(carries), chain)


@dataclass(frozen=True)
class ProvisionConfig:
    kind: str
    demands: tuple
    lightpaths: tuple
    mix_node: str | None = None

    def __post_init__(self):
        named = []
        for i, lp in enumerate(self.lightpaths):
            named.append(lp if lp.id else _with_id(lp, f"lp{i}"))
        object.__setattr__(self, "lightpaths", tuple(named))
        object.__setattr__(self, "cost", sum(lp.cost for lp in self.lightpaths))

    @property
    def demand_ids(self) -> tuple:
        return tuple(d.id for d in self.demands)

    def chain(self, demand_id, chain) -> list:
        return [lp for lp in self.lightpaths if lp.chain == chain and demand_id in lp.carries]

    def signature(self) -> tuple:
        return (
            self.kind,
            self.demand_ids,
            self.mix_node,
            tuple((lp.route.nodes, lp.rate_gbps, lp.format, lp.role, lp.chain) for lp in self.lightpaths),
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "demand_ids": list(self.demand_ids),
            "mix_node": self.mix_node,
            "lightpaths": [lp.to_dict() for lp in self.lightpaths],
            "cost": self.cost,
        }


def _with_id(lp: Lightpath, lid: str) -> Lightpath:
    return Lightpath(lp.route, lp.rate_gbps, lp.format, lp.slices, lp.role, lp.carries, lp.chain, lid)


@dataclass(frozen=True)
class MixedRoute:
    """Two routes joined over a shared trunk.

    ``feeds[i]`` runs from demand i's source to the mix node, ``trunk``
    from the mix node onward, and ``tails[i]`` from the trunk's end to
    demand i's destination (zero hops when both demands share it).
    """

    feeds: tuple
    trunk: Path
    tails: tuple | None = None

    def __post_init__(self):
        if self.tails is None:
            end = self.trunk.dst
            object.__setattr__(self, "tails", (Path((end,), ()), Path((end,), ())))
        for i in range(2):
            if self.feeds[i].dst != self.trunk.src:
                raise MixNodeError(f"feed {i} ends at {self.feeds[i].dst}, not at mix node {self.trunk.src}")
            if self.tails[i].src != self.trunk.dst:
                raise MixNodeError(f"tail {i} does not start at trunk end {self.trunk.dst}")

    @property
    def mix_node(self):
        return self.trunk.src

    @property
    def split_node(self):
        return self.trunk.dst

    def full_route(self, i) -> Path:
        f, t, tail = self.feeds[i], self.trunk, self.tails[i]
        return Path(f.nodes + t.nodes[1:] + tail.nodes[1:], f.links + t.links + tail.links)


def merge_routes(p: Path, q: Path) -> MixedRoute | None:
    """Join two same-destination paths over their longest common suffix."""
    if p.dst != q.dst:
        return None
    n = 0
    while n < min(p.hop_count, q.hop_count) and p.links[-1 - n] == q.links[-1 - n]:
        n += 1
    if n == 0:
        return None
    mix = p.nodes[-1 - n]
    fp, trunk = p.split_at(mix)
    fq, _ = q.split_at(mix)
    return MixedRoute((fp, fq), trunk)


def merge_segment(p: Path, q: Path) -> MixedRoute | None:
    """Join two paths over their first common contiguous run of links."""
    qpos = {lid: i for i, lid in enumerate(q.links)}
    for i, lid in enumerate(p.links):
        j = qpos.get(lid)
        if j is None or p.nodes[i] != q.nodes[j]:
            continue
        n = 1
        while (
            i + n < p.hop_count
            and j + n < q.hop_count
            and p.links[i + n] == q.links[j + n]
        ):
            n += 1
        mix, split = p.nodes[i], p.nodes[i + n]
        fp, rest_p = p.split_at(mix)
        trunk, tp = rest_p.split_at(split)
        fq, rest_q = q.split_at(mix)
        _, tq = rest_q.split_at(split)
        return MixedRoute((fp, fq), trunk, (tp, tq))
    return None


def demand_signal(demand: Demand, table: TransceiverTable) -> tuple:
    if demand.format is not None:
        table.slices_for(demand.rate_gbps, demand.format)
        return (demand.rate_gbps, demand.format)
    return table.cheapest(demand.rate_gbps)


def _links(lps) -> set:
    return {lid for lp in lps for lid in lp.route.links}


def build_bypass(demand: Demand, routes: PathPair | Path, table: TransceiverTable) -> ProvisionConfig:
    signal = demand_signal(demand, table)
    if isinstance(routes, PathPair):
        working, protection = routes.working, routes.protection
    else:
        if demand.protected:
            raise ProvisionError(f"demand {demand.id} is protected and needs a PathPair")
        working, protection = routes, None
    if (working.src, working.dst) != (demand.src, demand.dst):
        raise ProvisionError(f"route {working} does not connect demand {demand.id}")
    lps = [_lightpath(table, working, signal, WORKING, {demand.id}, WORKING)]
    if protection is not None:
        lps.append(_lightpath(table, protection, signal, PROTECTION, {demand.id}, PROTECTION))
    return ProvisionConfig(BYPASS, (demand,), tuple(lps))


def _check_pair(demands):
    if len(demands) != 2 or demands[0].id == demands[1].id:
        raise ProvisionError("a combined configuration needs two distinct demands")


def _aggregation_inputs(demands, table):
    """Cheapest pair of input signals for which an aggregation rule exists."""
    options = []
    for d in demands:
        if d.format is not None:
            options.append([(d.rate_gbps, d.format)])
        else:
            options.append([(d.rate_gbps, f) for f in table.formats_for(d.rate_gbps)])
    best = None
    for a in options[0]:
        for b in options[1]:
            out = table.aggregate(a, b)
            if out is None:
                continue
            score = table.slices_for(*a) + table.slices_for(*b)
            if best is None or score < best[0]:
                best = (score, a, b, out)
    if best is None:
        raise MissingRuleError(f"no aggregation rule for demands {demands[0].id}, {demands[1].id}")
    return best[1], best[2], best[3]


def _chain_lightpaths(table, demands, route, signals, chain, combined_signal, combined_role):
    d1, d2 = demands
    if isinstance(route, MixedRoute):
        for i, d in enumerate(demands):
            full = route.full_route(i)
            if (full.src, full.dst) != (d.src, d.dst):
                raise MixNodeError(f"{chain} route {i} does not connect demand {d.id}")
        lps = []
        for i, d in enumerate(demands):
            if route.feeds[i].hop_count:
                lps.append(_lightpath(table, route.feeds[i], signals[i], FEED, {d.id}, chain))
        if route.trunk.hop_count:
            lps.append(_lightpath(table, route.trunk, combined_signal, combined_role, {d1.id, d2.id}, chain))
        for i, d in enumerate(demands):
            if route.tails[i].hop_count:
                lps.append(_lightpath(table, route.tails[i], signals[i], FEED, {d.id}, chain))
        return lps
    role = WORKING if chain == WORKING else PROTECTION
    lps = []
    for i, d in enumerate(demands):
        p = route[i]
        if (p.src, p.dst) != (d.src, d.dst):
            raise ProvisionError(f"{chain} route {p} does not connect demand {d.id}")
        lps.append(_lightpath(table, p, signals[i], role, {d.id}, chain))
    return lps


def _check_own_disjoint(config: ProvisionConfig):
    for d in config.demands:
        w = _links(config.chain(d.id, WORKING))
        p = _links(config.chain(d.id, PROTECTION))
        common = sorted(w & p)
        if common:
            raise DisjointnessError(
                f"working and protection of {d.id} share link {common[0]}", common[0]
            )


def build_aggregated(
    demands: Sequence[Demand],
    table: TransceiverTable,
    working: MixedRoute | tuple,
    protection: MixedRoute | tuple | None = None,
) -> ProvisionConfig:
    """Serve two demands with their working and/or protection copies aggregated.

    Each of ``working`` and ``protection`` is either a :class:`MixedRoute`
    (that copy is aggregated) or a pair of separate paths.
    """
    _check_pair(demands)
    demands = tuple(demands)
    mixed = [r for r in (working, protection) if isinstance(r, MixedRoute)]
    if not mixed:
        raise ProvisionError("nothing to aggregate: neither copy uses a MixedRoute")
    if any(d.protected for d in demands) and protection is None:
        raise ProvisionError("protected demands need a protection route")
    sig_a, sig_b, out = _aggregation_inputs(demands, table)
    own = (demand_signal(demands[0], table), demand_signal(demands[1], table))
    lps = []
    for chain, route in ((WORKING, working), (PROTECTION, protection)):
        if route is None:
            continue
        if isinstance(route, MixedRoute):
            lps += _chain_lightpaths(table, demands, route, (sig_a, sig_b), chain, out, ROLE_AGGREGATED)
        else:
            lps += _chain_lightpaths(table, demands, route, own, chain, None, None)
    config = ProvisionConfig(AGGREGATED, demands, tuple(lps), mixed[0].mix_node)
    _check_own_disjoint(config)
    return config


def build_encoded(
    demands: Sequence[Demand],
    table: TransceiverTable,
    working: tuple,
    protection: MixedRoute,
    strict: bool = True,
) -> ProvisionConfig:
    """Two separate working lightpaths plus XOR-encoded protection.

    Protection feeds meet at the mix node, the encoded trunk runs to the
    shared destination where either demand is recovered from the trunk and
    the other demand's working signal. ``strict`` demands identical input
    signals.
    """
    _check_pair(demands)
    demands = tuple(demands)
    d1, d2 = demands
    if d1.dst != d2.dst:
        raise ProvisionError("encoded demands must share the destination")
    if protection.trunk.hop_count == 0 or protection.split_node != d1.dst:
        raise MixNodeError("encoded trunk must run from the mix node to the destination")
    sigs = (demand_signal(d1, table), demand_signal(d2, table))
    if strict and sigs[0] != sigs[1]:
        raise SignalMismatchError(f"encoding needs equal signals, got {sigs[0]} and {sigs[1]}")
    out = table.xor(*sigs)
    if out is None:
        raise MissingRuleError(f"no xor rule for {sigs[0]} and {sigs[1]}")
    lps = _chain_lightpaths(table, demands, working, sigs, WORKING, None, None)
    lps += _chain_lightpaths(table, demands, protection, sigs, PROTECTION, out, ROLE_ENCODED)
    config = ProvisionConfig(ENCODED, demands, tuple(lps), protection.mix_node)
    # any link shared by a working route and another working route or the
    # encoded chain leaves the XOR uninvertible when it fails
    w = [set(working[0].links), set(working[1].links)]
    common = sorted(w[0] & w[1])
    if common:
        raise DisjointnessError(f"working routes share link {common[0]}", common[0])
    chain_links = _links(lp for lp in lps if lp.chain == PROTECTION)
    for i in range(2):
        common = sorted(w[i] & chain_links)
        if common:
            raise DisjointnessError(
                f"working route of {demands[i].id} shares link {common[0]} with the encoded chain",
                common[0],
            )
    return config


@dataclass(frozen=True)
class Solution:
    demands: tuple
    configs: tuple
    optimality: str = HEURISTIC
    stats: dict = field(default_factory=dict, compare=False)

    @property
    def total_cost(self) -> int:
        return sum(c.cost for c in self.configs)

    def to_dict(self) -> dict:
        return {
            "demands": [d.to_dict() for d in self.demands],
            "configs": [c.to_dict() for c in self.configs],
            "total_cost": self.total_cost,
            "optimality": self.optimality,
        }


def check_cover(solution: Solution):
    counts = Counter(did for c in solution.configs for did in c.demand_ids)
    for d in solution.demands:
        if counts[d.id] != 1:
            raise CoverageError(f"demand {d.id} covered {counts[d.id]} times")
    extra = set(counts) - {d.id for d in solution.demands}
    if extra:
        raise CoverageError(f"configs cover unknown demands {sorted(extra)}")


def total_cost(solution: Solution) -> int:
    check_cover(solution)
    return sum(c.cost for c in solution.configs)


@dataclass
class FailureReport:
    # failed link id -> demand id -> status
    outcomes: dict

    @property
    def survivable(self) -> bool:
        return all(s != LOST for per in self.outcomes.values() for s in per.values())

    def lost(self) -> list:
        return [(lid, did) for lid, per in self.outcomes.items() for did, s in per.items() if s == LOST]


def _intact(lps, failed) -> bool:
    return bool(lps) and all(failed not in lp.route.links for lp in lps)


def _status(config: ProvisionConfig, demand_id, failed) -> str:
    if _intact(config.chain(demand_id, WORKING), failed):
        return UNAFFECTED
    backup = config.chain(demand_id, PROTECTION)
    if not _intact(backup, failed):
        return LOST
    if config.kind == ENCODED:
        partner = next(d.id for d in config.demands if d.id != demand_id)
        if _intact(config.chain(partner, WORKING), failed):
            return RECOVERED_DECODE
        return LOST
    return RECOVERED_PROTECTION


def verify_survivability(solution: Solution, topology: Topology) -> FailureReport:
    """Replay every single-link failure against the solution."""
    outcomes = {}
    for link in topology.links:
        per = {}
        for config in solution.configs:
            for d in config.demands:
                per[d.id] = _status(config, d.id, link.id)
        outcomes[link.id] = per
    return FailureReport(outcomes)


@dataclass
class CapacityReport:
    usage: dict
    overloaded: list

    @property
    def feasible(self) -> bool:
        return not self.overloaded


def check_capacity(solution: Solution, topology: Topology) -> CapacityReport:
    usage = {link.id: 0 for link in topology.links}
    for config in solution.configs:
        for lp in config.lightpaths:
            for lid in lp.route.links:
                usage[lid] += lp.slices
    overloaded = [
        link.id
        for link in topology.links
        if link.capacity_slices is not None and usage[link.id] > link.capacity_slices
    ]
    return CapacityReport(usage, overloaded)

