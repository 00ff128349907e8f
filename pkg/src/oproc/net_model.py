"""Topology, demand and transceiver data model.

Topologies and transceiver tables are loaded from JSON documents; the
COST239 and NSFNET topologies ship with the package under ``data/``.
"""

from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

UNCAPACITATED = None

TWO_TO_MANY = "two-to-many"


class TopologyError(ValueError):
    pass


class TopologyParseError(TopologyError):
    pass


class DisconnectedTopologyError(TopologyError):
    pass


class DuplicateLinkError(TopologyError):
    pass


class DanglingEndpointError(TopologyError):
    pass


class TrafficError(ValueError):
    pass


class UnknownSignalError(KeyError):
    """No transceiver entry for a (rate, format) combination."""


@dataclass(frozen=True)
class Link:
    id: str
    a: str
    b: str
    capacity_slices: int | None = UNCAPACITATED

    def __post_init__(self):
        if self.a == self.b:
            raise TopologyError(f"link {self.id} is a self-loop on {self.a}")
        if self.capacity_slices is not None and self.capacity_slices < 1:
            raise TopologyError(f"link {self.id} has capacity {self.capacity_slices} < 1")

    @property
    def endpoints(self) -> frozenset:
        return frozenset((self.a, self.b))

    def other(self, node: str) -> str:
        return self.b if node == self.a else self.a


def link_id(a: str, b: str) -> str:
    return f"{a}-{b}"


@dataclass(frozen=True)
class Topology:
    name: str
    nodes: frozenset
    links: tuple

    def __post_init__(self):
        seen = {}
        for link in self.links:
            for end in (link.a, link.b):
                if end not in self.nodes:
                    raise DanglingEndpointError(f"link {link.id} references unknown node {end!r}")
            if link.endpoints in seen:
                raise DuplicateLinkError(
                    f"duplicate link between {link.a!r} and {link.b!r} ({seen[link.endpoints]}, {link.id})"
                )
            seen[link.endpoints] = link.id
        ids = [link.id for link in self.links]
        if len(set(ids)) != len(ids):
            raise DuplicateLinkError("link ids are not unique")
        # derived lookup tables; not part of equality
        adj = {n: [] for n in self.nodes}
        by_pair = {}
        by_id = {}
        for link in self.links:
            adj[link.a].append(link.b)
            adj[link.b].append(link.a)
            by_pair[link.endpoints] = link
            by_id[link.id] = link
        object.__setattr__(self, "_adj", {n: tuple(sorted(v)) for n, v in adj.items()})
        object.__setattr__(self, "_by_pair", by_pair)
        object.__setattr__(self, "_by_id", by_id)
        if self.nodes and not _connected(self.nodes, self._adj):
            raise DisconnectedTopologyError(f"topology {self.name!r} is not connected")

    def neighbors(self, node: str) -> tuple:
        """Adjacent nodes in sorted order."""
        return self._adj[node]

    def link_between(self, a: str, b: str) -> Link:
        try:
            return self._by_pair[frozenset((a, b))]
        except KeyError:
            raise KeyError(f"no link between {a!r} and {b!r}") from None

    def link(self, lid: str) -> Link:
        return self._by_id[lid]

    def sorted_nodes(self) -> list:
        return sorted(self.nodes)

    def to_dict(self) -> dict:
        links = []
        for link in self.links:
            entry = {"a": link.a, "b": link.b}
            if link.id != link_id(link.a, link.b):
                entry["id"] = link.id
            if link.capacity_slices is not None:
                entry["capacity_slices"] = link.capacity_slices
            links.append(entry)
        return {"name": self.name, "nodes": self.sorted_nodes(), "links": links}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def _connected(nodes, adj) -> bool:
    start = min(nodes)
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == len(nodes)


def topology_from_dict(doc: Mapping) -> Topology:
    if not isinstance(doc, Mapping):
        raise TopologyParseError("topology document must be a JSON object")
    try:
        name = str(doc.get("name", ""))
        raw_nodes = doc["nodes"]
        raw_links = doc["links"]
    except KeyError as e:
        raise TopologyParseError(f"topology document missing key {e.args[0]!r}") from None
    if not isinstance(raw_nodes, list) or not isinstance(raw_links, list):
        raise TopologyParseError("'nodes' and 'links' must be lists")
    nodes = [str(n) for n in raw_nodes]
    if len(set(nodes)) != len(nodes):
        raise TopologyParseError("duplicate node identifiers")
    links = []
    for i, entry in enumerate(raw_links):
        if not isinstance(entry, Mapping) or "a" not in entry or "b" not in entry:
            raise TopologyParseError(f"link #{i} must be an object with 'a' and 'b'")
        a, b = str(entry["a"]), str(entry["b"])
        cap = entry.get("capacity_slices")
        if cap is not None and (not isinstance(cap, int) or isinstance(cap, bool)):
            raise TopologyParseError(f"link #{i} capacity_slices must be an integer")
        links.append(Link(str(entry.get("id", link_id(a, b))), a, b, cap))
    return Topology(name, frozenset(nodes), tuple(links))


def load_topology(document: str | bytes | Mapping) -> Topology:
    """Parse and validate a topology JSON document (text or already decoded)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise TopologyParseError(f"invalid JSON: {e}") from None
    return topology_from_dict(document)


def read_topology(path) -> Topology:
    with open(path) as fh:
        return load_topology(fh.read())


def bundled_topology(name: str) -> Topology:
    """Load one of the packaged topologies: ``cost239`` or ``nsfnet``."""
    fname = f"{name.lower()}.json"
    data = resources.files("oproc") / "data" / fname
    if not data.is_file():
        raise FileNotFoundError(f"no bundled topology {name!r}")
    return load_topology(data.read_text())


def resolve_topology(ref: str) -> Topology:
    """A bundled topology name or a path to a topology file."""
    try:
        return bundled_topology(ref)
    except FileNotFoundError:
        return read_topology(ref)


@dataclass(frozen=True)
class Demand:
    id: str
    src: str
    dst: str
    rate_gbps: int
    protected: bool = True
    # pins the transmitted format; None lets provisioning pick the cheapest
    format: str | None = None

    def __post_init__(self):
        if self.src == self.dst:
            raise TrafficError(f"demand {self.id}: src == dst ({self.src!r})")
        if self.rate_gbps <= 0:
            raise TrafficError(f"demand {self.id}: non-positive rate {self.rate_gbps}")

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "src": self.src,
            "dst": self.dst,
            "rate_gbps": self.rate_gbps,
            "protected": self.protected,
        }
        if self.format is not None:
            d["format"] = self.format
        return d


@dataclass(frozen=True)
class DemandSet:
    demands: tuple
    seed: int | None = None
    model: str = TWO_TO_MANY

    def __post_init__(self):
        ids = [d.id for d in self.demands]
        if len(set(ids)) != len(ids):
            raise TrafficError("duplicate demand ids")
        if self.model == TWO_TO_MANY and self.demands:
            srcs = {d.src for d in self.demands}
            if len(srcs) != 2:
                raise TrafficError(f"two-to-many set needs exactly 2 sources, got {len(srcs)}")
            if srcs & {d.dst for d in self.demands}:
                raise TrafficError("two-to-many destinations must not be sources")

    def __iter__(self):
        return iter(self.demands)

    def __len__(self):
        return len(self.demands)

    @property
    def sources(self) -> list:
        return sorted({d.src for d in self.demands})

    @property
    def destinations(self) -> list:
        return sorted({d.dst for d in self.demands})

    def to_dict(self) -> dict:
        return {
            "demands": [d.to_dict() for d in self.demands],
            "seed": self.seed,
            "model": self.model,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def demand_set_from_dict(doc) -> DemandSet:
    # a bare list of demands is accepted as well
    if isinstance(doc, list):
        doc = {"demands": doc, "seed": None, "model": "custom"}
    try:
        demands = tuple(
            Demand(
                str(d["id"]),
                str(d["src"]),
                str(d["dst"]),
                int(d["rate_gbps"]),
                bool(d.get("protected", True)),
                d.get("format"),
            )
            for d in doc["demands"]
        )
    except (KeyError, TypeError) as e:
        raise TrafficError(f"malformed traffic document: {e}") from None
    return DemandSet(demands, doc.get("seed"), doc.get("model", TWO_TO_MANY))


def load_traffic(document: str | Mapping | list) -> DemandSet:
    if isinstance(document, (str, bytes)):
        document = json.loads(document)
    return demand_set_from_dict(document)


def generate_traffic(
    topology: Topology,
    n_destinations: int | str,
    rate_gbps: int,
    protected: bool = True,
    seed: int = 0,
    per_source: bool = False,
) -> DemandSet:
    """Draw a two-to-many demand set.

    Two sources are picked uniformly at random, then ``n_destinations``
    distinct destinations among the remaining nodes (``"all"`` takes every
    one). Each source gets a demand to every destination unless
    ``per_source`` is set, in which case destinations are dealt
    alternately between the two sources.
    """
    nodes = topology.sorted_nodes()
    if n_destinations == "all":
        n_destinations = len(nodes) - 2
    n_destinations = int(n_destinations)
    if n_destinations < 1:
        raise TrafficError("need at least one destination")
    if len(nodes) < n_destinations + 2:
        raise TrafficError(
            f"topology has {len(nodes)} nodes, need {n_destinations + 2} for 2 sources "
            f"and {n_destinations} destinations"
        )
    rng = random.Random(seed)
    sources = rng.sample(nodes, 2)
    rest = [n for n in nodes if n not in sources]
    dests = rng.sample(rest, n_destinations)
    pairs = []
    if per_source:
        pairs = [(sources[i % 2], dst) for i, dst in enumerate(dests)]
    else:
        pairs = [(src, dst) for src in sources for dst in dests]
    demands = tuple(
        Demand(f"d{i}", src, dst, rate_gbps, protected) for i, (src, dst) in enumerate(pairs)
    )
    return DemandSet(demands, seed, TWO_TO_MANY)


Signal = tuple  # (rate_gbps, format)


@dataclass(frozen=True)
class TransceiverTable:
    entries: Mapping = field(default_factory=dict)
    aggregation_rule: Mapping = field(default_factory=dict)
    xor_rule: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for sig, n in self.entries.items():
            if n < 1:
                raise ValueError(f"{sig} needs a positive slice count, got {n}")
        for name, rule in (("aggregation", self.aggregation_rule), ("xor", self.xor_rule)):
            for inputs, out in rule.items():
                if len(inputs) != 2:
                    raise ValueError(f"{name} rule {inputs} must have two inputs")
                if out not in self.entries:
                    raise ValueError(f"{name} rule output {out} has no transceiver entry")
        for (x, y), out in self.aggregation_rule.items():
            if out[0] != x[0] + y[0]:
                raise ValueError(f"aggregation {x} + {y} -> {out} does not conserve rate")
        for (x, y), out in self.xor_rule.items():
            if x[0] == y[0] and out[0] != x[0]:
                raise ValueError(f"xor of two {x[0]}G signals must stay at {x[0]}G, got {out}")

    def slices_for(self, rate_gbps: int, format: str) -> int:
        try:
            return self.entries[(rate_gbps, format)]
        except KeyError:
            raise UnknownSignalError(f"no transceiver for {rate_gbps}G {format}") from None

    def formats_for(self, rate_gbps: int) -> list:
        """Formats available at a rate, cheapest first, ties by name."""
        opts = [(n, f) for (r, f), n in self.entries.items() if r == rate_gbps]
        return [f for _, f in sorted(opts)]

    def cheapest(self, rate_gbps: int) -> Signal:
        fmts = self.formats_for(rate_gbps)
        if not fmts:
            raise UnknownSignalError(f"no transceiver for {rate_gbps}G")
        return (rate_gbps, fmts[0])

    def _rule(self, rule, a: Signal, b: Signal):
        out = rule.get((a, b))
        if out is None:
            out = rule.get((b, a))
        return out

    def aggregate(self, a: Signal, b: Signal) -> Signal | None:
        return self._rule(self.aggregation_rule, a, b)

    def xor(self, a: Signal, b: Signal) -> Signal | None:
        return self._rule(self.xor_rule, a, b)

    def with_rules(self, aggregation=None, xor=None) -> "TransceiverTable":
        agg = dict(self.aggregation_rule)
        agg.update(aggregation or {})
        xr = dict(self.xor_rule)
        xr.update(xor or {})
        return TransceiverTable(dict(self.entries), agg, xr)

    def to_dict(self) -> dict:
        def sig(s):
            return {"rate_gbps": s[0], "format": s[1]}

        return {
            "entries": [
                {"rate_gbps": r, "format": f, "slices": n}
                for (r, f), n in sorted(self.entries.items())
            ],
            "aggregation_rules": [
                {"in_a": sig(a), "in_b": sig(b), "out": sig(o)}
                for (a, b), o in sorted(self.aggregation_rule.items())
            ],
            "xor_rules": [
                {"in_a": sig(a), "in_b": sig(b), "out": sig(o)}
                for (a, b), o in sorted(self.xor_rule.items())
            ],
        }


def slices_for(table: TransceiverTable, rate_gbps: int, format: str) -> int:
    return table.slices_for(rate_gbps, format)


def load_transceivers(document: str | Mapping) -> TransceiverTable:
    if isinstance(document, (str, bytes)):
        document = json.loads(document)

    def sig(d):
        return (int(d["rate_gbps"]), str(d["format"]))

    def rules(items: Iterable):
        return {(sig(r["in_a"]), sig(r["in_b"])): sig(r["out"]) for r in items}

    entries = {sig(e): int(e["slices"]) for e in document["entries"]}
    return TransceiverTable(
        entries,
        rules(document.get("aggregation_rules", [])),
        rules(document.get("xor_rules", [])),
    )


QPSK = "QPSK"
QAM16 = "16QAM"


def default_table() -> TransceiverTable:
    """Slice counts reproducing the two-channel total of 11 slices.

    Aggregation merges two 100G QPSK channels into 200G 16-QAM and a
    100G + 200G QPSK pair into 300G 16-QAM. XOR keeps the inputs' signal.
    """
    entries = {
        (100, QPSK): 4,
        (200, QPSK): 7,
        (200, QAM16): 4,
        (300, QAM16): 6,
    }
    aggregation = {
        ((100, QPSK), (100, QPSK)): (200, QAM16),
        ((100, QPSK), (200, QPSK)): (300, QAM16),
    }
    xor = {(s, s): s for s in entries}
    return TransceiverTable(entries, aggregation, xor)
