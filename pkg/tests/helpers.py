"""Shared builders for tests: the five-node toy network and random instances."""

import random

from oproc.net_model import QPSK, QAM16, Demand, DemandSet, Link, Topology, default_table, link_id
from oproc.pathing import path_from_nodes
from oproc.solver import DesignInstance

TOY_LINKS = [("A", "Z"), ("B", "Z"), ("A", "X"), ("B", "X"), ("X", "E"), ("E", "Z")]

# the encoder in the toy example turns a 100G and a 200G QPSK input into 200G 16-QAM
TOY_XOR_RULE = {((100, QPSK), (200, QPSK)): (200, QAM16)}


def make_topology(name, edges, capacity=None):
    nodes = frozenset(n for e in edges for n in e)
    cap = capacity or {}
    links = tuple(Link(link_id(a, b), a, b, cap.get((a, b))) for a, b in edges)
    return Topology(name, nodes, links)


def toy_topology(capacity=None):
    return make_topology("toy", TOY_LINKS, capacity)


def toy_demands():
    return (
        Demand("A", "A", "Z", 100, True, QPSK),
        Demand("B", "B", "Z", 200, True, QPSK),
    )


def toy_table():
    return default_table().with_rules(xor=TOY_XOR_RULE)


def toy_routes(topo):
    p = lambda *n: path_from_nodes(topo, n)  # noqa: E731
    return {
        "wA": p("A", "Z"),
        "wB": p("B", "Z"),
        "fA": p("A", "X"),
        "fB": p("B", "X"),
        "pA": p("A", "X", "E", "Z"),
        "pB": p("B", "X", "E", "Z"),
        "trunk": p("X", "E", "Z"),
    }


def ring(n):
    names = [chr(ord("a") + i) for i in range(n)]
    return make_topology(f"ring{n}", [(names[i], names[(i + 1) % n]) for i in range(n)])


def random_two_edge_connected(rng, n, extra):
    """A Hamiltonian ring over shuffled nodes plus random chords."""
    names = [f"n{i}" for i in range(n)]
    order = names[:]
    rng.shuffle(order)
    edges = {frozenset((order[i], order[(i + 1) % n])) for i in range(n)}
    for _ in range(extra):
        a, b = rng.sample(names, 2)
        edges.add(frozenset((a, b)))
    return make_topology(f"rand{n}", [tuple(sorted(e)) for e in sorted(edges, key=sorted)])


def random_instance(seed, paradigm, max_nodes=6, max_demands=4, max_k=3):
    rng = random.Random(seed)
    n = rng.randint(4, max_nodes)
    topo = random_two_edge_connected(rng, n, rng.randint(0, n))
    nodes = topo.sorted_nodes()
    srcs = rng.sample(nodes, 2)
    dsts = [x for x in nodes if x not in srcs]
    demands = []
    for i in range(rng.randint(1, max_demands)):
        demands.append(Demand(f"d{i}", rng.choice(srcs), rng.choice(dsts), 100 if paradigm == "aggregation" else 200))
    return DesignInstance(
        topo, DemandSet(tuple(demands), seed, "custom"), default_table(), paradigm, rng.randint(1, max_k)
    )
