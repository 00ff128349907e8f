import itertools

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oproc.net_model import bundled_topology
from oproc.pathing import NoPathError, Path, PathPair, disjoint_pairs, k_shortest_paths, path_from_nodes

from helpers import make_topology, random_two_edge_connected, ring


def all_simple_paths(topo, src, dst):
    """Exhaustive oracle, sorted by (hops, node sequence)."""
    g = nx.Graph()
    g.add_edges_from((l.a, l.b) for l in topo.links)
    found = [tuple(p) for p in nx.all_simple_paths(g, src, dst)]
    return sorted(found, key=lambda p: (len(p), p))


def check_path(topo, p: Path):
    assert len(set(p.nodes)) == len(p.nodes)
    assert p.hop_count == len(p.links) == len(p.nodes) - 1
    for (u, v), lid in zip(zip(p.nodes, p.nodes[1:]), p.links):
        assert topo.link(lid).endpoints == {u, v}


def test_single_link():
    topo = make_topology("pair", [("a", "b")])
    paths = k_shortest_paths(topo, "a", "b", 3)
    assert [p.nodes for p in paths] == [("a", "b")]
    assert paths[0].hop_count == 1


def test_ring_tie_break():
    paths = k_shortest_paths(ring(4), "a", "c", 2)
    assert [p.nodes for p in paths] == [("a", "b", "c"), ("a", "d", "c")]


def test_bad_arguments():
    with pytest.raises(ValueError):
        k_shortest_paths(ring(4), "a", "a", 2)
    with pytest.raises(ValueError):
        k_shortest_paths(ring(4), "a", "b", 0)


def test_no_path_is_reported():
    topo = make_topology("pair", [("a", "b")])
    # the topology itself cannot be disconnected, so probe an absent node
    with pytest.raises((NoPathError, KeyError)):
        k_shortest_paths(topo, "a", "zz", 1)


def test_cost239_all_pairs_match_enumeration():
    topo = bundled_topology("cost239")
    for src, dst in itertools.permutations(topo.sorted_nodes(), 2):
        got = [p.nodes for p in k_shortest_paths(topo, src, dst, 5)]
        assert got == all_simple_paths(topo, src, dst)[:5], (src, dst)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 8), st.integers(0, 8), st.integers(1, 40), st.randoms(use_true_random=False))
def test_small_graphs_match_enumeration(n, extra, k, rng):
    topo = random_two_edge_connected(rng, n, extra)
    src, dst = rng.sample(topo.sorted_nodes(), 2)
    paths = k_shortest_paths(topo, src, dst, k)
    for p in paths:
        check_path(topo, p)
    assert [p.nodes for p in paths] == all_simple_paths(topo, src, dst)[:k]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 8), st.sampled_from(["cost239", "nsfnet"]), st.randoms(use_true_random=False))
def test_prefix_property_and_determinism(k, name, rng):
    topo = bundled_topology(name)
    src, dst = rng.sample(topo.sorted_nodes(), 2)
    longer = k_shortest_paths(topo, src, dst, k + 3)
    shorter = k_shortest_paths(topo, src, dst, k)
    assert longer[:k] == shorter
    assert k_shortest_paths(topo, src, dst, k + 3) == longer


def test_disjoint_pairs_ring():
    pairs = disjoint_pairs(ring(4), "a", "c", 2)
    assert [(p.working.nodes, p.protection.nodes) for p in pairs] == [
        (("a", "b", "c"), ("a", "d", "c")),
        (("a", "d", "c"), ("a", "b", "c")),
    ]


def test_disjoint_pairs_single_link():
    assert disjoint_pairs(make_topology("pair", [("a", "b")]), "a", "b", 5) == []


def test_disjoint_pairs_bridge():
    # the a-b bridge blocks any disjoint alternative
    topo = make_topology("bridge", [("a", "b"), ("b", "c"), ("c", "d"), ("d", "b")])
    assert disjoint_pairs(topo, "a", "c", 5) == []


def test_nsfnet_pairs_match_product_filter():
    topo = bundled_topology("nsfnet")
    for src, dst in itertools.permutations(topo.sorted_nodes(), 2):
        paths = k_shortest_paths(topo, src, dst, 5)
        expected = [
            (p.nodes, q.nodes)
            for (i, p), (j, q) in sorted(
                itertools.product(enumerate(paths), repeat=2),
                key=lambda t: (t[0][1].hop_count + t[1][1].hop_count, t[0][0], t[1][0]),
            )
            if i != j and not set(p.links) & set(q.links)
        ]
        got = [(pp.working.nodes, pp.protection.nodes) for pp in disjoint_pairs(topo, src, dst, 5)]
        assert got == expected


def test_pathpair_rejects_shared_link():
    topo = ring(4)
    p = path_from_nodes(topo, "abc")
    with pytest.raises(ValueError):
        PathPair(p, p)


def test_path_rejects_loop():
    with pytest.raises(ValueError):
        Path(("a", "b", "a"), ("a-b", "a-b"))


def test_split_at():
    p = path_from_nodes(ring(5), "abcd")
    head, tail = p.split_at("b")
    assert head.nodes == ("a", "b") and tail.nodes == ("b", "c", "d")
    assert head.links + tail.links == p.links
