import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oproc.net_model import (
    QAM16,
    QPSK,
    DanglingEndpointError,
    DisconnectedTopologyError,
    DuplicateLinkError,
    TopologyParseError,
    TrafficError,
    TransceiverTable,
    UnknownSignalError,
    bundled_topology,
    default_table,
    generate_traffic,
    load_topology,
    load_traffic,
    load_transceivers,
    slices_for,
)

from helpers import random_two_edge_connected, ring


def test_two_node_document():
    topo = load_topology(json.dumps({"name": "pair", "nodes": ["a", "b"], "links": [{"a": "a", "b": "b"}]}))
    assert len(topo.links) == 1
    assert topo.nodes == {"a", "b"}
    assert topo.links[0].capacity_slices is None


@pytest.mark.parametrize("name,nodes,links", [("cost239", 11, 26), ("nsfnet", 14, 21)])
def test_bundled_topologies(name, nodes, links):
    topo = bundled_topology(name)
    assert len(topo.nodes) == nodes
    assert len(topo.links) == links


def test_cost239_is_dense_enough_for_protection():
    topo = bundled_topology("cost239")
    assert min(len(topo.neighbors(n)) for n in topo.nodes) >= 4


@pytest.mark.parametrize(
    "doc,error,needle",
    [
        ("{not json", TopologyParseError, "invalid JSON"),
        ({"nodes": ["a"]}, TopologyParseError, "links"),
        ({"nodes": ["a", "b", "c"], "links": [{"a": "a", "b": "b"}]}, DisconnectedTopologyError, "not connected"),
        (
            {"nodes": ["a", "b"], "links": [{"a": "a", "b": "b"}, {"a": "b", "b": "a", "id": "x"}]},
            DuplicateLinkError,
            "'b' and 'a'",
        ),
        ({"nodes": ["a", "b"], "links": [{"a": "a", "b": "q"}]}, DanglingEndpointError, "'q'"),
    ],
)
def test_load_errors(doc, error, needle):
    if not isinstance(doc, str):
        doc = json.dumps(doc)
    with pytest.raises(error, match=needle):
        load_topology(doc)


def test_error_kinds_are_distinct():
    kinds = {TopologyParseError, DisconnectedTopologyError, DuplicateLinkError, DanglingEndpointError}
    for k in kinds:
        assert not any(issubclass(k, other) for other in kinds - {k})


def test_capacity_round_trip():
    doc = {"name": "c", "nodes": ["a", "b"], "links": [{"a": "a", "b": "b", "capacity_slices": 12}]}
    topo = load_topology(doc)
    assert topo.links[0].capacity_slices == 12
    assert topo.to_dict() == doc


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 12), st.integers(0, 10), st.randoms(use_true_random=False))
def test_serialize_load_identity(n, extra, rng):
    topo = random_two_edge_connected(rng, n, extra)
    assert load_topology(topo.to_json()) == topo


@pytest.mark.parametrize("name", ["cost239", "nsfnet"])
def test_bundled_round_trip(name):
    topo = bundled_topology(name)
    assert load_topology(topo.to_json()) == topo


def test_traffic_cost239_seven_destinations():
    ds = generate_traffic(bundled_topology("cost239"), 7, 100, True, seed=1)
    assert len(ds) == 14
    assert len(ds.sources) == 2
    assert len(ds.destinations) == 7
    assert all(d.rate_gbps == 100 and d.protected for d in ds)


def test_traffic_nsfnet_all():
    ds = generate_traffic(bundled_topology("nsfnet"), "all", 200, True, seed=1)
    assert len(ds) == 24
    assert len(ds.destinations) == 12


def test_traffic_three_nodes():
    ds = generate_traffic(ring(3), 1, 100, True, seed=5)
    assert len(ds) == 2
    assert ds.demands[0].dst == ds.demands[1].dst


def test_traffic_per_source_split():
    ds = generate_traffic(bundled_topology("cost239"), 7, 100, True, seed=1, per_source=True)
    assert len(ds) == 7
    assert len(ds.destinations) == 7


def test_traffic_too_few_nodes():
    with pytest.raises(TrafficError, match="need 10"):
        generate_traffic(ring(5), 8, 100, True, seed=1)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 9), topo=st.sampled_from(["cost239", "nsfnet"]))
def test_traffic_invariants(seed, n, topo):
    t = bundled_topology(topo)
    a = generate_traffic(t, n, 100, True, seed)
    b = generate_traffic(t, n, 100, True, seed)
    assert a.to_json() == b.to_json()
    sources = set(a.sources)
    assert len(sources) == 2
    assert len(set(a.destinations)) == n
    assert not sources & set(a.destinations)
    for d in a:
        assert d.src != d.dst and d.src in sources


def test_traffic_export_round_trip():
    ds = generate_traffic(bundled_topology("nsfnet"), 4, 200, True, seed=9)
    doc = json.loads(ds.to_json())
    assert set(doc) == {"demands", "seed", "model"}
    assert set(doc["demands"][0]) == {"id", "src", "dst", "rate_gbps", "protected"}
    assert load_traffic(ds.to_json()) == ds


@pytest.mark.parametrize(
    "rate,fmt,slices", [(300, QAM16, 6), (200, QAM16, 4), (100, QPSK, 4), (200, QPSK, 7)]
)
def test_slices_for_default(rate, fmt, slices):
    assert slices_for(default_table(), rate, fmt) == slices


def test_default_table_two_channel_total():
    table = default_table()
    # two protection channels (100G and 200G QPSK) occupy 11 slices together
    assert slices_for(table, 100, QPSK) + slices_for(table, 200, QPSK) == 11


def test_slices_for_unknown():
    with pytest.raises(UnknownSignalError):
        slices_for(default_table(), 400, QAM16)


def test_aggregation_rules_conserve_rate():
    table = default_table()
    for (a, b), out in table.aggregation_rule.items():
        assert out[0] == a[0] + b[0]
    assert table.aggregate((100, QPSK), (100, QPSK)) == (200, QAM16)
    assert table.aggregate((200, QPSK), (100, QPSK)) == (300, QAM16)


def test_xor_rules_keep_rate():
    table = default_table()
    for (a, b), out in table.xor_rule.items():
        if a[0] == b[0]:
            assert out[0] == a[0]


def test_rule_validation():
    entries = {(100, QPSK): 4, (300, QAM16): 6}
    with pytest.raises(ValueError, match="conserve"):
        TransceiverTable(entries, {((100, QPSK), (100, QPSK)): (300, QAM16)})
    with pytest.raises(ValueError, match="no transceiver entry"):
        TransceiverTable(entries, {((100, QPSK), (100, QPSK)): (200, QAM16)})
    with pytest.raises(ValueError, match="stay at 100G"):
        TransceiverTable(entries, {}, {((100, QPSK), (100, QPSK)): (300, QAM16)})


signals = st.tuples(st.sampled_from([25, 50, 100, 200]), st.sampled_from(["QPSK", "8QAM", "16QAM"]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(signals, signals, st.sampled_from(["QPSK", "16QAM", "64QAM"])), max_size=6))
def test_random_rule_tables_conserve_rate(rules):
    entries = {}
    agg = {}
    for a, b, fmt in rules:
        out = (a[0] + b[0], fmt)
        for s in (a, b, out):
            entries.setdefault(s, 1 + (s[0] // 50))
        agg[(a, b)] = out
    table = TransceiverTable(entries, agg)
    for (a, b), out in table.aggregation_rule.items():
        assert table.aggregate(b, a)[0] == a[0] + b[0]
        assert out in table.entries


def test_transceiver_file_round_trip():
    table = default_table()
    assert load_transceivers(json.dumps(table.to_dict())) == table


def test_cheapest_format_tie_break():
    table = TransceiverTable({(100, "b"): 3, (100, "a"): 3, (100, "c"): 2})
    assert table.formats_for(100) == ["c", "a", "b"]
    assert default_table().cheapest(200) == (200, QAM16)
