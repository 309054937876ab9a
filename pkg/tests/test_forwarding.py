import random

from hmlbn.forwarding import INFRA, MOBILITY, DataPacket, Label
from hmlbn.scenarios import base_topology, MOBILITY_RANGE

from conftest import delivered_paths, prefix, run


def two_mobile_scenario():
    """Two mobiles in area 1, one correspondent in area 3."""
    return {
        "name": "two-mobiles",
        "seed": 3,
        "duration_s": 0.2,
        "mobility_range": MOBILITY_RANGE,
        "topology": base_topology(),
        "mobility": {"attach": [
            {"t": 0.0, "prefix": "10.1.1.1/32", "region": "MR12"},
            {"t": 0.0, "prefix": "10.1.1.2/32", "region": "MR13"},
            {"t": 0.0, "prefix": "10.3.3.1/32", "region": "MR33"},
        ]},
        "flows": [
            {"id": "to-a", "src": "10.3.3.1/32", "dst": "10.1.1.1/32",
             "rate_pps": 100, "start_s": 0.05, "stop_s": 0.15},
            {"id": "to-b", "src": "10.3.3.1/32", "dst": "10.1.1.2/32",
             "rate_pps": 100, "start_s": 0.05, "stop_s": 0.15},
        ],
    }


def test_duplicate_label_values_on_different_lers_both_deliver():
    """Correctness keys on (origin router, label), never on the label alone:
    both first registrations get label 16 at their own LER."""
    sim = run(two_mobile_scenario())
    regs = [e["detail"] for e in sim.trace if e["kind"] == "register"]
    labels = {d["prefix"]: d["label"] for d in regs}
    assert labels["10.1.1.1/32"] == labels["10.1.1.2/32"] == 16
    rows = sim.metrics.finalize()
    assert rows["to-a"]["delivered"] == rows["to-a"]["ingress"] > 0
    assert rows["to-b"]["delivered"] == rows["to-b"]["ingress"] > 0
    assert delivered_paths(sim, "to-a")[0][1].endswith("LER12")
    assert delivered_paths(sim, "to-b")[0][1].endswith("LER13")


def intra_area_flow_scenario():
    return {
        "name": "intra-star",
        "seed": 5,
        "duration_s": 0.2,
        "mobility_range": MOBILITY_RANGE,
        "topology": base_topology(),
        "mobility": {"attach": [
            {"t": 0.0, "prefix": "10.1.1.1/32", "region": "MR12"},
            {"t": 0.0, "prefix": "10.1.1.5/32", "region": "MR11"},
        ]},
        "flows": [{"id": "f", "src": "10.1.1.5/32", "dst": "10.1.1.1/32",
                   "rate_pps": 100, "start_s": 0.05, "stop_s": 0.15}],
    }


def test_intra_area_transit_keeps_mobility_label_untouched():
    """Between two LERs of one area the ALER is a plain top-label switch:
    the inner label rides through unchanged and no trail lookup happens."""
    sim = run(intra_area_flow_scenario())
    paths = delivered_paths(sim, "f")
    assert paths and all(p == "LER11>ALER1>LER12" for _, p in paths)
    hops = [e for e in sim.trace if e["kind"] == "data_hop"
            and e["detail"]["flow"] == "f"]
    by_seq = {}
    for e in hops:
        by_seq.setdefault(e["detail"]["seq"], []).append(e)
    for seq, events in by_seq.items():
        inner = [h["detail"]["stack"].split("/")[-1] for h in events]
        assert len(set(inner)) == 1  # same mobility label on every hop


def test_intra_area_hops_match_direct_shortest_path():
    sim = run(intra_area_flow_scenario())
    rows = sim.metrics.finalize()
    assert set(rows["f"]["hops"]) == {2}  # LER11 > ALER1 > LER12


def test_stack_depth_never_exceeds_two():
    for doc in (two_mobile_scenario(), intra_area_flow_scenario()):
        sim = run(doc)
        assert sim.metrics.max_stack_depth <= 2
        assert sim.metrics.stack_violations == 0


def test_no_ip_lookup_after_ingress():
    sim = run(two_mobile_scenario())
    assert sim.metrics.post_ingress_ip_lookups == 0


def test_packet_conservation_under_random_movement():
    from hmlbn.scenarios import random_walk_scenario
    sim = run(random_walk_scenario())
    rows = sim.metrics.finalize()
    for row in rows.values():
        assert row["ingress"] == (row["delivered"] + sum(row["drops"].values())
                                  + row["in_flight"])


def test_unregistered_destination_eventually_drops_no_binding():
    doc = two_mobile_scenario()
    doc["flows"] = [{"id": "void", "src": "10.3.3.1/32",
                     "dst": "10.9.9.9/32", "rate_pps": 100,
                     "start_s": 0.05, "stop_s": 0.1}]
    sim = run(doc)
    rows = sim.metrics.finalize()
    assert rows["void"]["delivered"] == 0
    assert rows["void"]["drops"]["no_binding"] == rows["void"]["ingress"]


def test_packet_trace_renders_stack_and_path():
    pkt = DataPacket("f", 0, prefix("10.0.0.1/32"), prefix("10.0.0.2/32"), 0.0)
    pkt.stack = [Label(17, INFRA), Label(116, MOBILITY)]
    assert pkt.render_stack() == "i17/m116"
    pkt.record_hop(0.0, "LER33")
    pkt.record_hop(0.001, "ALER3")
    assert pkt.path_string() == "LER33>ALER3"
