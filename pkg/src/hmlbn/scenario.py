"""Scenario files: schema, validation and parsed form.

A scenario is a single JSON document with topology, timer, mobility,
traffic, failure and flag sections plus a seed.  Validation is strict:
unknown keys are rejected and every problem is reported with its field
path.  Timer sanity enforces lifetime >= 10 * dead-time >= 30 * keepalive.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ScenarioInvalid, TopologyError
from .messages import MobilePrefix
from .topology import NetworkGraph, NodeRole, build_topology

TIMER_DEFAULTS = {"keepalive_s": 3.0, "dead_s": 9.0, "lifetime_s": 300.0}

_TOP_KEYS = {"name", "seed", "duration_s", "mobility_range", "timers",
             "topology", "mobility", "flows", "failures", "flags", "analysis"}
_FLAG_KEYS = {"reflect_to_previous_ler", "overlap_attach", "overlap_s",
              "ler_replication", "aler_replication", "ha_pairs"}


@dataclass
class Timers:
    keepalive_s: float = 3.0
    dead_s: float = 9.0
    lifetime_s: float = 300.0


@dataclass
class Flags:
    reflect_to_previous_ler: bool = False
    overlap_attach: bool = False
    overlap_s: float = 1.0
    ler_replication: bool = False
    aler_replication: bool = False
    ha_pairs: list = field(default_factory=list)


@dataclass
class AttachSpec:
    t: float
    prefix: MobilePrefix
    region: str
    cell: str | None
    l2: str


@dataclass
class MoveSpec:
    t: float
    prefix: MobilePrefix
    region: str
    cell: str | None


@dataclass
class DetachSpec:
    t: float
    prefix: MobilePrefix


@dataclass
class MovementModel:
    mu: float
    p: float
    prefixes: list
    adjacency: dict


@dataclass
class FlowSpec:
    flow_id: str
    src: MobilePrefix
    dst: MobilePrefix
    rate_pps: float
    start_s: float
    stop_s: float


@dataclass
class FailureSpec:
    t: float
    node: str


@dataclass
class Scenario:
    name: str
    seed: int
    duration_s: float
    mobility_ranges: list
    timers: Timers
    topology_spec: dict
    attaches: list
    moves: list
    detaches: list
    model: MovementModel | None
    flows: list
    failures: list
    flags: Flags
    analysis: dict
    raw: dict

    def build_graph(self) -> NetworkGraph:
        return build_topology(self.topology_spec)


class _Checker:
    def __init__(self):
        self.problems = []

    def err(self, path, msg):
        self.problems.append((path, msg))

    def keys(self, obj, path, allowed):
        if not isinstance(obj, dict):
            self.err(path or "$", "expected object")
            return
        for key in obj:
            if key not in allowed:
                self.err(f"{path}.{key}" if path else key, "unknown key")

    def number(self, obj, path, key, default=None, minimum=None, positive=False):
        if not isinstance(obj, dict):
            return default
        if key not in obj:
            if default is None:
                self.err(f"{path}.{key}", "missing")
                return None
            return default
        v = obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.err(f"{path}.{key}", f"expected number, got {type(v).__name__}")
            return None
        if positive and v <= 0:
            self.err(f"{path}.{key}", "must be positive")
            return None
        if minimum is not None and v < minimum:
            self.err(f"{path}.{key}", f"must be >= {minimum}")
            return None
        return float(v)

    def prefix(self, text, path):
        try:
            return MobilePrefix.parse(str(text))
        except ValueError as exc:
            self.err(path, f"bad prefix: {exc}")
            return None


def validate_scenario(data: dict) -> list:
    """Return the problem list for a raw scenario document (empty if valid)."""
    try:
        _parse(data)
        return []
    except ScenarioInvalid as exc:
        return exc.problems


def parse_scenario(data: dict) -> Scenario:
    return _parse(data)


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioInvalid([("$", f"not valid JSON: {exc}")])
    return _parse(data)


def _parse(data: dict) -> Scenario:
    c = _Checker()
    if not isinstance(data, dict):
        raise ScenarioInvalid([("$", "scenario must be a JSON object")])
    c.keys(data, "", _TOP_KEYS)
    name = str(data.get("name", "scenario"))
    seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        c.err("seed", "expected integer")
        seed = 0
    duration = c.number(data, "", "duration_s", positive=True) or 1.0

    ranges = []
    for i, text in enumerate(data.get("mobility_range", [])):
        p = c.prefix(text, f"mobility_range[{i}]")
        if p:
            ranges.append(p)
    if not ranges:
        c.err("mobility_range", "at least one mobility prefix range required")

    timers = _parse_timers(data.get("timers", {}), c)
    topo_spec, graph, regions = _parse_topology(data.get("topology"), c)
    attaches, moves, detaches, model = _parse_mobility(
        data.get("mobility", {}), c, regions, ranges)
    flows = _parse_flows(data.get("flows", []), c)
    failures = _parse_failures(data.get("failures", []), c, graph)
    flags = _parse_flags(data.get("flags", {}), c, graph)
    analysis = data.get("analysis", {})
    if not isinstance(analysis, dict):
        c.err("analysis", "expected object")
        analysis = {}
    else:
        c.keys(analysis, "analysis", {"ha_node"})
        if graph and "ha_node" in analysis:
            try:
                graph.rid_of(str(analysis["ha_node"]))
            except TopologyError:
                c.err("analysis.ha_node", "unknown node")

    if c.problems:
        raise ScenarioInvalid(c.problems)
    return Scenario(name, seed, duration, ranges, timers, topo_spec,
                    attaches, moves, detaches, model, flows, failures,
                    flags, analysis, data)


def _parse_timers(obj, c) -> Timers:
    if not isinstance(obj, dict):
        c.err("timers", "expected object")
        return Timers()
    c.keys(obj, "timers", set(TIMER_DEFAULTS))
    k = c.number(obj, "timers", "keepalive_s", TIMER_DEFAULTS["keepalive_s"],
                 positive=True)
    d = c.number(obj, "timers", "dead_s", TIMER_DEFAULTS["dead_s"], positive=True)
    life = c.number(obj, "timers", "lifetime_s", TIMER_DEFAULTS["lifetime_s"],
                    positive=True)
    if k and d and d < 3 * k:
        c.err("timers.dead_s", f"dead time {d} must be >= 3x keepalive {k}")
    if d and life and life < 10 * d:
        c.err("timers.lifetime_s", f"lifetime {life} must be >= 10x dead time {d}")
    return Timers(k or 3.0, d or 9.0, life or 300.0)


def _parse_topology(obj, c):
    if not isinstance(obj, dict):
        c.err("topology", "missing or not an object")
        return {}, None, {}
    c.keys(obj, "topology", {"nodes", "edges", "regions"})
    for section, kind in (("nodes", list), ("edges", list), ("regions", dict)):
        if not isinstance(obj.get(section, kind()), kind):
            c.err(f"topology.{section}", f"expected {kind.__name__}")
            return {}, None, {}
    for i, node in enumerate(obj.get("nodes", [])):
        if not isinstance(node, dict):
            c.err(f"topology.nodes[{i}]", "expected object")
            return {}, None, {}
        c.keys(node, f"topology.nodes[{i}]", {"id", "name", "role", "area"})
        for required in ("id", "role"):
            if required not in node:
                c.err(f"topology.nodes[{i}].{required}", "missing")
    for i, edge in enumerate(obj.get("edges", [])):
        if not isinstance(edge, dict):
            c.err(f"topology.edges[{i}]", "expected object")
            return {}, None, {}
        c.keys(edge, f"topology.edges[{i}]", {"a", "b", "latency_ms"})
    for rname, rdef in obj.get("regions", {}).items():
        if not isinstance(rdef, dict):
            c.err(f"topology.regions.{rname}", "expected object")
            return {}, None, {}
        c.keys(rdef, f"topology.regions.{rname}", {"ler", "cells"})
    if c.problems:
        return obj, None, {}
    try:
        graph = build_topology(obj)
    except TopologyError as exc:
        c.err("topology", f"{type(exc).__name__}: {exc}")
        return obj, None, {}
    return obj, graph, graph.regions


def _parse_mobility(obj, c, regions, ranges):
    if not isinstance(obj, dict):
        c.err("mobility", "expected object")
        return [], [], [], None
    c.keys(obj, "mobility", {"attach", "move", "detach", "model"})
    attaches, moves, detaches = [], [], []
    known_prefixes = set()

    for section in ("attach", "move", "detach"):
        entries = obj.get(section, [])
        if not isinstance(entries, list) or any(
                not isinstance(e, dict) for e in entries):
            c.err(f"mobility.{section}", "expected a list of objects")
            return [], [], [], None

    def check_region(path, entry):
        region = entry.get("region")
        if region not in regions:
            c.err(f"{path}.region", f"unknown region {region!r}")
            return None, None
        cell = entry.get("cell")
        if cell is not None and cell not in regions[region].cells:
            c.err(f"{path}.cell", f"region {region} has no cell {cell!r}")
            return region, None
        return region, cell

    for i, entry in enumerate(obj.get("attach", [])):
        path = f"mobility.attach[{i}]"
        c.keys(entry, path, {"t", "prefix", "region", "cell", "l2"})
        t = c.number(entry, path, "t", 0.0, minimum=0.0)
        prefix = c.prefix(entry.get("prefix"), f"{path}.prefix")
        region, cell = check_region(path, entry)
        if prefix and not prefix.covered_by(ranges):
            c.err(f"{path}.prefix", "outside the mobility address range")
        if prefix and region:
            known_prefixes.add(str(prefix))
            attaches.append(AttachSpec(t, prefix, region, cell,
                                       str(entry.get("l2", f"mac-{prefix}"))))
    for i, entry in enumerate(obj.get("move", [])):
        path = f"mobility.move[{i}]"
        c.keys(entry, path, {"t", "prefix", "region", "cell"})
        t = c.number(entry, path, "t")
        prefix = c.prefix(entry.get("prefix"), f"{path}.prefix")
        region, cell = check_region(path, entry)
        if prefix and str(prefix) not in known_prefixes:
            c.err(f"{path}.prefix", "moves a prefix that never attaches")
        if t is not None and prefix and region:
            moves.append(MoveSpec(t, prefix, region, cell))
    for i, entry in enumerate(obj.get("detach", [])):
        path = f"mobility.detach[{i}]"
        c.keys(entry, path, {"t", "prefix"})
        t = c.number(entry, path, "t")
        prefix = c.prefix(entry.get("prefix"), f"{path}.prefix")
        if t is not None and prefix:
            detaches.append(DetachSpec(t, prefix))

    model = None
    if "model" in obj:
        entry = obj["model"]
        path = "mobility.model"
        if not isinstance(entry, dict):
            c.err(path, "expected object")
        else:
            c.keys(entry, path, {"mu", "p", "prefixes", "adjacency"})
            mu = c.number(entry, path, "mu", positive=True)
            p = c.number(entry, path, "p", minimum=0.0)
            if p is not None and p > 1.0:
                c.err(f"{path}.p", "transition probability must be <= 1")
            prefixes = []
            for j, text in enumerate(entry.get("prefixes", [])):
                pfx = c.prefix(text, f"{path}.prefixes[{j}]")
                if pfx:
                    if str(pfx) not in known_prefixes:
                        c.err(f"{path}.prefixes[{j}]", "prefix never attaches")
                    prefixes.append(pfx)
            adjacency = entry.get("adjacency", {})
            if not isinstance(adjacency, dict):
                c.err(f"{path}.adjacency", "expected object")
                adjacency = {}
            for region, nbrs in adjacency.items():
                if region not in regions:
                    c.err(f"{path}.adjacency.{region}", "unknown region")
                for nbr in nbrs if isinstance(nbrs, list) else []:
                    if nbr not in regions:
                        c.err(f"{path}.adjacency.{region}",
                              f"unknown neighbor region {nbr!r}")
            if mu is not None and p is not None:
                model = MovementModel(mu, p, prefixes, adjacency)
    attaches.sort(key=lambda a: a.t)
    moves.sort(key=lambda m: m.t)
    detaches.sort(key=lambda d: d.t)
    return attaches, moves, detaches, model


def _parse_flows(entries, c):
    flows = []
    if not isinstance(entries, list):
        c.err("flows", "expected list")
        return flows
    for i, entry in enumerate(entries):
        path = f"flows[{i}]"
        if not isinstance(entry, dict):
            c.err(path, "expected object")
            continue
        c.keys(entry, path, {"id", "src", "dst", "rate_pps", "start_s", "stop_s"})
        src = c.prefix(entry.get("src"), f"{path}.src")
        dst = c.prefix(entry.get("dst"), f"{path}.dst")
        rate = c.number(entry, path, "rate_pps", positive=True)
        start = c.number(entry, path, "start_s", minimum=0.0)
        stop = c.number(entry, path, "stop_s")
        if start is not None and stop is not None and stop <= start:
            c.err(f"{path}.stop_s", "must be after start_s")
        if src and dst and rate and start is not None and stop is not None:
            flows.append(FlowSpec(str(entry.get("id", f"f{i}")), src, dst,
                                  rate, start, stop))
    return flows


def _parse_failures(entries, c, graph):
    out = []
    if not isinstance(entries, list):
        c.err("failures", "expected list")
        return out
    for i, entry in enumerate(entries):
        path = f"failures[{i}]"
        if not isinstance(entry, dict):
            c.err(path, "expected object")
            continue
        c.keys(entry, path, {"t", "node"})
        t = c.number(entry, path, "t", minimum=0.0)
        node = entry.get("node")
        if graph is not None and node is not None:
            try:
                node = graph.rid_of(str(node))
            except TopologyError:
                c.err(f"{path}.node", f"unknown node {node!r}")
                node = None
        if t is not None and node:
            out.append(FailureSpec(t, node))
    return out


def _parse_flags(obj, c, graph) -> Flags:
    if not isinstance(obj, dict):
        c.err("flags", "expected object")
        return Flags()
    c.keys(obj, "flags", _FLAG_KEYS)
    flags = Flags()
    for key in ("reflect_to_previous_ler", "overlap_attach",
                "ler_replication", "aler_replication"):
        if key in obj:
            if not isinstance(obj[key], bool):
                c.err(f"flags.{key}", "expected boolean")
            else:
                setattr(flags, key, obj[key])
    flags.overlap_s = c.number(obj, "flags", "overlap_s", 1.0, positive=True) or 1.0
    for i, pair in enumerate(obj.get("ha_pairs", [])):
        path = f"flags.ha_pairs[{i}]"
        if not isinstance(pair, list) or len(pair) != 2:
            c.err(path, "expected a two-node list")
            continue
        if graph is None:
            continue
        rids = []
        for member in pair:
            try:
                rids.append(graph.rid_of(str(member)))
            except TopologyError:
                c.err(path, f"unknown node {member!r}")
        if len(rids) == 2:
            a, b = rids
            if (graph.role_of(a) is not NodeRole.ALER
                    or graph.role_of(b) is not NodeRole.ALER):
                c.err(path, "high-availability pairs must be ALER nodes")
            elif graph.area_of(a) != graph.area_of(b):
                c.err(path, "pair members must share an area")
            else:
                flags.ha_pairs.append((a, b))
    return flags
