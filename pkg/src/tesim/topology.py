"""Capacitated directed network topologies: parsing, validation, statistics.

Topologies are immutable after construction and safe to share across
parallel experiment runs. Undirected source data (GraphML from Topology
Zoo, JSON links flagged "undirected") is expanded into antiparallel
directed link pairs at parse time.
"""

from __future__ import annotations

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

GRAPHML_NS = "{http://graphml.graphdrawing.org/xmlns}"


class TopologyError(ValueError):
    """Malformed topology document or inconsistent topology data."""


@dataclass(frozen=True)
class Node:
    id: int
    label: str


@dataclass(frozen=True)
class Link:
    """One directed capacitated link. A physical bidirectional cable is two Links."""

    id: int
    src: int
    dst: int
    capacity: float


class Topology:
    """Directed capacitated graph with dense 0-based node ids."""

    def __init__(self, nodes: list[Node], links: list[Link]):
        if [n.id for n in nodes] != list(range(len(nodes))):
            raise TopologyError("node ids must be dense and 0-based")
        if [l.id for l in links] != list(range(len(links))):
            raise TopologyError("link ids must be dense and 0-based")
        for link in links:
            if not (0 <= link.src < len(nodes) and 0 <= link.dst < len(nodes)):
                raise TopologyError(f"link {link.id} references a missing node")
        self.nodes: tuple[Node, ...] = tuple(nodes)
        self.links: tuple[Link, ...] = tuple(links)
        out: list[list[int]] = [[] for _ in nodes]
        inc: list[list[int]] = [[] for _ in nodes]
        for link in links:
            out[link.src].append(link.id)
            inc[link.dst].append(link.id)
        self.out_links: tuple[tuple[int, ...], ...] = tuple(tuple(v) for v in out)
        self.in_links: tuple[tuple[int, ...], ...] = tuple(tuple(v) for v in inc)
        self.capacities: np.ndarray = np.array([l.capacity for l in links], dtype=float)
        self.capacities.flags.writeable = False

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_links(self) -> int:
        return len(self.links)

    def node_pairs(self) -> list[tuple[int, int]]:
        """All ordered source-destination pairs, sorted."""
        n = self.num_nodes
        return [(i, j) for i in range(n) for j in range(n) if i != j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return self.nodes == other.nodes and self.links == other.links

    def __repr__(self) -> str:
        return f"Topology(nodes={self.num_nodes}, links={self.num_links})"


@dataclass(frozen=True)
class Violation:
    """One broken topology invariant; data, not an exception."""

    entity: str
    rule: str

    def __str__(self) -> str:
        return f"{self.rule} on {self.entity}"


def parse_topology(
    source: str,
    format: str,
    *,
    capacity_attr: str = "LinkSpeed",
    capacity_scale: float = 1.0,
    default_capacity: float | None = None,
) -> Topology:
    """Parse a topology document into a Topology with dense node ids.

    Undirected edges are expanded into two directed links of equal
    capacity. Capacities are multiplied by ``capacity_scale`` so
    inconsistent source units can be normalized at parse time; GraphML
    edges missing the ``capacity_attr`` attribute fall back to
    ``default_capacity`` when given and are an error otherwise.
    """
    if format == "json":
        return _parse_json(source, capacity_scale)
    if format == "graphml":
        return _parse_graphml(source, capacity_attr, capacity_scale, default_capacity)
    raise TopologyError(f"unknown topology format {format!r}")


def _check_capacity(cap: float, entity: str) -> float:
    if not math.isfinite(cap) or cap <= 0:
        raise TopologyError(f"non-positive capacity on {entity}")
    return cap


def _parse_json(source: str, scale: float) -> Topology:
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"malformed json topology: {exc}") from exc
    if not isinstance(doc, dict) or "nodes" not in doc or "links" not in doc:
        raise TopologyError("json topology must have 'nodes' and 'links'")
    labels = [str(x) for x in doc["nodes"]]
    if len(set(labels)) != len(labels):
        dup = sorted(x for x in set(labels) if labels.count(x) > 1)[0]
        raise TopologyError(f"duplicate node label {dup!r}")
    index = {label: i for i, label in enumerate(labels)}
    nodes = [Node(i, label) for i, label in enumerate(labels)]
    links: list[Link] = []
    for pos, rec in enumerate(doc["links"]):
        try:
            src, dst = index[str(rec["src"])], index[str(rec["dst"])]
            cap = float(rec["cap"]) * scale
        except KeyError as exc:
            raise TopologyError(f"link {pos}: missing or unknown {exc}") from exc
        _check_capacity(cap, f"link {pos}")
        if src == dst:
            raise TopologyError(f"link {pos}: self-loop on node {rec['src']!r}")
        links.append(Link(len(links), src, dst, cap))
        if rec.get("undirected", False):
            links.append(Link(len(links), dst, src, cap))
    return Topology(nodes, links)


def _parse_graphml(
    source: str, capacity_attr: str, scale: float, default_capacity: float | None
) -> Topology:
    try:
        root = ET.fromstring(source)
    except ET.ParseError as exc:
        raise TopologyError(f"malformed graphml: {exc}") from exc

    cap_keys = set()
    label_keys = set()
    for key in root.iter(f"{GRAPHML_NS}key"):
        if key.get("attr.name") == capacity_attr and key.get("for", "edge") == "edge":
            cap_keys.add(key.get("id"))
        if key.get("attr.name") == "label" and key.get("for", "node") == "node":
            label_keys.add(key.get("id"))

    graph = root.find(f"{GRAPHML_NS}graph")
    if graph is None:
        raise TopologyError("graphml has no <graph> element")
    default_directed = graph.get("edgedefault", "undirected") == "directed"

    nodes: list[Node] = []
    index: dict[str, int] = {}
    for el in graph.iter(f"{GRAPHML_NS}node"):
        xml_id = el.get("id")
        if xml_id is None:
            raise TopologyError("graphml node without id")
        label = xml_id
        for data in el.iter(f"{GRAPHML_NS}data"):
            if data.get("key") in label_keys and data.text:
                label = data.text.strip()
        if xml_id in index:
            raise TopologyError(f"duplicate node id {xml_id!r}")
        index[xml_id] = len(nodes)
        nodes.append(Node(len(nodes), label))
    if len({n.label for n in nodes}) != len(nodes):
        seen: set[str] = set()
        for n in nodes:
            if n.label in seen:
                raise TopologyError(f"duplicate node label {n.label!r}")
            seen.add(n.label)

    links: list[Link] = []
    for pos, el in enumerate(graph.iter(f"{GRAPHML_NS}edge")):
        s, t = el.get("source"), el.get("target")
        if s not in index or t not in index:
            raise TopologyError(f"edge {pos} references unknown node {s!r} or {t!r}")
        cap: float | None = None
        for data in el.iter(f"{GRAPHML_NS}data"):
            if data.get("key") in cap_keys and data.text is not None:
                try:
                    cap = float(data.text)
                except ValueError as exc:
                    raise TopologyError(
                        f"edge {pos} ({s}->{t}): bad {capacity_attr} {data.text!r}"
                    ) from exc
        if cap is None:
            if default_capacity is None:
                raise TopologyError(
                    f"edge {pos} ({s}->{t}): missing capacity attribute "
                    f"{capacity_attr} and no default_capacity"
                )
            cap = default_capacity
        else:
            cap *= scale
        _check_capacity(cap, f"edge {pos} ({s}->{t})")
        src, dst = index[s], index[t]
        if src == dst:
            raise TopologyError(f"edge {pos}: self-loop on node {s!r}")
        directed = el.get("directed")
        is_directed = default_directed if directed is None else directed == "true"
        links.append(Link(len(links), src, dst, cap))
        if not is_directed:
            links.append(Link(len(links), dst, src, cap))
    return Topology(nodes, links)


def serialize_topology(t: Topology) -> str:
    """JSON form of a topology; parse_topology(serialize_topology(t), "json") == t."""
    doc = {
        "nodes": [n.label for n in t.nodes],
        "links": [
            {"src": t.nodes[l.src].label, "dst": t.nodes[l.dst].label, "cap": l.capacity}
            for l in t.links
        ],
    }
    return json.dumps(doc, indent=2)


def _reachable_from(t: Topology, src: int) -> set[int]:
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for lid in t.out_links[u]:
            v = t.links[lid].dst
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def validate_topology(t: Topology) -> list[Violation]:
    """Check type invariants plus pairwise reachability.

    Returns an empty list iff every link has positive capacity and no
    self-loop, node labels are unique, and every ordered node pair has
    at least one directed path. Violations are reported, not raised:
    downstream code skips demands for unreachable pairs and counts them
    as undelivered.
    """
    violations: list[Violation] = []
    seen_labels: set[str] = set()
    for node in t.nodes:
        if node.label in seen_labels:
            violations.append(Violation(f"node {node.id}", "duplicate label"))
        seen_labels.add(node.label)
    for link in t.links:
        if link.capacity <= 0:
            violations.append(Violation(f"link {link.id}", "non-positive capacity"))
        if link.src == link.dst:
            violations.append(Violation(f"link {link.id}", "self-loop"))
    for src in range(t.num_nodes):
        reach = _reachable_from(t, src)
        for dst in range(t.num_nodes):
            if dst != src and dst not in reach:
                violations.append(
                    Violation(
                        f"pair {t.nodes[src].label}->{t.nodes[dst].label}", "no path"
                    )
                )
    return violations


def capacity_histogram(t: Topology, log_base: float) -> list[tuple[float, int]]:
    """Bucket link capacities in powers of log_base starting at the minimum.

    Bucket k covers [min_cap * log_base**k, min_cap * log_base**(k+1));
    returned as (bucket lower bound, count), contiguous from the bucket of
    the smallest capacity to the bucket of the largest, counts summing to
    the number of links.
    """
    if log_base <= 1:
        raise ValueError("log_base must be > 1")
    if not t.links:
        raise ValueError("topology has no links")
    caps = t.capacities
    lo = float(caps.min())
    # tolerance absorbs float log round-off at exact bucket boundaries
    ks = np.floor(np.log(caps / lo) / math.log(log_base) + 1e-9).astype(int)
    buckets = []
    for k in range(int(ks.max()) + 1):
        buckets.append((lo * log_base**k, int(np.sum(ks == k))))
    return buckets


def random_topology(
    num_nodes: int,
    num_links: int,
    rng: np.random.Generator,
    cap_range: tuple[float, float] = (1.0, 10.0),
) -> Topology:
    """Uniform-random simple directed graph, guaranteed strongly connected.

    A synthetic-topology extension, not a reproduction of any published
    generator: a random directed Hamiltonian cycle (connectivity) plus
    uniformly sampled extra arcs, capacities uniform in cap_range.
    Requires num_links >= num_nodes.
    """
    if num_nodes < 2:
        raise ValueError("need at least 2 nodes")
    if num_links < num_nodes:
        raise ValueError("need num_links >= num_nodes for strong connectivity")
    order = rng.permutation(num_nodes)
    arcs = [(int(order[i]), int(order[(i + 1) % num_nodes])) for i in range(num_nodes)]
    have = set(arcs)
    candidates = [
        (i, j)
        for i in range(num_nodes)
        for j in range(num_nodes)
        if i != j and (i, j) not in have
    ]
    extra = min(num_links - len(arcs), len(candidates))
    if extra > 0:
        picks = rng.choice(len(candidates), size=extra, replace=False)
        arcs.extend(candidates[int(p)] for p in sorted(picks))
    nodes = [Node(i, f"n{i}") for i in range(num_nodes)]
    caps = rng.uniform(cap_range[0], cap_range[1], size=len(arcs))
    links = [Link(i, a, b, float(c)) for i, ((a, b), c) in enumerate(zip(arcs, caps))]
    return Topology(nodes, links)
