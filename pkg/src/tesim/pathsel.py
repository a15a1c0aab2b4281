"""Deterministic path-set construction.

Yen-style k-shortest loopless paths and exhaustive simple-path
enumeration, trimmed to a per-pair budget. All orderings are total:
ties in cost are broken by the lexicographic node-id sequence and then
by link ids (parallel links are distinct paths), so identical inputs
always produce identical path sets.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .topology import Topology

KSP_COSTS = ("hop_count", "inverse_capacity")
PROVENANCES = ("ksp", "all_paths", "raecke")


class PathError(ValueError):
    """Path inconsistent with its topology, or invalid path-set input."""


@dataclass(frozen=True)
class Path:
    """Loop-free directed walk src -> dst as an ordered tuple of link ids."""

    src: int
    dst: int
    links: tuple[int, ...]
    weight: float | None = None

    def __post_init__(self):
        if self.weight is not None and self.weight < 0:
            raise PathError(f"path weight must be non-negative, got {self.weight}")

    def nodes(self, t: Topology) -> tuple[int, ...]:
        seq = [self.src]
        for lid in self.links:
            seq.append(t.links[lid].dst)
        return tuple(seq)

    def cost(self, lengths: np.ndarray) -> float:
        return float(sum(lengths[lid] for lid in self.links))

    def validate(self, t: Topology) -> None:
        """Raise PathError unless this is a connected loop-free src->dst walk."""
        at = self.src
        for lid in self.links:
            link = t.links[lid]
            if link.src != at:
                raise PathError(f"link {lid} does not continue the walk at node {at}")
            at = link.dst
        if at != self.dst:
            raise PathError(f"walk ends at {at}, not dst {self.dst}")
        seq = self.nodes(t)
        if len(set(seq)) != len(seq):
            raise PathError(f"path revisits a node: {seq}")


def _order_key(t: Topology, cost: float, path: Path) -> tuple:
    return (cost, path.nodes(t), path.links)


def edge_lengths(t: Topology, cost: str) -> np.ndarray:
    """Per-link lengths for a named cost metric."""
    if cost == "hop_count":
        return np.ones(t.num_links)
    if cost == "inverse_capacity":
        return 1.0 / t.capacities
    raise PathError(f"unknown cost metric {cost!r}")


def shortest_path(
    t: Topology,
    src: int,
    dst: int,
    lengths: np.ndarray,
    banned_nodes: frozenset[int] = frozenset(),
    banned_links: frozenset[int] = frozenset(),
) -> tuple[float, Path] | None:
    """Dijkstra with a total order: minimal (cost, node sequence, link ids).

    Heap entries carry their node/link sequences so equal-cost paths pop
    in lexicographic order; the first settlement of dst is therefore the
    unique deterministic shortest path. Returns None when unreachable.
    """
    if src in banned_nodes or dst in banned_nodes:
        return None
    heap: list[tuple[float, tuple[int, ...], tuple[int, ...], int]] = [
        (0.0, (src,), (), src)
    ]
    done: set[int] = set()
    while heap:
        dist, nodes, link_seq, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == dst:
            return dist, Path(src, dst, link_seq)
        for lid in t.out_links[u]:
            if lid in banned_links:
                continue
            v = t.links[lid].dst
            if v in done or v in banned_nodes or v in nodes:
                continue
            heapq.heappush(
                heap, (dist + lengths[lid], nodes + (v,), link_seq + (lid,), v)
            )
    return None


def yen_ksp(
    t: Topology, src: int, dst: int, k: int, cost: str = "hop_count"
) -> list[Path]:
    """Up to k loopless shortest paths in nondecreasing cost order.

    Spur candidates exclude, per root prefix, the specific link each
    already-accepted path takes next, so parallel links yield distinct
    paths. Returns fewer than k paths when the graph has fewer.
    """
    if k < 1:
        raise PathError("k must be >= 1")
    lengths = edge_lengths(t, cost)
    first = shortest_path(t, src, dst, lengths)
    if first is None:
        return []
    accepted: list[tuple[float, Path]] = [first]
    candidates: dict[tuple[int, ...], tuple[float, Path]] = {}
    while len(accepted) < k:
        _, prev = accepted[-1]
        prev_nodes = prev.nodes(t)
        for i in range(len(prev_nodes) - 1):
            spur_node = prev_nodes[i]
            root_links = prev.links[:i]
            root_nodes = prev_nodes[: i + 1]
            banned_links = set()
            for _, p in accepted:
                if p.links[:i] == root_links and len(p.links) > i:
                    banned_links.add(p.links[i])
            banned_nodes = frozenset(root_nodes[:-1])
            spur = shortest_path(
                t, spur_node, dst, lengths, banned_nodes, frozenset(banned_links)
            )
            if spur is None:
                continue
            total = Path(src, dst, root_links + spur[1].links)
            if total.links in candidates or any(p.links == total.links for _, p in accepted):
                continue
            candidates[total.links] = (total.cost(lengths), total)
        if not candidates:
            break
        best_key = min(candidates, key=lambda ls: _order_key(t, *candidates[ls]))
        accepted.append(candidates.pop(best_key))
    return [p for _, p in accepted]


def all_simple_paths(
    t: Topology, src: int, dst: int, max_paths: int = 10_000
) -> tuple[list[Path], bool]:
    """Depth-first enumeration of all loop-free src->dst paths.

    Neighbors are explored in (next node, link id) order. Enumeration
    stops at max_paths; the second element reports whether truncation
    happened, so callers relying on exhaustiveness can tell.
    """
    if max_paths < 1:
        raise PathError("max_paths must be >= 1")
    paths: list[Path] = []
    truncated = False
    order = {
        u: sorted(t.out_links[u], key=lambda lid: (t.links[lid].dst, lid))
        for u in range(t.num_nodes)
    }
    # stack holds (node, iterator over its out-link positions)
    link_seq: list[int] = []
    on_path = {src}
    stack = [(src, iter(order[src]))]
    while stack:
        u, it = stack[-1]
        advanced = False
        for lid in it:
            v = t.links[lid].dst
            if v in on_path:
                continue
            link_seq.append(lid)
            if v == dst:
                if len(paths) >= max_paths:
                    truncated = True
                    link_seq.pop()
                    return paths, truncated
                paths.append(Path(src, dst, tuple(link_seq)))
                link_seq.pop()
                continue
            on_path.add(v)
            stack.append((v, iter(order[v])))
            advanced = True
            break
        if not advanced:
            stack.pop()
            if link_seq:
                link_seq.pop()
            if stack:
                on_path.discard(u)
    return paths, truncated


@dataclass(frozen=True)
class PathSet:
    """Ordered candidate paths per SD pair plus selection provenance."""

    provenance: str
    paths: dict[tuple[int, int], tuple[Path, ...]]
    truncated_pairs: frozenset[tuple[int, int]] = frozenset()

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.paths)

    def __getitem__(self, pair: tuple[int, int]) -> tuple[Path, ...]:
        return self.paths[pair]

    def total_paths(self) -> int:
        return sum(len(v) for v in self.paths.values())


def build_path_set(
    t: Topology,
    algo: str | Mapping[tuple[int, int], Sequence[Path]],
    budget: int = 4,
    *,
    ksp_cost: str = "hop_count",
    all_paths_cap: int = 10_000,
) -> PathSet:
    """Uniform PathSet for every ordered SD pair.

    algo "ksp": first `budget` Yen paths per pair. algo "all_paths":
    untrimmed enumeration (budget ignored) up to all_paths_cap per pair,
    truncated pairs recorded. A mapping of precomputed weighted paths
    (oblivious-routing output) keeps the `budget` highest-weight paths,
    ties broken by lexicographic node sequence. Unreachable pairs get
    empty tuples.
    """
    if budget < 1:
        raise PathError("budget must be >= 1")
    result: dict[tuple[int, int], tuple[Path, ...]] = {}
    truncated: set[tuple[int, int]] = set()
    if isinstance(algo, str):
        if algo == "ksp":
            for pair in t.node_pairs():
                result[pair] = tuple(yen_ksp(t, *pair, budget, ksp_cost))
            return PathSet("ksp", result)
        if algo == "all_paths":
            for pair in t.node_pairs():
                found, trunc = all_simple_paths(t, *pair, all_paths_cap)
                lengths = edge_lengths(t, "hop_count")
                found.sort(key=lambda p: _order_key(t, p.cost(lengths), p))
                result[pair] = tuple(found)
                if trunc:
                    truncated.add(pair)
            return PathSet("all_paths", result, frozenset(truncated))
        raise PathError(f"unknown path algorithm {algo!r}")
    for pair in t.node_pairs():
        cand = list(algo.get(pair, ()))
        for p in cand:
            if (p.src, p.dst) != pair:
                raise PathError(f"path endpoints {(p.src, p.dst)} do not match pair {pair}")
        cand.sort(key=lambda p: (-(p.weight or 0.0), p.nodes(t), p.links))
        result[pair] = tuple(cand[:budget])
    return PathSet("raecke", result)


def pathset_to_json(ps: PathSet, t: Topology) -> str:
    """Serialize for caching: records {src, dst, nodes, links, weight?}.

    links disambiguates parallel links that share a node sequence.
    """
    records = []
    for pair in ps.pairs():
        for p in ps.paths[pair]:
            rec = {
                "src": p.src,
                "dst": p.dst,
                "nodes": list(p.nodes(t)),
                "links": list(p.links),
            }
            if p.weight is not None:
                rec["weight"] = p.weight
            records.append(rec)
    doc = {"provenance": ps.provenance, "paths": records}
    return json.dumps(doc, indent=2)


def pathset_from_json(text: str, t: Topology) -> PathSet:
    doc = json.loads(text)
    if doc.get("provenance") not in PROVENANCES:
        raise PathError(f"unknown provenance {doc.get('provenance')!r}")
    grouped: dict[tuple[int, int], list[Path]] = {p: [] for p in t.node_pairs()}
    for rec in doc["paths"]:
        if "links" in rec:
            links = tuple(int(x) for x in rec["links"])
        else:
            links = _links_from_nodes(t, [int(x) for x in rec["nodes"]])
        p = Path(int(rec["src"]), int(rec["dst"]), links, rec.get("weight"))
        p.validate(t)
        grouped[(p.src, p.dst)].append(p)
    return PathSet(doc["provenance"], {k: tuple(v) for k, v in grouped.items()})


def _links_from_nodes(t: Topology, nodes: list[int]) -> tuple[int, ...]:
    # smallest link id wins among parallel links
    links = []
    for a, b in zip(nodes, nodes[1:]):
        options = [lid for lid in t.out_links[a] if t.links[lid].dst == b]
        if not options:
            raise PathError(f"no link {a}->{b} in topology")
        links.append(min(options))
    return tuple(links)
