"""Oblivious routing via distributions over randomized routing trees.

Each iteration builds a hierarchical decomposition tree of the topology
(randomized low-diameter decomposition over the weighted shortest-path
metric), measures how hard each link is hit when every node pair routes
one unit through that tree, and multiplicatively penalizes overloaded
links before building the next tree. The resulting tree distribution is
flattened into weighted physical paths per SD pair; trees are demand
independent, so the paths are too.

Weight updates run in log space and are renormalized so the heaviest
link has weight 1; only weight ratios matter to shortest paths, and the
exponentials stay bounded on badly overloaded instances.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .pathsel import Path, shortest_path
from .topology import Topology


class RoutingTreeError(ValueError):
    """Structurally invalid routing tree or distribution."""


@dataclass
class Cluster:
    """One node of the decomposition tree: a set of topology nodes.

    rep is the member with the smallest rank in the tree's random
    permutation; tree edges map to physical paths between the reps of
    parent and child.
    """

    id: int
    members: tuple[int, ...]
    rep: int
    parent: int | None
    children: list[int] = field(default_factory=list)
    depth: int = 0


@dataclass
class RoutingTree:
    """Hierarchical decomposition: leaves biject to topology nodes.

    up_paths[cid] / down_paths[cid] hold the directed physical paths
    (link-id tuples) between cluster cid's rep and its parent's rep;
    None marks a direction the digraph cannot realize. Disconnected
    topologies produce one root per weakly-connected component;
    cross-component pairs are unreachable.
    """

    clusters: list[Cluster]
    leaf_cluster: dict[int, int]
    up_paths: dict[int, tuple[int, ...] | None]
    down_paths: dict[int, tuple[int, ...] | None]
    roots: tuple[int, ...]

    def route(self, t: Topology, u: int, v: int) -> tuple[int, ...] | None:
        """Physical link route u -> v through the tree, cycles shortcut.

        Climbs from u's leaf to the lowest common ancestor and descends
        to v's leaf, concatenating the per-edge physical paths. Returns
        None when the pair crosses components or a directed segment is
        missing.
        """
        cu, cv = self.leaf_cluster[u], self.leaf_cluster[v]
        up_chain = self._ancestors(cu)
        down_chain = self._ancestors(cv)
        common = set(up_chain) & set(down_chain)
        if not common:
            return None
        lca = next(c for c in up_chain if c in common)
        segments: list[tuple[int, ...]] = []
        for cid in up_chain:
            if cid == lca:
                break
            seg = self.up_paths[cid]
            if seg is None:
                return None
            segments.append(seg)
        down_part = []
        for cid in down_chain:
            if cid == lca:
                break
            seg = self.down_paths[cid]
            if seg is None:
                return None
            down_part.append(seg)
        segments.extend(reversed(down_part))
        return _shortcut(t, u, [lid for seg in segments for lid in seg])

    def _ancestors(self, cid: int) -> list[int]:
        chain = [cid]
        while self.clusters[chain[-1]].parent is not None:
            chain.append(self.clusters[chain[-1]].parent)
        return chain


@dataclass(frozen=True)
class RoutingTreeDistribution:
    """Routing trees with strictly positive probabilities summing to 1."""

    trees: tuple[tuple[RoutingTree, float], ...]

    def __post_init__(self):
        if not self.trees:
            raise RoutingTreeError("distribution needs at least one tree")
        total = sum(w for _, w in self.trees)
        if any(w <= 0 for _, w in self.trees):
            raise RoutingTreeError("tree probabilities must be positive")
        if abs(total - 1.0) > 1e-9:
            raise RoutingTreeError(f"tree probabilities sum to {total}, not 1")


@dataclass(frozen=True)
class WeightedPaths:
    """Per SD pair: physical paths with probabilities summing to 1."""

    paths: dict[tuple[int, int], tuple[Path, ...]]


def _shortcut(t: Topology, start: int, links: list[int]) -> tuple[int, ...]:
    """Remove cycles a concatenated walk picks up at tree-edge junctions."""
    kept: list[int] = []
    nodes = [start]
    node_set = {start}
    for lid in links:
        v = t.links[lid].dst
        if v in node_set:
            while nodes[-1] != v:
                node_set.discard(nodes.pop())
                kept.pop()
        else:
            kept.append(lid)
            nodes.append(v)
            node_set.add(v)
    return tuple(kept)


def _undirected_metric(t: Topology, link_weights: np.ndarray) -> list[dict[int, float]]:
    """Symmetric per-node neighbor lengths: min link weight over either direction."""
    adj: list[dict[int, float]] = [dict() for _ in range(t.num_nodes)]
    for link in t.links:
        w = float(link_weights[link.id])
        for a, b in ((link.src, link.dst), (link.dst, link.src)):
            if b not in adj[a] or w < adj[a][b]:
                adj[a][b] = w
    return adj


def _sssp(adj: list[dict[int, float]], src: int) -> dict[int, float]:
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist.get(u, math.inf):
            continue
        for v, w in adj[u].items():
            nd = d + w
            if nd < dist.get(v, math.inf):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def build_routing_tree(
    t: Topology, link_weights: np.ndarray, rng: np.random.Generator
) -> RoutingTree:
    """One randomized decomposition tree under the given link weights.

    Clusters are split by halving radii: at radius r every node joins
    the first node in a random permutation within shortest-path distance
    r (distances on the symmetrized metric). The laminar family of
    non-trivial splits is the tree. Identical rng state gives an
    identical tree.
    """
    if np.any(link_weights <= 0):
        raise RoutingTreeError("link weights must be positive")
    adj = _undirected_metric(t, link_weights)
    dist = [_sssp(adj, u) for u in range(t.num_nodes)]

    # weakly-connected components, each becomes its own root
    unseen = set(range(t.num_nodes))
    components: list[list[int]] = []
    while unseen:
        start = min(unseen)
        comp = sorted(dist[start].keys() & unseen)
        if not comp:
            comp = [start]
        unseen -= set(comp)
        components.append(comp)

    rank = {u: int(r) for u, r in zip(rng.permutation(t.num_nodes), range(t.num_nodes))}
    beta = float(rng.uniform(1.0, 2.0))

    clusters: list[Cluster] = []
    leaf_cluster: dict[int, int] = {}
    roots: list[int] = []

    def new_cluster(members: tuple[int, ...], parent: int | None, depth: int) -> int:
        cid = len(clusters)
        rep = min(members, key=lambda u: rank[u])
        clusters.append(Cluster(cid, members, rep, parent, depth=depth))
        if parent is not None:
            clusters[parent].children.append(cid)
        if len(members) == 1:
            leaf_cluster[members[0]] = cid
        return cid

    for comp in components:
        root = new_cluster(tuple(comp), None, 0)
        roots.append(root)
        if len(comp) == 1:
            continue
        pair_d = [dist[u].get(v, math.inf) for u in comp for v in comp if u != v]
        m = min(pair_d)
        delta = max(pair_d)
        radius = beta * m * 2.0 ** max(0, math.ceil(math.log2(delta / m)))
        active = [root]
        while active:
            radius /= 2.0
            next_active: list[int] = []
            for cid in active:
                members = clusters[cid].members
                by_center: dict[int, list[int]] = {}
                order = sorted(members, key=lambda u: rank[u])
                for v in members:
                    center = next(u for u in order if dist[u].get(v, math.inf) <= radius)
                    by_center.setdefault(center, []).append(v)
                if len(by_center) == 1:
                    # no split at this radius: keep subdividing the same cluster
                    next_active.append(cid)
                    continue
                for center in sorted(by_center, key=lambda u: rank[u]):
                    group = tuple(sorted(by_center[center]))
                    child = new_cluster(group, cid, clusters[cid].depth + 1)
                    if len(group) > 1:
                        next_active.append(child)
            active = next_active

    up_paths: dict[int, tuple[int, ...] | None] = {}
    down_paths: dict[int, tuple[int, ...] | None] = {}
    for cl in clusters:
        if cl.parent is None:
            continue
        prep = clusters[cl.parent].rep
        if cl.rep == prep:
            up_paths[cl.id] = ()
            down_paths[cl.id] = ()
            continue
        up = shortest_path(t, cl.rep, prep, link_weights)
        down = shortest_path(t, prep, cl.rep, link_weights)
        up_paths[cl.id] = up[1].links if up else None
        down_paths[cl.id] = down[1].links if down else None
    return RoutingTree(clusters, leaf_cluster, up_paths, down_paths, tuple(roots))


def tree_link_loads(tree: RoutingTree, t: Topology) -> np.ndarray:
    """Per-link route count when each ordered pair sends one unit through the tree."""
    loads = np.zeros(t.num_links)
    for u, v in t.node_pairs():
        route = tree.route(t, u, v)
        if route:
            for lid in route:
                loads[lid] += 1.0
    return loads


def raecke_distribution(
    t: Topology,
    iterations: int = 8,
    seed: int = 0,
    epsilon: float = 0.5,
) -> RoutingTreeDistribution:
    """Iteratively build trees, penalizing links by their relative load.

    Starts from inverse-capacity weights so even the first tree prefers
    high-capacity links; after each tree, link weight is multiplied by
    exp(epsilon * load_l / c_l) with load_l the all-pairs unit-demand
    route count, then weights renormalize to max 1. Trees share the
    distribution uniformly.
    """
    if iterations < 1:
        raise RoutingTreeError("iterations must be >= 1")
    rng = np.random.default_rng(seed)
    log_w = -np.log(t.capacities)
    log_w -= log_w.max()
    trees = []
    for _ in range(iterations):
        tree = build_routing_tree(t, np.exp(log_w), rng)
        trees.append(tree)
        loads = tree_link_loads(tree, t)
        log_w += epsilon * loads / t.capacities
        log_w -= log_w.max()
    lam = 1.0 / iterations
    return RoutingTreeDistribution(tuple((tree, lam) for tree in trees))


def extract_weighted_paths(dist: RoutingTreeDistribution, t: Topology) -> WeightedPaths:
    """Flatten a tree distribution into per-pair weighted physical paths.

    Identical physical paths from different trees merge their
    probabilities; per-pair weights are normalized over the trees that
    can route the pair, so they sum to 1 for every reachable pair.
    """
    accum: dict[tuple[int, int], dict[tuple[int, ...], float]] = {}
    for u, v in t.node_pairs():
        by_links: dict[tuple[int, ...], float] = {}
        for tree, lam in dist.trees:
            route = tree.route(t, u, v)
            if route is None:
                continue
            by_links[route] = by_links.get(route, 0.0) + lam
        if by_links:
            accum[(u, v)] = by_links
    paths: dict[tuple[int, int], tuple[Path, ...]] = {}
    for pair, by_links in accum.items():
        total = sum(by_links.values())
        plist = [
            Path(pair[0], pair[1], links, weight=w / total)
            for links, w in by_links.items()
        ]
        plist.sort(key=lambda p: (-(p.weight or 0.0), p.nodes(t), p.links))
        paths[pair] = tuple(plist)
    return WeightedPaths(paths)
