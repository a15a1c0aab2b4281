"""Shared fixtures: small named topologies and the bundled GEANT file."""

from __future__ import annotations

from importlib import resources

import pytest

from tesim.topology import Link, Node, Topology, parse_topology


@pytest.fixture
def two_node() -> Topology:
    """a<->b, both directions capacity 10."""
    return Topology(
        [Node(0, "a"), Node(1, "b")],
        [Link(0, 0, 1, 10.0), Link(1, 1, 0, 10.0)],
    )


@pytest.fixture
def parallel_links() -> Topology:
    """a->b twice: capacities 10 and 5 (parallel links are distinct paths)."""
    return Topology(
        [Node(0, "a"), Node(1, "b")],
        [Link(0, 0, 1, 10.0), Link(1, 0, 1, 5.0)],
    )


@pytest.fixture
def diamond() -> Topology:
    """a->b->d and a->c->d, unit capacities."""
    return Topology(
        [Node(0, "a"), Node(1, "b"), Node(2, "c"), Node(3, "d")],
        [Link(0, 0, 1, 1.0), Link(1, 0, 2, 1.0), Link(2, 1, 3, 1.0), Link(3, 2, 3, 1.0)],
    )


@pytest.fixture
def four_cycle_bidir() -> Topology:
    """Cycle a->b->c->d->a plus all reverse links, unit capacities."""
    nodes = [Node(i, s) for i, s in enumerate("abcd")]
    arcs = [(0, 1), (1, 2), (2, 3), (3, 0)]
    links = [Link(i, a, b, 1.0) for i, (a, b) in enumerate(arcs)]
    links += [Link(len(links) + i, b, a, 1.0) for i, (a, b) in enumerate(arcs)]
    return Topology(nodes, links)


@pytest.fixture
def k4() -> Topology:
    """Complete digraph on 4 nodes, unit capacities."""
    nodes = [Node(i, f"n{i}") for i in range(4)]
    links = []
    for i in range(4):
        for j in range(4):
            if i != j:
                links.append(Link(len(links), i, j, 1.0))
    return Topology(nodes, links)


def load_geant() -> Topology:
    source = (resources.files("tesim") / "data" / "geant.graphml").read_text()
    return parse_topology(source, "graphml")


@pytest.fixture(scope="session")
def geant() -> Topology:
    return load_geant()
