"""Directed acyclic graphs over named variables."""

from __future__ import annotations

from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter

from ..errors import CycleCreated, EdgeAbsent, EdgePresent, UnknownVariable


@dataclass(frozen=True)
class Dag:
    nodes: tuple
    edges: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", frozenset((u, v) for u, v in self.edges))
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("node names must be unique")
        known = set(self.nodes)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise UnknownVariable(f"edge {u}->{v} mentions an unknown variable")
            if u == v:
                raise CycleCreated(f"self loop on {u}")
        if not _acyclic(self.nodes, self.edges):
            raise CycleCreated("graph has a directed cycle")

    def parents(self, v) -> tuple:
        """Parents of ``v`` in node order."""
        self._check(v)
        return tuple(u for u in self.nodes if (u, v) in self.edges)

    def children(self, u) -> tuple:
        self._check(u)
        return tuple(v for v in self.nodes if (u, v) in self.edges)

    def has_edge(self, u, v) -> bool:
        return (u, v) in self.edges

    def adjacent(self, u, v) -> bool:
        return (u, v) in self.edges or (v, u) in self.edges

    def topo_order(self) -> tuple:
        # ties resolved by node order so the result is deterministic
        order, placed = [], set()
        while len(order) < len(self.nodes):
            for v in self.nodes:
                if v not in placed and all(p in placed for p in self.parents(v)):
                    order.append(v)
                    placed.add(v)
                    break
        return tuple(order)

    def sorted_edges(self) -> list:
        pos = {v: i for i, v in enumerate(self.nodes)}
        return sorted(self.edges, key=lambda e: (pos[e[0]], pos[e[1]]))

    def add(self, u, v) -> "Dag":
        self._check(u)
        self._check(v)
        if (u, v) in self.edges:
            raise EdgePresent(f"edge {u}->{v} already present")
        edges = self.edges | {(u, v)}
        if u == v or not _acyclic(self.nodes, edges):
            raise CycleCreated(f"adding {u}->{v} creates a cycle")
        return Dag(self.nodes, edges)

    def delete(self, u, v) -> "Dag":
        if (u, v) not in self.edges:
            raise EdgeAbsent(f"edge {u}->{v} is absent")
        return Dag(self.nodes, self.edges - {(u, v)})

    def reverse(self, u, v) -> "Dag":
        return self.delete(u, v).add(v, u)

    def _check(self, v) -> None:
        if v not in self.nodes:
            raise UnknownVariable(f"unknown variable {v!r}")


def _acyclic(nodes, edges) -> bool:
    ts = TopologicalSorter({v: [] for v in nodes})
    for u, v in edges:
        ts.add(v, u)
    try:
        ts.prepare()
    except CycleError:
        return False
    return True


def covered(dag: Dag, u, v) -> bool:
    """Is u→v covered, i.e. Pa(v) = Pa(u) ∪ {u}?

    Inclusion alone is not enough: in w→u→v the parents of v other than u
    are trivially parents of u, yet reversing u→v creates the collider w→u←v.
    """
    if not dag.has_edge(u, v):
        raise EdgeAbsent(f"edge {u}->{v} is absent")
    return set(dag.parents(v)) == set(dag.parents(u)) | {u}
