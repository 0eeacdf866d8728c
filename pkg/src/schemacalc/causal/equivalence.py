"""Markov equivalence via skeletons, v-structures and completed partial DAGs."""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Dag


def skeleton(dag: Dag) -> frozenset:
    return frozenset(frozenset(e) for e in dag.edges)


def v_structures(dag: Dag) -> frozenset:
    """Unshielded colliders a→c←b, with a and b non-adjacent."""
    out = set()
    for c in dag.nodes:
        pa = dag.parents(c)
        for i, a in enumerate(pa):
            for b in pa[i + 1:]:
                if not dag.adjacent(a, b):
                    out.add((frozenset((a, b)), c))
    return frozenset(out)


def markov_equivalent(d1: Dag, d2: Dag) -> bool:
    return (set(d1.nodes) == set(d2.nodes)
            and skeleton(d1) == skeleton(d2)
            and v_structures(d1) == v_structures(d2))


@dataclass(frozen=True)
class Cpdag:
    nodes: tuple
    undirected: tuple  # sorted pairs
    directed: tuple  # sorted (source, target) pairs

    @property
    def skeleton(self) -> frozenset:
        return frozenset(frozenset(e) for e in self.undirected + self.directed)

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "directed": [list(e) for e in self.directed],
            "undirected": [list(e) for e in self.undirected],
        }


def cpdag(dag: Dag) -> Cpdag:
    """Orient the v-structures, then close under orientation rules R1 to R3."""
    pos = {v: i for i, v in enumerate(dag.nodes)}
    adj = {v: set() for v in dag.nodes}
    for u, v in dag.edges:
        adj[u].add(v)
        adj[v].add(u)
    directed = set()
    for pair, c in v_structures(dag):
        for a in pair:
            directed.add((a, c))

    def undirected(a, b):
        return b in adj[a] and (a, b) not in directed and (b, a) not in directed

    changed = True
    while changed:
        changed = False
        for a, b in list(dag.edges):
            for x, y in ((a, b), (b, a)):
                if not undirected(x, y):
                    continue
                # rule 1: z→x, x−y, z and y non-adjacent
                r1 = any((z, x) in directed and y not in adj[z] and z != y for z in dag.nodes)
                # rule 2: x→z→y with x−y
                r2 = any((x, z) in directed and (z, y) in directed for z in dag.nodes)
                # rule 3: x−z, x−w, z→y, w→y, z and w non-adjacent
                zs = [z for z in dag.nodes if undirected(x, z) and (z, y) in directed]
                r3 = any(w not in adj[z] for i, z in enumerate(zs) for w in zs[i + 1:])
                if r1 or r2 or r3:
                    directed.add((x, y))
                    changed = True
    und = sorted(
        (tuple(sorted(e, key=pos.get)) for e in skeleton(dag)
         if not any((u, v) in directed for u in e for v in e)),
        key=lambda e: (pos[e[0]], pos[e[1]]),
    )
    return Cpdag(
        dag.nodes,
        tuple(und),
        tuple(sorted(directed, key=lambda e: (pos[e[0]], pos[e[1]]))),
    )
