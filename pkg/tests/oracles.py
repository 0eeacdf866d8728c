"""Reference computations the tests compare against.

Each oracle is written directly from the defining formula with plain loops,
without calling the package code it checks.
"""

import itertools
import math
from collections import Counter

import networkx as nx
import numpy as np


def compose_oracle(F, G):
    """(g∘f)(x)(z) = Σ_y f(x)(y) g(y)(z) by an explicit triple loop."""
    nx_, ny, nz = len(F), len(G), len(G[0])
    out = [[0.0] * nz for _ in range(nx_)]
    for x in range(nx_):
        for z in range(nz):
            for y in range(ny):
                out[x][z] += F[x][y] * G[y][z]
    return out


def product_oracle(F, G):
    """Rows indexed by (x1, x2), columns by (y1, y2), both row-major."""
    rows = []
    for r1 in F:
        for r2 in G:
            rows.append([a * b for a in r1 for b in r2])
    return rows


def bellman_oracle(V, T, R, gamma):
    n, k = len(T), len(T[0])
    out = []
    for o in range(n):
        out.append(max(
            sum(T[o][d][o2] * (R[o][d][o2] + gamma * V[o2]) for o2 in range(n))
            for d in range(k)
        ))
    return out


def policy_value(T, R, gamma, policy):
    """Exact value of a deterministic policy: solve (I − γP) v = r."""
    T, R = np.asarray(T), np.asarray(R)
    n = T.shape[0]
    P = np.array([T[o, policy[o]] for o in range(n)])
    r = np.array([float(np.dot(T[o, policy[o]], R[o, policy[o]])) for o in range(n)])
    return np.linalg.solve(np.eye(n) - gamma * P, r)


def optimal_values(T, R, gamma):
    """V* and the set of optimal policies, by enumerating all |D|^|O| policies."""
    T = np.asarray(T)
    n, k = T.shape[0], T.shape[1]
    values = {pi: policy_value(T, R, gamma, pi) for pi in itertools.product(range(k), repeat=n)}
    v_star = np.max(np.array(list(values.values())), axis=0)
    optimal = {pi for pi, v in values.items() if np.max(np.abs(v - v_star)) <= 1e-9}
    # some policy attains the pointwise maximum in a finite discounted MDP
    assert optimal, "no policy attains the pointwise maximum"
    return v_star, optimal


def joint_oracle(names, domains, parents, tables):
    """Joint probabilities of every assignment, in row-major order."""
    out = []
    for assignment in itertools.product(*[range(len(domains[v])) for v in names]):
        a = dict(zip(names, assignment))
        p = 1.0
        for v in names:
            t = np.asarray(tables[v])
            p *= float(t[tuple(a[q] for q in parents[v]) + (a[v],)])
        out.append(p)
    return out


def bic_oracle(edges, names, rows, sizes):
    """BIC from raw counts with Counter and math.log."""
    n = len(rows)
    col = {v: i for i, v in enumerate(names)}
    distinct = Counter(map(tuple, rows))
    total = 0.0
    for v in names:
        pa = [u for u in names if (u, v) in edges]
        joint, marg = Counter(), Counter()
        for r, c in distinct.items():
            cfg = tuple(r[col[u]] for u in pa)
            joint[(cfg, r[col[v]])] += c
            marg[cfg] += c
        ll = sum(c * math.log(c / marg[cfg]) for (cfg, _), c in joint.items())
        q = 1
        for u in pa:
            q *= sizes[u]
        total += ll - 0.5 * (sizes[v] - 1) * q * math.log(n)
    return total


def all_dags(names):
    """Every DAG on the given nodes, as frozensets of edges."""
    pairs = [(u, v) for u in names for v in names if u != v]
    out = []
    for mask in itertools.product((0, 1), repeat=len(pairs)):
        edges = frozenset(p for p, m in zip(pairs, mask) if m)
        g = nx.DiGraph()
        g.add_nodes_from(names)
        g.add_edges_from(edges)
        if nx.is_directed_acyclic_graph(g):
            out.append(edges)
    return out


def independence_model(names, edges):
    """All d-separation statements X ⟂ Y | Z that hold in the DAG."""
    g = nx.DiGraph()
    g.add_nodes_from(names)
    g.add_edges_from(edges)
    stmts = set()
    for x, y in itertools.combinations(names, 2):
        rest = [w for w in names if w not in (x, y)]
        for k in range(len(rest) + 1):
            for z in itertools.combinations(rest, k):
                if nx.is_d_separator(g, {x}, {y}, set(z)):
                    stmts.add((x, y, frozenset(z)))
    return frozenset(stmts)
