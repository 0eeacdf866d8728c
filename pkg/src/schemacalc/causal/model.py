"""Causal predictive schemas: a DAG with one conditional table per variable."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ..errors import EmptyDataset, NonStochasticRow, ShapeMismatch, UnknownValue, UnknownVariable
from ..impl import PROB_TOL
from ..semantics import FiniteDist
from ..syntax import SpaceSpec
from .graph import Dag


@dataclass(frozen=True, eq=False)
class Dataset:
    """Complete discrete observations stored as integer codes."""

    variables: tuple
    domains: tuple  # one tuple of values per variable
    codes: np.ndarray  # [n, len(variables)]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "domains", tuple(tuple(d) for d in self.domains))
        c = np.array(self.codes, dtype=np.int64).reshape(-1, len(self.variables))
        c.setflags(write=False)
        object.__setattr__(self, "codes", c)
        if len(self.domains) != len(self.variables):
            raise ShapeMismatch("one domain per variable is required")
        for j, dom in enumerate(self.domains):
            if c.size and (c[:, j].min() < 0 or c[:, j].max() >= len(dom)):
                raise UnknownValue(f"codes of {self.variables[j]!r} fall outside its domain")

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    def column(self, v) -> np.ndarray:
        try:
            return self.codes[:, self.variables.index(v)]
        except ValueError:
            raise UnknownVariable(f"dataset has no variable {v!r}") from None

    def size_of(self, v) -> int:
        return len(self.domains[self.variables.index(v)])

    @classmethod
    def from_rows(cls, variables, domains, rows) -> "Dataset":
        lookup = [{x: i for i, x in enumerate(d)} for d in domains]
        codes = []
        for row in rows:
            try:
                codes.append([lookup[j][x] for j, x in enumerate(row)])
            except KeyError as exc:
                raise UnknownValue(f"value {exc.args[0]!r} is not in its declared domain") from None
        return cls(tuple(variables), tuple(domains), np.array(codes, dtype=np.int64).reshape(-1, len(variables)))

    def rows(self) -> list:
        return [tuple(self.domains[j][c] for j, c in enumerate(r)) for r in self.codes]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self.variables == other.variables and self.domains == other.domains
                and np.array_equal(self.codes, other.codes))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.variables)
        for r in self.rows():
            w.writerow(r)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, domains: Optional[Mapping] = None) -> "Dataset":
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset("the CSV file is empty") from None
        rows = [r for r in reader if r]
        for i, r in enumerate(rows, start=2):
            if len(r) != len(header):
                raise ShapeMismatch(f"line {i}: expected {len(header)} fields, got {len(r)}")
        if domains is not None:
            doms = tuple(tuple(str(x) for x in domains[v]) for v in header)
        else:
            doms = tuple(tuple(sorted({r[j] for r in rows})) for j in range(len(header)))
        return cls.from_rows(header, doms, rows)


@dataclass(frozen=True, eq=False)
class CausalSchema:
    variables: tuple  # ((name, SpaceSpec), ...)
    dag: Dag
    cpts: Mapping  # name -> array [parent sizes in variable order..., own size]

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple((n, s) for n, s in self.variables))
        names = tuple(n for n, _ in self.variables)
        if self.dag.nodes != names:
            raise ShapeMismatch("the DAG must be over the variables, in their order")
        cpts = {}
        for v in names:
            if v not in self.cpts:
                raise ShapeMismatch(f"variable {v!r} has no conditional table")
            t = np.array(self.cpts[v], dtype=float)
            want = tuple(self.space(p).size for p in self.dag.parents(v)) + (self.space(v).size,)
            if t.shape != want:
                raise ShapeMismatch(f"table of {v!r} has shape {list(t.shape)}, need {list(want)}")
            rows = t.reshape(-1, want[-1])
            if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > PROB_TOL):
                raise NonStochasticRow(f"table of {v!r} has a row that is not a distribution")
            t.setflags(write=False)
            cpts[v] = t
        object.__setattr__(self, "cpts", cpts)

    @property
    def names(self) -> tuple:
        return self.dag.nodes

    def space(self, v) -> SpaceSpec:
        for n, s in self.variables:
            if n == v:
                return s
        raise UnknownVariable(f"unknown variable {v!r}")

    def parents(self, v) -> tuple:
        return self.dag.parents(v)

    def __eq__(self, other):
        if not isinstance(other, CausalSchema):
            return NotImplemented
        return (self.variables == other.variables and self.dag == other.dag
                and all(np.array_equal(self.cpts[v], other.cpts[v]) for v in self.names))


def uniform_cpt(shape) -> np.ndarray:
    return np.full(tuple(shape), 1.0 / shape[-1])


def empty_schema(variables) -> CausalSchema:
    """Edgeless model with uniform tables."""
    variables = tuple(variables)
    dag = Dag(tuple(n for n, _ in variables))
    return CausalSchema(variables, dag, {n: np.full(s.size, 1.0 / s.size) for n, s in variables})


def variables_of(data: Dataset) -> tuple:
    return tuple((v, SpaceSpec(v, d)) for v, d in zip(data.variables, data.domains))


def joint(c: CausalSchema) -> FiniteDist:
    """Product of the conditional tables over the full product space."""
    names = c.names
    spaces = tuple(s for _, s in c.variables)
    shape = tuple(s.size for s in spaces)
    p = np.ones(shape)
    letters = "abcdefghijklmnopqrstuvwxyz"
    if len(names) > len(letters):
        raise ShapeMismatch("too many variables for a dense joint")
    axis = {v: letters[i] for i, v in enumerate(names)}
    full = "".join(axis[v] for v in names)
    for v in names:
        sub = "".join(axis[q] for q in c.parents(v)) + axis[v]
        p = np.einsum(f"{full},{sub}->{full}", p, c.cpts[v])
    return FiniteDist(spaces, p.ravel())


def do_intervene(c: CausalSchema, var, value) -> CausalSchema:
    """Graph surgery: cut the arrows into ``var`` and pin it to ``value``."""
    s = c.space(var)
    if value not in s:
        raise UnknownValue(f"{value!r} is not a value of {var!r}")
    dag = c.dag
    for p in c.parents(var):
        dag = dag.delete(p, var)
    t = np.zeros(s.size)
    t[s.index(value)] = 1.0
    return CausalSchema(c.variables, dag, {**c.cpts, var: t})


def _refit(c: CausalSchema, dag: Dag, changed, data: Optional[Dataset], alpha: float) -> CausalSchema:
    from .score import fit_table

    cpts = dict(c.cpts)
    for v in changed:
        if data is None:
            shape = tuple(c.space(p).size for p in dag.parents(v)) + (c.space(v).size,)
            cpts[v] = uniform_cpt(shape)
        else:
            cpts[v] = fit_table(data, v, dag.parents(v), alpha)
    return CausalSchema(c.variables, dag, cpts)


def arc_add(c: CausalSchema, u, v, data: Optional[Dataset] = None, alpha: float = 1.0) -> CausalSchema:
    return _refit(c, c.dag.add(u, v), (v,), data, alpha)


def arc_delete(c: CausalSchema, u, v, data: Optional[Dataset] = None, alpha: float = 1.0) -> CausalSchema:
    return _refit(c, c.dag.delete(u, v), (v,), data, alpha)


def arc_reverse(c: CausalSchema, u, v, data: Optional[Dataset] = None, alpha: float = 1.0) -> CausalSchema:
    return _refit(c, c.dag.reverse(u, v), (u, v), data, alpha)


def sample_data(c: CausalSchema, n: int, seed: int) -> Dataset:
    """Ancestral sampling in topological order."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(seed)
    names = c.names
    codes = np.zeros((n, len(names)), dtype=np.int64)
    col = {v: i for i, v in enumerate(names)}
    for v in c.dag.topo_order():
        table = c.cpts[v]
        pa = c.parents(v)
        flat = table.reshape(-1, table.shape[-1])
        idx = np.zeros(n, dtype=np.int64)
        for p in pa:
            idx = idx * c.space(p).size + codes[:, col[p]]
        cdf = np.cumsum(flat[idx], axis=1)
        u = rng.random(n)
        x = (u[:, None] >= cdf).sum(axis=1)
        codes[:, col[v]] = np.minimum(x, table.shape[-1] - 1)
    return Dataset(names, tuple(c.space(v).points for v in names), codes)


# ---------------------------------------------------------------------------
# JSON


def causal_to_json(c: CausalSchema) -> dict:
    return {
        "variables": [{"name": n, "domain": list(s.points)} for n, s in c.variables],
        "edges": [list(e) for e in c.dag.sorted_edges()],
        "cpts": {v: {"parents": list(c.parents(v)), "table": c.cpts[v].tolist()} for v in c.names},
    }


def causal_from_json(d: dict) -> CausalSchema:
    from ..syntax import _hashable

    variables = tuple(
        (x["name"], SpaceSpec(x["name"], tuple(_hashable(p) for p in x["domain"])))
        for x in d["variables"]
    )
    dag = Dag(tuple(n for n, _ in variables), frozenset(tuple(e) for e in d.get("edges", [])))
    cpts = {}
    for v, entry in d["cpts"].items():
        table = entry["table"] if isinstance(entry, dict) else entry
        if isinstance(entry, dict) and tuple(entry.get("parents", dag.parents(v))) != dag.parents(v):
            raise ShapeMismatch(f"declared parents of {v!r} disagree with the edges")
        cpts[v] = table
    return CausalSchema(variables, dag, cpts)
