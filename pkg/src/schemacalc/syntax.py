"""Syntactic schemas: spaces, schema types, operator terms and their normal forms.

Equality of terms is decided by normal forms.  ``normalize`` flattens and sorts
the commutative operators, drops null schemas where they act as units, merges
nested contexts and collapses repeated encapsulations, so an algebraic law
holds exactly when both sides normalize to the same tree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union

from .errors import MalformedType, NotDecomposable, NotPredictive

KINDS = ("Perceptual", "Motor", "Goal", "Predictive", "Abstract")

# roles a space can play inside a schema type
SENSOR, OBS, DECISION, HIDDEN, GOAL, EFFECTOR, PRED, REAL = "S", "O", "D", "H", "G", "E", "Pred", "R"
MENTAL_ROLES = frozenset({OBS, DECISION, HIDDEN, GOAL})


@dataclass(frozen=True)
class SpaceSpec:
    """A finite measurable space with a fixed point order.

    ``role`` says what the space stands for (``"O"``, ``"D"``, ``"R"`` ...) and
    defaults to the label.
    """

    label: str
    points: tuple
    role: str = ""

    def __post_init__(self):
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if not self.role:
            object.__setattr__(self, "role", self.label)
        if not pts:
            raise MalformedType(f"space {self.label!r} has no points")
        if len({_hashable(p) for p in pts}) != len(pts):
            raise MalformedType(f"space {self.label!r} has repeated points")

    @cached_property
    def _index(self):
        return {_hashable(p): i for i, p in enumerate(self.points)}

    @property
    def size(self) -> int:
        return len(self.points)

    def index(self, point) -> int:
        return self._index[_hashable(point)]

    def __contains__(self, point) -> bool:
        try:
            return _hashable(point) in self._index
        except TypeError:
            return False

    def to_json(self) -> dict:
        out = {"label": self.label, "points": list(self.points)}
        if self.role != self.label:
            out["role"] = self.role
        return out

    @classmethod
    def from_json(cls, d: dict) -> "SpaceSpec":
        return cls(d["label"], tuple(_point_from_json(p) for p in d["points"]), d.get("role", ""))


def _hashable(p):
    # lists arrive from JSON where tuples were meant
    if isinstance(p, list):
        return tuple(_hashable(x) for x in p)
    return p


def _point_from_json(p):
    return _hashable(p)


@dataclass(frozen=True)
class SchemaType:
    kind: str
    dom: tuple = ()
    cod: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "dom", tuple(self.dom))
        object.__setattr__(self, "cod", tuple(self.cod))
        _check_type(self)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "dom": [s.to_json() for s in self.dom],
            "cod": [s.to_json() for s in self.cod],
        }

    @classmethod
    def from_json(cls, d: dict) -> "SchemaType":
        return cls(
            d["kind"],
            tuple(SpaceSpec.from_json(s) for s in d["dom"]),
            tuple(SpaceSpec.from_json(s) for s in d["cod"]),
        )


def _roles(spaces) -> set:
    return {s.role for s in spaces}


def _check_type(t: SchemaType) -> None:
    if t.kind not in KINDS:
        raise MalformedType(f"unknown schema kind {t.kind!r}")
    if not all(isinstance(s, SpaceSpec) for s in t.dom + t.cod):
        raise MalformedType("dom/cod must be products of SpaceSpec")
    if t.kind == "Abstract":
        return
    if not t.dom or not t.cod:
        raise MalformedType(f"{t.kind} schema needs a non-empty domain and codomain")
    dom, cod = _roles(t.dom), _roles(t.cod)
    if t.kind == "Perceptual":
        ok = dom <= {SENSOR} and cod <= {OBS}
    elif t.kind == "Motor":
        ok = dom <= {DECISION} and cod <= {EFFECTOR}
    elif t.kind == "Goal":
        ok = dom <= {OBS, DECISION} and len(t.cod) == 1 and cod == {REAL}
    else:  # Predictive
        ok = dom <= MENTAL_ROLES and cod <= MENTAL_ROLES | {PRED}
    if not ok:
        raise MalformedType(
            f"{t.kind} schema cannot map {sorted(dom)} to {sorted(cod)}"
        )


# ---------------------------------------------------------------------------
# terms


class SchemaTerm:
    """Common behaviour of term nodes; concrete nodes are frozen dataclasses."""

    @cached_property
    def key(self) -> str:
        """Canonical string built from the children's keys; leaves are JSON."""
        if isinstance(self, (Atomic, Null)):
            return json.dumps(term_to_json(self), sort_keys=True, separators=(",", ":"))
        if isinstance(self, Ctx):
            return f"ctx({self.base.key};{','.join(c.key for c in self.context)})"
        return f"{type(self).__name__.lower()}({','.join(c.key for c in self.children)})"

    @cached_property
    def _hash(self) -> int:
        return hash(self.key)

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "SchemaTerm") -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        if isinstance(self, Atomic):
            return self.id
        if isinstance(self, Null):
            return "null"
        if isinstance(self, Ctx):
            return f"ctx({self.base!r}; {', '.join(map(repr, self.context))})"
        return f"{type(self).__name__.lower()}({', '.join(map(repr, self.children))})"


@dataclass(frozen=True, repr=False)
class Atomic(SchemaTerm):
    id: str
    type: SchemaType


@dataclass(frozen=True, repr=False)
class Null(SchemaTerm):
    type: SchemaType


@dataclass(frozen=True, repr=False)
class Par(SchemaTerm):
    children: tuple

    @property
    def type(self) -> SchemaType:
        return SchemaType(
            "Abstract",
            sum((c.type.dom for c in self.children), ()),
            sum((c.type.cod for c in self.children), ()),
        )


@dataclass(frozen=True, repr=False)
class Seq(SchemaTerm):
    children: tuple

    @property
    def type(self) -> SchemaType:
        return SchemaType(
            "Abstract",
            sum((c.type.dom for c in self.children), ()),
            sum((c.type.cod for c in self.children), ()),
        )


@dataclass(frozen=True, repr=False)
class Encap(SchemaTerm):
    children: tuple

    @property
    def type(self) -> SchemaType:
        dom, cod = [], []
        for c in self.children:
            dom += [s for s in c.type.dom if s not in dom]
            cod += [s for s in c.type.cod if s not in cod]
        return SchemaType("Abstract", tuple(dom), tuple(cod))


@dataclass(frozen=True, repr=False)
class Ctx(SchemaTerm):
    base: SchemaTerm
    context: tuple = field(default=())

    @property
    def type(self) -> SchemaType:
        return self.base.type


Term = Union[Atomic, Null, Par, Seq, Encap, Ctx]

for _cls in (Atomic, Null, Par, Seq, Encap, Ctx):
    # the dataclass hash walks the whole tree; the cached key-based one does not
    _cls.__hash__ = SchemaTerm.__hash__


def make_atomic(id: str, type: SchemaType) -> Atomic:
    if not id:
        raise MalformedType("atomic schema needs a non-empty id")
    if not isinstance(type, SchemaType):
        raise MalformedType("atomic schema needs a SchemaType")
    return Atomic(id, type)


def make_null(type: SchemaType) -> Null:
    return Null(type)


def comb_par(a: SchemaTerm, b: SchemaTerm) -> SchemaTerm:
    return normalize(Par((a, b)))


def comb_seq(a: SchemaTerm, b: SchemaTerm) -> SchemaTerm:
    return normalize(Seq((a, b)))


def encap(a: SchemaTerm, b: SchemaTerm) -> SchemaTerm:
    return normalize(Encap((a, b)))


def ctx(psi: SchemaTerm, contexts: Iterable[SchemaTerm]) -> SchemaTerm:
    return normalize(Ctx(psi, tuple(contexts)))


def ref(psi: SchemaTerm) -> tuple:
    """Split a composite or encapsulated schema into two components."""
    t = normalize(psi)
    if isinstance(t, (Par, Seq, Encap)):
        head, rest = t.children[0], t.children[1:]
        tail = rest[0] if len(rest) == 1 else normalize(type(t)(rest))
        return head, tail
    raise NotDecomposable(f"{type(t).__name__} schema has no components")


# ---------------------------------------------------------------------------
# normal forms


def normalize(t: SchemaTerm) -> SchemaTerm:
    if isinstance(t, (Atomic, Null)):
        return t
    if isinstance(t, Par):
        return _norm_comb(Par, [normalize(c) for c in t.children], commutative=True)
    if isinstance(t, Seq):
        return _norm_comb(Seq, [normalize(c) for c in t.children], commutative=False)
    if isinstance(t, Encap):
        return _norm_encap([normalize(c) for c in t.children])
    if isinstance(t, Ctx):
        return _norm_ctx(normalize(t.base), {normalize(c) for c in t.context})
    raise TypeError(f"not a schema term: {t!r}")


def _norm_comb(cls, children, commutative):
    flat = []
    for c in children:
        if isinstance(c, cls):
            flat.extend(c.children)
        elif not isinstance(c, Null):
            flat.append(c)
    if not flat:
        return min(children)  # only nulls were combined
    if len(flat) == 1:
        return flat[0]
    if commutative:
        flat.sort()
    return cls(tuple(flat))


def _norm_ctx(base, contexts: set):
    if isinstance(base, Ctx):
        contexts = contexts | set(base.context)
        base = base.base
    if not contexts:
        return base
    if isinstance(base, Encap):
        # conditioning an abstraction conditions each of its specializations
        return _norm_encap([_norm_ctx(m, set(contexts)) for m in base.children])
    return Ctx(base, tuple(sorted(contexts)))


def _norm_encap(children):
    members = set()
    for c in children:
        if isinstance(c, Encap):
            members.update(c.children)
        else:
            members.add(c)
    members = sorted(members)
    kept = []
    for m in members:
        dominated = any(
            o != m and _le(m, o) and (not _le(o, m) or o.key < m.key) for o in members
        )
        if not dominated:
            kept.append(m)
    if len(kept) == 1:
        return kept[0]
    return Encap(tuple(kept))


def term_equal(a: SchemaTerm, b: SchemaTerm) -> bool:
    return normalize(a) == normalize(b)


# ---------------------------------------------------------------------------
# specialization order


def _units(t: SchemaTerm) -> frozenset:
    """(term, context) pairs a normal-form term is built from."""
    cached = t.__dict__.get("_units")
    if cached is None:
        cached = _compute_units(t)
        t.__dict__["_units"] = cached
    return cached


def _compute_units(t: SchemaTerm) -> frozenset:
    if isinstance(t, Encap):
        return frozenset().union(*(_units(m) for m in t.children))
    if isinstance(t, Ctx):
        extra = frozenset(t.context)
        return frozenset((u, phi | extra) for u, phi in _units(t.base))
    out = {(t, frozenset())}
    if isinstance(t, (Par, Seq)):
        for c in t.children:
            out |= _units(c)
    return frozenset(out)


def _le(a: SchemaTerm, b: SchemaTerm) -> bool:
    if a == b:
        return True
    ub = _units(b)
    return all(any(u == v and psi <= phi for v, psi in ub) for u, phi in _units(a))


def specializes(a: SchemaTerm, b: SchemaTerm) -> bool:
    """True when ``a`` is a specialization of ``b``.

    Every component of an encapsulation and every part of a composite
    specializes it, and a schema under a larger context specializes the same
    schema under a smaller one.
    """
    return _le(normalize(a), normalize(b))


def is_dual(p: SchemaTerm, q: SchemaTerm) -> bool:
    for t in (p, q):
        if t.type.kind != "Predictive":
            raise NotPredictive(f"{t.key} is not a predictive schema")
    return p.type.dom == q.type.cod and p.type.cod == q.type.dom


# ---------------------------------------------------------------------------
# schema sets


@dataclass(frozen=True)
class SchemaSet:
    elems: frozenset = frozenset()

    def __post_init__(self):
        normal = (normalize(e) for e in self.elems)
        object.__setattr__(self, "elems", frozenset(e for e in normal if not isinstance(e, Null)))

    def __contains__(self, t) -> bool:
        return normalize(t) in self.elems

    def __iter__(self):
        return iter(sorted(self.elems))

    def __len__(self):
        return len(self.elems)


def _as_batch(x) -> set:
    if isinstance(x, SchemaTerm):
        items = [x]
    else:
        items = list(x)
    return {e for e in map(normalize, items) if not isinstance(e, Null)}


def add(sigma: SchemaSet, psi) -> SchemaSet:
    """Extend a schema set by one schema or by a batch of schemas."""
    return SchemaSet(sigma.elems | _as_batch(psi))


def delete(sigma: SchemaSet, psi) -> SchemaSet:
    """Remove one schema or a batch of schemas from a schema set."""
    return SchemaSet(sigma.elems - _as_batch(psi))


# ---------------------------------------------------------------------------
# JSON


def term_to_json(t: SchemaTerm) -> dict:
    if isinstance(t, Atomic):
        return {"op": "atomic", "id": t.id, "type": t.type.to_json()}
    if isinstance(t, Null):
        return {"op": "null", "type": t.type.to_json()}
    if isinstance(t, Ctx):
        return {"op": "ctx", "children": [term_to_json(t.base)] + [term_to_json(c) for c in t.context]}
    op = {Par: "par", Seq: "seq", Encap: "encap"}[type(t)]
    return {"op": op, "children": [term_to_json(c) for c in t.children]}


def term_from_json(d: dict) -> SchemaTerm:
    op = d["op"]
    if op == "atomic":
        return Atomic(d["id"], SchemaType.from_json(d["type"]))
    if op == "null":
        return Null(SchemaType.from_json(d["type"]))
    children = tuple(term_from_json(c) for c in d["children"])
    if op == "ctx":
        return Ctx(children[0], children[1:])
    cls = {"par": Par, "seq": Seq, "encap": Encap}[op]
    return cls(children)
