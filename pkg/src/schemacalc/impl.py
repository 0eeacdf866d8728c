"""Implemented schemas: a syntactic schema paired with a language and parameters.

Only the ``tabular`` language ships built in.  Its tables are either
stochastic (one probability row per input point, rows over the codomain axes)
or deterministic (one real per input point, used for goal/value schemas whose
codomain is a real grid).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainMismatch, NonStochasticRow, ShapeMismatch, UnsupportedLanguage
from .syntax import REAL, SchemaTerm, SchemaType

PROB_TOL = 1e-9


@dataclass(frozen=True)
class ShapeSpec:
    dims: tuple
    stochastic: bool
    row_axes: int  # leading axes that index the input point


@dataclass(frozen=True)
class ImplLanguage:
    name: str
    param_shape_of: Callable[[SchemaType], ShapeSpec] = field(compare=False, repr=False)


def is_deterministic_type(t: SchemaType) -> bool:
    return len(t.cod) == 1 and t.cod[0].role == REAL


def _tabular_shape(t: SchemaType) -> ShapeSpec:
    dom = tuple(s.size for s in t.dom)
    if is_deterministic_type(t):
        return ShapeSpec(dom, stochastic=False, row_axes=len(dom))
    return ShapeSpec(dom + tuple(s.size for s in t.cod), stochastic=True, row_axes=len(dom))


TABULAR = ImplLanguage("tabular", _tabular_shape)
LANGUAGES = {"tabular": TABULAR}


def register_language(lang: ImplLanguage) -> None:
    LANGUAGES[lang.name] = lang


def get_language(name: str) -> ImplLanguage:
    try:
        return LANGUAGES[name]
    except KeyError:
        raise UnsupportedLanguage(f"no implementation language named {name!r}") from None


class ParamTensor:
    """Read-only dense parameter array."""

    __slots__ = ("values",)

    def __init__(self, values, shape=None):
        arr = np.array(values, dtype=float)
        if shape is not None:
            shape = tuple(shape)
            if arr.size != int(np.prod(shape)):
                raise ShapeMismatch(f"{arr.size} values cannot fill shape {list(shape)}")
            arr = arr.reshape(shape)
        arr.setflags(write=False)
        self.values = arr

    @property
    def shape(self) -> tuple:
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, ParamTensor):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.values, other.values)

    __hash__ = None

    def __repr__(self):
        return f"ParamTensor(shape={list(self.shape)})"


def as_params(x) -> ParamTensor:
    return x if isinstance(x, ParamTensor) else ParamTensor(x)


def check_params(t: SchemaType, lang: ImplLanguage, params: ParamTensor) -> ShapeSpec:
    spec = lang.param_shape_of(t)
    if params.shape != spec.dims:
        raise ShapeMismatch(f"parameters have shape {list(params.shape)}, need {list(spec.dims)}")
    if not np.all(np.isfinite(params.values)):
        raise ShapeMismatch("parameters must be finite")
    if spec.stochastic:
        rows = params.values.reshape(int(np.prod(spec.dims[: spec.row_axes], dtype=int)), -1)
        if np.any(rows < 0) or np.any(np.abs(rows.sum(axis=1) - 1.0) > PROB_TOL):
            raise NonStochasticRow("every table row must be a probability vector")
    return spec


@dataclass(frozen=True)
class ImplementedSchema:
    term: SchemaTerm
    lang: ImplLanguage
    params: ParamTensor
    id: str

    @property
    def type(self) -> SchemaType:
        return self.term.type

    @property
    def shape_spec(self) -> ShapeSpec:
        return self.lang.param_shape_of(self.term.type)


def _content_id(term: SchemaTerm, lang: ImplLanguage, params: ParamTensor) -> str:
    h = hashlib.sha256()
    h.update(term.key.encode())
    h.update(lang.name.encode())
    h.update(np.ascontiguousarray(params.values).tobytes())
    return "s" + h.hexdigest()[:12]


def implement(term: SchemaTerm, lang: ImplLanguage, params, id: Optional[str] = None) -> ImplementedSchema:
    params = as_params(params)
    spec = lang.param_shape_of(term.type)
    if params.values.size == int(np.prod(spec.dims, dtype=int)) and params.shape != spec.dims:
        if params.values.ndim == 1 and len(spec.dims) != 1:
            params = ParamTensor(params.values, spec.dims)
    check_params(term.type, lang, params)
    return ImplementedSchema(term, lang, params, id or _content_id(term, lang, params))


def update(s: ImplementedSchema, u: Callable) -> ImplementedSchema:
    """Apply a parameter map, keeping the schema, language and id."""
    new = as_params(u(s.params))
    if new.shape != s.params.shape:
        raise ShapeMismatch(f"update changed shape {list(s.params.shape)} -> {list(new.shape)}")
    check_params(s.term.type, s.lang, new)
    return ImplementedSchema(s.term, s.lang, new, s.id)


def transform(s: ImplementedSchema, lang2: ImplLanguage, translate: Callable) -> ImplementedSchema:
    new = as_params(translate(s.params))
    check_params(s.term.type, lang2, new)
    return ImplementedSchema(s.term, lang2, new, s.id)


# ---------------------------------------------------------------------------
# morphisms


def _identity(x):
    return x


@dataclass(frozen=True)
class ImplMorphism:
    """Morphism between implemented-schema objects.

    ``param_map`` goes forward (source parameters to target parameters).
    ``dom_map``/``cod_map`` act on points and go backward, from the target's
    input/output points to the source's, which is the direction instances are
    reindexed in.
    """

    source: tuple  # (SchemaTerm, language name)
    target: tuple
    param_map: Callable = field(default=_identity, compare=False)
    dom_map: Callable = field(default=_identity, compare=False)
    cod_map: Callable = field(default=_identity, compare=False)
    syn: str = "id"

    @property
    def is_vertical(self) -> bool:
        return self.syn == "id" and self.source[0] == self.target[0]

    def __call__(self, s: ImplementedSchema) -> ImplementedSchema:
        if (s.term, s.lang.name) != self.source:
            raise DomainMismatch("morphism applied outside its source object")
        lang = get_language(self.target[1])
        new = as_params(self.param_map(s.params))
        check_params(self.target[0].type, lang, new)
        return ImplementedSchema(self.target[0], lang, new, s.id)


def identity_morphism(term: SchemaTerm, lang: str = "tabular") -> ImplMorphism:
    return ImplMorphism((term, lang), (term, lang))


def update_morphism(s: ImplementedSchema, u: Callable) -> ImplMorphism:
    obj = (s.term, s.lang.name)
    return ImplMorphism(obj, obj, param_map=u)


def transform_morphism(s: ImplementedSchema, lang2: ImplLanguage, translate: Callable) -> ImplMorphism:
    return ImplMorphism((s.term, s.lang.name), (s.term, lang2.name), param_map=translate)


def compose_morphisms(g: ImplMorphism, f: ImplMorphism) -> ImplMorphism:
    """``g`` after ``f``; parameters compose forward, point maps backward."""
    if f.target != g.source:
        raise DomainMismatch("codomain of the first morphism is not the domain of the second")
    if f.syn == "id" and g.syn == "id":
        syn = "id"
    elif f.syn == "id":
        syn = g.syn
    elif g.syn == "id":
        syn = f.syn
    else:
        syn = f"{g.syn}.{f.syn}"
    fp, gp = f.param_map, g.param_map
    fd, gd = f.dom_map, g.dom_map
    fc, gc = f.cod_map, g.cod_map
    return ImplMorphism(
        f.source,
        g.target,
        param_map=lambda th: gp(as_params(fp(th))),
        dom_map=lambda x: fd(gd(x)),
        cod_map=lambda y: fc(gc(y)),
        syn=syn,
    )


# ---------------------------------------------------------------------------
# JSON


def schema_to_json(s: ImplementedSchema) -> dict:
    from .syntax import term_to_json

    return {
        "id": s.id,
        "term": term_to_json(s.term),
        "lang": s.lang.name,
        "shape": list(s.params.shape),
        "values": [float(v) for v in s.params.values.ravel()],
    }


def schema_from_json(d: dict) -> ImplementedSchema:
    from .syntax import term_from_json

    lang = get_language(d["lang"])
    params = ParamTensor(d["values"], d["shape"])
    return implement(term_from_json(d["term"]), lang, params, d["id"])
