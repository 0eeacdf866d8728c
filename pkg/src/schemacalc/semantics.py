"""Finite Markov-kernel semantics.

Spaces are finite, so a kernel is a row-stochastic matrix indexed by the
row-major enumeration of the product points of its domain and codomain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from .errors import (
    DomainMismatch,
    NonStochasticRow,
    TypeMismatch,
    UnboundAtomic,
    UnknownPoint,
    UnsupportedLanguage,
)
from .impl import PROB_TOL, ImplementedSchema, ImplMorphism
from .syntax import (
    Atomic,
    Ctx,
    Encap,
    Null,
    Par,
    SchemaTerm,
    Seq,
    SpaceSpec,
    normalize,
)

BOTTOM = "⊥"


def as_product(space) -> tuple:
    if isinstance(space, SpaceSpec):
        return (space,)
    return tuple(space)


def product_points(spaces) -> list:
    return list(itertools.product(*(s.points for s in as_product(spaces))))


def product_size(spaces) -> int:
    n = 1
    for s in as_product(spaces):
        n *= s.size
    return n


def as_point(spaces, x) -> tuple:
    spaces = as_product(spaces)
    if len(spaces) == 1:
        if x in spaces[0]:
            return (x,)
        if isinstance(x, (tuple, list)) and len(x) == 1 and x[0] in spaces[0]:
            return (x[0],)
        raise UnknownPoint(f"{x!r} is not a point of {spaces[0].label}")
    if not isinstance(x, (tuple, list)) or len(x) != len(spaces):
        raise UnknownPoint(f"{x!r} is not a point of a {len(spaces)}-fold product")
    for xi, s in zip(x, spaces):
        if xi not in s:
            raise UnknownPoint(f"{xi!r} is not a point of {s.label}")
    return tuple(x)


def point_index(spaces, x) -> int:
    spaces = as_product(spaces)
    x = as_point(spaces, x)
    idx = 0
    for xi, s in zip(x, spaces):
        idx = idx * s.size + s.index(xi)
    return idx


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteDist:
    space: tuple
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "space", as_product(self.space))
        p = _readonly(self.probs)
        object.__setattr__(self, "probs", p)
        if p.shape != (product_size(self.space),):
            raise DomainMismatch("probability vector does not match its space")
        if np.any(p < 0) or abs(p.sum() - 1.0) > PROB_TOL:
            raise NonStochasticRow("not a probability vector")

    def prob(self, x) -> float:
        return float(self.probs[point_index(self.space, x)])

    def support(self) -> list:
        pts = product_points(self.space)
        return [(pts[i], float(p)) for i, p in enumerate(self.probs) if p > 0]

    def __eq__(self, other):
        if not isinstance(other, FiniteDist):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.probs, other.probs)


def dirac(space, x) -> FiniteDist:
    space = as_product(space)
    p = np.zeros(product_size(space))
    p[point_index(space, x)] = 1.0
    return FiniteDist(space, p)


@dataclass(frozen=True, eq=False)
class FiniteKernel:
    dom: tuple
    cod: tuple
    matrix: np.ndarray
    order: tuple = field(default=(), compare=False)  # sequencing metadata

    def __post_init__(self):
        object.__setattr__(self, "dom", as_product(self.dom))
        object.__setattr__(self, "cod", as_product(self.cod))
        m = _readonly(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.shape != (product_size(self.dom), product_size(self.cod)):
            raise DomainMismatch(
                f"matrix shape {m.shape} does not match "
                f"{product_size(self.dom)}x{product_size(self.cod)}"
            )
        if np.any(m < 0) or np.any(np.abs(m.sum(axis=1) - 1.0) > PROB_TOL):
            raise NonStochasticRow("kernel rows must be probability vectors")

    def __call__(self, x) -> FiniteDist:
        return FiniteDist(self.cod, self.matrix[point_index(self.dom, x)])

    def __eq__(self, other):
        if not isinstance(other, FiniteKernel):
            return NotImplemented
        return (
            self.dom == other.dom
            and self.cod == other.cod
            and np.array_equal(self.matrix, other.matrix)
        )

    def allclose(self, other: "FiniteKernel", tol: float = PROB_TOL) -> bool:
        return (
            self.dom == other.dom
            and self.cod == other.cod
            and bool(np.all(np.abs(self.matrix - other.matrix) <= tol))
        )

    def to_json(self) -> dict:
        return {
            "dom": [s.to_json() for s in self.dom],
            "cod": [s.to_json() for s in self.cod],
            "rows": self.matrix.tolist(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "FiniteKernel":
        return cls(
            tuple(SpaceSpec.from_json(s) for s in d["dom"]),
            tuple(SpaceSpec.from_json(s) for s in d["cod"]),
            d["rows"],
        )


def identity_kernel(space) -> FiniteKernel:
    space = as_product(space)
    return FiniteKernel(space, space, np.eye(product_size(space)))


def kernel_compose(f: FiniteKernel, g: FiniteKernel) -> FiniteKernel:
    """``g`` after ``f``: (g∘f)(x)(z) = Σ_y f(x)(y)·g(y)(z)."""
    if f.cod != g.dom:
        raise DomainMismatch("codomain of the first kernel differs from the domain of the second")
    return FiniteKernel(f.dom, g.cod, f.matrix @ g.matrix)


def kernel_product(f: FiniteKernel, g: FiniteKernel) -> FiniteKernel:
    return FiniteKernel(f.dom + g.dom, f.cod + g.cod, np.kron(f.matrix, g.matrix))


def dirac_values(k: FiniteKernel) -> list:
    """Output point of every row of a deterministic kernel."""
    pts = product_points(k.cod)
    out = []
    for row in k.matrix:
        j = int(np.argmax(row))
        if row[j] != 1.0:
            raise TypeMismatch("kernel is not deterministic")
        out.append(pts[j])
    return out


# ---------------------------------------------------------------------------
# the Model functor


def model(s: ImplementedSchema) -> FiniteKernel:
    if s.lang.name != "tabular":
        raise UnsupportedLanguage(f"no kernel semantics for language {s.lang.name!r}")
    t = s.term.type
    spec = s.shape_spec
    n_dom = product_size(t.dom)
    if spec.stochastic:
        return FiniteKernel(t.dom, t.cod, s.params.values.reshape(n_dom, -1))
    values = [float(v) for v in s.params.values.ravel()]
    grid = t.cod[0]
    pts = sorted(set(grid.points) | set(values))
    cod = SpaceSpec(grid.label, tuple(pts), grid.role)
    m = np.zeros((n_dom, len(pts)))
    for i, v in enumerate(values):
        m[i, cod.index(v)] = 1.0
    return FiniteKernel(t.dom, (cod,), m)


# ---------------------------------------------------------------------------
# interpretation of composite terms

Predicate = Callable[[FiniteDist], bool]


def _default_cond(dist: FiniteDist) -> bool:
    # a context schema counts as active unless it is itself certainly gated off
    if len(dist.space) == 1 and BOTTOM in dist.space[0]:
        return dist.prob(BOTTOM) < 1.0
    return True


def interpret(
    t: SchemaTerm,
    bind: Mapping[str, ImplementedSchema],
    conds: Optional[Mapping[str, Predicate]] = None,
) -> FiniteKernel:
    """Kernel of a schema term, computed on its normal form.

    ``conds`` maps a context schema (atomic id or term key) to the predicate
    deciding, from that schema's output distribution, whether it holds.
    """
    return _interp(normalize(t), bind, conds or {})


def _interp(t, bind, conds) -> FiniteKernel:
    if isinstance(t, Atomic):
        if t.id not in bind:
            raise UnboundAtomic(f"atomic schema {t.id!r} is not bound")
        s = bind[t.id]
        if s.term.type != t.type:
            raise TypeMismatch(f"binding for {t.id!r} has a different schema type")
        return model(s)
    if isinstance(t, Null):
        return identity_kernel(t.type.dom)
    if isinstance(t, (Par, Seq)):
        kernels = [_interp(c, bind, conds) for c in t.children]
        k = kernels[0]
        for other in kernels[1:]:
            k = kernel_product(k, other)
        if isinstance(t, Seq):
            return FiniteKernel(k.dom, k.cod, k.matrix, order=tuple(c.key for c in t.children))
        return k
    if isinstance(t, Ctx):
        return _interp_ctx(t, bind, conds)
    if isinstance(t, Encap):
        raise TypeMismatch("an encapsulation has no kernel of its own")
    raise TypeError(f"not a schema term: {t!r}")


def _interp_ctx(t: Ctx, bind, conds) -> FiniteKernel:
    base = _interp(t.base, bind, conds)
    gates = []
    for phi in t.context:
        k = _interp(phi, bind, conds)
        try:
            pos = [base.dom.index(s) for s in k.dom]
        except ValueError:
            raise TypeMismatch(
                f"context {phi!r} reads spaces missing from the schema's domain"
            ) from None
        pred = None
        if isinstance(phi, Atomic):
            pred = conds.get(phi.id)
        pred = pred or conds.get(phi.key) or _default_cond
        gates.append((k, pos, pred))
    cod_pts = product_points(base.cod) + [BOTTOM]
    label = "gate(" + "*".join(s.label for s in base.cod) + ")"
    cod = SpaceSpec(label, tuple(cod_pts))
    n_cod = len(cod_pts)
    m = np.zeros((base.matrix.shape[0], n_cod))
    for i, x in enumerate(product_points(base.dom)):
        active = all(pred(k(tuple(x[p] for p in pos))) for k, pos, pred in gates)
        if active:
            m[i, :-1] = base.matrix[i]
        else:
            m[i, -1] = 1.0
    return FiniteKernel(base.dom, (cod,), m)


# ---------------------------------------------------------------------------
# instances and evaluation


@dataclass(frozen=True)
class EvaluatedInstance:
    input: tuple
    output: tuple
    weight: float

    def to_json(self) -> dict:
        return {"input": list(self.input), "output": list(self.output), "weight": self.weight}

    @classmethod
    def from_json(cls, d: dict) -> "EvaluatedInstance":
        from .syntax import _hashable

        return cls(
            tuple(_hashable(x) for x in d["input"]),
            tuple(_hashable(y) for y in d["output"]),
            float(d["weight"]),
        )


def inst_enumerate(s: ImplementedSchema) -> frozenset:
    k = model(s)
    xs, ys = product_points(k.dom), product_points(k.cod)
    return frozenset(
        EvaluatedInstance(xs[i], ys[j], float(k.matrix[i, j]))
        for i, j in zip(*np.nonzero(k.matrix > 0))
    )


def reindex_instance(m: ImplMorphism, inst: EvaluatedInstance) -> EvaluatedInstance:
    return EvaluatedInstance(tuple(m.dom_map(inst.input)), tuple(m.cod_map(inst.output)), inst.weight)


def inst_reindex(m: ImplMorphism, insts: Iterable[EvaluatedInstance]) -> frozenset:
    """Pull instances of the morphism's target back to its source."""
    return frozenset(reindex_instance(m, i) for i in insts)


def evaluate(s: ImplementedSchema, x) -> FiniteDist:
    return model(s)(x)


def sample(s: ImplementedSchema, x, seed: int):
    """Draw one output point by inverse CDF over the canonical point order."""
    dist = evaluate(s, x)
    u = np.random.default_rng(seed).random()
    cdf = np.cumsum(dist.probs)
    j = int(np.searchsorted(cdf, u, side="right"))
    j = min(j, len(cdf) - 1)
    while dist.probs[j] == 0:  # guard against rounding at the top of the cdf
        j -= 1
    pt = product_points(dist.space)[j]
    return pt[0] if len(pt) == 1 else pt


def permutation_morphism(s: ImplementedSchema, sigma, tau, target_id: str):
    """Relabel a stochastic schema's input and output points.

    Returns ``(m, t)`` where ``t`` is the relabelled schema and ``m: s → t``
    pulls a point of ``t`` back to the point of ``s`` it was relabelled from.
    """
    from .impl import implement
    from .syntax import make_atomic

    if not s.shape_spec.stochastic:
        raise TypeMismatch("only stochastic tables can be relabelled")
    k = model(s)
    xs, ys = product_points(k.dom), product_points(k.cod)
    sigma, tau = list(sigma), list(tau)
    if sorted(sigma) != list(range(len(xs))) or sorted(tau) != list(range(len(ys))):
        raise DomainMismatch("sigma and tau must be permutations of the point indices")
    table = k.matrix[np.ix_(sigma, tau)]
    term = make_atomic(target_id, s.type)
    t = implement(term, s.lang, table.reshape(s.params.shape), target_id)
    dom_pos = {x: i for i, x in enumerate(xs)}
    cod_pos = {y: j for j, y in enumerate(ys)}
    m = ImplMorphism(
        (s.term, s.lang.name),
        (term, s.lang.name),
        param_map=lambda th: np.asarray(th.values).reshape(len(xs), len(ys))[np.ix_(sigma, tau)].reshape(th.shape),
        dom_map=lambda x: xs[sigma[dom_pos[tuple(x)]]],
        cod_map=lambda y: ys[tau[cod_pos[tuple(y)]]],
        syn="relabel",
    )
    return m, t
