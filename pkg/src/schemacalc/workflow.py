"""Workflow terms and their action on mind states.

A workflow is a finite tree built from primitive operator applications with a
sequential product, a parallel product (branches must touch disjoint schema
ids), the two units, and a bounded do-while loop.
"""

from __future__ import annotations

import logging
import zlib
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, NamedTuple, Optional

import numpy as np

from .errors import (
    OverlappingParTargets,
    SchemaCalcError,
    SignatureViolation,
    UnresolvedTarget,
)
from .impl import get_language, update, transform, schema_from_json
from .mind import MemorySubsystem, MindState, mem_read, mind_par, restrict
from .semantics import EvaluatedInstance, evaluate, sample

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredicateRef:
    name: str
    args: Mapping = field(default_factory=dict)
    threshold: Optional[float] = None

    def to_json(self) -> dict:
        return {"name": self.name, "args": dict(self.args), "threshold": self.threshold}

    @classmethod
    def from_json(cls, d: dict) -> "PredicateRef":
        return cls(d["name"], dict(d.get("args", {})), d.get("threshold"))


class Workflow:
    """Base class of workflow terms."""


@dataclass(frozen=True)
class Prim(Workflow):
    name: str
    targets: tuple = ()
    args: Mapping = field(default_factory=dict)
    reads: tuple = ()


@dataclass(frozen=True)
class Sequential(Workflow):
    first: Workflow
    second: Workflow


@dataclass(frozen=True)
class Parallel(Workflow):
    left: Workflow
    right: Workflow


@dataclass(frozen=True)
class UnitSeq(Workflow):
    pass


@dataclass(frozen=True)
class UnitPar(Workflow):
    pass


@dataclass(frozen=True)
class Loop(Workflow):
    cond: PredicateRef
    body: Workflow
    max_iter: int = 10_000

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be at least 1")


def wf_prim(name: str, targets=(), args=None, reads=()) -> Prim:
    return Prim(name, tuple(targets), dict(args or {}), tuple(reads))


def wf_seq(a: Workflow, b: Workflow) -> Workflow:
    """``a`` then ``b``."""
    if isinstance(a, UnitSeq):
        return b
    if isinstance(b, UnitSeq):
        return a
    return Sequential(a, b)


def wf_par(a: Workflow, b: Workflow) -> Workflow:
    if isinstance(a, UnitPar):
        return b
    if isinstance(b, UnitPar):
        return a
    return Parallel(a, b)


def wf_loop(cond: PredicateRef, body: Workflow, max_iter: int = 10_000) -> Loop:
    return Loop(cond, body, int(max_iter))


def targets(w: Workflow) -> frozenset:
    """Schema ids the workflow may change."""
    if isinstance(w, Prim):
        return frozenset(w.targets)
    if isinstance(w, Sequential):
        return targets(w.first) | targets(w.second)
    if isinstance(w, Parallel):
        return targets(w.left) | targets(w.right)
    if isinstance(w, Loop):
        return targets(w.body)
    return frozenset()


def _pred_reads(p: PredicateRef) -> set:
    out = set()
    for k in ("schema", "target"):
        if k in p.args:
            out.add(p.args[k])
    return out


def touched(w: Workflow) -> frozenset:
    """Schema ids the workflow may change or read."""
    if isinstance(w, Prim):
        return frozenset(w.targets) | frozenset(w.reads)
    if isinstance(w, Sequential):
        return touched(w.first) | touched(w.second)
    if isinstance(w, Parallel):
        return touched(w.left) | touched(w.right)
    if isinstance(w, Loop):
        return touched(w.body) | frozenset(_pred_reads(w.cond))
    return frozenset()


def prim_names(w: Workflow) -> set:
    if isinstance(w, Prim):
        return {w.name}
    if isinstance(w, Sequential):
        return prim_names(w.first) | prim_names(w.second)
    if isinstance(w, Parallel):
        return prim_names(w.left) | prim_names(w.right)
    if isinstance(w, Loop):
        return prim_names(w.body)
    return set()


class RewriteResult(NamedTuple):
    workflow: Workflow
    applied: bool
    flag: Optional[str] = None


def interchange_rewrite(w: Workflow) -> RewriteResult:
    """(a ⊗ b) • (c ⊗ d)  ⟹  (a • c) ⊗ (b • d), when the two sides are independent."""
    if not (
        isinstance(w, Sequential)
        and isinstance(w.first, Parallel)
        and isinstance(w.second, Parallel)
    ):
        return RewriteResult(w, False, "NotApplicable")
    a, b = w.first.left, w.first.right
    c, d = w.second.left, w.second.right
    if (touched(a) | touched(c)) & (touched(b) | touched(d)):
        return RewriteResult(w, False, "NotApplicable")
    return RewriteResult(Parallel(Sequential(a, c), Sequential(b, d)), True)


# ---------------------------------------------------------------------------
# execution


@dataclass
class ExecTrace:
    log: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    metrics: list = field(default_factory=list)

    def line(self, msg: str) -> None:
        self.log.append(msg)
        log.info(msg)


@dataclass
class ExecContext:
    seed: int = 0
    trace: ExecTrace = field(default_factory=ExecTrace)
    allowed: Optional[frozenset] = None  # operator signature, when enforced


Operator = Callable[[MindState, Prim, ExecContext], MindState]
OPERATORS: dict = {}
UPDATE_RULES: dict = {}
PREDICATES: dict = {}


def register_operator(name: str):
    def deco(fn):
        OPERATORS[name] = fn
        return fn

    return deco


def register_update_rule(name: str):
    """Rule factories take (schema, mind, args) and return a parameter map."""

    def deco(fn):
        UPDATE_RULES[name] = fn
        return fn

    return deco


def register_predicate(name: str):
    """Predicates take (before, after, ref, ctx) and return a bool."""

    def deco(fn):
        PREDICATES[name] = fn
        return fn

    return deco


def _schema(M: MindState, sid: str):
    try:
        return M.schemas[sid]
    except KeyError:
        raise UnresolvedTarget(f"no schema {sid!r} in the mind state") from None


def _rng(ctx: ExecContext, *parts) -> np.random.Generator:
    # derived from the state being acted on, so the action stays compositional
    words = [int(ctx.seed) & 0xFFFFFFFF] + [zlib.crc32(str(p).encode()) for p in parts]
    return np.random.default_rng(words)


def execute(
    w: Workflow,
    M: MindState,
    seed: int = 0,
    trace: Optional[ExecTrace] = None,
    allowed=None,
) -> MindState:
    ctx = ExecContext(seed, trace if trace is not None else ExecTrace(),
                      None if allowed is None else frozenset(allowed))
    return _exec(w, M, ctx)


def _exec(w: Workflow, M: MindState, ctx: ExecContext) -> MindState:
    if isinstance(w, (UnitSeq, UnitPar)):
        return M
    if isinstance(w, Prim):
        if ctx.allowed is not None and w.name not in ctx.allowed:
            raise SignatureViolation(f"operator {w.name!r} is outside the module signature")
        try:
            op = OPERATORS[w.name]
        except KeyError:
            raise UnresolvedTarget(f"unknown operator {w.name!r}") from None
        out = op(M, w, ctx)
        ctx.trace.line(f"prim {w.name} targets={','.join(w.targets)}")
        return out
    if isinstance(w, Sequential):
        return _exec(w.second, _exec(w.first, M, ctx), ctx)
    if isinstance(w, Parallel):
        ta, tb = targets(w.left), targets(w.right)
        if ta & tb:
            raise OverlappingParTargets(f"parallel branches both target {sorted(ta & tb)}")
        a = _exec(w.left, M, ctx)
        b = _exec(w.right, M, ctx)
        rest = M.schema_ids() - ta - tb
        return mind_par(mind_par(restrict(a, ta), restrict(b, tb)), restrict(M, rest))
    if isinstance(w, Loop):
        return _exec_loop(w, M, ctx)
    raise TypeError(f"not a workflow: {w!r}")


def _exec_loop(w: Loop, M: MindState, ctx: ExecContext) -> MindState:
    try:
        pred = PREDICATES[w.cond.name]
    except KeyError:
        raise UnresolvedTarget(f"unknown predicate {w.cond.name!r}") from None
    state = M
    for i in range(1, w.max_iter + 1):
        prev = state
        state = _exec(w.body, prev, ctx)
        done = bool(pred(prev, state, w.cond, ctx))
        ctx.trace.line(f"loop {w.cond.name} iteration={i} done={str(done).lower()}")
        if done:
            return state
    ctx.trace.flags.append("MaxIterExceeded")
    ctx.trace.line(f"loop {w.cond.name} stopped at max_iter={w.max_iter}")
    return state


def evaluate_predicate(ref: PredicateRef, before: MindState, after: MindState,
                       ctx: Optional[ExecContext] = None) -> bool:
    try:
        pred = PREDICATES[ref.name]
    except KeyError:
        raise UnresolvedTarget(f"unknown predicate {ref.name!r}") from None
    return bool(pred(before, after, ref, ctx or ExecContext()))


# ---------------------------------------------------------------------------
# built-in operators


@register_operator("noop")
def _op_noop(M, prim, ctx):
    return M


@register_operator("update")
def _op_update(M, prim, ctx):
    rule = prim.args.get("rule", "identity")
    try:
        factory = UPDATE_RULES[rule]
    except KeyError:
        raise UnresolvedTarget(f"unknown update rule {rule!r}") from None
    for sid in prim.targets:
        s = _schema(M, sid)
        M = M.with_schema(update(s, factory(s, M, prim.args)))
    return M


@register_operator("transform")
def _op_transform(M, prim, ctx):
    lang = get_language(prim.args.get("lang", "tabular"))
    rule = prim.args.get("rule", "identity")
    try:
        factory = UPDATE_RULES[rule]
    except KeyError:
        raise UnresolvedTarget(f"unknown translation rule {rule!r}") from None
    for sid in prim.targets:
        s = _schema(M, sid)
        M = M.with_schema(transform(s, lang, factory(s, M, prim.args)))
    return M


@register_operator("add")
def _op_add(M, prim, ctx):
    s = schema_from_json(prim.args["schema"])
    if prim.targets and tuple(prim.targets) != (s.id,):
        raise UnresolvedTarget(f"add targets {list(prim.targets)} but the schema id is {s.id!r}")
    return M.with_schema(s)


@register_operator("delete")
def _op_delete(M, prim, ctx):
    for sid in prim.targets:
        _schema(M, sid)
        M = M.without_schema(sid)
    return M


def _point(x):
    return tuple(x) if isinstance(x, (list, tuple)) else (x,)


@register_operator("write")
def _op_write(M, prim, ctx):
    memory = prim.args.get("memory", "memory")
    x, y = _point(prim.args["input"]), _point(prim.args["output"])
    for sid in prim.targets:
        dist = evaluate(_schema(M, sid), x)
        M = M.write(memory, sid, EvaluatedInstance(x, y, dist.prob(y)))
    return M


@register_operator("observe")
def _op_observe(M, prim, ctx):
    memory = prim.args.get("memory", "memory")
    x = _point(prim.args["input"])
    for sid in prim.targets:
        s = _schema(M, sid)
        mem = M.memories.get(memory) or MemorySubsystem(memory)
        n = len(mem.data.get(sid, ()))
        draw = int(_rng(ctx, sid, n).integers(2**31))
        y = _point(sample(s, x, draw))
        M = M.write(memory, sid, EvaluatedInstance(x, y, evaluate(s, x).prob(y)))
    return M


# ---------------------------------------------------------------------------
# built-in parameter maps


@register_update_rule("identity")
def _rule_identity(s, M, args):
    return lambda th: th.values


@register_update_rule("affine")
def _rule_affine(s, M, args):
    a, b = float(args.get("a", 1.0)), float(args.get("b", 0.0))
    return lambda th: a * th.values + b


@register_update_rule("mix_uniform")
def _rule_mix(s, M, args):
    """Convex mix of a stochastic table with the uniform table."""
    lam = float(args.get("weight", 0.5))
    spec = s.shape_spec
    k = int(np.prod(spec.dims[spec.row_axes:], dtype=int))
    return lambda th: (1 - lam) * th.values + lam / k


# ---------------------------------------------------------------------------
# built-in predicates


@register_predicate("always")
def _pred_always(before, after, ref, ctx):
    return True


@register_predicate("never")
def _pred_never(before, after, ref, ctx):
    return False


@register_predicate("sup_norm_change_below")
def _pred_sup_norm(before, after, ref, ctx):
    sid = ref.args["schema"]
    old = _schema(before, sid).params.values
    new = _schema(after, sid).params.values
    delta = float(np.max(np.abs(new - old))) if new.size else 0.0
    ctx.trace.metrics.append({"predicate": ref.name, "schema": sid, "value": delta})
    return delta < float(ref.threshold)


@register_predicate("memory_count_at_least")
def _pred_count(before, after, ref, ctx):
    mem = after.memories.get(ref.args["memory"])
    if mem is None:
        raise UnresolvedTarget(f"no memory named {ref.args['memory']!r}")
    return mem_read(mem, after.schemas, ref.args["schema"], "count") >= float(ref.threshold)


@register_predicate("schema_present")
def _pred_present(before, after, ref, ctx):
    return ref.args["schema"] in after.schemas


# ---------------------------------------------------------------------------
# JSON


def workflow_to_json(w: Workflow) -> dict:
    if isinstance(w, Prim):
        return {"op": "prim", "name": w.name, "targets": list(w.targets),
                "args": dict(w.args), "reads": list(w.reads)}
    if isinstance(w, Sequential):
        return {"op": "seq", "children": [workflow_to_json(w.first), workflow_to_json(w.second)]}
    if isinstance(w, Parallel):
        return {"op": "par", "children": [workflow_to_json(w.left), workflow_to_json(w.right)]}
    if isinstance(w, UnitSeq):
        return {"op": "unit_seq"}
    if isinstance(w, UnitPar):
        return {"op": "unit_par"}
    if isinstance(w, Loop):
        return {"op": "loop", "cond": w.cond.to_json(), "max_iter": w.max_iter,
                "children": [workflow_to_json(w.body)]}
    raise TypeError(f"not a workflow: {w!r}")


def workflow_from_json(d: dict) -> Workflow:
    op = d.get("op")
    kids = [workflow_from_json(c) for c in d.get("children", [])]
    if op == "prim":
        return wf_prim(d["name"], d.get("targets", ()), d.get("args"), d.get("reads", ()))
    if op in ("seq", "par"):
        if len(kids) < 2:
            raise SchemaCalcError(f"{op} needs at least two children")
        out = kids[0]
        for k in kids[1:]:
            out = Sequential(out, k) if op == "seq" else Parallel(out, k)
        return out
    if op == "unit_seq":
        return UnitSeq()
    if op == "unit_par":
        return UnitPar()
    if op == "loop":
        if len(kids) != 1:
            raise SchemaCalcError("loop needs exactly one child")
        return Loop(PredicateRef.from_json(d["cond"]), kids[0], int(d.get("max_iter", 10_000)))
    raise SchemaCalcError(f"unknown workflow op {op!r}")
