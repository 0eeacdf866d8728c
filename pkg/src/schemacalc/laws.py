"""Randomized law suites for the syntax, implementation, semantics, workflow
and mind layers.

Every law is a function of a numpy generator returning ``True`` when the law
holds on the case it drew.  ``run_laws`` gives each law its own generator
derived from the seed, so reports are reproducible law by law.
"""

from __future__ import annotations

import traceback
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import SignatureViolation
from .impl import (
    TABULAR,
    ImplMorphism,
    compose_morphisms,
    identity_morphism,
    implement,
    transform,
    update,
)
from .mind import MemorySubsystem, MindState, mem_reindex, mem_write, mind_par
from .modules import CognitiveModule, run_module
from .semantics import (
    FiniteKernel,
    identity_kernel,
    inst_enumerate,
    inst_reindex,
    interpret,
    kernel_compose,
    kernel_product,
    permutation_morphism,
    reindex_instance,
)
from .serialize import mind_dumps
from .syntax import (
    Atomic,
    Encap,
    Null,
    Par,
    Seq,
    Ctx,
    SchemaSet,
    SchemaType,
    SpaceSpec,
    add,
    comb_par,
    comb_seq,
    ctx,
    delete,
    encap,
    make_null,
    normalize,
    ref,
    specializes,
    term_equal,
)
from .workflow import (
    Loop,
    Parallel,
    PredicateRef,
    Sequential,
    UnitPar,
    UnitSeq,
    execute,
    interchange_rewrite,
    prim_names,
    wf_prim,
    wf_seq,
    wf_par,
)

Law = Callable[[np.random.Generator], bool]


# ---------------------------------------------------------------------------
# generators


def _space(label: str, n: int, role: Optional[str] = None) -> SpaceSpec:
    return SpaceSpec(label, tuple(f"{label.lower()}{i}" for i in range(n)), role or label)


S, O, D, E, H = _space("S", 2), _space("O", 3), _space("D", 2), _space("E", 2), _space("H", 2)
R_GRID = SpaceSpec("R", (0.0,), "R")

ATOMIC_POOL = (
    ("vision", SchemaType("Perceptual", (S,), (O,))),
    ("grip", SchemaType("Motor", (D,), (E,))),
    ("reward", SchemaType("Goal", (O, D), (R_GRID,))),
    ("forward", SchemaType("Predictive", (O, D), (O,))),
    ("inverse", SchemaType("Predictive", (O, O), (D,))),
    ("latent", SchemaType("Predictive", (H,), (O,))),
    ("recall", SchemaType("Predictive", (O,), (H,))),
    ("concept", SchemaType("Abstract", (O,), (H,))),
)


def random_atomic(rng) -> Atomic:
    name, t = ATOMIC_POOL[rng.integers(len(ATOMIC_POOL))]
    return Atomic(name, t)


def random_term(rng, depth: int = 3, null_rate: float = 0.1):
    """A raw (unnormalized) term of depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.3:
        a = random_atomic(rng)
        return Null(a.type) if rng.random() < null_rate else a
    op = rng.integers(4)
    if op == 0:
        return Par(tuple(random_term(rng, depth - 1) for _ in range(rng.integers(2, 4))))
    if op == 1:
        return Seq(tuple(random_term(rng, depth - 1) for _ in range(rng.integers(2, 4))))
    if op == 2:
        return Encap((random_term(rng, depth - 1), random_term(rng, depth - 1)))
    return Ctx(random_term(rng, depth - 1),
               tuple(random_term(rng, depth - 1) for _ in range(rng.integers(0, 3))))


def random_context(rng, k_max: int = 3) -> set:
    return {normalize(random_term(rng, 1, 0.0)) for _ in range(rng.integers(0, k_max + 1))}


def random_stochastic(rng, n_rows: int, n_cols: int, sparse: bool = True) -> np.ndarray:
    m = rng.dirichlet(np.ones(n_cols), size=n_rows)
    if sparse and n_cols > 1:
        mask = rng.random(m.shape) < 0.25
        mask[np.arange(n_rows), rng.integers(n_cols, size=n_rows)] = False
        m = np.where(mask, 0.0, m)
        m = m / m.sum(axis=1, keepdims=True)
    return m


def random_kernel(rng, dom: SpaceSpec, cod: SpaceSpec) -> FiniteKernel:
    return FiniteKernel((dom,), (cod,), random_stochastic(rng, dom.size, cod.size))


def sized_space(n: int, tag: str = "X") -> SpaceSpec:
    return _space(f"{tag}{n}", n)


STOCHASTIC_TYPES = (
    SchemaType("Predictive", (O,), (O,)),
    SchemaType("Predictive", (O, D), (O,)),
    SchemaType("Predictive", (O,), (H,)),
    SchemaType("Perceptual", (S,), (O,)),
)
VALUE_TYPE = SchemaType("Goal", (O,), (R_GRID,))


def random_stochastic_schema(rng, sid: str, t: Optional[SchemaType] = None):
    t = t or STOCHASTIC_TYPES[rng.integers(len(STOCHASTIC_TYPES))]
    n_rows = int(np.prod([s.size for s in t.dom]))
    n_cols = int(np.prod([s.size for s in t.cod]))
    table = random_stochastic(rng, n_rows, n_cols)
    shape = tuple(s.size for s in t.dom + t.cod)
    return implement(Atomic(sid, t), TABULAR, table.reshape(shape), sid)


def random_value_schema(rng, sid: str):
    vals = np.round(rng.normal(size=O.size), 3)
    return implement(Atomic(sid, VALUE_TYPE), TABULAR, vals, sid)


MEMORY = "episodic"


def random_mind(rng, ids) -> MindState:
    schemas = {}
    for sid in ids:
        if rng.random() < 0.5:
            schemas[sid] = random_stochastic_schema(rng, sid, SchemaType("Predictive", (O,), (O,)))
        else:
            schemas[sid] = random_value_schema(rng, sid)
    return MindState(
        spaces={"O": O, "D": None, "H": None},
        schemas=schemas,
        memories={MEMORY: MemorySubsystem(MEMORY)},
    )


def random_prim(rng, M: MindState, sid: str):
    s = M.schemas[sid]
    roll = rng.random()
    x = O.points[rng.integers(O.size)]
    if roll < 0.3:
        return wf_prim("observe", (sid,), {"memory": MEMORY, "input": [x]})
    if roll < 0.4:
        return wf_prim("noop", (sid,))
    if s.shape_spec.stochastic:
        if roll < 0.55:
            y = O.points[int(np.argmax(s.params.values.reshape(O.size, -1)[O.index(x)]))]
            return wf_prim("write", (sid,), {"memory": MEMORY, "input": [x], "output": [y]})
        return wf_prim("update", (sid,), {"rule": "mix_uniform", "weight": float(np.round(rng.random(), 3))})
    return wf_prim("update", (sid,), {"rule": "affine", "a": float(np.round(rng.uniform(-1, 1), 3)),
                                      "b": float(np.round(rng.normal(), 3))})


def random_workflow(rng, M: MindState, ids, depth: int = 3):
    ids = list(ids)
    if not ids:
        return UnitSeq() if rng.random() < 0.5 else UnitPar()
    roll = rng.random()
    if depth <= 0 or roll < 0.3:
        return random_prim(rng, M, ids[rng.integers(len(ids))])
    if roll < 0.55:
        return Sequential(random_workflow(rng, M, ids, depth - 1), random_workflow(rng, M, ids, depth - 1))
    if roll < 0.8 and len(ids) >= 2:
        perm = [ids[i] for i in rng.permutation(len(ids))]
        cut = int(rng.integers(1, len(ids)))
        return Parallel(random_workflow(rng, M, perm[:cut], depth - 1),
                        random_workflow(rng, M, perm[cut:], depth - 1))
    sid = ids[rng.integers(len(ids))]
    if rng.random() < 0.5:
        cond = PredicateRef("memory_count_at_least", {"memory": MEMORY, "schema": sid},
                            float(rng.integers(1, 4)))
        body = wf_prim("observe", (sid,), {"memory": MEMORY, "input": [O.points[rng.integers(O.size)]]})
    else:
        cond = PredicateRef("never")
        body = random_workflow(rng, M, [sid], depth - 1)
    return Loop(cond, body, int(rng.integers(1, 4)))


def _same_state(a: MindState, b: MindState) -> bool:
    return mind_dumps(a) == mind_dumps(b)


# ---------------------------------------------------------------------------
# syntax


def _non_seq_pair(rng):
    while True:
        a, b = normalize(random_term(rng, 2, 0.0)), normalize(random_term(rng, 2, 0.0))
        if a != b and not isinstance(a, (Seq, Null)) and not isinstance(b, (Seq, Null)):
            return a, b


def _encap_pair(rng):
    while True:
        a, b = random_term(rng, 2, 0.0), random_term(rng, 2, 0.0)
        if isinstance(encap(a, b), Encap):
            return a, b


def _random_set(rng, k_max: int = 4) -> SchemaSet:
    return SchemaSet(frozenset(random_term(rng, 2) for _ in range(rng.integers(0, k_max + 1))))


def _brute_set(items) -> set:
    # literal set algebra on normal-form keys, kept apart from SchemaSet
    return {n.key for n in map(normalize, items) if not isinstance(n, Null)}


def syntax_laws() -> dict:
    t3 = lambda r: tuple(random_term(r) for _ in range(3))  # noqa: E731

    def par_symmetry(r):
        a, b, _ = t3(r)
        return term_equal(comb_par(a, b), comb_par(b, a))

    def par_associativity(r):
        a, b, c = t3(r)
        return comb_par(comb_par(a, b), c) == comb_par(a, comb_par(b, c))

    def par_identity(r):
        a = random_term(r)
        return comb_par(a, make_null(a.type)) == normalize(a) == comb_par(make_null(a.type), a)

    def seq_associativity(r):
        a, b, c = t3(r)
        return comb_seq(comb_seq(a, b), c) == comb_seq(a, comb_seq(b, c))

    def seq_identity(r):
        a = random_term(r)
        return comb_seq(a, make_null(a.type)) == normalize(a) == comb_seq(make_null(a.type), a)

    def seq_noncommutativity(r):
        a, b = _non_seq_pair(r)
        return not term_equal(comb_seq(a, b), comb_seq(b, a))

    def encap_symmetry(r):
        a, b, _ = t3(r)
        return encap(a, b) == encap(b, a)

    def encap_idempotence(r):
        a = random_term(r)
        return encap(a, a) == normalize(a)

    def encap_weak_associativity(r):
        a, b, c = t3(r)
        return encap(encap(a, b), c) == encap(a, encap(b, c))

    def ref_weak_duality(r):
        a, b = _encap_pair(r)
        e = encap(a, b)
        x, y = ref(e)
        return encap(x, y) == e and specializes(x, e) and specializes(y, e)

    def ctx_neutrality(r):
        a = random_term(r)
        return ctx(a, ()) == normalize(a)

    def ctx_idempotence(r):
        a, phi = random_term(r), random_context(r)
        return ctx(ctx(a, phi), phi) == ctx(a, phi)

    def ctx_additivity(r):
        a, p1, p2 = random_term(r), random_context(r), random_context(r)
        return ctx(ctx(a, p1), p2) == ctx(a, p1 | p2)

    def ctx_inclusion(r):
        a, p1, extra = random_term(r), random_context(r), random_context(r)
        return specializes(ctx(a, p1 | extra), ctx(a, p1))

    def normalize_idempotent(r):
        t = random_term(r, int(r.integers(1, 9)))
        n = normalize(t)
        return normalize(n) == n

    def specializes_reflexive(r):
        t = random_term(r)
        return specializes(t, t)

    def specializes_antisymmetric(r):
        a = random_term(r)
        b = r.choice([0, 1, 2])
        b = (random_term(r), encap(a, random_term(r)), ctx(a, random_context(r)))[b]
        if specializes(a, b) and specializes(b, a):
            return term_equal(a, b)
        return True

    def specializes_transitive(r):
        a, b, c = t3(r)
        tower = [a, encap(a, b), encap(encap(a, b), c)]
        if not all(specializes(x, y) for x, y in zip(tower, tower[1:])):
            return False
        if not specializes(tower[0], tower[2]):
            return False
        x, y, z = t3(r)
        if specializes(x, y) and specializes(y, z):
            return specializes(x, z)
        return True

    def add_neutrality(r):
        s = _random_set(r)
        return add(s, make_null(random_atomic(r).type)) == s

    def add_idempotence(r):
        s = _random_set(r)
        if not len(s):
            return True
        psi = sorted(s.elems)[r.integers(len(s))]
        return add(s, psi) == s

    def add_commutativity(r):
        s, p1, p2 = _random_set(r), random_term(r), random_term(r)
        return add(add(s, p1), p2) == add(add(s, p2), p1)

    def add_associativity(r):
        s, p1, p2 = _random_set(r), random_term(r), random_term(r)
        batch = add(add(s, p1), p2) == add(s, [p1, p2])
        return batch and {t.key for t in add(s, [p1, p2]).elems} == _brute_set(list(s.elems) + [p1, p2])

    def del_neutrality(r):
        s = _random_set(r)
        return delete(s, make_null(random_atomic(r).type)) == s

    def del_idempotence(r):
        s, psi = _random_set(r), random_term(r)
        return psi in s or delete(s, psi) == s

    def del_commutativity(r):
        s = _random_set(r)
        items = sorted(s.elems) + [normalize(random_term(r))]
        p1, p2 = items[r.integers(len(items))], items[r.integers(len(items))]
        return delete(delete(s, p1), p2) == delete(delete(s, p2), p1)

    def del_associativity(r):
        s = _random_set(r)
        items = sorted(s.elems) + [normalize(random_term(r))]
        p1, p2 = items[r.integers(len(items))], items[r.integers(len(items))]
        ok = delete(delete(s, p1), p2) == delete(s, [p1, p2])
        return ok and {t.key for t in delete(s, [p1, p2]).elems} == _brute_set(s.elems) - _brute_set([p1, p2])

    def del_absorption(r):
        s = _random_set(r)
        return len(delete(s, s.elems)) == 0

    def add_del_duality(r):
        s, psi = _random_set(r), random_term(r)
        if isinstance(normalize(psi), Null):
            return True
        if psi in s:
            return add(delete(s, psi), psi) == s
        return delete(add(s, psi), psi) == s

    return {k: v for k, v in locals().items() if callable(v) and not k.startswith("t3")}


# ---------------------------------------------------------------------------
# implementation layer


def _vals(x) -> np.ndarray:
    # parameter maps may hand back a ParamTensor or a bare array
    return np.asarray(getattr(x, "values", x))


def _value_morphisms(rng, s, n: int):
    obj = (s.term, s.lang.name)
    out = []
    for _ in range(n):
        a, b = rng.normal(), rng.normal()
        out.append(ImplMorphism(obj, obj, param_map=lambda th, a=a, b=b: a * _vals(th) + b))
    return out


def impl_laws() -> dict:
    def update_fiber_preservation(r):
        s = random_stochastic_schema(r, "s")
        lam = r.random()
        u = update(s, lambda th: (1 - lam) * th.values + lam * random_stochastic(r, th.values.reshape(-1, th.shape[-1]).shape[0], th.shape[-1]).reshape(th.shape))
        t = transform(s, TABULAR, lambda th: th.values)
        return u.term == s.term and t.term == s.term and u.id == s.id

    def update_compositionality(r):
        s = random_value_schema(r, "v")
        a1, b1, a2, b2 = r.normal(size=4)
        u1 = lambda th: a1 * th.values + b1  # noqa: E731
        u2 = lambda th: a2 * th.values + b2  # noqa: E731
        lhs = update(update(s, u1), u2)
        rhs = update(s, lambda th: a2 * (a1 * th.values + b1) + b2)
        return lhs == rhs

    def update_identity(r):
        s = random_stochastic_schema(r, "s")
        return update(s, lambda th: th.values) == s

    def stochastic_rows_preserved(r):
        from .workflow import UPDATE_RULES

        s = random_stochastic_schema(r, "s")
        out = update(s, UPDATE_RULES["mix_uniform"](s, None, {"weight": r.random()}))
        rows = out.params.values.reshape(-1, out.params.shape[-1])
        return bool(np.all(np.abs(rows.sum(axis=1) - 1.0) <= 1e-9) and np.all(rows >= 0))

    def morphism_associativity(r):
        s = random_value_schema(r, "v")
        f, g, h = _value_morphisms(r, s, 3)
        lhs = compose_morphisms(h, compose_morphisms(g, f))
        rhs = compose_morphisms(compose_morphisms(h, g), f)
        for _ in range(100):
            th = r.normal(size=s.params.shape)
            if np.max(np.abs(_vals(lhs.param_map(th)) - _vals(rhs.param_map(th)))) > 1e-12:
                return False
        return True

    def morphism_unit(r):
        s = random_value_schema(r, "v")
        (f,) = _value_morphisms(r, s, 1)
        idm = identity_morphism(s.term)
        for _ in range(100):
            th = r.normal(size=s.params.shape)
            want = _vals(f.param_map(th))
            for c in (compose_morphisms(idm, f), compose_morphisms(f, idm)):
                if np.max(np.abs(_vals(c.param_map(th)) - want)) > 1e-12:
                    return False
        return True

    def vertical_closed(r):
        s = random_value_schema(r, "v")
        f, g = _value_morphisms(r, s, 2)
        return f.is_vertical and g.is_vertical and compose_morphisms(g, f).is_vertical

    return {k: v for k, v in locals().items() if callable(v)}


# ---------------------------------------------------------------------------
# semantics


def _triple(r):
    sizes = r.integers(1, 5, size=4)
    X, Y, Z, W = (sized_space(int(n), t) for n, t in zip(sizes, "XYZW"))
    return random_kernel(r, X, Y), random_kernel(r, Y, Z), random_kernel(r, Z, W)


def _stochastic(k: FiniteKernel) -> bool:
    return bool(np.all(k.matrix >= 0) and np.all(np.abs(k.matrix.sum(axis=1) - 1.0) <= 1e-9))


INTERP_POOL = (
    ("p_oo", SchemaType("Predictive", (O,), (O,))),
    ("p_oh", SchemaType("Predictive", (O,), (H,))),
    ("p_ho", SchemaType("Predictive", (H,), (O,))),
    ("v_o", VALUE_TYPE),
)


def _interp_bindings(r) -> dict:
    bind = {}
    for name, t in INTERP_POOL:
        if t == VALUE_TYPE:
            bind[name] = random_value_schema(r, name)
        else:
            bind[name] = random_stochastic_schema(r, name, t)
    return bind


def _interp_term(r, depth: int = 2):
    if depth <= 0 or r.random() < 0.35:
        name, t = INTERP_POOL[r.integers(len(INTERP_POOL))]
        return Null(t) if r.random() < 0.1 else Atomic(name, t)
    roll = r.random()
    if roll < 0.4:
        return Par((_interp_term(r, depth - 1), _interp_term(r, depth - 1)))
    if roll < 0.8:
        return Seq((_interp_term(r, depth - 1), _interp_term(r, depth - 1)))
    base_name, base_t = INTERP_POOL[r.integers(len(INTERP_POOL))]
    ctx_pool = [Atomic(n, t) for n, t in INTERP_POOL if all(s in base_t.dom for s in t.dom)]
    k = int(r.integers(0, len(ctx_pool) + 1))
    picks = [ctx_pool[i] for i in r.permutation(len(ctx_pool))[:k]]
    return Ctx(Atomic(base_name, base_t), tuple(picks))


def semantics_laws() -> dict:
    def kleisli_left_unit(r):
        f, _, _ = _triple(r)
        return kernel_compose(identity_kernel(f.dom), f).allclose(f)

    def kleisli_right_unit(r):
        f, _, _ = _triple(r)
        return kernel_compose(f, identity_kernel(f.cod)).allclose(f)

    def kleisli_associativity(r):
        f, g, h = _triple(r)
        return kernel_compose(kernel_compose(f, g), h).allclose(kernel_compose(f, kernel_compose(g, h)))

    def rows_stochastic(r):
        f, g, h = _triple(r)
        return _stochastic(kernel_compose(f, g)) and _stochastic(kernel_product(f, h))

    def interpret_functorial(r):
        bind = _interp_bindings(r)
        t = _interp_term(r)
        return interpret(t, bind) == interpret(normalize(t), bind)

    def reindex_identity(r):
        s = random_stochastic_schema(r, "s")
        insts = inst_enumerate(s)
        return inst_reindex(identity_morphism(s.term), insts) == insts

    def reindex_contravariant(r):
        s = random_stochastic_schema(r, "s")
        k = int(np.prod([x.size for x in s.type.dom]))
        n = int(np.prod([x.size for x in s.type.cod]))
        m1, s1 = permutation_morphism(s, r.permutation(k), r.permutation(n), "s1")
        m2, s2 = permutation_morphism(s1, r.permutation(k), r.permutation(n), "s2")
        insts = inst_enumerate(s2)
        lhs = inst_reindex(compose_morphisms(m2, m1), insts)
        rhs = inst_reindex(m1, inst_reindex(m2, insts))
        return lhs == rhs and lhs == inst_enumerate(s)

    return {k: v for k, v in locals().items() if callable(v)}


# ---------------------------------------------------------------------------
# workflows


def _ids(prefix: str, n: int) -> list:
    return [f"{prefix}{i}" for i in range(n)]


def workflow_laws() -> dict:
    def unit_seq_identity(r):
        M = random_mind(r, _ids("s", 3))
        w = random_workflow(r, M, _ids("s", 3))
        return (_same_state(execute(UnitSeq(), M), M)
                and _same_state(execute(wf_seq(UnitSeq(), w), M), execute(w, M))
                and _same_state(execute(wf_seq(w, UnitSeq()), M), execute(w, M)))

    def unit_par_identity(r):
        M = random_mind(r, _ids("s", 3))
        w = random_workflow(r, M, _ids("s", 3))
        return (_same_state(execute(UnitPar(), M), M)
                and _same_state(execute(wf_par(UnitPar(), w), M), execute(w, M)))

    def sequential_coherence(r):
        ids = _ids("s", 3)
        M = random_mind(r, ids)
        a, b = random_workflow(r, M, ids), random_workflow(r, M, ids)
        return _same_state(execute(Sequential(a, b), M), execute(b, execute(a, M)))

    def parallel_coherence(r):
        ids1, ids2 = _ids("a", int(r.integers(1, 3))), _ids("b", int(r.integers(1, 3)))
        M1, M2 = random_mind(r, ids1), random_mind(r, ids2)
        a, b = random_workflow(r, M1, ids1), random_workflow(r, M2, ids2)
        lhs = execute(Parallel(a, b), mind_par(M1, M2))
        rhs = mind_par(execute(a, M1), execute(b, M2))
        return _same_state(lhs, rhs)

    def interchange_preserves_execution(r):
        ids1, ids2 = _ids("a", 2), _ids("b", 2)
        M = mind_par(random_mind(r, ids1), random_mind(r, ids2))
        a, c = random_workflow(r, M, ids1), random_workflow(r, M, ids1)
        b, d = random_workflow(r, M, ids2), random_workflow(r, M, ids2)
        w = Sequential(Parallel(a, b), Parallel(c, d))
        res = interchange_rewrite(w)
        return res.applied and _same_state(execute(res.workflow, M), execute(w, M))

    def loop_bounded_and_deterministic(r):
        ids = _ids("s", 2)
        M = random_mind(r, ids)
        body = wf_seq(random_prim(r, M, ids[0]), random_prim(r, M, ids[1]))
        n = int(r.integers(1, 6))
        from .workflow import ExecTrace

        t1, t2 = ExecTrace(), ExecTrace()
        w = Loop(PredicateRef("never"), body, n)
        out1, out2 = execute(w, M, 7, t1), execute(w, M, 7, t2)
        iters = sum(1 for line in t1.log if line.startswith("loop never iteration="))
        return _same_state(out1, out2) and iters == n and "MaxIterExceeded" in t1.flags

    return {k: v for k, v in locals().items() if callable(v)}


# ---------------------------------------------------------------------------
# mind


def mind_laws() -> dict:
    def memory_coherence_square(r):
        s = random_stochastic_schema(r, "src")
        k = int(np.prod([x.size for x in s.type.dom]))
        n = int(np.prod([x.size for x in s.type.cod]))
        m, t = permutation_morphism(s, r.permutation(k), r.permutation(n), "tgt")
        schemas = {"src": s, "tgt": t}
        insts = sorted(inst_enumerate(t), key=repr)
        mem = MemorySubsystem(MEMORY)
        for _ in range(int(r.integers(0, 4))):
            mem = mem_write(mem, schemas, "tgt", insts[r.integers(len(insts))])
        inst = insts[r.integers(len(insts))]
        path1 = mem_reindex(mem_write(mem, schemas, "tgt", inst), m, "tgt", "src", schemas)
        path2 = mem_write(mem_reindex(mem, m, "tgt", "src", schemas), schemas, "src",
                          reindex_instance(m, inst))
        return path1.data["src"] == path2.data["src"]

    def reindex_identity_storage(r):
        s = random_stochastic_schema(r, "src")
        schemas = {"src": s}
        insts = sorted(inst_enumerate(s), key=repr)
        mem = MemorySubsystem(MEMORY)
        for _ in range(int(r.integers(0, 4))):
            mem = mem_write(mem, schemas, "src", insts[r.integers(len(insts))])
        out = mem_reindex(mem, identity_morphism(s.term), "src", "src", schemas)
        return out.data.get("src", ()) == mem.data.get("src", ())

    def mind_par_unit(r):
        M = random_mind(r, _ids("s", 2))
        return _same_state(mind_par(M, MindState()), M) and _same_state(mind_par(MindState(), M), M)

    def mind_par_associative(r):
        A, B, C = (random_mind(r, _ids(p, 2)) for p in "abc")
        return _same_state(mind_par(mind_par(A, B), C), mind_par(A, mind_par(B, C)))

    def run_module_deterministic(r):
        ids = _ids("s", 2)
        M = random_mind(r, ids)
        w = random_workflow(r, M, ids)
        sig = prim_names(w) | {"noop"}
        mod = CognitiveModule("m", (), (), (w,), PredicateRef("always"), sig)
        M = M.with_module(mod)
        seed = int(r.integers(1000))
        (a, ok1), (b, ok2) = run_module(M, "m", 0, seed), run_module(M, "m", 0, seed)
        return _same_state(a, b) and ok1 == ok2

    def signature_checks_agree(r):
        ids = _ids("s", 2)
        M = random_mind(r, ids)
        w = random_workflow(r, M, ids)
        names = sorted(prim_names(w))
        sig = frozenset(n for n in names if r.random() < 0.7)
        try:
            CognitiveModule("m", (), (), (w,), PredicateRef("always"), sig)
            static_ok = True
        except SignatureViolation:
            static_ok = False
        try:
            execute(w, M, 0, allowed=sig)
            runtime_ok = True
        except SignatureViolation:
            runtime_ok = False
        return static_ok == runtime_ok

    return {k: v for k, v in locals().items() if callable(v)}


# ---------------------------------------------------------------------------
# driver

SUITES = {
    "syntax": syntax_laws,
    "impl": impl_laws,
    "semantics": semantics_laws,
    "workflow": workflow_laws,
    "mind": mind_laws,
}


@dataclass
class LawReport:
    suite: str
    law: str
    passed: int
    failed: int
    example: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_json(self) -> dict:
        return {"suite": self.suite, "law": self.law, "passed": self.passed,
                "failed": self.failed, "example": self.example}


def check_law(suite: str, name: str, law: Law, cases: int, rng) -> LawReport:
    passed = failed = 0
    example = None
    for i in range(cases):
        try:
            ok = bool(law(rng))
            err = None
        except Exception:  # a crash is a failed case, reported with its traceback
            ok, err = False, traceback.format_exc(limit=3)
        if ok:
            passed += 1
        else:
            failed += 1
            if example is None:
                example = f"case {i}" + (f": {err}" if err else "")
    return LawReport(suite, name, passed, failed, example)


def run_laws(cases: int, seed: int, suites=None) -> list:
    if cases < 1:
        raise ValueError("cases must be at least 1")
    out = []
    for si, suite in enumerate(SUITES):
        if suites and suite not in suites:
            continue
        for li, (name, law) in enumerate(SUITES[suite]().items()):
            rng = np.random.default_rng([seed, si, li])
            out.append(check_law(suite, name, law, cases, rng))
    return out
