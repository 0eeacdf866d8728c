import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import compose_oracle, product_oracle
from schemacalc.errors import DomainMismatch, UnknownPoint, UnsupportedLanguage
from schemacalc.impl import TABULAR, ImplLanguage, identity_morphism, implement
from schemacalc.laws import random_stochastic, sized_space
from schemacalc.semantics import (
    BOTTOM,
    EvaluatedInstance,
    FiniteKernel,
    dirac,
    evaluate,
    identity_kernel,
    inst_enumerate,
    inst_reindex,
    interpret,
    kernel_compose,
    kernel_product,
    model,
    permutation_morphism,
    sample,
)
from schemacalc.syntax import SchemaType, SpaceSpec, comb_par, ctx, make_atomic, make_null

AB = SpaceSpec("X", ("a", "b"))
ABC = SpaceSpec("X", ("a", "b", "c"))
Y = SpaceSpec("Y", ("y1", "y2"))
O = SpaceSpec("O", ("o1", "o2"))
R = SpaceSpec("R", (0.0,))


def kern(rows, dom=AB, cod=AB):
    return FiniteKernel((dom,), (cod,), rows)


def test_dirac_examples():
    assert list(dirac(AB, "a").probs) == [1.0, 0.0]
    assert list(dirac(ABC, "c").probs) == [0.0, 0.0, 1.0]
    with pytest.raises(UnknownPoint):
        dirac(AB, "z")


def test_compose_example():
    f = [[0.5, 0.5], [0.2, 0.8]]
    g = [[0.3, 0.7], [0.9, 0.1]]
    expected = [[0.6, 0.4], [0.78, 0.22]]
    assert np.allclose(compose_oracle(f, g), expected, atol=1e-12, rtol=0)
    out = kernel_compose(kern(f), kern(g)).matrix
    assert np.allclose(out, expected, atol=1e-12, rtol=0)


def test_compose_with_identity():
    f = kern([[0.5, 0.5], [0.2, 0.8]])
    assert kernel_compose(f, identity_kernel(AB)) == f
    assert kernel_compose(identity_kernel(AB), f) == f


def test_compose_domain_mismatch():
    with pytest.raises(DomainMismatch):
        kernel_compose(kern([[1, 0], [0, 1]], AB, Y), kern([[1, 0], [0, 1]], AB, AB))


def test_product_examples():
    idp = kernel_product(identity_kernel(AB), identity_kernel(Y))
    assert idp == identity_kernel((AB, Y))
    one = SpaceSpec("U", ("u",))
    f = FiniteKernel((one,), (AB,), [[0.5, 0.5]])
    g = FiniteKernel((one,), (Y,), [[0.2, 0.8]])
    assert np.allclose(kernel_product(f, g).matrix, [[0.1, 0.4, 0.1, 0.4]], atol=1e-15)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_compose_matches_oracle(n, m, k, seed):
    rng = np.random.default_rng(seed)
    X, Yn, Z = sized_space(n, "A"), sized_space(m, "B"), sized_space(k, "C")
    F, G = random_stochastic(rng, n, m), random_stochastic(rng, m, k)
    out = kernel_compose(FiniteKernel((X,), (Yn,), F), FiniteKernel((Yn,), (Z,), G))
    assert np.allclose(out.matrix, compose_oracle(F.tolist(), G.tolist()), atol=1e-12, rtol=0)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_product_matches_oracle(a, b, c, d, seed):
    rng = np.random.default_rng(seed)
    F, G = random_stochastic(rng, a, b), random_stochastic(rng, c, d)
    k = kernel_product(
        FiniteKernel((sized_space(a, "A"),), (sized_space(b, "B"),), F),
        FiniteKernel((sized_space(c, "C"),), (sized_space(d, "D"),), G),
    )
    assert np.allclose(k.matrix, product_oracle(F.tolist(), G.tolist()), atol=1e-12, rtol=0)


def test_value_table_is_dirac():
    v = implement(make_atomic("V", SchemaType("Goal", (O,), (R,))), TABULAR, [3.0, 0.0])
    k = model(v)
    assert evaluate(v, "o1").prob(3.0) == 1.0
    assert evaluate(v, "o2").prob(0.0) == 1.0
    assert k.matrix.shape == (2, 2)


def test_transition_rows_unchanged():
    t = np.array([[0.3, 0.7], [1.0, 0.0]])
    s = implement(make_atomic("T", SchemaType("Predictive", (O,), (O,))), TABULAR, t)
    assert np.array_equal(model(s).matrix, t)


def test_non_tabular_language():
    other = ImplLanguage("neural", TABULAR.param_shape_of)
    s = implement(make_atomic("T", SchemaType("Predictive", (O,), (O,))), other, np.eye(2))
    with pytest.raises(UnsupportedLanguage):
        model(s)


def _pair():
    p = implement(make_atomic("p", SchemaType("Predictive", (O,), (O,))), TABULAR, [[0.3, 0.7], [0.6, 0.4]], "p")
    q = implement(make_atomic("q", SchemaType("Perceptual", (SpaceSpec("S", ("s1", "s2")),), (O,))),
                  TABULAR, [[0.1, 0.9], [0.5, 0.5]], "q")
    return p, q


def test_interpret_null_and_empty_context():
    p, _ = _pair()
    assert interpret(make_null(p.type), {}) == identity_kernel(O)
    assert interpret(ctx(p.term, []), {"p": p}) == model(p)


def test_interpret_par_is_product_of_rows():
    p, q = _pair()
    k = interpret(comb_par(p.term, q.term), {"p": p, "q": q})
    # the sorted normal form puts p first
    assert np.allclose(k.matrix, product_oracle(p.params.values.tolist(), q.params.values.tolist()))
    row = k(("o1", "s2")).probs
    assert np.allclose(row, np.outer([0.3, 0.7], [0.5, 0.5]).ravel())


def test_context_gates_to_bottom():
    p, _ = _pair()
    flag = implement(make_atomic("f", SchemaType("Predictive", (O,), (O,))), TABULAR, [[1, 0], [0, 1]], "f")
    conds = {"f": lambda dist: dist.prob("o1") == 1.0}
    k = interpret(ctx(p.term, [flag.term]), {"p": p, "f": flag}, conds)
    assert list(k("o1").probs) == [0.3, 0.7, 0.0]
    assert k("o2").prob(BOTTOM) == 1.0


def test_instances():
    d = implement(make_atomic("d", SchemaType("Predictive", (O,), (O,))), TABULAR, np.eye(2))
    assert inst_enumerate(d) == {EvaluatedInstance(("o1",), ("o1",), 1.0),
                                 EvaluatedInstance(("o2",), ("o2",), 1.0)}
    one = SpaceSpec("O", ("o1",))
    h = implement(make_atomic("h", SchemaType("Predictive", (one,), (O,))), TABULAR, [[0.5, 0.5]])
    insts = inst_enumerate(h)
    assert len(insts) == 2 and all(i.weight == 0.5 for i in insts)
    assert inst_reindex(identity_morphism(d.term), inst_enumerate(d)) == inst_enumerate(d)


def test_sampling():
    d = implement(make_atomic("d", SchemaType("Predictive", (O,), (O,))), TABULAR, [[0, 1], [0.5, 0.5]])
    assert all(sample(d, "o1", seed) == "o2" for seed in range(20))
    assert sample(d, "o2", 7) == sample(d, "o2", 7)
    draws = {sample(d, "o2", seed) for seed in range(50)}
    assert draws == {"o1", "o2"}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_permutation_morphism_pulls_instances_back(seed):
    rng = np.random.default_rng(seed)
    s = implement(make_atomic("s", SchemaType("Predictive", (O,), (O,))), TABULAR, random_stochastic(rng, 2, 2), "s")
    m, t = permutation_morphism(s, rng.permutation(2), rng.permutation(2), "t")
    moved = m(s)
    assert moved.term == t.term and moved.params == t.params
    assert inst_reindex(m, inst_enumerate(t)) == inst_enumerate(s)
