import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schemacalc.errors import MalformedType, NotDecomposable, NotPredictive
from schemacalc.laws import ATOMIC_POOL, random_term
from schemacalc.syntax import (
    Atomic,
    Encap,
    Null,
    SchemaSet,
    SchemaType,
    SpaceSpec,
    add,
    comb_par,
    comb_seq,
    ctx,
    delete,
    encap,
    is_dual,
    make_atomic,
    make_null,
    normalize,
    ref,
    specializes,
    term_equal,
    term_from_json,
    term_to_json,
)

S = SpaceSpec("S", ("s0", "s1"))
O = SpaceSpec("O", ("o0", "o1", "o2"))
D = SpaceSpec("D", ("d0", "d1"))
E = SpaceSpec("E", ("e0", "e1"))
R = SpaceSpec("R", (0.0,))

vision = make_atomic("vision", SchemaType("Perceptual", (S,), (O,)))
grip = make_atomic("grip", SchemaType("Motor", (D,), (E,)))
fwd = make_atomic("forward", SchemaType("Predictive", (O, D), (O,)))
inv = make_atomic("inverse", SchemaType("Predictive", (O,), (D,)))
null_o = make_null(SchemaType("Predictive", (O,), (O,)))

terms = st.integers(0, 2**32 - 1).map(lambda s: random_term(np.random.default_rng(s), 3))
flat_terms = st.integers(0, 2**32 - 1).map(lambda s: random_term(np.random.default_rng(s), 2, 0.0))


def test_atomic_echoes_its_type():
    assert isinstance(vision, Atomic)
    assert vision.type.dom == (S,) and vision.type.cod == (O,)
    assert grip.type.dom == (D,) and grip.type.cod == (E,)


def test_goal_over_sensor_space_rejected():
    with pytest.raises(MalformedType):
        make_atomic("bad", SchemaType("Goal", (S,), (R,)))


@pytest.mark.parametrize("kind", ["Perceptual", "Motor", "Predictive"])
def test_empty_domain_rejected(kind):
    with pytest.raises(MalformedType):
        SchemaType(kind, (), (O,))


def test_unknown_kind_rejected():
    with pytest.raises(MalformedType):
        SchemaType("Emotional", (O,), (O,))


def test_repeated_points_rejected():
    with pytest.raises(MalformedType):
        SpaceSpec("X", ("a", "a"))


def test_par_identity_and_type():
    assert comb_par(vision, Null(vision.type)) == vision
    t = comb_par(vision, grip).type
    assert set(t.dom) == {S, D} and set(t.cod) == {O, E}
    assert t.dom.index(S) == t.cod.index(O)  # each factor keeps its position on both sides


def test_seq_identity_and_noncommutativity():
    assert comb_seq(vision, Null(vision.type)) == vision
    assert not term_equal(comb_seq(vision, grip), comb_seq(grip, vision))


def test_encap_examples():
    assert encap(fwd, fwd) == fwd
    assert term_equal(encap(fwd, inv), encap(inv, fwd))
    assert specializes(fwd, encap(fwd, inv))


def test_ref_examples():
    assert ref(encap(fwd, inv)) in ((fwd, inv), (inv, fwd))
    assert encap(*ref(encap(fwd, inv))) == encap(fwd, inv)
    with pytest.raises(NotDecomposable):
        ref(fwd)


def test_ctx_examples():
    assert ctx(fwd, []) == fwd
    assert ctx(ctx(fwd, [inv]), [vision]) == ctx(fwd, [inv, vision])
    assert specializes(ctx(fwd, [inv, vision]), ctx(fwd, [inv]))
    assert not specializes(ctx(fwd, [inv]), ctx(fwd, [inv, vision]))


def test_ctx_distributes_over_encap():
    assert ctx(encap(fwd, inv), [vision]) == encap(ctx(fwd, [vision]), ctx(inv, [vision]))


def test_set_examples():
    one = SchemaSet(frozenset({fwd}))
    assert add(one, fwd) == one
    assert delete(add(SchemaSet(), inv), inv) == SchemaSet()
    sigma = SchemaSet(frozenset({fwd, inv, vision}))
    assert delete(sigma, sigma) == SchemaSet()


def test_sets_drop_null():
    assert len(SchemaSet(frozenset({null_o, fwd}))) == 1
    assert add(SchemaSet(), null_o) == SchemaSet()


def test_is_dual():
    p = make_atomic("p", SchemaType("Predictive", (D,), (O,)))
    q = make_atomic("q", SchemaType("Predictive", (O,), (D,)))
    assert is_dual(p, q)
    assert not is_dual(p, p)
    with pytest.raises(NotPredictive):
        is_dual(p, vision)


def test_encap_keeps_antichain():
    # a composite's parts specialize it, so encapsulating with a part keeps the composite only
    big = comb_seq(fwd, inv)
    assert encap(big, fwd) == big


@settings(max_examples=200, deadline=None)
@given(terms)
def test_normalize_idempotent(t):
    n = normalize(t)
    assert normalize(n) == n


@settings(max_examples=200, deadline=None)
@given(terms, terms)
def test_par_symmetric(a, b):
    assert term_equal(comb_par(a, b), comb_par(b, a))


@settings(max_examples=200, deadline=None)
@given(terms, terms, terms)
def test_seq_and_par_associative(a, b, c):
    assert comb_seq(a, comb_seq(b, c)) == comb_seq(comb_seq(a, b), c)
    assert comb_par(a, comb_par(b, c)) == comb_par(comb_par(a, b), c)


@settings(max_examples=200, deadline=None)
@given(flat_terms)
def test_specializes_reflexive(t):
    assert specializes(t, t)


@settings(max_examples=100, deadline=None)
@given(flat_terms, flat_terms)
def test_encap_upper_bound(a, b):
    e = encap(a, b)
    if isinstance(e, Encap):
        assert specializes(a, e) and specializes(b, e)


@settings(max_examples=200, deadline=None)
@given(st.lists(terms, max_size=4), st.lists(terms, max_size=4), st.lists(terms, max_size=3))
def test_add_delete_match_set_oracle(xs, ys, zs):
    def keys(items):
        return {n.key for n in map(normalize, items) if not isinstance(n, Null)}

    sigma = SchemaSet(frozenset(xs))
    added = add(sigma, ys)
    assert {e.key for e in added.elems} == keys(xs) | keys(ys)
    removed = delete(added, zs)
    assert {e.key for e in removed.elems} == (keys(xs) | keys(ys)) - keys(zs)


@settings(max_examples=100, deadline=None)
@given(terms)
def test_json_roundtrip(t):
    assert term_from_json(term_to_json(t)) == t


def test_pool_types_are_well_formed():
    for name, t in ATOMIC_POOL:
        assert make_atomic(name, t).type == t
