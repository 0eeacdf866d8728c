import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from schemacalc.errors import NonStochasticRow, ShapeMismatch
from schemacalc.impl import (
    TABULAR,
    ImplLanguage,
    compose_morphisms,
    identity_morphism,
    implement,
    schema_from_json,
    schema_to_json,
    transform,
    transform_morphism,
    update,
    update_morphism,
)
from schemacalc.syntax import SchemaType, SpaceSpec, make_atomic

O = SpaceSpec("O", ("o0", "o1"))
D = SpaceSpec("D", ("d0", "d1"))
R = SpaceSpec("R", (0.0,))

goal = make_atomic("V", SchemaType("Goal", (O,), (R,)))
pred = make_atomic("T", SchemaType("Predictive", (O, D), (O,)))

T = np.array([[[0.9, 0.1], [0.2, 0.8]], [[0.5, 0.5], [0.0, 1.0]]])


def test_goal_schema_shape():
    s = implement(goal, TABULAR, [1.0, 2.0])
    assert s.params.shape == (2,)
    assert not s.shape_spec.stochastic


def test_predictive_schema_shape():
    s = implement(pred, TABULAR, T)
    assert s.params.shape == (2, 2, 2)
    assert s.shape_spec.stochastic


def test_wrong_shape():
    with pytest.raises(ShapeMismatch):
        implement(goal, TABULAR, [1.0, 2.0, 3.0])


def test_non_stochastic_rows():
    bad = T.copy()
    bad[0, 0] = [0.5, 0.6]
    with pytest.raises(NonStochasticRow):
        implement(pred, TABULAR, bad)


def test_params_are_read_only():
    s = implement(goal, TABULAR, [1.0, 2.0])
    with pytest.raises(ValueError):
        s.params.values[0] = 5.0


def test_content_id_is_stable():
    a = implement(goal, TABULAR, [1.0, 2.0])
    b = implement(goal, TABULAR, [1.0, 2.0])
    c = implement(goal, TABULAR, [1.0, 2.5])
    assert a.id == b.id != c.id


def test_update_identity():
    s = implement(pred, TABULAR, T, "T")
    assert update(s, lambda th: th.values) == s


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_update_compositional(a1, b1, a2, b2):
    s = implement(goal, TABULAR, [1.0, -2.0], "V")
    u1 = lambda th: a1 * th.values + b1  # noqa: E731
    u2 = lambda th: a2 * th.values + b2  # noqa: E731
    lhs = update(update(s, u1), u2)
    rhs = update(s, lambda th: a2 * (a1 * th.values + b1) + b2)
    assert lhs == rhs


def test_update_shape_change_rejected():
    s = implement(goal, TABULAR, [1.0, 2.0])
    with pytest.raises(ShapeMismatch):
        update(s, lambda th: np.zeros(3))


def test_transform_identity_and_permutation():
    s = implement(pred, TABULAR, T, "T")
    assert transform(s, TABULAR, lambda th: th.values) == s
    flipped = transform(s, TABULAR, lambda th: th.values[::-1])
    assert np.array_equal(flipped.params.values, T[::-1])


def test_transform_wrong_shape():
    s = implement(pred, TABULAR, T)
    with pytest.raises(ShapeMismatch):
        transform(s, TABULAR, lambda th: th.values[0])


def test_compose_with_identity():
    s = implement(goal, TABULAR, [1.0, 2.0], "V")
    f = update_morphism(s, lambda th: th.values * 2)
    g = compose_morphisms(identity_morphism(goal), f)
    assert g(s) == f(s)


def test_vertical_closed_under_composition():
    s = implement(goal, TABULAR, [1.0, 2.0], "V")
    v1 = update_morphism(s, lambda th: th.values + 1)
    v2 = transform_morphism(s, TABULAR, lambda th: th.values * 3)
    assert v1.is_vertical and v2.is_vertical
    v = compose_morphisms(v2, v1)
    assert v.is_vertical
    assert np.array_equal(v(s).params.values, [6.0, 9.0])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3), st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_compose_associative(coefs, theta):
    s = implement(goal, TABULAR, theta, "V")
    f, g, h = (update_morphism(s, lambda th, c=c: c * th.values + 1) for c in coefs)
    left = compose_morphisms(h, compose_morphisms(g, f))
    right = compose_morphisms(compose_morphisms(h, g), f)
    assert left(s) == right(s)


def test_json_roundtrip():
    s = implement(pred, TABULAR, T, "T")
    assert schema_from_json(schema_to_json(s)) == s


def test_custom_language_shape():
    flat = ImplLanguage("flat", lambda t: TABULAR.param_shape_of(t))
    s = implement(goal, flat, [0.0, 1.0])
    assert s.lang.name == "flat"
