"""Tabular value iteration as a cognitive module.

Three implemented schemas make up the mind: a transition schema ``T``
(predictive, O×D→O), a reward schema ``R`` (goal, O×D×O→ℝ) and a value schema
``V`` (goal, O→ℝ).  The Bellman update is registered as an update rule, so a
workflow loop over one ``update`` primitive performs value iteration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NonStochasticRow, ShapeMismatch
from .impl import PROB_TOL, TABULAR, ImplementedSchema, implement
from .impl import update as update_schema
from .mind import MindState
from .modules import CognitiveModule
from .semantics import dirac_values, model
from .syntax import SchemaType, SpaceSpec, make_atomic
from .workflow import (
    ExecTrace,
    PredicateRef,
    execute,
    register_predicate,
    register_update_rule,
    wf_loop,
    wf_prim,
)

DEFAULT_DELTA = 1e-8
DEFAULT_MAX_ITER = 10_000
# nominal grid of the real codomain; tables extend it with their own values
REAL_GRID = SpaceSpec("R", (0.0,), "R")


def _ro(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TabularMdp:
    states: SpaceSpec
    actions: SpaceSpec
    T: np.ndarray
    R: np.ndarray
    gamma: float
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        T, R = _ro(self.T), _ro(self.R)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "R", R)
        n, k = self.states.size, self.actions.size
        if T.shape != (n, k, n) or R.shape != (n, k, n):
            raise ShapeMismatch(f"T and R must have shape [{n}, {k}, {n}]")
        if not (np.all(np.isfinite(T)) and np.all(np.isfinite(R))):
            raise ShapeMismatch("T and R must be finite")
        if np.any(T < 0) or np.any(np.abs(T.sum(axis=2) - 1.0) > PROB_TOL):
            raise NonStochasticRow("every T(o, d, ·) must be a probability vector")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if not self.delta > 0:
            raise ValueError("delta must be positive")

    @property
    def n_states(self) -> int:
        return self.states.size

    @property
    def n_actions(self) -> int:
        return self.actions.size


@dataclass(frozen=True, eq=False)
class ValueTable:
    values: np.ndarray

    def __post_init__(self):
        v = _ro(self.values)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ShapeMismatch("a value table is a finite 1-d array")
        object.__setattr__(self, "values", v)

    def __eq__(self, other):
        if not isinstance(other, ValueTable):
            return NotImplemented
        return np.array_equal(self.values, other.values)


def _vector(theta, n: int) -> np.ndarray:
    v = theta.values if hasattr(theta, "values") else theta
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise ShapeMismatch(f"value table has shape {list(v.shape)}, need [{n}]")
    return v


def bellman_update(theta, mdp: TabularMdp) -> ValueTable:
    """Per-state Bellman optimality backup, as written for the value schema."""
    v = _vector(theta, mdp.n_states)
    T, R, g = mdp.T, mdp.R, mdp.gamma
    n, k = mdp.n_states, mdp.n_actions
    out = np.empty(n)
    for o in range(n):
        best = None
        for d in range(k):
            q = 0.0
            for o2 in range(n):
                q += T[o, d, o2] * (R[o, d, o2] + g * v[o2])
            if best is None or q > best:
                best = q
        out[o] = best
    return ValueTable(out)


def q_values(V, mdp: TabularMdp) -> np.ndarray:
    v = _vector(V, mdp.n_states)
    return (mdp.T * (mdp.R + mdp.gamma * v[None, None, :])).sum(axis=2)


def bellman_operator(V, mdp: TabularMdp) -> np.ndarray:
    """The optimality operator on plain vectors."""
    return q_values(V, mdp).max(axis=1)


def greedy_policy(V, mdp: TabularMdp) -> dict:
    q = q_values(V, mdp)
    policy = {}
    for o, state in enumerate(mdp.states.points):
        best = 0
        for d in range(1, mdp.n_actions):
            if q[o, d] > q[o, best]:
                best = d
        policy[state] = mdp.actions.points[best]
    return policy


# ---------------------------------------------------------------------------
# schema layer


def vi_types(mdp: TabularMdp) -> dict:
    O, D = mdp.states, mdp.actions
    return {
        "T": SchemaType("Predictive", (O, D), (O,)),
        "R": SchemaType("Goal", (O, D, O), (REAL_GRID,)),
        "V": SchemaType("Goal", (O,), (REAL_GRID,)),
    }


def value_schema(mdp: TabularMdp, theta) -> ImplementedSchema:
    t = vi_types(mdp)["V"]
    return implement(make_atomic("V", t), TABULAR, _vector(theta, mdp.n_states), "V")


def mdp_schemas(mdp: TabularMdp, theta0=None) -> dict:
    types = vi_types(mdp)
    theta0 = np.zeros(mdp.n_states) if theta0 is None else theta0
    return {
        "T": implement(make_atomic("T", types["T"]), TABULAR, mdp.T, "T"),
        "R": implement(make_atomic("R", types["R"]), TABULAR, mdp.R, "R"),
        "V": value_schema(mdp, theta0),
    }


def mdp_from_schemas(t: ImplementedSchema, r: ImplementedSchema, gamma: float,
                     delta: float = DEFAULT_DELTA) -> TabularMdp:
    O, D = t.type.dom
    return TabularMdp(O, D, t.params.values, r.params.values, float(gamma), delta)


@register_update_rule("bellman")
def _rule_bellman(s, M, args):
    mdp = mdp_from_schemas(M.schemas[args.get("transition", "T")],
                           M.schemas[args.get("reward", "R")], args["gamma"])
    return lambda th: bellman_update(th.values, mdp).values


@register_predicate("bellman_residual_below")
def _pred_residual(before, after, ref, ctx):
    mdp = mdp_from_schemas(after.schemas[ref.args.get("transition", "T")],
                           after.schemas[ref.args.get("reward", "R")], ref.args["gamma"])
    v = after.schemas[ref.args.get("schema", "V")].params.values
    return float(np.max(np.abs(bellman_operator(v, mdp) - v))) < float(ref.threshold)


def lifting_check(theta, mdp: TabularMdp, update_rule: Callable = bellman_update,
                  tol: float = 1e-12) -> bool:
    """Does updating then interpreting agree with interpreting then applying the operator?"""
    s = value_schema(mdp, theta)
    lhs = dirac_values(model(update_schema(
        s, lambda th: _vector(update_rule(th.values, mdp), mdp.n_states))))
    before = np.array([y[0] for y in dirac_values(model(s))])
    rhs = bellman_operator(before, mdp)
    lhs = np.array([y[0] for y in lhs])
    return lhs.shape == rhs.shape and bool(np.all(np.abs(lhs - rhs) <= tol))


def vi_workflow(mdp: TabularMdp, max_iter: int = DEFAULT_MAX_ITER):
    step = wf_prim(
        "update",
        targets=("V",),
        args={"rule": "bellman", "transition": "T", "reward": "R", "gamma": mdp.gamma},
        reads=("T", "R"),
    )
    cond = PredicateRef("sup_norm_change_below", {"schema": "V"}, mdp.delta)
    return wf_loop(cond, step, max_iter)


def vi_module(mdp: TabularMdp, max_iter: int = DEFAULT_MAX_ITER) -> CognitiveModule:
    types = vi_types(mdp)
    success = PredicateRef(
        "bellman_residual_below",
        {"schema": "V", "transition": "T", "reward": "R", "gamma": mdp.gamma},
        mdp.delta,
    )
    return CognitiveModule(
        "value_iteration",
        (types["T"], types["R"]),
        (types["V"],),
        (vi_workflow(mdp, max_iter),),
        success,
        frozenset({"update"}),
    )


def vi_mind(mdp: TabularMdp, theta0=None, max_iter: int = DEFAULT_MAX_ITER) -> MindState:
    return MindState(
        spaces={"O": mdp.states, "D": mdp.actions, "H": None},
        schemas=mdp_schemas(mdp, theta0),
        modules={"value_iteration": vi_module(mdp, max_iter)},
    )


@dataclass
class ViResult:
    values: ValueTable
    trace: list
    iterations: int
    converged: bool
    mind: Optional[MindState] = None
    log: list = field(default_factory=list)

    @property
    def final_delta(self) -> float:
        return self.trace[-1] if self.trace else 0.0


def run_vi(mdp: TabularMdp, theta0=None, max_iter: int = DEFAULT_MAX_ITER,
           seed: int = 0) -> ViResult:
    """Value iteration executed as a workflow loop on a mind state."""
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    M = vi_mind(mdp, theta0, max_iter)
    trace = ExecTrace()
    out = execute(vi_workflow(mdp, max_iter), M, seed, trace)
    deltas = [m["value"] for m in trace.metrics]
    return ViResult(
        ValueTable(out.schemas["V"].params.values),
        deltas,
        len(deltas),
        "MaxIterExceeded" not in trace.flags,
        out,
        trace.log,
    )


def run_vi_direct(mdp: TabularMdp, theta0=None, max_iter: int = DEFAULT_MAX_ITER) -> ViResult:
    """The same iteration as a plain loop."""
    v = np.zeros(mdp.n_states) if theta0 is None else _vector(theta0, mdp.n_states)
    deltas = []
    for _ in range(max_iter):
        new = bellman_update(v, mdp).values
        d = float(np.max(np.abs(new - v))) if new.size else 0.0
        deltas.append(d)
        v = new
        if d < mdp.delta:
            return ViResult(ValueTable(v), deltas, len(deltas), True)
    return ViResult(ValueTable(v), deltas, len(deltas), False)


# ---------------------------------------------------------------------------
# IO and generators


def mdp_from_json(d: dict) -> TabularMdp:
    states = SpaceSpec("O", tuple(d["states"]), "O")
    actions = SpaceSpec("D", tuple(d["actions"]), "D")
    return TabularMdp(states, actions, d["transition"], d["reward"], float(d["gamma"]),
                      float(d.get("delta", DEFAULT_DELTA)))


def mdp_to_json(mdp: TabularMdp) -> dict:
    return {
        "states": list(mdp.states.points),
        "actions": list(mdp.actions.points),
        "transition": mdp.T.tolist(),
        "reward": mdp.R.tolist(),
        "gamma": mdp.gamma,
        "delta": mdp.delta,
    }


def value_table_json(mdp: TabularMdp, V) -> dict:
    v = _vector(V, mdp.n_states)
    return {"states": list(mdp.states.points), "values": [float(x) for x in v]}


def random_mdp(rng: np.random.Generator, n_states: int, n_actions: int, gamma: float,
               delta: float = DEFAULT_DELTA, sparse: bool = False) -> TabularMdp:
    T = rng.dirichlet(np.ones(n_states), size=(n_states, n_actions))
    if sparse:  # knock out some successors to exercise zero entries
        mask = rng.random(T.shape) < 0.3
        mask[..., 0] = False
        T = np.where(mask, 0.0, T)
        T = T / T.sum(axis=2, keepdims=True)
    R = rng.uniform(-1.0, 1.0, size=(n_states, n_actions, n_states))
    states = SpaceSpec("O", tuple(f"o{i}" for i in range(n_states)), "O")
    actions = SpaceSpec("D", tuple(f"d{i}" for i in range(n_actions)), "D")
    return TabularMdp(states, actions, T, R, gamma, delta)
