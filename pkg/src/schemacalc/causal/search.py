"""Greedy two-phase structure search over DAGs."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from ..errors import CycleCreated, EmptyDataset
from .graph import Dag, covered
from .model import CausalSchema, Dataset, arc_add, arc_delete, arc_reverse, empty_schema, variables_of
from .score import BicScorer, fit_mle

log = logging.getLogger(__name__)

KIND_ORDER = {"add": 0, "delete": 1, "reverse": 2}
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class Move:
    step: int
    kind: str
    source: str
    target: str
    delta: float
    phase: str


def _apply(dag: Dag, kind, u, v) -> Dag:
    return {"add": dag.add, "delete": dag.delete, "reverse": dag.reverse}[kind](u, v)


def _delta(sc: BicScorer, dag: Dag, kind, u, v) -> float:
    pa_v = set(dag.parents(v))
    if kind == "add":
        return sc.local(v, pa_v | {u}) - sc.local(v, pa_v)
    if kind == "delete":
        return sc.local(v, pa_v - {u}) - sc.local(v, pa_v)
    pa_u = set(dag.parents(u))
    return (sc.local(v, pa_v - {u}) + sc.local(u, pa_u | {v})
            - sc.local(v, pa_v) - sc.local(u, pa_u))


def _candidates(dag: Dag, phase: str):
    nodes = dag.nodes
    if phase == "forward":
        for u in nodes:
            for v in nodes:
                if u != v and not dag.has_edge(u, v):
                    try:
                        dag.add(u, v)
                    except CycleCreated:
                        continue
                    yield "add", u, v
        return
    for u, v in dag.sorted_edges():
        yield "delete", u, v
        if covered(dag, u, v):
            yield "reverse", u, v


def _best(sc, dag, phase):
    scored = [(_delta(sc, dag, kind, u, v), kind, u, v) for kind, u, v in _candidates(dag, phase)]
    if not scored:
        return None
    top = max(d for d, *_ in scored)
    # score-equivalent moves differ only by rounding; they count as ties
    tol = TIE_RTOL * max(1.0, abs(top))
    tied = [m for m in scored if m[0] >= top - tol]
    return min(tied, key=lambda m: (KIND_ORDER[m[1]], str(m[2]), str(m[3])))


def ges_run(data: Dataset, epsilon: float = 1e-6, alpha: float = 1.0, seed: int = 0):
    """Forward additions then backward deletions/covered reversals while the
    score improves by more than ``epsilon``.  Returns (model, moves).

    The search is deterministic; ``seed`` is only recorded by callers.
    """
    if data.n == 0:
        raise EmptyDataset("cannot search without data")
    if len(data.variables) < 2:
        raise ValueError("structure search needs at least two variables")
    sc = BicScorer(data)
    model: CausalSchema = empty_schema(variables_of(data))
    model = CausalSchema(model.variables, model.dag, fit_mle(model.dag, data, alpha))
    edit = {"add": arc_add, "delete": arc_delete, "reverse": arc_reverse}
    moves = []
    for phase in ("forward", "backward"):
        while True:
            best = _best(sc, model.dag, phase)
            if best is None or not best[0] > epsilon or math.isnan(best[0]):
                break
            d, kind, u, v = best
            model = edit[kind](model, u, v, data, alpha)
            moves.append(Move(len(moves) + 1, kind, u, v, d, phase))
            log.debug("%s %s->%s delta=%.6g", kind, u, v, d)
    return model, moves
