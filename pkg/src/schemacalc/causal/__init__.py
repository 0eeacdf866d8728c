"""Causal predictive schemas and greedy structure learning."""

from .equivalence import Cpdag, cpdag, markov_equivalent, skeleton, v_structures
from .graph import Dag, covered
from .model import (
    CausalSchema,
    Dataset,
    arc_add,
    arc_delete,
    arc_reverse,
    causal_from_json,
    causal_to_json,
    do_intervene,
    empty_schema,
    joint,
    sample_data,
    variables_of,
)
from .score import BicScorer, counts, fit_mle, fit_table, local_score, score_bic
from .search import Move, ges_run

__all__ = [
    "BicScorer", "CausalSchema", "Cpdag", "Dag", "Dataset", "Move",
    "arc_add", "arc_delete", "arc_reverse", "causal_from_json", "causal_to_json",
    "counts", "covered", "cpdag", "do_intervene", "empty_schema", "fit_mle", "fit_table",
    "ges_run", "joint", "local_score", "markov_equivalent", "sample_data", "score_bic",
    "skeleton", "v_structures", "variables_of",
]
