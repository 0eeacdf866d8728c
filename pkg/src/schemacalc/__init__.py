"""Schema calculus: syntax, tabular implementations, finite-kernel semantics,
workflows acting on mind states, and two cognitive modules (value iteration
and greedy causal structure search)."""

__version__ = "0.1.0"

from . import causal, laws, value_iteration  # noqa: F401  (registers the Bellman rule)
from .errors import SchemaCalcError
from .impl import TABULAR, ImplementedSchema, ImplMorphism, implement, transform, update
from .mind import MemorySubsystem, MindState, mem_read, mem_reindex, mem_write, mind_par
from .modules import CognitiveModule, run_module
from .semantics import FiniteDist, FiniteKernel, dirac, interpret, kernel_compose, kernel_product, model
from .syntax import (
    SchemaSet,
    SchemaType,
    SpaceSpec,
    comb_par,
    comb_seq,
    ctx,
    encap,
    make_atomic,
    make_null,
    normalize,
    ref,
    specializes,
    term_equal,
)
from .workflow import PredicateRef, execute, interchange_rewrite, wf_loop, wf_par, wf_prim, wf_seq

__all__ = [
    "CognitiveModule", "FiniteDist", "FiniteKernel", "ImplMorphism", "ImplementedSchema",
    "MemorySubsystem", "MindState", "PredicateRef", "SchemaCalcError", "SchemaSet", "SchemaType",
    "SpaceSpec", "TABULAR", "causal", "comb_par", "comb_seq", "ctx", "dirac", "encap", "execute",
    "implement", "interchange_rewrite", "interpret", "kernel_compose", "kernel_product", "laws",
    "make_atomic", "make_null", "mem_read", "mem_reindex", "mem_write", "mind_par", "model",
    "normalize", "ref", "run_module", "specializes", "term_equal", "transform", "update",
    "value_iteration", "wf_loop", "wf_par", "wf_prim", "wf_seq",
]
