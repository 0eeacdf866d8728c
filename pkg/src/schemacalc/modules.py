"""Cognitive modules: typed bundles of workflows with a success condition."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SignatureViolation, TypeMismatch, UnknownSchema
from .mind import MindState
from .syntax import SchemaType
from .workflow import (
    ExecContext,
    ExecTrace,
    PredicateRef,
    Workflow,
    evaluate_predicate,
    execute,
    prim_names,
    workflow_from_json,
    workflow_to_json,
)


@dataclass(frozen=True)
class CognitiveModule:
    name: str
    dom_types: tuple
    cod_types: tuple
    workflows: tuple
    success: PredicateRef
    signature: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "dom_types", tuple(self.dom_types))
        object.__setattr__(self, "cod_types", tuple(self.cod_types))
        object.__setattr__(self, "workflows", tuple(self.workflows))
        object.__setattr__(self, "signature", frozenset(self.signature))
        for i, w in enumerate(self.workflows):
            extra = prim_names(w) - self.signature
            if extra:
                raise SignatureViolation(
                    f"workflow {i} of module {self.name!r} uses {sorted(extra)} outside its signature"
                )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dom_types": [t.to_json() for t in self.dom_types],
            "cod_types": [t.to_json() for t in self.cod_types],
            "workflows": [workflow_to_json(w) for w in self.workflows],
            "success": self.success.to_json(),
            "signature": sorted(self.signature),
        }

    @classmethod
    def from_json(cls, d: dict) -> "CognitiveModule":
        return cls(
            d["name"],
            tuple(SchemaType.from_json(t) for t in d.get("dom_types", [])),
            tuple(SchemaType.from_json(t) for t in d.get("cod_types", [])),
            tuple(workflow_from_json(w) for w in d.get("workflows", [])),
            PredicateRef.from_json(d["success"]),
            frozenset(d.get("signature", [])),
        )


def check_module_types(M: MindState, module: CognitiveModule) -> None:
    present = [s.type for s in M.schemas.values()]
    for t in module.dom_types + module.cod_types:
        if t not in present:
            raise TypeMismatch(f"module {module.name!r} needs a schema of type {t!r}")


def run_module(M: MindState, module_name: str, workflow_index: int = 0, seed: int = 0,
               trace: ExecTrace = None) -> tuple:
    """Run one of a module's workflows; returns (new state, success flag)."""
    try:
        module = M.modules[module_name]
    except KeyError:
        raise UnknownSchema(f"no module named {module_name!r}") from None
    if not 0 <= workflow_index < len(module.workflows):
        raise IndexError(f"module {module_name!r} has no workflow {workflow_index}")
    check_module_types(M, module)
    trace = trace if trace is not None else ExecTrace()
    out = execute(module.workflows[workflow_index], M, seed, trace, allowed=module.signature)
    ok = evaluate_predicate(module.success, M, out, ExecContext(seed, trace))
    return out, ok
