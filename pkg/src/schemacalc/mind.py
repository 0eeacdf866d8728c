"""Mind states and memory subsystems."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from numbers import Real
from typing import Callable, Iterable, Mapping, Optional

from .errors import (
    InconsistentInstance,
    NonNumericAggregate,
    OverlapConflict,
    SchemaCalcError,
    UnknownSchema,
)
from .impl import PROB_TOL, ImplementedSchema, ImplMorphism, is_deterministic_type
from .semantics import EvaluatedInstance, model, reindex_instance
from .syntax import SpaceSpec

MIND_ROLES = ("O", "D", "H")
MEMORY_OPS = ("store", "retrieve", "aggregate", "forget")
SELECTORS = ("all", "count", "mean_output", "last")


@dataclass(frozen=True)
class MemorySubsystem:
    name: str
    data: Mapping[str, tuple] = field(default_factory=dict)
    ops: tuple = MEMORY_OPS


def mem_write(
    mem: MemorySubsystem,
    schemas: Mapping[str, ImplementedSchema],
    schema_id: str,
    inst: EvaluatedInstance,
) -> MemorySubsystem:
    if schema_id not in schemas:
        raise UnknownSchema(f"no schema {schema_id!r}")
    try:
        expected = model(schemas[schema_id])(inst.input).prob(inst.output)
    except SchemaCalcError as exc:
        raise InconsistentInstance(str(exc)) from None
    if inst.weight <= 0 or abs(inst.weight - expected) > PROB_TOL:
        raise InconsistentInstance(
            f"instance weight {inst.weight} disagrees with the model ({expected})"
        )
    data = dict(mem.data)
    data[schema_id] = data.get(schema_id, ()) + (inst,)
    return replace(mem, data=data)


def _numeric(v) -> bool:
    return isinstance(v, Real) and not isinstance(v, bool)


def mem_read(
    mem: MemorySubsystem,
    schemas: Mapping[str, ImplementedSchema],
    schema_id: str,
    selector: str = "all",
):
    if schema_id not in schemas and schema_id not in mem.data:
        raise UnknownSchema(f"no schema {schema_id!r}")
    insts = mem.data.get(schema_id, ())
    if selector == "all":
        return insts
    if selector == "count":
        return len(insts)
    if selector == "last":
        return insts[-1] if insts else None
    if selector == "mean_output":
        s = schemas.get(schema_id)
        numeric_cod = s is not None and (
            is_deterministic_type(s.type)
            or (len(s.type.cod) == 1 and all(_numeric(p) for p in s.type.cod[0].points))
        )
        if not numeric_cod or not all(len(i.output) == 1 and _numeric(i.output[0]) for i in insts):
            raise NonNumericAggregate(f"schema {schema_id!r} has a non-numeric codomain")
        if not insts:
            return float("nan")
        return sum(float(i.output[0]) for i in insts) / len(insts)
    raise ValueError(f"unknown selector {selector!r}; expected one of {SELECTORS}")


def mem_forget(mem: MemorySubsystem, schema_id: str) -> MemorySubsystem:
    data = {k: v for k, v in mem.data.items() if k != schema_id}
    return replace(mem, data=data)


def mem_reindex(
    mem: MemorySubsystem,
    m: ImplMorphism,
    from_id: str,
    to_id: str,
    schemas: Optional[Mapping[str, ImplementedSchema]] = None,
) -> MemorySubsystem:
    """Reinterpret what is stored for ``from_id`` (the morphism's target) as
    storage for ``to_id`` (its source)."""
    if schemas is not None:
        for sid in (from_id, to_id):
            if sid not in schemas:
                raise UnknownSchema(f"no schema {sid!r}")
    elif from_id not in mem.data:
        raise UnknownSchema(f"nothing is known about schema {from_id!r}")
    data = dict(mem.data)
    data[to_id] = tuple(reindex_instance(m, i) for i in mem.data.get(from_id, ()))
    return replace(mem, data=data)


def check_memory_morphism(
    tau: Callable[[MemorySubsystem], MemorySubsystem],
    write_m: Callable[[MemorySubsystem, str, EvaluatedInstance], MemorySubsystem],
    write_n: Callable[[MemorySubsystem, str, EvaluatedInstance], MemorySubsystem],
    start_m: MemorySubsystem,
    start_n: MemorySubsystem,
    samples: Iterable[tuple],
) -> bool:
    """Check τ∘write_M = write_N on sample (schema id, instance) pairs."""
    for schema_id, inst in samples:
        lhs = tau(write_m(start_m, schema_id, inst)).data.get(schema_id, ())
        rhs = write_n(start_n, schema_id, inst).data.get(schema_id, ())
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# mind states


def _empty_spaces() -> dict:
    return {r: None for r in MIND_ROLES}


@dataclass(frozen=True)
class MindState:
    spaces: Mapping[str, Optional[SpaceSpec]] = field(default_factory=_empty_spaces)
    schemas: Mapping[str, ImplementedSchema] = field(default_factory=dict)
    memories: Mapping[str, MemorySubsystem] = field(default_factory=dict)
    modules: Mapping[str, object] = field(default_factory=dict)

    def with_schema(self, s: ImplementedSchema) -> "MindState":
        return replace(self, schemas={**self.schemas, s.id: s})

    def without_schema(self, schema_id: str) -> "MindState":
        return replace(self, schemas={k: v for k, v in self.schemas.items() if k != schema_id})

    def with_memory(self, mem: MemorySubsystem) -> "MindState":
        return replace(self, memories={**self.memories, mem.name: mem})

    def with_module(self, module) -> "MindState":
        return replace(self, modules={**self.modules, module.name: module})

    def write(self, memory: str, schema_id: str, inst: EvaluatedInstance) -> "MindState":
        mem = self.memories.get(memory) or MemorySubsystem(memory)
        return self.with_memory(mem_write(mem, self.schemas, schema_id, inst))

    def schema_ids(self) -> set:
        ids = set(self.schemas)
        for mem in self.memories.values():
            ids |= set(mem.data)
        return ids


EMPTY_MIND = MindState()


def _union_space(a: Optional[SpaceSpec], b: Optional[SpaceSpec]) -> Optional[SpaceSpec]:
    if a is None:
        return b
    if b is None or a == b:
        return a
    pts = a.points + tuple(p for p in b.points if p not in a)
    return SpaceSpec(a.label, pts, a.role)


def restrict(mind: MindState, ids) -> MindState:
    """Sub-state holding only the given schema ids (memories keep their names)."""
    ids = set(ids)
    return replace(
        mind,
        schemas={k: v for k, v in mind.schemas.items() if k in ids},
        memories={
            n: replace(m, data={k: v for k, v in m.data.items() if k in ids})
            for n, m in mind.memories.items()
        },
    )


def mind_par(m1: MindState, m2: MindState) -> MindState:
    """Parallel composition of two minds over disjoint schemas."""
    clash = set(m1.schemas) & set(m2.schemas)
    if clash:
        raise OverlapConflict(f"both minds hold schemas {sorted(clash)}")
    memories = dict(m1.memories)
    for name, mem in m2.memories.items():
        if name not in memories:
            memories[name] = mem
            continue
        other = memories[name]
        shared = set(other.data) & set(mem.data)
        if shared or other.ops != mem.ops:
            raise OverlapConflict(f"memory {name!r} has conflicting contents for {sorted(shared)}")
        memories[name] = replace(other, data={**other.data, **mem.data})
    modules = dict(m1.modules)
    for name, mod in m2.modules.items():
        if name in modules and modules[name] != mod:
            raise OverlapConflict(f"two different modules are named {name!r}")
        modules[name] = mod
    spaces = {r: _union_space(m1.spaces.get(r), m2.spaces.get(r)) for r in MIND_ROLES}
    return MindState(
        spaces=spaces,
        schemas={**m1.schemas, **m2.schemas},
        memories=memories,
        modules=modules,
    )
