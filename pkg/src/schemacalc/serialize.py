"""JSON bundles for mind states, plus canonical dumping."""

from __future__ import annotations

import json

from .impl import schema_from_json, schema_to_json
from .mind import MIND_ROLES, MEMORY_OPS, MemorySubsystem, MindState
from .modules import CognitiveModule
from .semantics import EvaluatedInstance
from .syntax import SpaceSpec


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def memory_to_json(mem: MemorySubsystem) -> dict:
    return {
        "name": mem.name,
        "ops": list(mem.ops),
        "data": {sid: [i.to_json() for i in insts] for sid, insts in sorted(mem.data.items())},
    }


def memory_from_json(d: dict) -> MemorySubsystem:
    data = {sid: tuple(EvaluatedInstance.from_json(i) for i in insts)
            for sid, insts in d.get("data", {}).items()}
    return MemorySubsystem(d["name"], data, tuple(d.get("ops", MEMORY_OPS)))


def memory_dump_lines(mem: MemorySubsystem) -> str:
    """One JSON object per stored instance."""
    out = []
    for sid, insts in sorted(mem.data.items()):
        for i in insts:
            out.append(json.dumps({"schema": sid, **i.to_json()}, sort_keys=True))
    return "".join(line + "\n" for line in out)


def mind_to_json(M: MindState) -> dict:
    return {
        "spaces": {r: (None if M.spaces.get(r) is None else M.spaces[r].to_json())
                   for r in MIND_ROLES},
        "schemas": [schema_to_json(M.schemas[k]) for k in sorted(M.schemas)],
        "memories": [memory_to_json(M.memories[k]) for k in sorted(M.memories)],
        "modules": [M.modules[k].to_json() for k in sorted(M.modules)],
    }


def mind_from_json(d: dict) -> MindState:
    spaces = {r: None for r in MIND_ROLES}
    for r, s in (d.get("spaces") or {}).items():
        if r not in MIND_ROLES:
            raise ValueError(f"unknown mind space {r!r}")
        spaces[r] = None if s is None else SpaceSpec.from_json(s)
    schemas = {}
    for sd in d.get("schemas", []):
        s = schema_from_json(sd)
        schemas[s.id] = s
    memories = {}
    for md in d.get("memories", []):
        m = memory_from_json(md)
        memories[m.name] = m
    modules = {}
    for md in d.get("modules", []):
        m = CognitiveModule.from_json(md)
        modules[m.name] = m
    return MindState(spaces, schemas, memories, modules)


def mind_dumps(M: MindState) -> str:
    return dumps(mind_to_json(M))
