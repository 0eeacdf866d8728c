import math

import numpy as np
import pytest

from schemacalc.errors import (
    InconsistentInstance,
    NonNumericAggregate,
    OverlapConflict,
    SignatureViolation,
    TypeMismatch,
    UnknownSchema,
)
from schemacalc.impl import TABULAR, identity_morphism, implement
from schemacalc.mind import (
    EMPTY_MIND,
    MemorySubsystem,
    MindState,
    mem_forget,
    mem_read,
    mem_reindex,
    mem_write,
    mind_par,
)
from schemacalc.modules import CognitiveModule, run_module
from schemacalc.semantics import EvaluatedInstance
from schemacalc.serialize import memory_dump_lines, mind_dumps, mind_from_json, mind_to_json
from schemacalc.syntax import SchemaType, SpaceSpec, make_atomic
from schemacalc.workflow import PredicateRef, UnitSeq, wf_prim

O = SpaceSpec("O", ("o1", "o2"))
NUM = SpaceSpec("O", (1.0, 3.0))
R = SpaceSpec("R", (0.0,))

t = implement(make_atomic("t", SchemaType("Predictive", (O,), (O,))), TABULAR, [[0.25, 0.75], [1.0, 0.0]], "t")
n = implement(make_atomic("n", SchemaType("Predictive", (NUM,), (NUM,))), TABULAR, [[0.5, 0.5], [0.5, 0.5]], "n")
v = implement(make_atomic("v", SchemaType("Goal", (O,), (R,))), TABULAR, [1.0, 3.0], "v")
SCHEMAS = {"t": t, "n": n, "v": v}


def inst(x, y, w):
    return EvaluatedInstance((x,), (y,), w)


def test_write_then_read():
    mem = mem_write(MemorySubsystem("ep"), SCHEMAS, "t", inst("o1", "o2", 0.75))
    assert inst("o1", "o2", 0.75) in mem_read(mem, SCHEMAS, "t")
    assert mem_read(mem, SCHEMAS, "t", "last") == inst("o1", "o2", 0.75)


def test_write_checks_weight_and_id():
    with pytest.raises(InconsistentInstance):
        mem_write(MemorySubsystem("ep"), SCHEMAS, "t", inst("o2", "o2", 0.0))
    with pytest.raises(InconsistentInstance):
        mem_write(MemorySubsystem("ep"), SCHEMAS, "t", inst("o1", "o2", 0.5))
    with pytest.raises(UnknownSchema):
        mem_write(MemorySubsystem("ep"), SCHEMAS, "zzz", inst("o1", "o2", 0.75))


def test_count_and_mean():
    mem = MemorySubsystem("ep")
    for _ in range(3):
        mem = mem_write(mem, SCHEMAS, "t", inst("o2", "o1", 1.0))
    assert mem_read(mem, SCHEMAS, "t", "count") == 3
    mem = mem_write(mem, SCHEMAS, "n", inst(1.0, 1.0, 0.5))
    mem = mem_write(mem, SCHEMAS, "n", inst(1.0, 3.0, 0.5))
    assert mem_read(mem, SCHEMAS, "n", "mean_output") == 2.0
    mem = mem_write(mem, SCHEMAS, "v", inst("o2", 3.0, 1.0))
    assert mem_read(mem, SCHEMAS, "v", "mean_output") == 3.0


def test_mean_on_categorical():
    mem = mem_write(MemorySubsystem("ep"), SCHEMAS, "t", inst("o1", "o2", 0.75))
    with pytest.raises(NonNumericAggregate):
        mem_read(mem, SCHEMAS, "t", "mean_output")


def test_mean_of_nothing_is_nan():
    assert math.isnan(mem_read(MemorySubsystem("ep"), SCHEMAS, "n", "mean_output"))


def test_forget():
    mem = mem_write(MemorySubsystem("ep"), SCHEMAS, "t", inst("o1", "o2", 0.75))
    assert mem_read(mem_forget(mem, "t"), SCHEMAS, "t", "count") == 0


def test_reindex_identity_and_empty():
    mem = mem_write(MemorySubsystem("ep"), SCHEMAS, "t", inst("o1", "o2", 0.75))
    same = mem_reindex(mem, identity_morphism(t.term), "t", "t", SCHEMAS)
    assert same.data == mem.data
    empty = mem_reindex(MemorySubsystem("ep"), identity_morphism(t.term), "t", "t", SCHEMAS)
    assert empty.data["t"] == ()


def test_mind_par_unit_and_union():
    M = MindState(spaces={"O": O, "D": None, "H": None}, schemas={"t": t})
    assert mind_dumps(mind_par(M, EMPTY_MIND)) == mind_dumps(M)
    N = MindState(schemas={"v": v}, memories={"ep": MemorySubsystem("ep")})
    both = mind_par(M, N)
    assert set(both.schemas) == {"t", "v"} and set(both.memories) == {"ep"}
    assert both.spaces["O"] == O


def test_mind_par_overlap():
    with pytest.raises(OverlapConflict):
        mind_par(MindState(schemas={"t": t}), MindState(schemas={"t": t}))


def test_json_roundtrip_is_byte_stable():
    M = MindState(spaces={"O": O, "D": None, "H": None}, schemas=SCHEMAS).write("ep", "t", inst("o1", "o2", 0.75))
    text = mind_dumps(M)
    assert mind_dumps(mind_from_json(mind_to_json(M))) == text
    assert memory_dump_lines(M.memories["ep"]).count("\n") == 1


def _module(workflow, signature=("noop",), types=()):
    return CognitiveModule("m", types, (), (workflow,), PredicateRef("always"), frozenset(signature))


def test_inert_module_keeps_state():
    M = MindState(schemas=SCHEMAS).with_module(_module(UnitSeq()))
    out, ok = run_module(M, "m")
    assert ok and mind_dumps(out) == mind_dumps(M)


def test_module_signature_checked_statically():
    with pytest.raises(SignatureViolation):
        _module(wf_prim("update", ("v",)))


def test_module_type_check():
    missing = SchemaType("Predictive", (NUM,), (O,))
    M = MindState(schemas=SCHEMAS).with_module(_module(UnitSeq(), types=(missing,)))
    with pytest.raises(TypeMismatch):
        run_module(M, "m")


def test_unknown_module():
    with pytest.raises(UnknownSchema):
        run_module(MindState(), "nothing")


def test_module_json_roundtrip():
    mod = _module(wf_prim("noop", ("t",)), types=(t.type,))
    assert CognitiveModule.from_json(mod.to_json()) == mod


def test_write_via_mind_state():
    M = MindState(schemas=SCHEMAS).write("ep", "v", inst("o1", 1.0, 1.0))
    assert mem_read(M.memories["ep"], M.schemas, "v", "count") == 1
    assert np.isclose(mem_read(M.memories["ep"], M.schemas, "v", "mean_output"), 1.0)
