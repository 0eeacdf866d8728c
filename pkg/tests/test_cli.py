import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from oracles import optimal_values
from schemacalc.cli import main
from schemacalc.laws import random_value_schema
from schemacalc.mind import MindState
from schemacalc.serialize import dumps, mind_dumps
from schemacalc.value_iteration import mdp_from_json
from schemacalc.workflow import wf_par, wf_prim, workflow_to_json

DATA = Path(__file__).resolve().parent.parent / "data"
MDP = DATA / "mdp_2x2.json"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_laws_pass_and_repeat(tmp_path, capsys):
    code, report = run(capsys, "laws", "--cases", 5, "--seed", 3, "--out", tmp_path / "a")
    assert code == 0 and report["status"] == "pass" and report["metrics"]["failed_cases"] == 0
    run(capsys, "laws", "--cases", 5, "--seed", 3, "--out", tmp_path / "b")
    a, b = (json.loads((tmp_path / d / "report.json").read_text()) for d in "ab")
    assert a.pop("artifacts") != b.pop("artifacts") and a == b


def test_laws_zero_cases_is_usage_error(tmp_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["laws", "--cases", "0", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_vi_fixture_matches_oracle(tmp_path, capsys):
    code, report = run(capsys, "vi", MDP, "--out", tmp_path)
    assert code == 0 and report["status"] == "pass"
    mdp = mdp_from_json(json.loads(MDP.read_text()))
    v_star, _ = optimal_values(mdp.T, mdp.R, mdp.gamma)
    values = json.loads((tmp_path / "values.json").read_text())["values"]
    assert np.max(np.abs(np.array(values) - v_star)) <= mdp.delta * (1 + mdp.gamma / (1 - mdp.gamma))
    trace = (tmp_path / "trace.csv").read_text().splitlines()
    assert trace[0] == "iteration,sup_norm_delta" and len(trace) == report["metrics"]["iterations"] + 1
    for name in ("policy.json", "mind.json", "workflow.json", "report.json"):
        assert (tmp_path / name).exists()


def test_vi_gamma_zero(tmp_path, capsys):
    code, report = run(capsys, "vi", MDP, "--gamma", 0.0, "--out", tmp_path)
    assert code == 0 and report["metrics"]["iterations"] <= 2


def test_vi_max_iter_exhausted_is_partial(tmp_path, capsys):
    code, report = run(capsys, "vi", MDP, "--max-iter", 3, "--out", tmp_path)
    assert code == 1 and report["status"] == "partial"


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"states": [\n  "a",,\n]}')
    assert main(["vi", str(bad), "--out", str(tmp_path / "o")]) == 1
    err = capsys.readouterr().err
    assert f"{bad}:2:7" in err


def test_sample_then_ges(tmp_path, capsys):
    chain = DATA / "chain.json"
    csv_path = tmp_path / "chain.csv"
    code, _ = run(capsys, "sample", chain, "-n", 10_000, "--seed", 1, "--out", csv_path)
    assert code == 0
    code, report = run(capsys, "ges", csv_path, "--truth", chain, "--out", tmp_path / "g1")
    assert code == 0 and report["metrics"]["markov_equivalent"] == 1.0
    run(capsys, "ges", csv_path, "--truth", chain, "--out", tmp_path / "g2")
    for name in ("model.json", "cpdag.json", "trace.csv"):
        assert (tmp_path / "g1" / name).read_bytes() == (tmp_path / "g2" / name).read_bytes()
    again = tmp_path / "again.csv"
    run(capsys, "sample", chain, "-n", 10_000, "--seed", 1, "--out", again)
    assert again.read_bytes() == csv_path.read_bytes()


def test_ges_independent_data(tmp_path, capsys):
    model = {
        "variables": [{"name": v, "domain": [0, 1]} for v in "ABC"],
        "edges": [],
        "cpts": {v: {"parents": [], "table": [0.5, 0.5]} for v in "ABC"},
    }
    path = tmp_path / "indep.json"
    path.write_text(json.dumps(model))
    run(capsys, "sample", path, "-n", 10_000, "--seed", 2, "--out", tmp_path / "d.csv")
    code, report = run(capsys, "ges", tmp_path / "d.csv", "--out", tmp_path / "g")
    assert code == 0 and report["metrics"]["moves"] == 0 and report["metrics"]["edges"] == 0


def test_unit_workflow_is_byte_identity(tmp_path, capsys):
    run(capsys, "vi", MDP, "--out", tmp_path / "vi")
    spec = tmp_path / "unit.json"
    spec.write_text(json.dumps({"op": "unit_seq"}))
    code, _ = run(capsys, "workflow", spec, tmp_path / "vi" / "mind.json", "--out", tmp_path / "wf")
    assert code == 0
    assert (tmp_path / "wf" / "mind.json").read_bytes() == (tmp_path / "vi" / "mind.json").read_bytes()


def test_workflow_matches_vi(tmp_path, capsys):
    run(capsys, "vi", MDP, "--out", tmp_path / "vi")
    code, _ = run(capsys, "workflow", tmp_path / "vi" / "workflow.json", tmp_path / "vi" / "mind.json",
                  "--out", tmp_path / "wf")
    assert code == 0
    assert (tmp_path / "wf" / "values_V.json").read_bytes() == (tmp_path / "vi" / "values.json").read_bytes()
    spec = tmp_path / "module.json"
    spec.write_text(json.dumps({"module": "value_iteration"}))
    code, report = run(capsys, "workflow", spec, tmp_path / "vi" / "mind.json", "--out", tmp_path / "mod")
    assert code == 0 and report["metrics"]["success"] == 1.0
    assert (tmp_path / "mod" / "values_V.json").read_bytes() == (tmp_path / "vi" / "values.json").read_bytes()


def test_workflow_overlapping_par(tmp_path, capsys):
    rng = np.random.default_rng(0)
    mind = tmp_path / "mind.json"
    mind.write_text(mind_dumps(MindState().with_schema(random_value_schema(rng, "a"))))
    bump = wf_prim("update", ("a",), {"rule": "affine", "b": 1.0})
    spec = tmp_path / "par.json"
    spec.write_text(dumps(workflow_to_json(wf_par(bump, bump))))
    assert main(["workflow", str(spec), str(mind), "--out", str(tmp_path / "o")]) == 1
    assert "OverlappingParTargets" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "schemacalc", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.startswith("schemacalc ")


def test_mind_json_is_canonical(tmp_path, capsys):
    run(capsys, "vi", MDP, "--out", tmp_path)
    text = (tmp_path / "mind.json").read_text()
    assert text == dumps(json.loads(text))
