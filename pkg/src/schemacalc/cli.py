"""Command-line driver: ``schemacalc {laws,vi,ges,sample,workflow}``.

Every command prints a JSON run report and exits 0 when all of its checks
pass, 1 on a domain failure, and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .causal import (
    Dataset,
    causal_from_json,
    causal_to_json,
    cpdag,
    ges_run,
    markov_equivalent,
    sample_data,
    score_bic,
)
from .errors import SchemaCalcError
from .impl import is_deterministic_type
from .laws import run_laws
from .modules import run_module
from .serialize import dumps, mind_dumps, mind_from_json
from .value_iteration import (
    DEFAULT_MAX_ITER,
    TabularMdp,
    greedy_policy,
    lifting_check,
    mdp_from_json,
    run_vi,
    run_vi_direct,
    vi_mind,
    vi_workflow,
)
from .workflow import ExecTrace, execute, workflow_from_json, workflow_to_json

log = logging.getLogger("schemacalc")

LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


class InputError(Exception):
    """Unreadable or malformed input file."""


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _write(path: Path, text: str) -> str:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return str(path)


def _csv_text(header, rows) -> str:
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _report(command: str, ok: bool, metrics: dict, artifacts: list, seed: int,
            status: str = None) -> dict:
    return {
        "command": command,
        "status": status or ("pass" if ok else "fail"),
        "metrics": metrics,
        "artifacts": artifacts,
        "seed": seed,
        "version": __version__,
    }


def value_table_doc(points, values) -> dict:
    return {"states": list(points), "values": [float(v) for v in values]}


# ---------------------------------------------------------------------------
# commands


def cmd_laws(args) -> dict:
    reports = run_laws(args.cases, args.seed)
    metrics = {}
    for r in reports:
        metrics[f"{r.suite}.{r.law}.passed"] = r.passed
        metrics[f"{r.suite}.{r.law}.failed"] = r.failed
    failed = sum(r.failed for r in reports)
    metrics["laws"] = len(reports)
    metrics["failed_cases"] = failed
    for r in reports:
        if not r.ok:
            log.error("law %s.%s failed %d cases; first: %s", r.suite, r.law, r.failed, r.example)
    out = Path(args.out)
    report = _report("laws", failed == 0, metrics, [], args.seed)
    report["artifacts"].append(str(out / "report.json"))
    _write(out / "report.json", dumps(report))
    return report


def cmd_vi(args) -> dict:
    doc = _load_json(args.mdp)
    if args.gamma is not None:
        doc["gamma"] = args.gamma
    if args.delta is not None:
        doc["delta"] = args.delta
    mdp: TabularMdp = mdp_from_json(doc)
    res = run_vi(mdp, max_iter=args.max_iter, seed=args.seed)
    direct = run_vi_direct(mdp, max_iter=args.max_iter)
    agree = res.values == direct.values and res.trace == direct.trace
    lifted = lifting_check(res.values, mdp) and lifting_check(np.zeros(mdp.n_states), mdp)
    out = Path(args.out)
    policy = greedy_policy(res.values, mdp)
    artifacts = [
        _write(out / "values.json", dumps(value_table_doc(mdp.states.points, res.values.values))),
        _write(out / "policy.json", dumps({"policy": [[s, a] for s, a in policy.items()]})),
        _write(out / "trace.csv", _csv_text(("iteration", "sup_norm_delta"),
                                            [(i + 1, repr(d)) for i, d in enumerate(res.trace)])),
        _write(out / "mind.json", mind_dumps(vi_mind(mdp, max_iter=args.max_iter))),
        _write(out / "workflow.json", dumps(workflow_to_json(vi_workflow(mdp, args.max_iter)))),
    ]
    metrics = {
        "iterations": res.iterations,
        "final_sup_norm_delta": res.final_delta,
        "converged": float(res.converged),
        "lifting_check": float(lifted),
        "direct_path_agrees": float(agree),
        "gamma": mdp.gamma,
        "delta": mdp.delta,
    }
    ok = res.converged and lifted and agree
    status = "pass" if ok else ("partial" if lifted and agree else "fail")
    report = _report("vi", ok, metrics, artifacts, args.seed, status)
    artifacts.append(_write(out / "report.json", dumps(report)))
    return report


def _load_dataset(path: str, domains=None) -> Dataset:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    return Dataset.from_csv(text, domains)


def cmd_ges(args) -> dict:
    truth = causal_from_json(_load_json(args.truth)) if args.truth else None
    domains = None
    if truth is not None:
        domains = {v: truth.space(v).points for v in truth.names}
    data = _load_dataset(args.data, domains)
    model, moves = ges_run(data, args.epsilon, args.alpha, args.seed)
    out = Path(args.out)
    artifacts = [
        _write(out / "model.json", dumps(causal_to_json(model))),
        _write(out / "cpdag.json", dumps(cpdag(model.dag).to_json())),
        _write(out / "trace.csv", _csv_text(
            ("step", "move", "edge", "delta_score"),
            [(m.step, m.kind, f"{m.source}->{m.target}", repr(m.delta)) for m in moves])),
    ]
    metrics = {
        "score": score_bic(model.dag, data),
        "moves": len(moves),
        "adds": sum(m.kind == "add" for m in moves),
        "deletes": sum(m.kind == "delete" for m in moves),
        "reversals": sum(m.kind == "reverse" for m in moves),
        "edges": len(model.dag.edges),
        "rows": data.n,
    }
    ok = True
    if truth is not None:
        if set(truth.names) != set(model.names):
            raise SchemaCalcError("the truth model and the data have different variables")
        eq = markov_equivalent(model.dag, truth.dag)
        metrics["markov_equivalent"] = float(eq)
        ok = eq
    report = _report("ges", ok, metrics, artifacts, args.seed)
    artifacts.append(_write(out / "report.json", dumps(report)))
    return report


def cmd_sample(args) -> dict:
    model = causal_from_json(_load_json(args.model))
    data = sample_data(model, args.n, args.seed)
    path = _write(Path(args.out), data.to_csv())
    return _report("sample", True, {"rows": data.n, "variables": len(data.variables)}, [path], args.seed)


def cmd_workflow(args) -> dict:
    spec = _load_json(args.spec)
    M = mind_from_json(_load_json(args.mind))
    trace = ExecTrace()
    metrics = {}
    if "module" in spec:
        out_state, success = run_module(M, spec["module"], int(spec.get("index", 0)), args.seed, trace)
        metrics["success"] = float(success)
    else:
        out_state = execute(workflow_from_json(spec), M, args.seed, trace)
        success = True
    out = Path(args.out)
    artifacts = [
        _write(out / "mind.json", mind_dumps(out_state)),
        _write(out / "log.txt", "".join(line + "\n" for line in trace.log)),
    ]
    for sid, s in sorted(out_state.schemas.items()):
        if is_deterministic_type(s.type) and len(s.type.dom) == 1:
            doc = value_table_doc(s.type.dom[0].points, s.params.values.ravel())
            artifacts.append(_write(out / f"values_{sid}.json", dumps(doc)))
    metrics["log_lines"] = len(trace.log)
    metrics["max_iter_exceeded"] = float("MaxIterExceeded" in trace.flags)
    ok = success and "MaxIterExceeded" not in trace.flags
    status = "pass" if ok else ("partial" if success else "fail")
    report = _report("workflow", ok, metrics, artifacts, args.seed, status)
    artifacts.append(_write(out / "report.json", dumps(report)))
    return report


# ---------------------------------------------------------------------------
# argument parsing


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schemacalc", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"schemacalc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("laws", help="run the randomized law suites")
    q.add_argument("--cases", type=_positive_int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="schemacalc-out/laws")
    q.set_defaults(func=cmd_laws)

    q = sub.add_parser("vi", help="value iteration on an MDP JSON file")
    q.add_argument("mdp")
    q.add_argument("--gamma", type=float)
    q.add_argument("--delta", type=float)
    q.add_argument("--max-iter", type=_positive_int, default=DEFAULT_MAX_ITER)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="schemacalc-out/vi")
    q.set_defaults(func=cmd_vi)

    q = sub.add_parser("ges", help="greedy structure search on a CSV dataset")
    q.add_argument("data")
    q.add_argument("--epsilon", type=float, default=1e-6)
    q.add_argument("--alpha", type=float, default=1.0)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--truth", help="causal model JSON to compare against")
    q.add_argument("--out", default="schemacalc-out/ges")
    q.set_defaults(func=cmd_ges)

    q = sub.add_parser("sample", help="draw a dataset from a causal model JSON file")
    q.add_argument("model")
    q.add_argument("-n", type=_positive_int, default=1000)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="schemacalc-out/sample.csv")
    q.set_defaults(func=cmd_sample)

    q = sub.add_parser("workflow", help="execute a workflow JSON on a mind-state JSON")
    q.add_argument("spec")
    q.add_argument("mind")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default="schemacalc-out/workflow")
    q.set_defaults(func=cmd_workflow)
    return p


def main(argv=None) -> int:
    level = os.environ.get("SCHEMA_CALC_LOG", "error").lower()
    logging.basicConfig(level=LOG_LEVELS.get(level, logging.ERROR), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except (InputError, SchemaCalcError, ValueError, KeyError, TypeError) as exc:
        name = type(exc).__name__
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"schemacalc {args.command}: {name}: {msg}", file=sys.stderr)
        return 1
    print(json.dumps(report, sort_keys=True))
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
