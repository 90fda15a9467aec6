"""Command-line interface.

Subcommands evaluate brackets and fields, check the structural identities,
decompose operators, integrate the example flows, and run the batch
verification suite.  Reports are JSON ({command, inputs, results, verdicts,
seed, elapsed_ms}); with a fixed --seed the output is byte-stable apart from
the elapsed_ms field.  Exit codes: 0 success, 1 verification failure, 2
parse or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from .rational import Chart
from .graded import GradedElement
from .parser import ParseError, parse, parse_operator, parse_scalar
from .nambu import (
    NambuStructure,
    algebroid_axioms_check,
    calogero_structure,
    hamiltonian_vf,
    kepler_structure,
    nambu_bracket,
    verify_fundamental_identity,
)
from .operators import TestStrategy, decompose_tensorial, extract_top_multivector
from .dynamics import conservation_report, example_run, newton_equivalence_check
from .acceptance import run_all


class UsageError(Exception):
    """Bad command inputs: reported on stderr with exit code 2."""


SYSTEMS = {"kepler": kepler_structure, "calogero": calogero_structure}

# criteria touching each example system; the generic-chart criteria (5, 9)
# only run under --system all
SYSTEM_CRITERIA = {
    "kepler": [1, 3, 4, 6, 7, 8, 10, 12],
    "calogero": [2, 3, 4, 6, 7, 8, 10, 11],
    "all": list(range(1, 13)),
}

DRIFT_TOLERANCE = {"kepler": 1e-9, "calogero": 1e-6}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="nambucalc",
        description="exact multivector brackets, identity checks, and numeric flows",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, mv: bool = True) -> None:
        p.add_argument("--system", choices=sorted(SYSTEMS), help="built-in example system")
        p.add_argument("--chart", help="comma-separated coordinate names")
        p.add_argument("--params", help="comma-separated parameter names")
        if mv:
            p.add_argument("--mv", help="multivector expression defining the structure")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--json", action="store_true", help="print the JSON report")

    p = sub.add_parser("bracket", help="evaluate the n-ary function bracket")
    common(p)
    p.add_argument("--fns", nargs="+", required=True, help="n functions (names or expressions)")

    p = sub.add_parser("ham-vf", help="Hamiltonian vector field of n-1 functions")
    common(p)
    p.add_argument("--fns", nargs="+", required=True, help="n-1 functions")

    p = sub.add_parser("fi-check", help="verify the fundamental identity")
    common(p)
    p.add_argument("--samples", type=int, default=40, help="random tuples to draw")

    p = sub.add_parser("algebroid-check", help="verify the bracket/anchor axioms")
    common(p)

    p = sub.add_parser("op-eval", help="apply an operator expression to a form")
    common(p, mv=False)
    p.add_argument("--op", required=True, help="operator expression (d, i(..), L(..), mu(..), [.,.])")
    p.add_argument("--form", default="1", help="form expression to apply it to")

    p = sub.add_parser("decompose", help="read the top symbol / tensorial parts of an operator")
    common(p, mv=False)
    p.add_argument("--op", required=True, help="operator expression")
    p.add_argument("--arity", type=int, required=True, help="bracket arity n (operator degree -(n-1))")

    p = sub.add_parser("integrate", help="integrate an example flow with RK4")
    p.add_argument("--system", choices=sorted(SYSTEMS), required=True)
    p.add_argument("--dt", type=float, help="time step (default from the system)")
    p.add_argument("--t-end", type=float, help="horizon (default from the system)")
    p.add_argument("--init", help="comma-separated initial state")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out-dir", help="write trajectory CSV and PNG plots here")

    p = sub.add_parser("verify", help="run the batch verification suite")
    p.add_argument("--system", choices=["kepler", "calogero", "all"], default="all")
    p.add_argument("--criteria", nargs="+", type=int, help="explicit criterion numbers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    return top


# -- shared input handling ----------------------------------------------------------


def _resolve_structure(args) -> tuple[NambuStructure, dict]:
    if args.system:
        return SYSTEMS[args.system]()
    if not args.chart or not getattr(args, "mv", None):
        raise UsageError("need --system, or --chart together with --mv")
    chart = _resolve_chart(args)
    mv = parse(args.mv, chart)
    if not isinstance(mv, GradedElement):
        raise UsageError("--mv must be a multivector expression, not a scalar")
    try:
        structure = NambuStructure(chart, mv.degree(), mv)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return structure, {}


def _resolve_chart(args) -> Chart:
    if not args.chart:
        raise UsageError("need --system or --chart")
    coords = tuple(n.strip() for n in args.chart.split(",") if n.strip())
    params = ()
    if args.params:
        params = tuple(n.strip() for n in args.params.split(",") if n.strip())
    try:
        return Chart(coords, params)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _resolve_fns(tokens, structure: NambuStructure, named: dict) -> list:
    out = []
    for tok in tokens:
        if tok in named:
            out.append(named[tok])
        else:
            out.append(parse_scalar(tok, structure.chart))
    return out


def _echo_inputs(args, keys) -> dict:
    echo = {}
    for key in keys:
        value = getattr(args, key.replace("-", "_"), None)
        if value is not None:
            echo[key] = value
    return echo


# -- command handlers ---------------------------------------------------------------


def _cmd_bracket(args) -> tuple[dict, int]:
    structure, named = _resolve_structure(args)
    fns = _resolve_fns(args.fns, structure, named)
    value = nambu_bracket(structure, fns)
    results = [{"value": str(value)}]
    return {"results": results, "verdicts": []}, 0


def _cmd_ham_vf(args) -> tuple[dict, int]:
    structure, named = _resolve_structure(args)
    fns = _resolve_fns(args.fns, structure, named)
    field = hamiltonian_vf(structure, fns)
    return {"results": [{"value": str(field)}], "verdicts": []}, 0


def _cmd_fi_check(args) -> tuple[dict, int]:
    structure, _ = _resolve_structure(args)
    try:
        ok = verify_fundamental_identity(structure, seed=args.seed, samples=args.samples)
    except Exception as exc:  # noqa: BLE001
        verdict = {
            "name": "fundamental-identity",
            "verdict": "error",
            "witness": f"{type(exc).__name__}: {exc}",
        }
        return {"results": [], "verdicts": [verdict]}, 1
    verdict = {"name": "fundamental-identity", "verdict": "passed" if ok else "failed"}
    results = [{"status": structure.fi_status}]
    if ok:
        results.append({"strategy": structure.fi_strategy})
    else:
        outer, inner, residual = structure.fi_witness
        verdict["witness"] = {
            "outer": [str(f) for f in outer],
            "inner": [str(g) for g in inner],
            "residual": str(residual),
        }
    return {"results": results, "verdicts": [verdict]}, 0 if ok else 1


def _cmd_algebroid_check(args) -> tuple[dict, int]:
    structure, _ = _resolve_structure(args)
    try:
        report = algebroid_axioms_check(structure, seed=args.seed)
    except Exception as exc:  # noqa: BLE001
        verdict = {
            "name": "algebroid-axioms",
            "verdict": "error",
            "witness": f"{type(exc).__name__}: {exc}",
        }
        return {"results": [], "verdicts": [verdict]}, 1
    verdicts = [
        {
            "name": "fundamental-identity",
            "verdict": "passed" if report.fi_status == "passed" else "failed",
        }
    ]
    if report.fi_witness is not None:
        outer, inner, residual = report.fi_witness
        verdicts[0]["witness"] = {
            "outer": [str(f) for f in outer],
            "inner": [str(g) for g in inner],
            "residual": str(residual),
        }
    for label, axiom in (("anchor-compatibility", report.axiom1), ("leibniz-rule", report.axiom2)):
        bad = [(lbl, str(res)) for lbl, res in axiom if not res.is_zero]
        verdict = {"name": label, "verdict": "failed" if bad else "passed"}
        if bad:
            verdict["witness"] = [{"sections": lbl, "residual": res} for lbl, res in bad]
        verdicts.append(verdict)
    results = [{"sections": report.sections}]
    code = 0 if report.passed else 1
    return {"results": results, "verdicts": verdicts}, code


def _cmd_op_eval(args) -> tuple[dict, int]:
    chart = _resolve_system_chart(args) if args.system else _resolve_chart(args)
    op = parse_operator(args.op, chart)
    omega = parse(args.form, chart)
    try:
        value = op.apply(omega)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc
    results = [{"operator": str(op), "degree": op.degree, "value": str(value)}]
    return {"results": results, "verdicts": []}, 0


def _resolve_system_chart(args) -> Chart:
    structure, _ = SYSTEMS[args.system]()
    return structure.chart


def _cmd_decompose(args) -> tuple[dict, int]:
    chart = _resolve_system_chart(args) if args.system else _resolve_chart(args)
    op = parse_operator(args.op, chart)
    n = args.arity
    if op.degree != -(n - 1):
        raise UsageError(
            f"operator degree {op.degree} does not match arity {n} (need degree {-(n - 1)})"
        )
    strategy = TestStrategy(seed=args.seed)
    results = []
    verdicts = []
    try:
        top = extract_top_multivector(op, n, strategy)
        results.append({"top_multivector": str(top)})
        verdicts.append({"name": "top-symbol-multivector", "verdict": "passed"})
    except ValueError as exc:
        verdicts.append(
            {"name": "top-symbol-multivector", "verdict": "failed", "witness": str(exc)}
        )
    try:
        mv, tensor = decompose_tensorial(op, n, strategy)
        results.append(
            {"multivector_part": str(mv), "covector_valued_part": str(tensor)}
        )
        verdicts.append({"name": "tensorial-split", "verdict": "passed"})
    except ValueError as exc:
        verdicts.append(
            {"name": "tensorial-split", "verdict": "failed", "witness": str(exc)}
        )
    # the two readings cover disjoint operator classes; failing both means the
    # operator fits neither description
    code = 0 if any(v["verdict"] == "passed" for v in verdicts) else 1
    return {"results": results, "verdicts": verdicts}, code


def _cmd_integrate(args) -> tuple[dict, int]:
    cfg = example_run(args.system)
    initial = None
    if args.init:
        try:
            initial = tuple(float(v) for v in args.init.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --init value: {exc}") from exc
        if len(initial) != cfg.structure.chart.dim:
            raise UsageError(
                f"--init needs {cfg.structure.chart.dim} components, got {len(initial)}"
            )
    if args.dt is not None and args.dt <= 0:
        raise UsageError("--dt must be positive")
    try:
        traj = cfg.integrate(dt=args.dt, t_end=args.t_end, initial=initial)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = conservation_report(traj, cfg.integrals, cfg.params)
    tolerance = DRIFT_TOLERANCE[args.system]
    results = [
        {
            "steps": len(traj.times) - 1,
            "dt": traj.step,
            "truncated": traj.truncated,
            "final_time": float(traj.times[-1]),
            "final_state": [float(v) for v in traj.states[-1]],
        },
        {
            "drift": {
                name: float(entry["max_drift"])
                for name, entry in report["integrals"].items()
            }
        },
    ]
    verdicts = []
    for name, entry in report["integrals"].items():
        drift = float(entry["max_drift"])
        verdict = {
            "name": f"conserve-{name}",
            "verdict": "passed" if drift <= tolerance else "failed",
        }
        if drift > tolerance:
            verdict["witness"] = {"max_drift": drift, "tolerance": tolerance}
        verdicts.append(verdict)
    if args.system == "calogero":
        newton = newton_equivalence_check(traj)
        err = float(newton["max_rel_error"])
        results.append({"newton_max_rel_error": err})
        verdict = {"name": "newton-force-law", "verdict": "passed" if err <= 1e-4 else "failed"}
        if err > 1e-4:
            verdict["witness"] = {"max_rel_error": err, "tolerance": 1e-4}
        verdicts.append(verdict)
    if traj.truncated:
        verdicts.append(
            {
                "name": "full-horizon",
                "verdict": "failed",
                "witness": f"singular guard stopped the run at t={float(traj.times[-1])}",
            }
        )
    if args.out_dir:
        results.append(_write_artifacts(args.out_dir, args.system, cfg, traj, report))
    code = 0 if all(v["verdict"] == "passed" for v in verdicts) else 1
    return {"results": results, "verdicts": verdicts}, code


def _write_artifacts(out_dir: str, system: str, cfg, traj, report) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = cfg.structure.chart.coordinates
    csv_path = out / f"{system}_trajectory.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", *names])
        for t, row in zip(traj.times, traj.states):
            writer.writerow([repr(float(t)), *(repr(float(v)) for v in row)])
    png_path = out / f"{system}_trajectory.png"
    _render_figure(png_path, system, names, cfg, traj)
    return {"csv": str(csv_path), "png": str(png_path)}


def _render_figure(path: Path, system: str, names, cfg, traj) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    fig, (ax_state, ax_drift) = plt.subplots(2, 1, figsize=(7.0, 6.0), sharex=True)
    for k, name in enumerate(names):
        ax_state.plot(traj.times, traj.states[:, k], label=name, linewidth=1.0)
    ax_state.set_ylabel("state")
    ax_state.legend(loc="best", fontsize=8, ncol=2)
    ax_state.set_title(f"{system}: RK4 trajectory (dt={traj.step:g})")

    evaluators = {
        name: _integral_series(fn, cfg.params, traj)
        for name, fn in cfg.integrals.items()
    }
    for name, series in evaluators.items():
        drift = np.abs(series - series[0])
        ax_drift.plot(traj.times, drift, label=name, linewidth=1.0)
    ax_drift.set_yscale("symlog", linthresh=1e-16)
    ax_drift.set_xlabel("t")
    ax_drift.set_ylabel("|I(t) - I(0)|")
    ax_drift.legend(loc="best", fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _integral_series(fn, params, traj):
    import numpy as np

    from .dynamics import _float_rf

    bound = fn.substitute(params) if params else fn
    evaluate = _float_rf(bound, len(traj.states[0]))
    return np.array([evaluate(row) for row in traj.states])


def _cmd_verify(args) -> tuple[dict, int]:
    numbers = args.criteria or SYSTEM_CRITERIA[args.system]
    bad = [n for n in numbers if not 1 <= n <= 12]
    if bad:
        raise UsageError(f"unknown criteria: {bad} (valid range 1-12)")
    outcomes = run_all(seed=args.seed, numbers=numbers)
    verdicts = []
    for res in outcomes:
        verdict = {
            "criterion": res.number,
            "name": res.name,
            "verdict": "passed" if res.passed else "failed",
        }
        if not res.passed:
            verdict["witness"] = res.details
        verdicts.append(verdict)
    passed = sum(1 for r in outcomes if r.passed)
    results = [{"criteria_run": numbers, "passed": passed, "failed": len(outcomes) - passed}]
    return {"results": results, "verdicts": verdicts}, 0 if passed == len(outcomes) else 1


HANDLERS = {
    "bracket": (_cmd_bracket, ("system", "chart", "params", "mv", "fns")),
    "ham-vf": (_cmd_ham_vf, ("system", "chart", "params", "mv", "fns")),
    "fi-check": (_cmd_fi_check, ("system", "chart", "params", "mv", "samples")),
    "algebroid-check": (_cmd_algebroid_check, ("system", "chart", "params", "mv")),
    "op-eval": (_cmd_op_eval, ("system", "chart", "params", "op", "form")),
    "decompose": (_cmd_decompose, ("system", "chart", "params", "op", "arity")),
    "integrate": (_cmd_integrate, ("system", "dt", "t-end", "init", "out-dir")),
    "verify": (_cmd_verify, ("system", "criteria")),
}


def _print_human(report: dict) -> None:
    for entry in report["results"]:
        if set(entry) == {"value"}:
            print(entry["value"])
        else:
            for key, value in entry.items():
                print(f"{key}: {value}")
    for verdict in report["verdicts"]:
        label = verdict.get("name") or f"criterion {verdict.get('criterion')}"
        if "criterion" in verdict:
            label = f"criterion {verdict['criterion']} ({verdict['name']})"
        line = f"{label}: {verdict['verdict']}"
        if "witness" in verdict:
            line += f"  [{verdict['witness']}]"
        print(line)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    handler, echo_keys = HANDLERS[args.command]
    try:
        body, code = handler(args)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {
        "command": args.command,
        "inputs": _echo_inputs(args, echo_keys),
        "results": body["results"],
        "verdicts": body["verdicts"],
        "seed": getattr(args, "seed", 0),
        "elapsed_ms": round((time.perf_counter() - started) * 1000.0, 1),
    }
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2))
    else:
        _print_human(report)
    return code


if __name__ == "__main__":
    sys.exit(main())
