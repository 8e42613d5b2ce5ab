"""Command-line driver and JSON reporting.

Commands: ``check`` (conditions only), ``closure`` (conditions plus Lie
closure), ``verify-lemmas``, ``synthesize`` and ``report`` (everything).
The report is a single JSON document with fixed key order, written to
stdout or ``--out``.

Exit codes: 0 analysis completed (verdicts are data, not errors),
2 configuration error, 3 engine contract violation, 4 synthesis ended
below its target fidelity.

Engine imports happen inside :func:`run` so that ``ACCESSOR_CTRL_THREADS``
can cap the linear-algebra thread pools before numpy loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

_THREAD_ENV_VARS = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONTRACT = 3
EXIT_UNCONVERGED = 4

COMMANDS = ("check", "closure", "verify-lemmas", "synthesize", "report")


def _apply_thread_cap():
    cap = os.environ.get("ACCESSOR_CTRL_THREADS")
    if cap:
        for var in _THREAD_ENV_VARS:
            os.environ.setdefault(var, cap)


def _empty_report(model_dict: dict) -> dict:
    return {
        "model": model_dict,
        "conditions": None,
        "closure": None,
        "lemmas": None,
        "pulses": None,
        "warnings": [],
    }


def _closure_section(closure, wall_time: float | None) -> dict:
    return {
        "dimension": closure.dimension,
        "expected_dimension": closure.expected_dim,
        "controllable": closure.controllable,
        "iterations": closure.iterations,
        "residual_floor": closure.residual_floor,
        "mode": closure.mode,
        "wall_time_s": wall_time,
    }


def run(
    command: str,
    config_path: str,
    tol: float = 1e-9,
    seed: int = 0,
    exact: bool = False,
    no_timing: bool = False,
) -> tuple[dict, int]:
    """Execute one command against a configuration file.

    Returns (report, exit code).  Parse failures return a minimal report
    carrying only the error message.
    """
    from .conditions import check_conditions
    from .config import parse_config_document
    from .controllability import full_controllability
    from .errors import ConfigError
    from .lemmas import verify_lemma_suite
    from .pulses import TransferTask, synthesize

    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}")

    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            document = parse_config_document(fh.read())
    except OSError as exc:
        return {"error": f"cannot read config: {exc}"}, EXIT_CONFIG
    except ConfigError as exc:
        return {"error": str(exc)}, EXIT_CONFIG

    model = document.model
    report = _empty_report(model.as_dict())
    exit_code = EXIT_OK

    if command in ("check", "closure", "report"):
        conditions = check_conditions(model, exact=exact)
        report["conditions"] = conditions.as_dict()

    if command in ("closure", "report"):
        start = time.perf_counter()
        verdict = full_controllability(model, tol=tol, exact=exact)
        elapsed = None if no_timing else time.perf_counter() - start
        report["closure"] = _closure_section(verdict.closure, elapsed)
        report["warnings"].extend(verdict.warnings)

    if command in ("verify-lemmas", "report"):
        checks = verify_lemma_suite(model)
        report["lemmas"] = [c.as_dict() for c in checks]

    if command in ("synthesize", "report"):
        if document.task is None:
            return {"error": "config has no task block"}, EXIT_CONFIG
        task = TransferTask(
            initial_system=list(document.task.initial_system),
            target_system=list(document.task.target_system),
            horizon=float(document.task.horizon),
        )
        start = time.perf_counter()
        import warnings as _warnings

        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            program = synthesize(
                model, task, document.task.segments, seed=seed, tol=tol
            )
        elapsed = None if no_timing else time.perf_counter() - start
        section = program.as_dict()
        section["wall_time_s"] = elapsed
        report["pulses"] = section
        report["warnings"].extend(str(w.message) for w in caught)
        if not program.converged:
            exit_code = EXIT_UNCONVERGED

    return report, exit_code


def render_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def main(argv=None) -> int:
    _apply_thread_cap()
    parser = argparse.ArgumentParser(
        prog="accessor-ctrl",
        description="Indirect-controllability analysis of a qudit steered "
        "through an XY qubit chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="configuration file")
        cmd.add_argument("--tol", type=float, default=1e-9,
                         help="closure rank tolerance (floating mode)")
        cmd.add_argument("--seed", type=int, default=0,
                         help="synthesis random seed")
        cmd.add_argument("--exact", action="store_true",
                         help="exact rational analysis")
        cmd.add_argument("--no-timing", action="store_true",
                         help="omit wall-time fields (reproducible output)")
        cmd.add_argument("--out", default=None, help="write the report here")
    args = parser.parse_args(argv)

    from .errors import ContractViolationError, DimensionError

    try:
        report, exit_code = run(
            args.command,
            args.config,
            tol=args.tol,
            seed=args.seed,
            exact=args.exact,
            no_timing=args.no_timing,
        )
    except (ContractViolationError, DimensionError, ValueError) as exc:
        report, exit_code = {"error": str(exc)}, EXIT_CONTRACT

    text = render_report(report)
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return exit_code


def entrypoint():
    raise SystemExit(main())
