"""Command-line front end.

Exit codes: 0 all checks pass, 1 a verification or tolerance failure,
2 a usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import verify
from .locc import DEFAULT_TOLERANCE, run_protocol
from .qcore import NotPhysicalError
from .redistribute import ControlUnitary, NotUnitaryError
from .states import InputAmplitudes

OUTPUT_DIR_ENV = "REMOTECTL_OUTPUT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(Exception):
    pass


def format_number(x: float) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize {x!r}")
    return format(float(x), ".17g")


def dump_json(obj, indent: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dump_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        items = [inner + dump_json(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    return format_number(obj)


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _csv_cell(v):
    if v is None:
        return ""
    return v if isinstance(v, str) else format_number(v)


def dump_csv_record(obj: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in _flatten(obj):
        w.writerow([k, _csv_cell(v)])
    return buf.getvalue()


def dump_csv_rows(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    flat = [dict(_flatten(r)) for r in rows]
    header = list(flat[0])
    w.writerow(header)
    for r in flat:
        w.writerow([_csv_cell(r[h]) for h in header])
    return buf.getvalue()


def report_document(report) -> dict:
    """Fixed-schema report: input, unitary, outcomes, fidelities, distances, pass."""
    d = report.to_dict()
    return {
        "input": {"alpha": d["alpha"], "beta": d["beta"]},
        "unitary": d["unitary"],
        "outcomes": {
            "triple": d["triple"],
            "triple_probability": d["triple_probability"],
            "distribution": d["distribution_outcome"],
            "distribution_probability": d["distribution_probability"],
        },
        "fidelities": {
            "D": d["fidelity_d"],
            "Bprime": d["fidelity_bprime"],
            "Cprime": d["fidelity_cprime"],
        },
        "distances": {"theorem": d["trace_distance_theorem"]},
        "tolerance": d["tolerance"],
        "pass": d["passed"],
    }


_PHASE = re.compile(r"^phase[(:]\s*([^)]+?)\s*\)?$")


def parse_unitary(text: str) -> ControlUnitary:
    """Gate name, ``phase(theta)``, or a JSON 2x2 matrix of ``[re, im]`` pairs."""
    text = text.strip()
    try:
        if text.startswith("["):
            rows = json.loads(text)
            return ControlUnitary(np.array([[complex(re, im) for re, im in row] for row in rows]))
        m = _PHASE.match(text)
        if m:
            return ControlUnitary.named("phase", float(m.group(1)))
        return ControlUnitary.named(text)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad --unitary {text!r}: {exc}") from None


def _write(text: str, output: str | None, default_name: str) -> None:
    if output is None:
        env_dir = os.environ.get(OUTPUT_DIR_ENV)
        if not env_dir:
            sys.stdout.write(text)
            return
        output = os.path.join(env_dir, default_name)
    try:
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {output}: {exc}") from None


def cmd_run(args) -> int:
    try:
        amps = InputAmplitudes(args.alpha, args.beta)
    except NotPhysicalError as exc:
        raise ConfigError(f"normalization error: {exc}") from None
    u = parse_unitary(args.unitary)
    report, transcript = run_protocol(amps, u, args.seed, tolerance=args.tolerance)
    doc = report_document(report)
    text = dump_json(doc) + "\n" if args.format == "json" else dump_csv_record(doc)
    _write(text, args.output, f"report.{args.format}")
    if args.transcript:
        _write(transcript.dumps(), args.transcript, "transcript.jsonl")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.trials < 1:
        raise ConfigError("--trials must be at least 1")
    results = verify.run_suite(args.tolerance, args.trials, args.seed)
    failures = [r.name for r in results if not r.passed]
    doc = {
        "tolerance": args.tolerance,
        "trials": args.trials,
        "seed": args.seed,
        "checks": [{"name": r.name, "pass": r.passed, "detail": r.detail} for r in results],
        "failures": failures,
        "pass": not failures,
    }
    if args.format == "json":
        _write(dump_json(doc) + "\n", args.output, "verify.json")
    else:
        _write(dump_csv_rows(doc["checks"]), args.output, "verify.csv")
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}", file=sys.stderr)
    if failures:
        print("failing checks: " + ", ".join(failures), file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_tables(args) -> int:
    try:
        amps = InputAmplitudes(args.alpha, args.beta)
    except NotPhysicalError as exc:
        raise ConfigError(f"normalization error: {exc}") from None
    u = parse_unitary(args.unitary)
    tables = {
        "class_table": verify.class_table(),
        "correction_table": verify.correction_table(),
        "fidelity_summary": verify.fidelity_summary(amps, u),
    }
    out_dir = args.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
    for name, rows in tables.items():
        if args.format == "json":
            text = dump_json(rows) + "\n"
        else:
            text = dump_csv_rows(rows)
        _write(text, os.path.join(out_dir, f"{name}.{args.format}"), name)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="remotectl", description="Two-object remote quantum control simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one protocol instance")
    run.add_argument("--alpha", type=float, required=True)
    run.add_argument("--beta", type=float, required=True)
    run.add_argument("--unitary", default="identity",
                     help="identity | x | z | hadamard | phase(THETA) | JSON [[re,im],...] matrix")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--output", help="report path (default: stdout or $%s)" % OUTPUT_DIR_ENV)
    run.add_argument("--transcript", help="also write the transcript to this path")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run the verification suite")
    ver.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--format", choices=("json", "csv"), default="json")
    ver.add_argument("--output")
    ver.set_defaults(func=cmd_verify)

    tab = sub.add_parser("tables", help="write class, correction and fidelity tables")
    tab.add_argument("--format", choices=("json", "csv"), default="json")
    tab.add_argument("--output-dir")
    tab.add_argument("--alpha", type=float, default=0.6)
    tab.add_argument("--beta", type=float, default=0.8)
    tab.add_argument("--unitary", default="hadamard")
    tab.set_defaults(func=cmd_tables)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, NotUnitaryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
