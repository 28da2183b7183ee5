"""Command-line front end.

Every invocation reads one system description document, runs one
command against it, and prints a report.  Exit status encodes the
verdict:  0 all conditions hold, 1 some condition is witnessed
nonzero, 2 undecided, 3 the input was unusable.

The JSON report format is byte-deterministic for fixed inputs, flags,
and seed; wall-clock timing appears only in the text format.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Dict, Optional, Tuple

from .criteria import (
    CoefficientDomainError,
    appendix_residuals,
    check_cubic2,
    check_linear2,
    check_quadratic2,
    lie_gauge_residuals,
    tresse_scalar,
)
from .document import (
    COEFFICIENT_KEYS,
    DocumentError,
    SystemDocument,
    load_document,
)
from .geometry import (
    GeometryError,
    geodesic2_flat_conditions,
    metric_pde_residuals,
    riemann,
)
from .kernel import ParseError, ZeroTestConfig, parse
from .projection import lift_scalar, lift_system, project
from .report import (
    FAIL,
    PASS,
    UNDECIDED,
    ConditionReport,
    evaluate_conditions,
)
from .transform import (
    TransformError,
    linearization_residuals,
    normal_form,
)

_EXIT_BY_OVERALL = {PASS: 0, FAIL: 1, UNDECIDED: 2}
_INPUT_ERROR = 3

_COMMANDS = (
    ("check", "run the linearizability test matching the document kind"),
    ("project", "rewrite a geodesic system as explicit equations"),
    ("lift", "reconstruct a connection from the equations and a gauge"),
    ("verify-transform", "substitute the document's map and test the result"),
    ("verify-metric", "test the document's metric against the lifted system"),
    ("riemann", "evaluate all curvature components of a connection"),
    ("normal-form", "reduce a general pair to cubic shape with a consistency report"),
    ("appendix", "evaluate the full integrability table on an explicit gauge"),
)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = ZeroTestConfig(
        points=args.zero_test_points,
        precision_bits=args.precision_bits,
        tolerance=args.tolerance,
        seed=args.seed,
    )
    started = time.perf_counter()
    try:
        doc = load_document(args.file)
        overrides = _parse_gauge_overrides(args.gauge)
        payload, code = _dispatch(args.command, doc, config, overrides)
    except (DocumentError, ParseError, TransformError, GeometryError,
            CoefficientDomainError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return _INPUT_ERROR
    payload["zero_test"] = {
        "points": config.points,
        "precision_bits": config.precision_bits,
        "tolerance": config.tolerance,
        "seed": config.seed,
    }
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        elapsed = time.perf_counter() - started
        print(_render_text(payload, elapsed))
    return code


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geolin",
        description="Exact linearizability checks for second-order ODE systems.",
    )
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("file", help="system description document")
    shared.add_argument("--zero-test-points", type=int, default=16, metavar="N",
                        help="sample points for the probabilistic zero test")
    shared.add_argument("--precision-bits", type=int, default=256, metavar="B",
                        help="working precision for numeric evaluation")
    shared.add_argument("--tolerance", type=float, default=1e-30, metavar="T",
                        help="relative smallness threshold at sample points")
    shared.add_argument("--seed", type=int, default=0, metavar="S",
                        help="seed for sample point generation")
    shared.add_argument("--format", choices=("text", "json"), default="text",
                        help="report format")
    shared.add_argument("--gauge", action="append", default=[],
                        metavar="KEY=EXPR",
                        help="override one gauge entry (repeatable)")
    commands = parser.add_subparsers(dest="command", required=True,
                                     metavar="command")
    for name, blurb in _COMMANDS:
        commands.add_parser(name, parents=[shared], help=blurb,
                            description=blurb)
    return parser


def _parse_gauge_overrides(pairs) -> Dict[str, object]:
    overrides = {}
    for item in pairs:
        key, sep, text = item.partition("=")
        if not sep or not key:
            raise DocumentError(f"--gauge expects KEY=EXPR, got {item!r}")
        overrides[key.strip()] = parse(text.strip())
    return overrides


def _dispatch(command: str, doc: SystemDocument, config: ZeroTestConfig,
              overrides) -> Tuple[dict, int]:
    if command == "check":
        return _cmd_check(doc, config, overrides)
    if command == "project":
        return _cmd_project(doc, overrides)
    if command == "lift":
        return _cmd_lift(doc, overrides)
    if command == "verify-transform":
        return _cmd_verify_transform(doc, config, overrides)
    if command == "verify-metric":
        return _cmd_verify_metric(doc, config, overrides)
    if command == "riemann":
        return _cmd_riemann(doc, config, overrides)
    if command == "normal-form":
        return _cmd_normal_form(doc, config, overrides)
    if command == "appendix":
        return _cmd_appendix(doc, config, overrides)
    raise DocumentError(f"unknown command {command!r}")


def _reject_gauge(doc: SystemDocument, overrides, command: str) -> None:
    if overrides:
        raise DocumentError(f"{command} does not use a gauge")


def _base_payload(doc: SystemDocument, command: str) -> dict:
    return {"document": doc.name, "kind": doc.kind, "command": command}


def _condition_entries(report: ConditionReport):
    entries = []
    for record in report.records:
        entry = {
            "id": record.condition_id,
            "residual": str(record.residual),
            "verdict": record.result.verdict.value,
        }
        if record.result.witness is not None:
            entry["witness"] = dict(record.result.witness)
        if record.result.witness_value is not None:
            entry["witness_value"] = record.result.witness_value
        entries.append(entry)
    return entries


def _report_payload(doc: SystemDocument, command: str,
                    report: ConditionReport,
                    coefficients: Optional[dict] = None) -> Tuple[dict, int]:
    payload = _base_payload(doc, command)
    if coefficients is not None:
        payload["coefficients"] = coefficients
    payload["conditions"] = _condition_entries(report)
    if report.facts:
        payload["facts"] = {key: value for key, value in report.facts}
    payload["overall"] = report.overall
    return payload, _EXIT_BY_OVERALL[report.overall]


def _coefficient_table(kind: str, values: Dict[str, object]) -> dict:
    return {key: str(values[key]) for key in COEFFICIENT_KEYS[kind]}


def _cmd_check(doc, config, overrides):
    _reject_gauge(doc, overrides, "check")
    system = doc.system()
    if doc.kind == "scalar-cubic":
        report = tresse_scalar(system, config)
    elif doc.kind == "cubic-2":
        report = check_cubic2(system, config)
    elif doc.kind == "quadratic-2":
        report = check_quadratic2(system, config)
    elif doc.kind == "linear-2":
        report = check_linear2(system, config)
    elif doc.kind == "geodesic-2":
        report = geodesic2_flat_conditions(system, config)
    elif doc.kind == "geodesic-3":
        labelled = [(f"Eq6.{label}", component)
                    for label, component in riemann(system).labelled()]
        report = evaluate_conditions("geodesic-3 flatness", labelled, config)
    else:
        raise DocumentError(
            "a general-2 pair has no direct invariant test; reduce it "
            "with the normal-form command first")
    return _report_payload(doc, "check", report)


def _cmd_project(doc, overrides):
    _reject_gauge(doc, overrides, "project")
    if doc.kind == "geodesic-2":
        cubic = project(doc.system().as_christoffel())
        table = {name: str(getattr(cubic, name))
                 for name in COEFFICIENT_KEYS["scalar-cubic"]}
        result_kind = "scalar-cubic"
    elif doc.kind == "geodesic-3":
        pair = project(doc.system())
        table = {name: str(getattr(pair, name))
                 for name in COEFFICIENT_KEYS["cubic-2"]}
        result_kind = "cubic-2"
    else:
        raise DocumentError("project applies to geodesic-2 or geodesic-3 documents")
    payload = _base_payload(doc, "project")
    payload["result_kind"] = result_kind
    payload["coefficients"] = table
    return payload, 0


def _cmd_lift(doc, overrides):
    if doc.kind == "scalar-cubic":
        coef = lift_scalar(doc.system(), doc.gauge(overrides))
        table = {name: str(getattr(coef, name))
                 for name in COEFFICIENT_KEYS["geodesic-2"]}
        result_kind = "geodesic-2"
    elif doc.kind in ("cubic-2", "quadratic-2", "linear-2"):
        system = doc.system()
        if doc.kind != "cubic-2":
            system = system.as_cubic()
        gamma = lift_system(system, doc.gauge(overrides))
        table = {key: str(gamma.gamma(int(key[1]), int(key[3]), int(key[4])))
                 for key in COEFFICIENT_KEYS["geodesic-3"]}
        result_kind = "geodesic-3"
    else:
        raise DocumentError("lift applies to equation documents, not connections")
    payload = _base_payload(doc, "lift")
    payload["result_kind"] = result_kind
    payload["coefficients"] = table
    return payload, 0


def _cmd_verify_transform(doc, config, overrides):
    _reject_gauge(doc, overrides, "verify-transform")
    candidate = doc.transformation()
    if candidate is None:
        raise DocumentError("verify-transform needs a [transformation] block")
    labelled = linearization_residuals(doc.system(), candidate)
    report = evaluate_conditions("verify-transform", labelled, config)
    return _report_payload(doc, "verify-transform", report)


def _cmd_verify_metric(doc, config, overrides):
    metric = doc.metric()
    if metric is None:
        raise DocumentError("verify-metric needs a [metric] block")
    if doc.kind == "geodesic-2":
        _reject_gauge(doc, overrides, "verify-metric on a connection")
        coef = doc.system()
    elif doc.kind == "scalar-cubic":
        coef = lift_scalar(doc.system(), doc.gauge(overrides))
    else:
        raise DocumentError(
            "verify-metric applies to scalar-cubic or geodesic-2 documents")
    report = metric_pde_residuals(coef, metric, config)
    return _report_payload(doc, "verify-metric", report)


def _cmd_riemann(doc, config, overrides):
    _reject_gauge(doc, overrides, "riemann")
    if doc.kind == "geodesic-2":
        gamma = doc.system().as_christoffel()
    elif doc.kind == "geodesic-3":
        gamma = doc.system()
    else:
        raise DocumentError("riemann applies to geodesic-2 or geodesic-3 documents")
    labelled = [(f"Eq6.{label}", component)
                for label, component in riemann(gamma).labelled()]
    report = evaluate_conditions("riemann", labelled, config)
    return _report_payload(doc, "riemann", report)


def _cmd_normal_form(doc, config, overrides):
    _reject_gauge(doc, overrides, "normal-form")
    if doc.kind != "general-2":
        raise DocumentError("normal-form applies to general-2 documents")
    cubic, report = normal_form(doc.system(), config)
    table = {name: str(getattr(cubic, name))
             for name in COEFFICIENT_KEYS["cubic-2"]}
    return _report_payload(doc, "normal-form", report, coefficients=table)


def _cmd_appendix(doc, config, overrides):
    if doc.kind == "scalar-cubic":
        report = lie_gauge_residuals(doc.system(), doc.gauge(overrides), config)
    elif doc.kind in ("cubic-2", "quadratic-2", "linear-2"):
        system = doc.system()
        if doc.kind != "cubic-2":
            system = system.as_cubic()
        report = appendix_residuals(system, doc.gauge(overrides), config)
    else:
        raise DocumentError(
            "appendix applies to equation documents with a gauge")
    return _report_payload(doc, "appendix", report)


def _render_text(payload: dict, elapsed: float) -> str:
    lines = [
        f"document: {payload['document']} ({payload['kind']})",
        f"command: {payload['command']}",
    ]
    if "result_kind" in payload:
        lines.append(f"result kind: {payload['result_kind']}")
    if "coefficients" in payload:
        lines.append("coefficients:")
        for key, text in payload["coefficients"].items():
            lines.append(f"  {key} = {text}")
    for entry in payload.get("conditions", ()):
        lines.append(
            f"  [{entry['id']}] {entry['verdict']}: {entry['residual']}")
        if "witness_value" in entry:
            point = entry.get("witness") or {}
            at = " ".join(f"{k}={v}" for k, v in point.items())
            suffix = f" at {at}" if at else ""
            lines.append(f"      witness value {entry['witness_value']}{suffix}")
    if "facts" in payload:
        lines.append("facts:")
        for key, value in payload["facts"].items():
            lines.append(f"  {key}: {value}")
    if "overall" in payload:
        lines.append(f"overall: {payload['overall']}")
    config = payload["zero_test"]
    lines.append(
        "zero test: points={points} precision_bits={precision_bits} "
        "tolerance={tolerance} seed={seed}".format(**config))
    lines.append(f"elapsed: {elapsed:.3f}s")
    return "\n".join(lines)


if __name__ == "__main__":
    sys.exit(main())
