"""Command-line entry point.

Exit status: 0 when every check passes, 1 when a check fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import atlas as fa
from .document import EXAMPLES, encode_matrix, example_path, load_document
from .errors import ChartMismatch, GaugeFiberError, NoOverlap, NotConcordant
from .metrics import DEFAULT_TOL, is_orthonormal
from .report import AuditReport, CheckRecord
from .typelang import CONTEXTS, format_signature, parse_signature, registry_json, builtin_registry

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _fmt_complex(z: complex) -> str:
    re, im = z.real + 0.0, z.imag + 0.0  # adding 0.0 turns -0.0 into 0.0
    return f"{re:.12g}{im:+.12g}j"


def _fmt_matrix(m) -> str:
    return "[" + ", ".join("[" + ", ".join(_fmt_complex(z) for z in row) + "]" for row in np.asarray(m)) + "]"


def _emit(report: AuditReport, args, matrices: dict[str, np.ndarray] | None = None) -> int:
    if args.json:
        if matrices:
            report.extra["matrices"] = {k: encode_matrix(v) for k, v in sorted(matrices.items())}
        sys.stdout.write(report.render_json())
    else:
        text = report.render_text()
        if matrices:
            text = "".join(f"{k} = {_fmt_matrix(v)}\n" for k, v in sorted(matrices.items())) + text
        sys.stdout.write(text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_check_concordance(args) -> int:
    atlas = load_document(args.file)
    return _emit(fa.concordance_report(atlas, args.tol), args)


def cmd_orthonormalize(args) -> int:
    atlas = load_document(args.file)
    frame = atlas.frame(args.frame)
    if frame.chart != args.chart:
        raise ChartMismatch(f"frame {args.frame!r} lives on chart {frame.chart!r}, not {args.chart!r}")
    records, matrices = [], {}
    for p in sorted(atlas.charts[frame.chart].points):
        loc = (str(frame.bundle), frame.id, p)
        local = fa.metric_in_frame(atlas, frame.id, p)
        try:
            s = fa.orthonormalize(local.hermitian, local.skew, args.tol)
        except NotConcordant as exc:
            records.append(CheckRecord("orthonormalize", loc, False, exc.residual,
                                       message=f"NotConcordant on chart {frame.chart}"))
            continue
        after = fa.transform_sample(local, s)
        check = is_orthonormal(after.hermitian, after.skew, args.tol)
        residual = max(check.hermitian_residual, check.skew_residual or 0.0)
        records.append(CheckRecord("orthonormalize", loc, check.orthonormal, residual))
        matrices[p] = s
    return _emit(AuditReport.of(records), args, matrices)


def cmd_transition(args) -> int:
    atlas = load_document(args.file)
    s = fa.transition_matrix(atlas, args.source, args.target, args.point)
    group = fa.classify_group(s, args.tol)
    bundle = atlas.frame(args.source).bundle
    record = CheckRecord("transition", (str(bundle), args.source, args.target, args.point), True, group=str(group))
    return _emit(AuditReport.of([record]), args, {args.point: s})


def cmd_classify(args) -> int:
    atlas = load_document(args.file)
    bundle = fa.same_bundle(atlas, args.source, args.target)
    points = atlas.overlap(args.source, args.target)
    if not points:
        raise NoOverlap(f"frames {args.source!r} and {args.target!r} do not overlap")
    expected = fa.STRUCTURAL_GROUP[bundle]
    records = []
    for p in sorted(points):
        if args.orthonormal:
            s = np.linalg.solve(fa.orthonormal_basis(atlas, args.source, p, args.tol),
                                fa.orthonormal_basis(atlas, args.target, p, args.tol))
        else:
            s = fa.resolved_transition(atlas, args.source, args.target, p)
        group = fa.classify_group(s, args.tol)
        residual = max(fa.unitarity_residual(s), fa.determinant_residual(s) if bundle.dim > 1 else 0.0)
        records.append(CheckRecord("classify", (str(bundle), args.source, args.target, p),
                                   group is expected, residual, str(group)))
    return _emit(AuditReport.of(records), args)


def cmd_audit(args) -> int:
    return _emit(fa.audit_atlas(load_document(args.file), args.tol), args)


def cmd_cocycle(args) -> int:
    atlas = load_document(args.file)
    ids = [f.strip() for f in args.frames.split(",")]
    if len(ids) != 3 or not all(ids):
        raise GaugeFiberError("--frames takes exactly three comma-separated frame ids")
    res = fa.check_cocycle(atlas, *ids, tol=args.tol)
    bundle = atlas.frame(ids[0]).bundle
    records = [CheckRecord("cocycle", (str(bundle), *ids, p), res.passed[p], r)
               for p, r in res.residuals.items()]
    return _emit(AuditReport.of(records), args)


def cmd_parse_type(args) -> int:
    sig = parse_signature(args.signature, args.context)
    text = format_signature(sig, args.context)
    if args.json:
        blocks = [{"bundle": str(b.bundle), "up": b.up, "down": b.down,
                   "barred_up": b.barred_up, "barred_down": b.barred_down} for b in sig.blocks]
        payload = {"context": args.context, "signature": text, "blocks": blocks}
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(f"{text}\n{sig}\n")
    return EXIT_OK


def cmd_registry(args) -> int:
    if args.json:
        sys.stdout.write(registry_json())
        return EXIT_OK
    for e in builtin_registry():
        types = "  ".join(f"{r.context}:{r.text}" for r in e.rows)
        sys.stdout.write(f"{e.symbol:<6} {e.table:<13} {e.name:<33} {types}\n")
    return EXIT_OK


def cmd_example(args) -> int:
    sys.stdout.write(example_path(args.name).read_text(encoding="utf-8"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="tolerance (default %(default)g)")
    common.add_argument("--json", action="store_true", help="emit the report as JSON")

    parser = argparse.ArgumentParser(prog="gaugefiber",
                                     description="Check metric, frame and transition data of gauge bundles.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-concordance", parents=[common], help="concordance of every metric pair")
    p.add_argument("file")
    p.set_defaults(func=cmd_check_concordance)

    p = sub.add_parser("orthonormalize", parents=[common], help="transition to an orthonormal frame")
    p.add_argument("file")
    p.add_argument("--chart", required=True)
    p.add_argument("--frame", required=True)
    p.set_defaults(func=cmd_orthonormalize)

    p = sub.add_parser("transition", parents=[common], help="transition matrix at one point")
    p.add_argument("file")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--point", required=True)
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("classify", parents=[common], help="group of the transitions between two frames")
    p.add_argument("file")
    p.add_argument("--from", dest="source", required=True)
    p.add_argument("--to", dest="target", required=True)
    p.add_argument("--orthonormal", action="store_true",
                   help="orthonormalize both frames before classifying")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("audit", parents=[common], help="all structural checks")
    p.add_argument("file")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("cocycle", parents=[common], help="cocycle condition on a frame triple")
    p.add_argument("file")
    p.add_argument("--frames", required=True, help="A,B,C")
    p.set_defaults(func=cmd_cocycle)

    p = sub.add_parser("parse-type", parents=[common], help="parse a type tuple")
    p.add_argument("signature")
    p.add_argument("--context", required=True, choices=sorted(CONTEXTS))
    p.set_defaults(func=cmd_parse_type)

    p = sub.add_parser("registry", parents=[common], help="list the basic fields")
    p.set_defaults(func=cmd_registry)

    p = sub.add_parser("example", help="print a packaged example document")
    p.add_argument("name", nargs="?", default="two_chart", choices=EXAMPLES)
    p.set_defaults(func=cmd_example)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except GaugeFiberError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
