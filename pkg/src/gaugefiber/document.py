"""JSON bundle documents (format tag ``gaugefiber-v1``).

Complex numbers are ``[re, im]`` pairs and matrices are row lists of them.
Under ``metrics`` and a frame's ``basis``, the key ``"*"`` supplies the
value for every point not listed explicitly.

    {
      "format": "gaugefiber-v1",
      "charts": [{"id": "U", "points": ["p1", "p2"]}],
      "metrics": {"SU2": {"*": {"D": [[[1,0],[0,0]], [[0,0],[1,0]]], "d": [1,0]}}},
      "frames": [{"id": "A", "chart": "U", "bundle": "SU2", "basis": {"*": ...}}],
      "transitions": [{"from": "A", "to": "B", "matrices": {"p2": ...}}]
    }
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np

from .atlas import Atlas, Chart, Frame, MetricSample, TransitionMap
from .errors import DocumentError, GaugeFiberError
from .metrics import HermitianMetric, SkewMetric
from .tensor import Bundle

FORMAT = "gaugefiber-v1"
EXAMPLES = ("two_chart", "two_chart_bad_metric", "two_chart_bad_transition")


def _complex(value: Any, where: str) -> complex:
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise DocumentError("complex numbers must be [re, im] pairs of numbers", where)
    return complex(value[0], value[1])


def _matrix(value: Any, n: int, where: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != n:
        raise DocumentError(f"expected a {n}x{n} matrix", where)
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"expected a row of {n} complex numbers", f"{where}[{i}]")
        rows.append([_complex(v, f"{where}[{i}][{j}]") for j, v in enumerate(row)])
    return np.array(rows, dtype=complex)


def _object(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise DocumentError("expected an object", where)
    return value


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise DocumentError("expected an array", where)
    return value


def _string(value: Any, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise DocumentError("expected a non-empty string", where)
    return value


def _per_point(table: dict, points: list[str], where: str) -> dict[str, tuple[Any, str]]:
    """Resolve a point-keyed table with an optional ``"*"`` default."""
    out = {}
    for key in table:
        if key != "*" and key not in points:
            raise DocumentError(f"unknown point {key!r}", where)
    for p in points:
        if p in table:
            out[p] = (table[p], f"{where}.{p}")
        elif "*" in table:
            out[p] = (table["*"], f"{where}.*")
    return out


def _bundle(value: Any, where: str) -> Bundle:
    try:
        b = Bundle.parse(_string(value, where))
    except GaugeFiberError:
        raise DocumentError(f"unknown bundle {value!r}", where) from None
    if b.dim > 3:
        raise DocumentError(f"bundle {b} carries no metrics or frames here", where)
    return b


def atlas_from_document(doc: Any) -> Atlas:
    doc = _object(doc, "$")
    if doc.get("format") != FORMAT:
        raise DocumentError(f"format must be {FORMAT!r}, got {doc.get('format')!r}", "$.format")
    unknown = set(doc) - {"format", "charts", "metrics", "frames", "transitions"}
    if unknown:
        raise DocumentError(f"unknown key(s) {', '.join(sorted(unknown))}", "$")

    charts = []
    for i, c in enumerate(_list(doc.get("charts"), "$.charts")):
        where = f"$.charts[{i}]"
        c = _object(c, where)
        pts = [_string(p, f"{where}.points[{k}]") for k, p in enumerate(_list(c.get("points"), f"{where}.points"))]
        charts.append(_build(Chart, where, _string(c.get("id"), f"{where}.id"), tuple(pts)))
    all_points = sorted({p for c in charts for p in c.points})

    metrics = {}
    for key, table in _object(doc.get("metrics", {}), "$.metrics").items():
        where = f"$.metrics.{key}"
        bundle = _bundle(key, where)
        samples = {}
        for p, (entry, loc) in _per_point(_object(table, where), all_points, where).items():
            entry = _object(entry, loc)
            D = _build(HermitianMetric, f"{loc}.D", _matrix(entry.get("D"), bundle.dim, f"{loc}.D"))
            skew = None
            if bundle.dim > 1:
                if "d" not in entry:
                    raise DocumentError(f"{bundle} metric needs a skew scalar 'd'", loc)
                skew = _build(SkewMetric, f"{loc}.d", bundle.dim, _complex(entry["d"], f"{loc}.d"))
            elif "d" in entry:
                raise DocumentError("the U1 bundle carries no skew metric", f"{loc}.d")
            samples[p] = MetricSample(D, skew)
        metrics[bundle] = samples

    chart_points = {c.id: list(c.points) for c in charts}
    frames = []
    frame_bundles = {}
    for i, f in enumerate(_list(doc.get("frames", []), "$.frames")):
        where = f"$.frames[{i}]"
        f = _object(f, where)
        fid = _string(f.get("id"), f"{where}.id")
        chart = _string(f.get("chart"), f"{where}.chart")
        if chart not in chart_points:
            raise DocumentError(f"unknown chart {chart!r}", f"{where}.chart")
        bundle = _bundle(f.get("bundle"), f"{where}.bundle")
        basis_table = _object(f.get("basis"), f"{where}.basis")
        basis = {p: _matrix(m, bundle.dim, loc)
                 for p, (m, loc) in _per_point(basis_table, chart_points[chart], f"{where}.basis").items()}
        frames.append(_build(Frame, where, fid, chart, bundle, basis))
        frame_bundles[fid] = bundle

    transitions = []
    for i, t in enumerate(_list(doc.get("transitions", []), "$.transitions")):
        where = f"$.transitions[{i}]"
        t = _object(t, where)
        a, b = _string(t.get("from"), f"{where}.from"), _string(t.get("to"), f"{where}.to")
        for fid, loc in ((a, "from"), (b, "to")):
            if fid not in frame_bundles:
                raise DocumentError(f"unknown frame {fid!r}", f"{where}.{loc}")
        bundle = frame_bundles[a]
        mats = {p: _matrix(m, bundle.dim, f"{where}.matrices.{p}")
                for p, m in _object(t.get("matrices"), f"{where}.matrices").items()}
        transitions.append(_build(TransitionMap, where, a, b, bundle, mats))

    return _build(Atlas.build, "$", charts, frames, metrics, transitions)


def _build(factory, where: str, *args):
    try:
        return factory(*args)
    except DocumentError:
        raise
    except GaugeFiberError as exc:
        raise DocumentError(f"{exc.code}: {exc}", where) from exc


def load_document(path: str | Path) -> Atlas:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}", str(path)) from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})",
                            str(path)) from exc
    return atlas_from_document(doc)


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_matrix(m) -> list[list[list[float]]]:
    return [[encode_complex(z) for z in row] for row in np.asarray(m)]


def atlas_to_document(atlas: Atlas) -> dict:
    metrics = {}
    for bundle, samples in sorted(atlas.metrics.items(), key=lambda kv: kv[0].order):
        table = {}
        for p in sorted(samples):
            s = samples[p]
            entry = {"D": encode_matrix(s.hermitian.components)}
            if s.skew is not None:
                entry["d"] = encode_complex(s.skew.scalar)
            table[p] = entry
        metrics[str(bundle)] = table
    return {
        "format": FORMAT,
        "charts": [{"id": c.id, "points": list(c.points)} for c in atlas.charts.values()],
        "metrics": metrics,
        "frames": [
            {"id": f.id, "chart": f.chart, "bundle": str(f.bundle),
             "basis": {p: encode_matrix(m) for p, m in f.basis.items()}}
            for f in atlas.frames.values()
        ],
        "transitions": [
            {"from": a, "to": b, "matrices": {p: encode_matrix(m) for p, m in t.matrices.items()}}
            for (a, b), t in atlas.transitions.items()
        ],
    }


def example_path(name: str = "two_chart"):
    """Path-like handle of a packaged example document."""
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; available: {', '.join(EXAMPLES)}")
    return resources.files("gaugefiber") / "data" / f"{name}.json"


def load_example(name: str = "two_chart") -> Atlas:
    return atlas_from_document(json.loads(example_path(name).read_text(encoding="utf-8")))
