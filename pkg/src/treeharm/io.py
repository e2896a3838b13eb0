"""Serialization: CSV tables, function files, and deterministic JSON reports.

Reports are byte-reproducible for a fixed config and seed: keys are sorted
and floats use repr; anything time-dependent lives under "metadata".
"""

from __future__ import annotations

import csv
import io as _io
import json
import time
from typing import Iterable

import numpy as np

from .errors import ConfigError
from .transforms import RadialFunction, VertexFunction
from .tree import TreeGeometry, build_tree


def complex_pair(v: complex) -> list[float]:
    return [float(np.real(v)), float(np.imag(v))]


def csv_text(header: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def function_to_csv(values: np.ndarray) -> str:
    rows = [(i, float(v.real), float(v.imag)) for i, v in enumerate(values)]
    return csv_text(("index", "re", "im"), rows)


def radial_to_json_dict(f: RadialFunction) -> dict:
    return {"kind": "radial", "q": f.q,
            "values": [complex_pair(v) for v in f.values]}


def vertex_to_json_dict(f: VertexFunction) -> dict:
    return {"kind": "vertex", "q": f.geometry.q, "R": f.geometry.R,
            "valid_radius": f.valid_radius,
            "values": [complex_pair(v) for v in f.values]}


def function_from_json_dict(doc: dict, geometry: TreeGeometry | None = None):
    kind = doc.get("kind")
    vals = np.array([complex(re, im) for re, im in doc.get("values", [])])
    if kind == "radial":
        return RadialFunction(int(doc["q"]), vals)
    if kind == "vertex":
        g = geometry or build_tree(int(doc["q"]), int(doc["R"]))
        return VertexFunction(g, vals, valid_radius=int(doc.get("valid_radius", g.R)))
    raise ConfigError(f"function file field 'kind' must be radial|vertex, got {kind!r}")


def report_json(payload: dict, with_timestamp: bool = True) -> str:
    """Deterministic JSON: payload sorted; volatile fields under metadata."""
    doc = dict(payload)
    meta = dict(doc.pop("metadata", {}))
    if with_timestamp:
        meta["generated_at"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    out = {"metadata": meta, **{k: doc[k] for k in sorted(doc)}}
    return json.dumps(out, sort_keys=True, indent=2, default=_json_default) + "\n"


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return complex_pair(v)
    if isinstance(v, np.ndarray):
        return v.tolist()
    raise TypeError(f"not JSON-serializable: {type(v)}")


def strip_metadata(json_text: str) -> str:
    doc = json.loads(json_text)
    doc.pop("metadata", None)
    return json.dumps(doc, sort_keys=True)
