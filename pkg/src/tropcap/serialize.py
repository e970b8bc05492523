"""Canonical JSON for specs and reports.

Reports must be byte-identical across runs with the same config and
seed, so serialization is fully deterministic: object keys are sorted,
floats are printed with 17 significant digits (enough to round-trip an
IEEE double), and integers -- including region counts too large for a
double -- are written as exact JSON integers.  Spec objects (routers,
experts, mixtures, arrangements, manifolds) carry a ``type`` tag so a
single loader can dispatch.
"""

from __future__ import annotations

import hashlib
from dataclasses import fields, is_dataclass

import numpy as np

from .arrangement import Arrangement
from .capacity import ExpertSpec, MoESpec
from .errors import ContractViolation
from .manifold import ManifoldSpec
from .routing import RouterSpec


def to_jsonable(obj):
    """Recursively convert to plain dict/list/str/int/float/bool/None."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(to_jsonable(v) for v in obj)
    if is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in fields(obj)}
    raise ContractViolation(f"cannot serialize object of type {type(obj).__name__}")


def _key(k) -> str:
    if isinstance(k, str):
        return k
    if isinstance(k, (int, np.integer)):
        return str(int(k))
    if isinstance(k, tuple):
        return ",".join(str(int(t)) for t in k)
    raise ContractViolation(f"cannot use {type(k).__name__} as a JSON key")


def _fmt_float(x: float) -> str:
    if x != x:
        return '"nan"'
    if x == float("inf"):
        return '"inf"'
    if x == float("-inf"):
        return '"-inf"'
    text = f"{x:.17g}"
    # Keep a trailing ".0" so integral floats stay typed as floats.
    if "." not in text and "e" not in text and "E" not in text:
        text += ".0"
    return text


def _emit(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_fmt_float(obj))
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, list):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _emit(v, out)
        out.append("]")
    elif isinstance(obj, dict):
        out.append("{")
        for i, k in enumerate(sorted(obj)):
            if i:
                out.append(", ")
            _emit(k, out)
            out.append(": ")
            _emit(obj[k], out)
        out.append("}")
    else:
        raise ContractViolation(f"cannot emit {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, 17-significant-digit floats."""
    out: list = []
    _emit(to_jsonable(obj), out)
    return "".join(out) + "\n"


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Spec encoders / decoders


def spec_to_json(spec) -> dict:
    if isinstance(spec, RouterSpec):
        return {
            "type": "router",
            "W_r": to_jsonable(spec.weights),
            "b_r": to_jsonable(spec.biases),
            "k": int(spec.k),
        }
    if isinstance(spec, ExpertSpec):
        return {"type": "expert", "W": to_jsonable(spec.weights), "b": to_jsonable(spec.biases)}
    if isinstance(spec, MoESpec):
        return {
            "type": "moe",
            "router": spec_to_json(spec.router),
            "experts": [spec_to_json(e) for e in spec.experts],
        }
    if isinstance(spec, Arrangement):
        return {
            "type": "arrangement",
            "dimension": int(spec.normals.shape[1]),
            "hyperplanes": [
                {"w": to_jsonable(w), "b": float(b)}
                for w, b in zip(spec.normals, spec.offsets)
            ],
        }
    if isinstance(spec, ManifoldSpec):
        return {
            "type": "manifold",
            "kind": spec.kind,
            "center": to_jsonable(spec.center),
            "frame": to_jsonable(spec.frame),
            "radius": float(spec.radius),
            "extent": to_jsonable(spec.extent),
            "cap_half_angle": None if spec.cap_half_angle is None else float(spec.cap_half_angle),
        }
    raise ContractViolation(f"no JSON encoding for {type(spec).__name__}")


def spec_from_json(doc: dict):
    if not isinstance(doc, dict) or "type" not in doc:
        raise ContractViolation("spec document needs a 'type' field")
    t = doc["type"]
    if t == "router":
        return RouterSpec(
            np.asarray(doc["W_r"], dtype=np.float64),
            np.asarray(doc["b_r"], dtype=np.float64),
            int(doc["k"]),
        )
    if t == "expert":
        return ExpertSpec(
            np.asarray(doc["W"], dtype=np.float64),
            np.asarray(doc["b"], dtype=np.float64),
        )
    if t == "moe":
        return MoESpec(
            spec_from_json(doc["router"]),
            [spec_from_json(e) for e in doc["experts"]],
        )
    if t == "arrangement":
        planes = doc["hyperplanes"]
        if not planes:
            raise ContractViolation("arrangement needs at least one hyperplane")
        normals = np.asarray([p["w"] for p in planes], dtype=np.float64)
        offsets = np.asarray([p["b"] for p in planes], dtype=np.float64)
        if normals.shape[1] != int(doc["dimension"]):
            raise ContractViolation("hyperplane width disagrees with dimension")
        return Arrangement(normals, offsets)
    if t == "manifold":
        return ManifoldSpec(
            doc["kind"],
            np.asarray(doc["center"], dtype=np.float64),
            np.asarray(doc["frame"], dtype=np.float64),
            radius=float(doc.get("radius", 1.0)),
            extent=np.asarray(doc.get("extent", 1.0), dtype=np.float64),
            cap_half_angle=(
                None if doc.get("cap_half_angle") is None else float(doc["cap_half_angle"])
            ),
        )
    raise ContractViolation(f"unknown spec type {t!r}")


# ---------------------------------------------------------------------------
# CSV projection


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, (list, tuple)):
        return ";".join(str(t) for t in v)
    return str(v)


def rows_to_csv(header: list[str], rows: list[dict]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(h)) for h in header))
    return "\n".join(lines) + "\n"


def report_to_csv(report: dict) -> str:
    """Flatten a report to a delimited table.

    Reports that carry per-item rows (cells, sweep points, seeds)
    become one line per item; scalar reports become a two-column
    key/value table.
    """
    for key in ("rows", "cells", "per_cell", "checks"):
        items = report.get(key)
        if isinstance(items, list) and items and isinstance(items[0], dict):
            header = sorted({k for item in items for k in item})
            return rows_to_csv(header, items)
    lines = ["key,value"]
    for k, v in sorted(report.items()):
        if isinstance(v, dict):
            continue
        lines.append(f"{k},{_csv_cell(v)}")
    return "\n".join(lines) + "\n"
