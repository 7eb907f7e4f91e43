"""JSON encodings shared by the library and the command line.

The matrix encoding is used everywhere: an object with ``rows``, ``cols``
and a row-major ``entries`` list, where each entry is a two-element
``[re, im]`` pair of doubles.  See docs/formats.md for the full catalogue.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .linalg import as_matrix
from .superop import EntanglementMatrix
from .extops import ExtendedSuperoperator
from .dilation import DilationReport, UnitaryGate
from .infomeasures import InfoReport


def matrix_to_json(m) -> dict[str, Any]:
    arr = as_matrix(m)
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in arr.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ValueError("matrix JSON must be an object")
    try:
        rows = int(obj["rows"])
        cols = int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix JSON: {exc}") from exc
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    if not isinstance(entries, list) or len(entries) != rows * cols:
        raise ValueError(f"matrix JSON needs exactly {rows * cols} entries")
    flat = np.empty(rows * cols, dtype=complex)
    for idx, pair in enumerate(entries):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValueError("each matrix entry must be a [re, im] pair")
        flat[idx] = complex(float(pair[0]), float(pair[1]))
    return flat.reshape(rows, cols)


def entanglement_matrix_to_json(r: EntanglementMatrix) -> dict[str, Any]:
    return {"d": r.d, "r": matrix_to_json(r.r)}


def entanglement_matrix_from_json(obj) -> EntanglementMatrix:
    """Accepts the full ``{"d", "r"}`` form or the qubit shorthand
    ``{"q": [re, im]}`` meaning a single off-diagonal coherence."""
    if not isinstance(obj, dict):
        raise ValueError("entanglement matrix JSON must be an object")
    if "q" in obj:
        pair = obj["q"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise ValueError('"q" must be a [re, im] pair')
        return EntanglementMatrix.from_coherence(complex(float(pair[0]), float(pair[1])))
    try:
        d = int(obj["d"])
        r = matrix_from_json(obj["r"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed entanglement matrix JSON: {exc}") from exc
    if r.shape != (d, d):
        raise ValueError("entanglement matrix dimension mismatch")
    return EntanglementMatrix(r)


def extended_to_json(e: ExtendedSuperoperator) -> dict[str, Any]:
    return {
        "d_a": e.d_a,
        "dims_out": list(e.dims_out),
        "images": [
            {"k": k, "l": l, "op": matrix_to_json(e.images[k, l])}
            for k in range(e.d_a)
            for l in range(e.d_a)
        ],
    }


def extended_from_json(obj, trace_preserving: bool = False) -> ExtendedSuperoperator:
    try:
        d_a = int(obj["d_a"])
        dims_out = tuple(int(d) for d in obj["dims_out"])
        entries = obj["images"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed extended superoperator JSON: {exc}") from exc
    d_out = int(np.prod(dims_out))
    images = np.zeros((d_a, d_a, d_out, d_out), dtype=complex)
    seen = set()
    for item in entries:
        k, l = int(item["k"]), int(item["l"])
        if not (0 <= k < d_a and 0 <= l < d_a):
            raise ValueError(f"image index {(k, l)} out of range")
        images[k, l] = matrix_from_json(item["op"])
        seen.add((k, l))
    if len(seen) != d_a * d_a:
        raise ValueError("extended superoperator JSON misses image entries")
    return ExtendedSuperoperator(d_a, dims_out, images, trace_preserving=trace_preserving)


def gate_to_json(gate: UnitaryGate) -> dict[str, Any]:
    out = matrix_to_json(gate.matrix)
    out["dims"] = list(gate.dims)
    return out


def gate_from_json(obj) -> UnitaryGate:
    m = matrix_from_json(obj)
    try:
        dims = tuple(int(d) for d in obj["dims"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed gate JSON: {exc}") from exc
    return UnitaryGate(dims, m)


def info_report_to_json(report: InfoReport, r: EntanglementMatrix) -> dict[str, Any]:
    return {
        "s_red_bits": report.s_red,
        "s_d_bits": report.s_d,
        "s_b_bits": report.s_b,
        "s_ab_bits": report.s_ab,
        "i_c_formula_bits": report.i_c_formula,
        "i_c_general_bits": report.i_c_general,
        "r": entanglement_matrix_to_json(r),
    }


def dilation_report_to_json(report: DilationReport) -> dict[str, Any]:
    return report.to_json_dict()


def dump_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
