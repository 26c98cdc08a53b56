"""JSON file formats.

* Channel: ``{"inputs", "outputs", "convention": "column-stochastic", "matrix"}``
  with ``matrix[y][x] = N(y|x)``.
* Theorem instance: ``{"d", "e_plus": [M...], "e_minus": [M...], "betas": [[M+, M-]...]}``.
* Convex decomposition: ``{"weights", "components": [k x l...], "atom_index": [[i1,i2,i3,i4]...]}``
  with 0-based atom indices.

Complex matrices are row-major nested lists whose entries are ``[re, im]``
pairs (plain real numbers are accepted on input). Floats are written with
Python's shortest round-trip repr, so a file re-reads to identical doubles.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channels import ClassicalChannel
from .errors import EntAssistError, ParseError
from .simulate import ConvexDecomposition, TheoremInstance

CONVENTION = "column-stochastic"


def encode_complex_matrix(m) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_complex_matrix(obj, where: str) -> np.ndarray:
    try:
        rows = []
        for row in obj:
            vals = []
            for z in row:
                if isinstance(z, (list, tuple)):
                    if len(z) != 2:
                        raise ParseError(f"{where}: complex entry must be [re, im]")
                    vals.append(complex(float(z[0]), float(z[1])))
                else:
                    vals.append(complex(float(z)))
            rows.append(vals)
        m = np.array(rows, dtype=complex)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{where}: not a numeric matrix ({exc})") from exc
    if m.ndim != 2:
        raise ParseError(f"{where}: expected a rectangular matrix")
    return m


def _field(obj: dict, name: str, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected a JSON object")
    if name not in obj:
        raise ParseError(f"{where}: missing field '{name}'")
    return obj[name]


def loads(text: str, where: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def load_file(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"{p}: cannot read ({exc.strerror})") from exc
    return loads(text, str(p))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def channel_to_json(ch: ClassicalChannel) -> dict:
    return {
        "inputs": ch.n_inputs,
        "outputs": ch.n_outputs,
        "convention": CONVENTION,
        "matrix": [[float(v) for v in row] for row in ch.matrix],
    }


def channel_from_json(obj, where: str = "channel") -> ClassicalChannel:
    conv = obj.get("convention", CONVENTION) if isinstance(obj, dict) else None
    matrix = _field(obj, "matrix", where)
    if conv != CONVENTION:
        raise ParseError(f"{where}: unsupported convention {conv!r}; expected {CONVENTION!r}")
    try:
        m = np.array(matrix, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}.matrix: not a numeric matrix") from exc
    if m.ndim != 2:
        raise ParseError(f"{where}.matrix: expected a rectangular matrix")
    for key, size in (("outputs", m.shape[0]), ("inputs", m.shape[1])):
        if key in obj and obj[key] != size:
            raise ParseError(f"{where}: field '{key}' = {obj[key]} but matrix has {size}")
    try:
        return ClassicalChannel(m)
    except EntAssistError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def instance_to_json(inst: TheoremInstance) -> dict:
    return {
        "d": inst.d,
        "e_plus": [encode_complex_matrix(e) for e in inst.e_plus],
        "e_minus": [encode_complex_matrix(e) for e in inst.e_minus],
        "betas": [[encode_complex_matrix(bp), encode_complex_matrix(bm)] for bp, bm in inst.betas],
    }


def instance_from_json(obj, where: str = "instance") -> TheoremInstance:
    d = _field(obj, "d", where)
    e_plus = _field(obj, "e_plus", where)
    e_minus = _field(obj, "e_minus", where)
    betas = _field(obj, "betas", where)
    if not isinstance(d, int) or d < 1:
        raise ParseError(f"{where}.d: expected a positive integer")
    ep = [decode_complex_matrix(m, f"{where}.e_plus[{i}]") for i, m in enumerate(e_plus)]
    em = [decode_complex_matrix(m, f"{where}.e_minus[{i}]") for i, m in enumerate(e_minus)]
    pairs = []
    for j, pair in enumerate(betas):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError(f"{where}.betas[{j}]: expected a [beta_plus, beta_minus] pair")
        pairs.append(tuple(decode_complex_matrix(m, f"{where}.betas[{j}][{s}]") for s, m in enumerate(pair)))
    try:
        return TheoremInstance.build(d, ep, em, pairs)
    except EntAssistError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def decomposition_to_json(dec: ConvexDecomposition) -> dict:
    out = {
        "weights": [float(w) for w in dec.weights],
        "components": [[[float(v) for v in row] for row in c] for c in dec.components],
    }
    if dec.atom_index is not None:
        out["atom_index"] = [list(map(int, a)) for a in dec.atom_index]
    return out


def decomposition_from_json(obj, where: str = "decomposition") -> ConvexDecomposition:
    weights = _field(obj, "weights", where)
    comps = _field(obj, "components", where)
    atoms = obj.get("atom_index")
    try:
        w = np.array(weights, dtype=float)
        c = np.array(comps, dtype=float)
        return ConvexDecomposition(w, c, None if atoms is None else tuple(tuple(a) for a in atoms))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: {exc}") from exc
