"""JSON matrix and circuit documents.

Complex numbers are always written as ``[re, im]`` pairs in row-major
order.  Floats go through ``json``'s shortest round-trip repr, so reading
back a written circuit reproduces every angle bit for bit.

Matrix document::

    {"kind": "contraction", "rows": 1, "cols": 1, "entries": [[0.6, 0.0]]}
    {"kind": "state", "dim": 2, "entries": [[1, 0], [0, 0]]}
    {"kind": "povm", "dim": 2, "elements": [{"entries": [...]}, ...]}

Circuit document: ``{"format": "dilatic-circuit", "kind": "map" | "unitary"
| "povm", "mode_count": M, "elements": [...], "modules": [...], ...}``.
"""
import json
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .errors import DilaticError
from .interferometer import ModuleLabel, OpticalCircuit, OpticalElement

CIRCUIT_FORMAT = "dilatic-circuit"
MATRIX_KINDS = ("contraction", "unitary", "povm", "state", "density")


class FormatError(DilaticError):
    """Unreadable or malformed document (CLI exit code 3)."""


def _reject_constant(name):
    raise FormatError(f"non-finite number {name} is not allowed")


def read_text(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def write_text(path, text):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def parse_json(text, source="<input>"):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def encode_entries(m):
    m = np.asarray(m, dtype=complex).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in m]


def decode_entries(entries, count, where):
    if not isinstance(entries, list) or len(entries) != count:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise FormatError(f"{where}: expected {count} entries, got {got}")
    out = np.empty(count, dtype=complex)
    for i, pair in enumerate(entries):
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
        ):
            raise FormatError(f"{where}: entry {i} must be a [re, im] pair of numbers")
        out[i] = complex(pair[0], pair[1])
    if not np.all(np.isfinite(out)):
        raise FormatError(f"{where}: non-finite entry")
    return out


def _int_field(doc, key, where):
    v = doc.get(key)
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise FormatError(f"{where}: field {key!r} must be a positive integer")
    return v


def matrix_payload(m):
    m = np.asarray(m, dtype=complex)
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "entries": encode_entries(m)}


def _decode_matrix(doc, where):
    rows = _int_field(doc, "rows", where)
    cols = _int_field(doc, "cols", where)
    return decode_entries(doc.get("entries"), rows * cols, where).reshape(rows, cols)


@dataclass
class MatrixDocument:
    kind: str
    data: object
    label: Optional[str] = None
    comment: Optional[str] = None


def parse_matrix(text, source="<input>"):
    doc = parse_json(text, source)
    if not isinstance(doc, dict):
        raise FormatError(f"{source}: top level must be an object")
    kind = doc.get("kind")
    if kind not in MATRIX_KINDS:
        raise FormatError(f"{source}: field 'kind' must be one of {', '.join(MATRIX_KINDS)}")
    if kind == "state":
        dim = _int_field(doc, "dim", source)
        data = decode_entries(doc.get("entries"), dim, source)
    elif kind == "povm":
        dim = _int_field(doc, "dim", source)
        elements = doc.get("elements")
        if not isinstance(elements, list) or not elements:
            raise FormatError(f"{source}: 'elements' must be a non-empty list")
        data = []
        for i, el in enumerate(elements):
            if not isinstance(el, dict):
                raise FormatError(f"{source}: element {i} must be an object")
            data.append(decode_entries(el.get("entries"), dim * dim, f"{source}: element {i}").reshape(dim, dim))
    else:
        data = _decode_matrix(doc, source)
        if kind in ("unitary", "density") and data.shape[0] != data.shape[1]:
            raise FormatError(f"{source}: {kind} matrix must be square")
    return MatrixDocument(kind, data, doc.get("label"), doc.get("comment"))


def load_matrix(path):
    return parse_matrix(read_text(path), path)


def dump_matrix(kind, data, label=None, comment=None):
    doc = {"kind": kind}
    if kind == "state":
        v = np.asarray(data, dtype=complex).reshape(-1)
        doc.update(dim=int(v.size), entries=encode_entries(v))
    elif kind == "povm":
        els = [np.asarray(e, dtype=complex) for e in data]
        doc.update(dim=int(els[0].shape[0]), elements=[{"entries": encode_entries(e)} for e in els])
    else:
        doc.update(matrix_payload(data))
    if label is not None:
        doc["label"] = label
    if comment is not None:
        doc["comment"] = comment
    return json.dumps(doc, indent=1) + "\n"


@dataclass
class CircuitDocument:
    """A circuit read from disk, plus whatever routing metadata came with it.

    For ``kind == "povm"`` it quacks like a compiled bundle
    (``dim``, ``n``, ``routing``, ``circuit``, ``total_modes``), so the
    simulator functions accept it directly.
    """

    kind: str
    circuit: OpticalCircuit
    n_in: Optional[int] = None
    n_out: Optional[int] = None
    dim: Optional[int] = None
    routing: Dict[int, Tuple[int, int]] = field(default_factory=dict)
    detection_ops: List[np.ndarray] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.routing)

    @property
    def total_modes(self):
        return self.circuit.mode_count


def _element_payload(e):
    return {"kind": e.kind, "modes": list(e.modes), "theta": e.theta, "phi": e.phi}


def circuit_payload(c):
    return {
        "mode_count": c.mode_count,
        "elements": [_element_payload(e) for e in c.elements],
        "modules": [
            {"name": m.name, "start": m.start, "stop": m.stop, "modes": None if m.modes is None else list(m.modes)}
            for m in c.module_labels
        ],
    }


def dump_circuit(doc):
    out = {"format": CIRCUIT_FORMAT, "version": __version__, "kind": doc.kind}
    out.update(circuit_payload(doc.circuit))
    if doc.kind == "map":
        out.update(n_in=doc.n_in, n_out=doc.n_out)
    if doc.kind == "povm":
        out["dim"] = doc.dim
        out["routing"] = [{"outcome": i, "ports": list(doc.routing[i])} for i in sorted(doc.routing)]
        out["detection_operators"] = [dict(index=i, **matrix_payload(a)) for i, a in enumerate(doc.detection_ops)]
    if doc.meta:
        out["meta"] = doc.meta
    return json.dumps(out, indent=1) + "\n"


def _parse_element(e, where):
    if not isinstance(e, dict):
        raise FormatError(f"{where}: element must be an object")
    try:
        return OpticalElement(e["kind"], tuple(int(m) for m in e["modes"]), float(e.get("theta", 0.0)), float(e.get("phi", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: bad element ({exc})") from None


def parse_circuit(text, source="<input>"):
    doc = parse_json(text, source)
    if not isinstance(doc, dict) or doc.get("format") != CIRCUIT_FORMAT:
        raise FormatError(f"{source}: not a {CIRCUIT_FORMAT} document")
    kind = doc.get("kind")
    if kind not in ("map", "unitary", "povm"):
        raise FormatError(f"{source}: unknown circuit kind {kind!r}")
    modes = _int_field(doc, "mode_count", source)
    raw = doc.get("elements")
    if not isinstance(raw, list):
        raise FormatError(f"{source}: 'elements' must be a list")
    elements = [_parse_element(e, f"{source}: element {i}") for i, e in enumerate(raw)]
    labels = []
    for m in doc.get("modules", []):
        try:
            labels.append(ModuleLabel(str(m["name"]), int(m["start"]), int(m["stop"]),
                                      None if m.get("modes") is None else tuple(int(x) for x in m["modes"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"{source}: bad module label ({exc})") from None
    try:
        circuit = OpticalCircuit(modes, tuple(elements), tuple(labels))
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None
    out = CircuitDocument(kind, circuit, meta=doc.get("meta", {}))
    if kind == "map":
        out.n_in = _int_field(doc, "n_in", source)
        out.n_out = _int_field(doc, "n_out", source)
    if kind == "povm":
        out.dim = _int_field(doc, "dim", source)
        for r in doc.get("routing", []):
            try:
                lo, hi = (int(x) for x in r["ports"])
                out.routing[int(r["outcome"])] = (lo, hi)
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"{source}: bad routing entry ({exc})") from None
        for i, d in enumerate(doc.get("detection_operators", [])):
            out.detection_ops.append(_decode_matrix(d, f"{source}: detection operator {i}"))
        if sorted(out.routing) != list(range(len(out.routing))) or not out.routing:
            raise FormatError(f"{source}: routing must cover outcomes 0..n-1")
    return out


def load_circuit(path):
    return parse_circuit(read_text(path), path)
