"""JSON circuit files (format_version "1").

A file holds either a flat ``gates`` list or a ``layers`` list of gate lists.
Complex numbers are ``[re, im]`` pairs; angles are radians. Unknown fields
are rejected.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .circuit import (
    Circuit,
    Cnot,
    ControlledU,
    Diagonal,
    LayeredCircuit,
    OneQubit,
    SymmetricPhase,
    Unitary,
    validate,
)

FORMAT_VERSION = "1"
_TOP_FIELDS = {"format_version", "width_data", "width_ancilla", "global_phase", "gates", "layers"}
_GATE_FIELDS = {"kind", "qubits", "params"}
_PARAMS = {
    "one_qubit": {"u"},
    "controlled_u": {"u"},
    "cnot": set(),
    "symmetric_phase": {"theta"},
    "diagonal": {"phases"},
    "unitary": {"u"},
}
_ARITY = {"one_qubit": 1, "controlled_u": 2, "cnot": 2, "symmetric_phase": 2}


class CircuitFormatError(ValueError):
    pass


def _encode_matrix(u: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in u]


def _decode_matrix(data) -> np.ndarray:
    try:
        arr = np.array(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise CircuitFormatError(f"bad matrix payload: {exc}") from exc
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise CircuitFormatError("matrix must be a square grid of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def gate_to_record(g) -> dict:
    if isinstance(g, Cnot):
        params = {}
    elif isinstance(g, SymmetricPhase):
        params = {"theta": g.theta}
    elif isinstance(g, Diagonal):
        params = {"phases": [float(p) for p in g.phases]}
    else:
        params = {"u": _encode_matrix(g.u)}
    return {"kind": g.kind, "qubits": list(g.qubits), "params": params}


def record_to_gate(rec: dict, where: str = "gate"):
    if not isinstance(rec, dict):
        raise CircuitFormatError(f"{where}: expected an object")
    extra = set(rec) - _GATE_FIELDS
    if extra:
        raise CircuitFormatError(f"{where}: unknown fields {sorted(extra)}")
    kind = rec.get("kind")
    if kind not in _PARAMS:
        raise CircuitFormatError(f"{where}: unknown gate kind {kind!r}")
    qubits = rec.get("qubits")
    if not isinstance(qubits, list) or not all(isinstance(q, int) and not isinstance(q, bool) for q in qubits):
        raise CircuitFormatError(f"{where}: qubits must be a list of integers")
    if kind in _ARITY and len(qubits) != _ARITY[kind]:
        raise CircuitFormatError(f"{where}: {kind} takes {_ARITY[kind]} qubits")
    params = rec.get("params", {})
    if not isinstance(params, dict) or set(params) != _PARAMS[kind]:
        raise CircuitFormatError(f"{where}: {kind} needs params {sorted(_PARAMS[kind])}")
    if kind == "one_qubit":
        return OneQubit(qubits[0], _decode_matrix(params["u"]))
    if kind == "controlled_u":
        return ControlledU(qubits[0], qubits[1], _decode_matrix(params["u"]))
    if kind == "cnot":
        return Cnot(qubits[0], qubits[1])
    if kind == "symmetric_phase":
        return SymmetricPhase(qubits[0], qubits[1], float(params["theta"]))
    if kind == "diagonal":
        return Diagonal(tuple(qubits), [float(p) for p in params["phases"]])
    return Unitary(tuple(qubits), _decode_matrix(params["u"]))


def to_dict(circuit) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "width_data": circuit.width_data,
        "width_ancilla": circuit.width_ancilla,
        "global_phase": circuit.global_phase,
    }
    if isinstance(circuit, LayeredCircuit):
        doc["layers"] = [[gate_to_record(g) for g in layer] for layer in circuit.layers]
    else:
        doc["gates"] = [gate_to_record(g) for g in circuit.gates]
    return doc


def from_dict(doc) -> Circuit | LayeredCircuit:
    if not isinstance(doc, dict):
        raise CircuitFormatError("circuit document must be an object")
    extra = set(doc) - _TOP_FIELDS
    if extra:
        raise CircuitFormatError(f"unknown fields {sorted(extra)}")
    if doc.get("format_version") != FORMAT_VERSION:
        raise CircuitFormatError(f"unsupported format_version {doc.get('format_version')!r}")
    if ("gates" in doc) == ("layers" in doc):
        raise CircuitFormatError("exactly one of 'gates' or 'layers' is required")
    try:
        wd, wa = int(doc["width_data"]), int(doc.get("width_ancilla", 0))
        phase = float(doc.get("global_phase", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise CircuitFormatError(f"bad header: {exc}") from exc
    if "gates" in doc:
        gates = [record_to_gate(r, f"gate {i}") for i, r in enumerate(doc["gates"])]
        circuit = Circuit(wd, wa, gates, phase)
    else:
        layers = [[record_to_gate(r, f"layer {li}") for r in layer] for li, layer in enumerate(doc["layers"])]
        circuit = LayeredCircuit(wd, wa, layers, phase)
    problems = validate(circuit)
    if problems:
        raise CircuitFormatError("; ".join(problems))
    return circuit


def dumps(circuit) -> str:
    # json writes floats with repr(), which round-trips exactly
    return json.dumps(to_dict(circuit), indent=1)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitFormatError(f"invalid JSON: {exc}") from exc
    return from_dict(doc)


def save(circuit, path) -> None:
    Path(path).write_text(dumps(circuit) + "\n", encoding="utf-8")


def load(path):
    return loads(Path(path).read_text(encoding="utf-8"))
