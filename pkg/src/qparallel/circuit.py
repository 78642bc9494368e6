"""Circuit IR: gates, circuits, layered circuits and greedy layer scheduling.

Qubit ``0`` is the most significant bit of a basis index. Ancillae occupy the
high index range ``n .. n+m-1`` of a circuit with ``n`` data qubits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence, Union

import numpy as np

EPS_UNITARY = 1e-10
TWO_PI = 2.0 * math.pi


class InvalidCircuitError(ValueError):
    """Raised when an operation receives a circuit that fails ``validate``."""


def wrap_angle(theta):
    """Reduce angles to (-pi, pi]; works elementwise on arrays."""
    r = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    return float(r) if np.ndim(r) == 0 else r


def angle_distance(a, b):
    """Distance between angles on the circle (max over elements)."""
    return float(np.max(np.abs(wrap_angle(np.asarray(a) - np.asarray(b))), initial=0.0))


def _as_matrix(u) -> np.ndarray:
    m = np.array(u, dtype=complex)
    m.setflags(write=False)
    return m


class _GateBase:
    """Shared equality/repr for gate dataclasses holding numpy payloads."""

    kind: str = ""

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if np.shape(a) != np.shape(b) or not np.array_equal(a, b):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    @property
    def qubits(self) -> tuple[int, ...]:
        raise NotImplementedError

    def matrix(self) -> np.ndarray:
        """Unitary on the gate support, first support qubit most significant."""
        raise NotImplementedError

    def diagonal_phases(self) -> np.ndarray | None:
        """Phase table over the support if the gate is diagonal, else ``None``."""
        m = self.matrix()
        off = m - np.diag(np.diag(m))
        if np.max(np.abs(off), initial=0.0) > EPS_UNITARY:
            return None
        return np.angle(np.diag(m))

    def remap(self, mapping: dict[int, int]):
        """Copy of the gate with qubit indices substituted through ``mapping``."""
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class OneQubit(_GateBase):
    q: int
    u: np.ndarray

    kind = "one_qubit"

    def __post_init__(self):
        object.__setattr__(self, "u", _as_matrix(self.u))

    @property
    def qubits(self):
        return (self.q,)

    def matrix(self):
        return self.u

    def remap(self, mapping):
        return OneQubit(mapping.get(self.q, self.q), self.u)


@dataclass(frozen=True, eq=False)
class ControlledU(_GateBase):
    control: int
    target: int
    u: np.ndarray

    kind = "controlled_u"

    def __post_init__(self):
        object.__setattr__(self, "u", _as_matrix(self.u))

    @property
    def qubits(self):
        return (self.control, self.target)

    def matrix(self):
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = self.u
        return m

    def remap(self, mapping):
        return ControlledU(mapping.get(self.control, self.control),
                           mapping.get(self.target, self.target), self.u)


@dataclass(frozen=True, eq=False)
class Cnot(_GateBase):
    control: int
    target: int

    kind = "cnot"

    @property
    def qubits(self):
        return (self.control, self.target)

    def matrix(self):
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = [[0, 1], [1, 0]]
        return m

    def diagonal_phases(self):
        return None

    def remap(self, mapping):
        return Cnot(mapping.get(self.control, self.control),
                    mapping.get(self.target, self.target))


@dataclass(frozen=True, eq=False)
class SymmetricPhase(_GateBase):
    q1: int
    q2: int
    theta: float

    kind = "symmetric_phase"

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta))

    @property
    def qubits(self):
        return (self.q1, self.q2)

    def matrix(self):
        return np.diag(np.exp(1j * self.diagonal_phases()))

    def diagonal_phases(self):
        return np.array([0.0, 0.0, 0.0, self.theta])

    def remap(self, mapping):
        return SymmetricPhase(mapping.get(self.q1, self.q1),
                              mapping.get(self.q2, self.q2), self.theta)


@dataclass(frozen=True, eq=False)
class Diagonal(_GateBase):
    """k-qubit diagonal gate; ``phases[b]`` applies to local basis index ``b``."""

    qubit_list: tuple[int, ...]
    phases: np.ndarray

    kind = "diagonal"

    def __post_init__(self):
        object.__setattr__(self, "qubit_list", tuple(int(q) for q in self.qubit_list))
        p = np.array(self.phases, dtype=float).reshape(-1)
        p.setflags(write=False)
        object.__setattr__(self, "phases", p)

    @property
    def qubits(self):
        return self.qubit_list

    def matrix(self):
        return np.diag(np.exp(1j * self.phases))

    def diagonal_phases(self):
        return np.array(self.phases)

    def remap(self, mapping):
        return Diagonal(tuple(mapping.get(q, q) for q in self.qubit_list), self.phases)


@dataclass(frozen=True, eq=False)
class Unitary(_GateBase):
    """Dense unitary on an ordered list of qubits (used for multi-qubit basis changes)."""

    qubit_list: tuple[int, ...]
    u: np.ndarray

    kind = "unitary"

    def __post_init__(self):
        object.__setattr__(self, "qubit_list", tuple(int(q) for q in self.qubit_list))
        object.__setattr__(self, "u", _as_matrix(self.u))

    @property
    def qubits(self):
        return self.qubit_list

    def matrix(self):
        return self.u

    def remap(self, mapping):
        return Unitary(tuple(mapping.get(q, q) for q in self.qubit_list), self.u)


Gate = Union[OneQubit, ControlledU, Cnot, SymmetricPhase, Diagonal, Unitary]
GATE_TYPES = (OneQubit, ControlledU, Cnot, SymmetricPhase, Diagonal, Unitary)


def is_identity_gate(gate: Gate, atol: float = 1e-12) -> bool:
    if isinstance(gate, Cnot):
        return False
    m = gate.matrix()
    return bool(np.allclose(m, np.eye(m.shape[0]), atol=atol, rtol=0))


@dataclass(frozen=True)
class Circuit:
    width_data: int
    width_ancilla: int = 0
    gates: tuple = ()
    global_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "global_phase", float(self.global_phase))

    @property
    def n_qubits(self) -> int:
        return self.width_data + self.width_ancilla

    def __len__(self):
        return len(self.gates)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.width_data, self.width_ancilla, tuple(gates), self.global_phase)


@dataclass(frozen=True)
class LayeredCircuit:
    width_data: int
    width_ancilla: int = 0
    layers: tuple = ()
    global_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        object.__setattr__(self, "global_phase", float(self.global_phase))

    @property
    def n_qubits(self) -> int:
        return self.width_data + self.width_ancilla

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gates(self) -> tuple:
        return tuple(g for layer in self.layers for g in layer)

    def flatten(self) -> Circuit:
        return Circuit(self.width_data, self.width_ancilla, self.gates, self.global_phase)


@dataclass(frozen=True)
class Permutation:
    """Qubit permutation: the state on wire ``i`` moves to wire ``images[i]``."""

    images: tuple[int, ...] = field(default=())

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"not a permutation of 0..{len(imgs) - 1}: {imgs}")
        object.__setattr__(self, "images", imgs)

    @property
    def n(self) -> int:
        return len(self.images)

    def is_identity(self) -> bool:
        return all(i == p for i, p in enumerate(self.images))

    def cycles(self) -> list[list[int]]:
        """Non-trivial cycles, each listed as ``c0 -> c1 -> ...``."""
        seen = [False] * self.n
        out = []
        for start in range(self.n):
            if seen[start] or self.images[start] == start:
                seen[start] = True
                continue
            cyc, i = [], start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.images[i]
            out.append(cyc)
        return out

    def apply_to_index(self, x: int) -> int:
        """Basis index after moving wire contents (qubit 0 is the MSB)."""
        n = self.n
        y = 0
        for i, p in enumerate(self.images):
            if (x >> (n - 1 - i)) & 1:
                y |= 1 << (n - 1 - p)
        return y

    def matrix(self) -> np.ndarray:
        dim = 1 << self.n
        m = np.zeros((dim, dim), dtype=complex)
        for x in range(dim):
            m[self.apply_to_index(x), x] = 1.0
        return m


def validate(circuit: Circuit | LayeredCircuit) -> list[str]:
    """List every invariant violation; an empty list means the circuit is valid."""
    problems = []
    if circuit.width_data < 1:
        problems.append(f"width_data must be >= 1, got {circuit.width_data}")
    if circuit.width_ancilla < 0:
        problems.append(f"width_ancilla must be >= 0, got {circuit.width_ancilla}")
    total = circuit.n_qubits
    for idx, g in enumerate(circuit.gates):
        if not isinstance(g, GATE_TYPES):
            problems.append(f"unknown gate type {type(g).__name__} at gate {idx}")
            continue
        qs = g.qubits
        if len(set(qs)) != len(qs):
            problems.append(f"duplicate qubit index at gate {idx}")
        if any(q < 0 or q >= total for q in qs):
            problems.append(f"qubit index out of range at gate {idx}")
        if isinstance(g, Diagonal):
            if len(qs) < 1 or len(g.phases) != 1 << len(qs):
                problems.append(f"diagonal phase count mismatch at gate {idx}")
            continue
        if isinstance(g, (OneQubit, ControlledU)):
            u = g.u
            if u.shape != (2, 2):
                problems.append(f"bad matrix shape at gate {idx}")
                continue
        elif isinstance(g, Unitary):
            u = g.u
            if u.shape != (1 << len(qs),) * 2:
                problems.append(f"bad matrix shape at gate {idx}")
                continue
        else:
            continue
        if not np.all(np.isfinite(u)) or np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) > EPS_UNITARY:
            problems.append(f"non-unitary at gate {idx}")
    if isinstance(circuit, LayeredCircuit):
        offset = 0
        for li, layer in enumerate(circuit.layers):
            used: set[int] = set()
            for g in layer:
                qs = set(g.qubits)
                if used & qs:
                    problems.append(f"overlapping supports in layer {li} at gate {offset}")
                used |= qs
                offset += 1
    return problems


def _require_valid(circuit):
    problems = validate(circuit)
    if problems:
        raise InvalidCircuitError("; ".join(problems))


def schedule_greedy(circuit: Circuit) -> LayeredCircuit:
    """As-soon-as-possible layering; gates only move past disjoint gates."""
    _require_valid(circuit)
    last = [-1] * circuit.n_qubits
    layers: list[list] = []
    for g in circuit.gates:
        lvl = 1 + max(last[q] for q in g.qubits)
        if lvl == len(layers):
            layers.append([])
        layers[lvl].append(g)
        for q in g.qubits:
            last[q] = lvl
    return LayeredCircuit(circuit.width_data, circuit.width_ancilla, layers, circuit.global_phase)


def schedule_commuting(circuit: Circuit) -> LayeredCircuit:
    """Layer mutually commuting gates by repeated greedy maximal packing.

    Only valid when every pair of gates commutes (e.g. all diagonal), since
    gates are reordered freely. A gate is rejected from a layer only because a
    conflicting gate already sits there, so depth is at most one more than the
    largest number of gates any single gate conflicts with.
    """
    _require_valid(circuit)
    remaining = list(circuit.gates)
    layers = []
    while remaining:
        used: set[int] = set()
        layer, rest = [], []
        for g in remaining:
            if used.isdisjoint(g.qubits):
                layer.append(g)
                used.update(g.qubits)
            else:
                rest.append(g)
        layers.append(layer)
        remaining = rest
    return LayeredCircuit(circuit.width_data, circuit.width_ancilla, layers, circuit.global_phase)


def depth(layered: LayeredCircuit) -> int:
    return len(layered.layers)


def longest_overlap_chain(gates: Sequence[Gate]) -> int:
    """Longest chain of gates in which consecutive members share a qubit.

    Quadratic dynamic program over the support-overlap DAG; independent of
    the per-qubit bookkeeping used by ``schedule_greedy``.
    """
    best = []
    for i, g in enumerate(gates):
        s = set(g.qubits)
        prev = [best[j] for j in range(i) if s & set(gates[j].qubits)]
        best.append(1 + max(prev, default=0))
    return max(best, default=0)
