"""Brute-force oracles: dense simulation, GF(2) and phase-vector simulation, embedding check."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Cnot, LayeredCircuit
from .linalg import Gf2Matrix, PhaseVector

SIM_MAX_QUBITS = 22
DENSE_MAX_QUBITS = 10
DEFAULT_SEED = 0
EXHAUSTIVE_STATES = 256
_CHUNK_ELEMENTS = 1 << 22


class SimulationSizeError(ValueError):
    pass


class GateKindError(ValueError):
    """A gate outside an oracle's domain (e.g. a Hadamard given to the GF(2) simulator)."""

    def __init__(self, index: int, gate, domain: str):
        super().__init__(f"gate {index} ({gate.kind} on qubits {list(gate.qubits)}) is not {domain}")
        self.index = index
        self.gate = gate


def _as_circuit(circuit) -> Circuit:
    return circuit.flatten() if isinstance(circuit, LayeredCircuit) else circuit


def basis_state(n: int, index: int) -> np.ndarray:
    psi = np.zeros(1 << n, dtype=complex)
    psi[index] = 1.0
    return psi


def _apply_gate(psi: np.ndarray, gate, n: int) -> np.ndarray:
    """Contract one gate into a tensor of shape (2,)*n + (batch,).

    CNOTs and diagonal gates update ``psi`` in place; other gates return a
    new array.
    """
    qs = list(gate.qubits)
    k = len(qs)
    if isinstance(gate, Cnot):
        c, t = qs
        lo = [slice(None)] * psi.ndim
        lo[c] = 1
        hi = list(lo)
        lo[t], hi[t] = 0, 1
        lo, hi = tuple(lo), tuple(hi)
        tmp = psi[lo].copy()
        psi[lo] = psi[hi]
        psi[hi] = tmp
        return psi
    phases = gate.diagonal_phases()
    if phases is not None:
        shape = [1] * psi.ndim
        for q in qs:
            shape[q] = 2
        # transpose needed when support is not in ascending order
        table = np.exp(1j * phases).reshape((2,) * k)
        order = np.argsort(qs)
        table = np.transpose(table, order).reshape(shape)
        psi *= table
        return psi
    g = gate.matrix().reshape((2,) * (2 * k))
    out = np.tensordot(g, psi, axes=(list(range(k, 2 * k)), qs))
    return np.moveaxis(out, list(range(k)), qs)


def apply(circuit, state: np.ndarray, max_qubits: int = SIM_MAX_QUBITS) -> np.ndarray:
    """Apply a circuit to a state vector (shape ``(2^N,)``) or a batch (``(2^N, B)``)."""
    circuit = _as_circuit(circuit)
    n = circuit.n_qubits
    if n > max_qubits:
        raise SimulationSizeError(f"{n} qubits exceeds simulation cap {max_qubits}")
    state = np.asarray(state, dtype=complex)
    single = state.ndim == 1
    batch = state.reshape(1 << n, -1) if not single else state.reshape(-1, 1)
    if batch.shape[0] != 1 << n:
        raise ValueError(f"state length {batch.shape[0]} does not match {n} qubits")
    psi = batch.reshape((2,) * n + (batch.shape[1],)).copy()
    for g in circuit.gates:
        psi = _apply_gate(psi, g, n)
    out = psi.reshape(1 << n, -1)
    if circuit.global_phase:
        out = out * np.exp(1j * circuit.global_phase)
    return out[:, 0] if single else out


def full_unitary(circuit, max_qubits: int = DENSE_MAX_QUBITS) -> np.ndarray:
    circuit = _as_circuit(circuit)
    n = circuit.n_qubits
    if n > max_qubits:
        raise SimulationSizeError(f"{n} qubits exceeds dense cap {max_qubits}")
    return apply(circuit, np.eye(1 << n, dtype=complex))


def gf2_simulate(circuit) -> Gf2Matrix:
    """Linear map ``x -> M x`` of a CNOT circuit over all of its qubits."""
    circuit = _as_circuit(circuit)
    n = circuit.n_qubits
    rows = [1 << i for i in range(n)]
    for idx, g in enumerate(circuit.gates):
        if not isinstance(g, Cnot):
            raise GateKindError(idx, g, "a CNOT")
        rows[g.target] ^= rows[g.control]
    return Gf2Matrix(n, tuple(rows))


def permutation_phases(circuit, max_qubits: int = SIM_MAX_QUBITS,
                       ancilla_zero: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Classical simulation of a CNOT + diagonal circuit.

    Returns ``(perm, phase)`` such that the circuit maps ``|x>`` to
    ``exp(i*phase[x]) |perm[x]>``, global phase included. With
    ``ancilla_zero`` only inputs with every ancilla at 0 are tracked: entry
    ``x`` then refers to data value ``x`` and ``perm`` holds full-register
    indices. The size cap applies to the tracked register only.
    """
    circuit = _as_circuit(circuit)
    n = circuit.n_qubits
    live = circuit.width_data if ancilla_zero else n
    if live > max_qubits:
        raise SimulationSizeError(f"{live} qubits exceeds simulation cap {max_qubits}")
    if n > 62:
        raise SimulationSizeError(f"{n} qubits exceeds the 62-bit index range")
    x = np.arange(1 << live, dtype=np.int64)
    bits = np.zeros((n, 1 << live), dtype=np.int64)
    for q in range(live):
        bits[q] = (x >> (live - 1 - q)) & 1
    phase = np.full(1 << live, circuit.global_phase, dtype=float)
    for idx, g in enumerate(circuit.gates):
        if isinstance(g, Cnot):
            bits[g.target] ^= bits[g.control]
            continue
        table = g.diagonal_phases()
        if table is None:
            raise GateKindError(idx, g, "diagonal or a CNOT")
        local = np.zeros(1 << live, dtype=np.int64)
        for q in g.qubits:
            local = (local << 1) | bits[q]
        phase += table[local]
    perm = np.zeros(1 << live, dtype=np.int64)
    for q in range(n):
        perm = (perm << 1) | bits[q]
    return perm, phase


class NotDiagonalError(ValueError):
    pass


def phase_vector(circuit, max_qubits: int = SIM_MAX_QUBITS) -> PhaseVector:
    """Phase vector of a circuit whose net operator is diagonal.

    Diagonal gates add their phase tables; CNOTs are tracked classically and
    must compose to the identity permutation.
    """
    circuit = _as_circuit(circuit)
    perm, phase = permutation_phases(circuit, max_qubits)
    if np.any(perm != np.arange(len(perm))):
        raise NotDiagonalError("circuit permutes basis states; operator is not diagonal")
    return PhaseVector(circuit.n_qubits, phase)


def embedded_phase_vector(circuit, max_qubits: int = SIM_MAX_QUBITS) -> PhaseVector:
    """Phase vector on the data register with ancillae entering and leaving at 0.

    Only ``2**width_data`` inputs are tracked, so circuits with many
    ancillae stay cheap. Raises ``NotDiagonalError`` if any input is moved
    or an ancilla is left dirty.
    """
    circuit = _as_circuit(circuit)
    perm, phase = permutation_phases(circuit, max_qubits, ancilla_zero=True)
    expected = np.arange(len(perm), dtype=np.int64) << circuit.width_ancilla
    if np.any(perm != expected):
        raise NotDiagonalError("ancilla-zero inputs are not mapped to themselves")
    return PhaseVector(circuit.width_data, phase)


def restrict_ancilla_zero(pv: PhaseVector, width_ancilla: int) -> PhaseVector:
    """Phase vector on the data register with all ancillae held at 0."""
    n = pv.n - width_ancilla
    return PhaseVector(n, pv.omega.reshape(1 << n, 1 << width_ancilla)[:, 0])


@dataclass(frozen=True)
class EmbeddingReport:
    subspace_preserved: bool
    max_leakage: float
    max_block_deviation: float
    global_phase_applied: float
    verdict: bool
    n_states: int
    exhaustive: bool
    seed: int
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "subspace_preserved": self.subspace_preserved,
            "max_leakage": self.max_leakage,
            "max_block_deviation": self.max_block_deviation,
            "global_phase_applied": self.global_phase_applied,
            "verdict": "pass" if self.verdict else "fail",
            "n_states": self.n_states,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
            "tolerance": self.tolerance,
        }


def verify_embedding(reference, candidate, tol: float = 1e-8, seed: int = DEFAULT_SEED,
                     max_qubits: int = SIM_MAX_QUBITS) -> EmbeddingReport:
    """Check that ``candidate`` (with ancillae at 0) acts on the data register as ``reference``.

    ``reference`` is a circuit on ``n`` qubits or a ``2^n x 2^n`` matrix. The
    candidate's qubits beyond ``n`` are ancillae. A single global phase,
    estimated from the first test state, is allowed and reported.
    """
    candidate = _as_circuit(candidate)
    if isinstance(reference, np.ndarray):
        ref_mat = reference
        n = int(round(math.log2(ref_mat.shape[0])))
        ref_apply = lambda s: ref_mat @ s  # noqa: E731
    else:
        reference = _as_circuit(reference)
        n = reference.n_qubits
        ref_apply = lambda s: apply(reference, s, max_qubits)  # noqa: E731
    total = candidate.n_qubits
    if total < n:
        raise ValueError(f"candidate has {total} qubits, reference needs {n}")
    if total > max_qubits:
        raise SimulationSizeError(f"{total} qubits exceeds simulation cap {max_qubits}")
    m = total - n
    dim_d = 1 << n

    exhaustive = dim_d <= EXHAUSTIVE_STATES
    if exhaustive:
        data_states = np.eye(dim_d, dtype=complex)
    else:
        rng = np.random.default_rng(seed)
        data_states = rng.normal(size=(dim_d, EXHAUSTIVE_STATES)) + 1j * rng.normal(size=(dim_d, EXHAUSTIVE_STATES))
        data_states /= np.linalg.norm(data_states, axis=0)
    n_states = data_states.shape[1]

    chunk = max(1, _CHUNK_ELEMENTS >> total)
    leakage, deviation, phase = 0.0, 0.0, None
    for start in range(0, n_states, chunk):
        block = data_states[:, start:start + chunk]
        full = np.zeros((dim_d, 1 << m, block.shape[1]), dtype=complex)
        full[:, 0, :] = block
        out = apply(candidate, full.reshape(1 << total, -1), max_qubits).reshape(dim_d, 1 << m, -1)
        if m:
            leakage = max(leakage, float(np.max(np.abs(out[:, 1:, :]))))
        cand = out[:, 0, :]
        ref = ref_apply(block)
        if phase is None:
            overlaps = np.einsum("ij,ij->j", ref.conj(), cand)
            k = int(np.argmax(np.abs(overlaps) > 1e-6)) if np.any(np.abs(overlaps) > 1e-6) else 0
            phase = float(np.angle(overlaps[k])) if abs(overlaps[k]) > 1e-6 else 0.0
        deviation = max(deviation, float(np.max(np.abs(cand - np.exp(1j * phase) * ref))))
    ok = leakage <= tol and deviation <= tol
    return EmbeddingReport(
        subspace_preserved=leakage <= tol,
        max_leakage=leakage,
        max_block_deviation=deviation,
        global_phase_applied=phase or 0.0,
        verdict=ok,
        n_states=n_states,
        exhaustive=exhaustive,
        seed=seed,
        tolerance=tol,
    )
