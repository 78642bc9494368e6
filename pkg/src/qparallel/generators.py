"""Named circuit families used as test subjects and demonstrations."""
from __future__ import annotations

import math

import numpy as np

from .circuit import (
    Circuit,
    Cnot,
    ControlledU,
    Diagonal,
    OneQubit,
    Permutation,
    SymmetricPhase,
)
from .linalg import _check_unitary

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
NAMED_UNITARIES = {
    "hadamard": HADAMARD,
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "z": np.diag([1, -1]).astype(complex),
    "s": np.diag([1, 1j]),
    "t": np.diag([1, np.exp(1j * math.pi / 4)]),
}
FAMILIES = ("cnot", "diagonal-2q", "controlled-commuting", "permutation")


def gen_qft(n: int) -> Circuit:
    """QFT without the final bit reversal.

    Gate order is Hadamard on qubit j, then the phase gates from qubits k > j;
    greedy layering puts Hadamard j at layer 2j and the (j, k) phase at layer
    j + k, giving 2n - 1 layers. Output qubit order is reversed relative to
    the DFT (see ``qft_reference``).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    gates = []
    for j in range(n):
        gates.append(OneQubit(j, HADAMARD))
        for k in range(j + 1, n):
            gates.append(SymmetricPhase(j, k, math.pi / 2 ** (k - j)))
    return Circuit(n, 0, gates)


def bit_reversal_matrix(n: int) -> np.ndarray:
    dim = 1 << n
    m = np.zeros((dim, dim))
    for x in range(dim):
        m[int(format(x, f"0{n}b")[::-1], 2) if n else 0, x] = 1
    return m


def dft_matrix(n: int) -> np.ndarray:
    dim = 1 << n
    j, k = np.meshgrid(np.arange(dim), np.arange(dim), indexing="ij")
    return np.exp(2j * math.pi * j * k / dim) / math.sqrt(dim)


def qft_reference(n: int) -> np.ndarray:
    """Operator of ``gen_qft(n)``: the DFT followed by bit reversal of the output."""
    return bit_reversal_matrix(n) @ dft_matrix(n)


def gen_staircase(n: int, u) -> Circuit:
    if n < 2:
        raise ValueError("staircase needs n >= 2")
    u = np.asarray(u, dtype=complex)
    _check_unitary(u, "staircase operator")
    return Circuit(n, 0, [ControlledU(i, i + 1, u) for i in range(n - 1)])


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary from the QR of a complex Gaussian matrix."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_permutation(n: int, seed: int) -> Permutation:
    rng = np.random.default_rng(seed)
    return Permutation(tuple(int(i) for i in rng.permutation(n)))


def swap_network(p: Permutation) -> Circuit:
    """Serial swap circuit realizing ``p`` (one transposition at a time)."""
    gates = []
    for cyc in p.cycles():
        # swapping c0 with c1, c2, ... in turn advances every element one step
        for i in range(1, len(cyc)):
            a, b = cyc[0], cyc[i]
            gates += [Cnot(a, b), Cnot(b, a), Cnot(a, b)]
    return Circuit(p.n, 0, gates)


def gen_random(family: str, n: int, count: int = 0, seed: int = 0):
    """Seeded random instance; ``permutation`` returns a :class:`Permutation`."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if family == "permutation":
        return Permutation(tuple(int(i) for i in rng.permutation(n)))
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    if n < 2:
        raise ValueError(f"family {family!r} needs n >= 2")
    gates = []
    if family == "cnot":
        for _ in range(count):
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(Cnot(int(c), int(t)))
    elif family == "diagonal-2q":
        for _ in range(count):
            a, b = (int(q) for q in rng.choice(n, size=2, replace=False))
            if rng.random() < 0.5:
                gates.append(SymmetricPhase(a, b, rng.uniform(0, 2 * math.pi)))
            else:
                gates.append(Diagonal((a, b), rng.uniform(0, 2 * math.pi, size=4)))
    else:
        target = n - 1
        controls = [int(q) for q in rng.permutation(n - 1)]
        t = random_unitary(2, rng)
        for i in range(count):
            d = np.diag(np.exp(1j * rng.uniform(0, 2 * math.pi, size=2)))
            gates.append(ControlledU(controls[i % len(controls)], target, t @ d @ t.conj().T))
    return Circuit(n, 0, gates)
