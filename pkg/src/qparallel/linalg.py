"""GF(2) bit matrices, unitary diagonalization and the parity (Walsh) transform."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .circuit import EPS_UNITARY

EPS_COMMUTE = 1e-9
PHASE_SEPARATION = 1e-6


class SingularMatrixError(ValueError):
    pass


class NotCommutingError(ValueError):
    def __init__(self, i: int, j: int, norm: float):
        super().__init__(f"matrices {i} and {j} do not commute (commutator max-norm {norm:.3e})")
        self.pair = (i, j)
        self.norm = norm


class NonUnitaryError(ValueError):
    pass


# --------------------------------------------------------------------------
# GF(2)

@dataclass(frozen=True)
class Gf2Matrix:
    """Square matrix over GF(2); bit ``j`` of ``rows[i]`` is entry (i, j)."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        if len(rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(rows)}")
        mask = (1 << self.n) - 1
        if any(r & ~mask for r in rows):
            raise ValueError("row has bits outside the matrix width")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, n: int) -> "Gf2Matrix":
        return cls(n, (0,) * n)

    @classmethod
    def from_array(cls, a) -> "Gf2Matrix":
        a = np.asarray(a, dtype=np.int64) & 1
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix must be square")
        return cls(n, tuple(sum(int(a[i, j]) << j for j in range(n)) for i in range(n)))

    def to_array(self) -> np.ndarray:
        return np.array([[(r >> j) & 1 for j in range(self.n)] for r in self.rows], dtype=np.uint8)

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def support(self, i: int) -> list[int]:
        r = self.rows[i]
        return [j for j in range(self.n) if (r >> j) & 1]

    def apply(self, x: Sequence[int]) -> list[int]:
        xs = sum((int(b) & 1) << j for j, b in enumerate(x))
        return [bin(r & xs).count("1") & 1 for r in self.rows]

    def is_identity(self) -> bool:
        return self == Gf2Matrix.identity(self.n)

    def is_permutation(self) -> bool:
        cols = 0
        for r in self.rows:
            if r == 0 or r & (r - 1):
                return False
            cols |= r
        return cols == (1 << self.n) - 1

    def __matmul__(self, other: "Gf2Matrix") -> "Gf2Matrix":
        return gf2_mul(self, other)


def gf2_mul(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    rows = []
    for r in a.rows:
        acc, j = 0, 0
        while r:
            if r & 1:
                acc ^= b.rows[j]
            r >>= 1
            j += 1
        rows.append(acc)
    return Gf2Matrix(a.n, tuple(rows))


def gf2_invert(m: Gf2Matrix) -> Gf2Matrix:
    """Gauss-Jordan inverse over GF(2)."""
    n = m.n
    work = list(m.rows)
    inv = [1 << i for i in range(n)]
    for col in range(n):
        bit = 1 << col
        pivot = next((r for r in range(col, n) if work[r] & bit), None)
        if pivot is None:
            raise SingularMatrixError(f"matrix is singular over GF(2) (no pivot in column {col})")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for r in range(n):
            if r != col and work[r] & bit:
                work[r] ^= work[col]
                inv[r] ^= inv[col]
    return Gf2Matrix(n, tuple(inv))


def gf2_rank(m: Gf2Matrix) -> int:
    work = list(m.rows)
    rank = 0
    for col in range(m.n):
        bit = 1 << col
        pivot = next((r for r in range(rank, m.n) if work[r] & bit), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        for r in range(m.n):
            if r != rank and work[r] & bit:
                work[r] ^= work[rank]
        rank += 1
    return rank


# --------------------------------------------------------------------------
# unitary diagonalization

def _check_unitary(u: np.ndarray, what="matrix"):
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NonUnitaryError(f"{what} is not square")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > EPS_UNITARY:
        raise NonUnitaryError(f"{what} is not unitary (deviation {err:.3e})")


def _normalize_columns(t: np.ndarray) -> np.ndarray:
    t = t.copy()
    for c in range(t.shape[1]):
        col = t[:, c]
        k = int(np.argmax(np.abs(col) > 1e-12))
        t[:, c] = col * np.exp(-1j * np.angle(col[k]))
    return t


def _phase_order(eigs: np.ndarray) -> np.ndarray:
    return np.argsort(np.mod(np.angle(eigs), 2 * math.pi), kind="stable")


def eig_unitary(u) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(t, d)`` with ``u = t @ d @ t^dagger``, ``t`` unitary, ``d`` diagonal.

    Uses the complex Schur form, which is diagonal for normal matrices and
    keeps degenerate eigenspaces orthonormal. Columns of ``t`` are ordered by
    eigenphase in [0, 2pi); each column's first nonzero entry is real positive.
    """
    u = np.asarray(u, dtype=complex)
    _check_unitary(u, "input")
    tri, z = scipy.linalg.schur(u, output="complex")
    eigs = np.diag(tri)
    eigs = eigs / np.abs(eigs)
    order = _phase_order(eigs)
    t = _normalize_columns(z[:, order])
    return t, np.diag(eigs[order])


def _phase_clusters(eigs: np.ndarray, sep: float) -> list[list[int]]:
    """Group consecutive (phase-sorted) eigenvalues closer than ``sep``."""
    clusters = [[0]]
    for i in range(1, len(eigs)):
        if abs(eigs[i] - eigs[clusters[-1][-1]]) <= sep:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1 and abs(eigs[0] - eigs[-1]) <= sep:
        clusters[0] = clusters.pop() + clusters[0]
    return clusters


def simultaneous_diagonalize(us: Sequence, seed: int = 0) -> tuple[np.ndarray, list[np.ndarray]]:
    """Common eigenbasis ``t`` of pairwise-commuting unitaries.

    Returns ``(t, ds)`` with ``us[i] = t @ ds[i] @ t^dagger``. The basis comes
    from the first input whose eigenphases are separated; degenerate
    eigenspaces are split by a random Hermitian combination of all inputs.
    """
    mats = [np.asarray(u, dtype=complex) for u in us]
    if not mats:
        raise ValueError("need at least one matrix")
    dim = mats[0].shape[0]
    for i, m in enumerate(mats):
        _check_unitary(m, f"matrix {i}")
        if m.shape != (dim, dim):
            raise ValueError("matrices must share one dimension")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            c = np.max(np.abs(mats[i] @ mats[j] - mats[j] @ mats[i]))
            if c > EPS_COMMUTE:
                raise NotCommutingError(i, j, float(c))

    t = np.eye(dim, dtype=complex)
    clusters = [list(range(dim))]
    found = False
    for m in mats:
        tm, dm = eig_unitary(m)
        eigs = np.diag(dm)
        cl = _phase_clusters(eigs, PHASE_SEPARATION)
        if len(cl) > 1:
            t, clusters, found = tm, cl, True
            break

    if found and any(len(c) > 1 for c in clusters):
        rng = np.random.default_rng(seed)
        h = np.zeros((dim, dim), dtype=complex)
        for m in mats:
            a, b = rng.normal(size=2)
            h += a * (m + m.conj().T) / 2 + b * (m - m.conj().T) / 2j
        t = t.copy()
        for cl in clusters:
            if len(cl) < 2:
                continue
            v = t[:, cl]
            _, w = np.linalg.eigh(v.conj().T @ h @ v)
            t[:, cl] = v @ w
        t = _normalize_columns(t)

    ds = []
    for i, m in enumerate(mats):
        inner = t.conj().T @ m @ t
        d = np.diag(np.diag(inner))
        if np.max(np.abs(t @ d @ t.conj().T - m)) > 1e-8:
            raise NotCommutingError(i, i, float(np.max(np.abs(inner - d))))
        ds.append(d)
    return t, ds


# --------------------------------------------------------------------------
# phase vectors and the parity basis

@dataclass(frozen=True)
class PhaseVector:
    """Angles ``omega[x]`` of a diagonal operator, basis index ``x`` with qubit 0 as MSB."""

    n: int
    omega: np.ndarray

    def __post_init__(self):
        w = np.array(self.omega, dtype=float).reshape(-1)
        if len(w) != 1 << self.n:
            raise ValueError(f"phase vector length {len(w)} != 2^{self.n}")
        w.setflags(write=False)
        object.__setattr__(self, "omega", w)

    def __eq__(self, other):
        if not isinstance(other, PhaseVector):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.omega, other.omega)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: "PhaseVector") -> "PhaseVector":
        if self.n != other.n:
            raise ValueError("phase vectors on different qubit counts")
        return PhaseVector(self.n, self.omega + other.omega)

    def distance(self, other: "PhaseVector") -> float:
        """Max elementwise angle difference mod 2pi."""
        from .circuit import angle_distance
        return angle_distance(self.omega, other.omega)


@dataclass(frozen=True)
class SubsetCoefficients:
    """Per-subset coefficients; bit ``q`` of a subset mask selects qubit ``q``."""

    n: int
    theta: dict = field(default_factory=dict)

    def get(self, s: int) -> float:
        return self.theta.get(s, 0.0)


def subset_qubits(s: int, n: int) -> list[int]:
    return [q for q in range(n) if (s >> q) & 1]


def _index_mask(s: int, n: int) -> int:
    """Subset mask re-expressed in basis-index bit positions (qubit 0 = MSB)."""
    return sum(1 << (n - 1 - q) for q in subset_qubits(s, n))


def parity_vector(s: int, n: int) -> np.ndarray:
    """+1 where the qubits of ``s`` hold an even number of ones, -1 where odd."""
    x = np.arange(1 << n)
    m = _index_mask(s, n)
    par = np.zeros(1 << n, dtype=np.int64)
    v = x & m
    while np.any(v):
        par ^= v & 1
        v >>= 1
    return 1 - 2 * par


def fwht(a) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform in natural (Sylvester) order."""
    out = np.array(a, dtype=float)
    size = len(out)
    if size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    h = 1
    while h < size:
        v = out.reshape(-1, 2, h)
        lo, hi = v[:, 0, :].copy(), v[:, 1, :]
        v[:, 0, :] += hi
        v[:, 1, :] = lo - hi
        h *= 2
    return out


def walsh_coefficients(pv: PhaseVector | Sequence[float]) -> SubsetCoefficients:
    """Expand a phase vector in the parity basis: omega = sum_s theta_s * parity_s."""
    omega = pv.omega if isinstance(pv, PhaseVector) else np.asarray(pv, dtype=float)
    size = len(omega)
    if size == 0 or size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    n = size.bit_length() - 1
    spectrum = fwht(omega) / size
    theta = {}
    for s in range(size):
        c = float(spectrum[_index_mask(s, n)])
        if c != 0.0:
            theta[s] = c
    return SubsetCoefficients(n, theta)


def walsh_reconstruct(coeffs: SubsetCoefficients) -> PhaseVector:
    n = coeffs.n
    spectrum = np.zeros(1 << n)
    for s, c in coeffs.theta.items():
        spectrum[_index_mask(s, n)] = c
    return PhaseVector(n, fwht(spectrum))
