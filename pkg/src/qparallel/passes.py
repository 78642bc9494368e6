"""Depth-reducing rewrites.

Every pass returns a :class:`PassResult` whose circuit keeps the input's qubits
as data and appends ancillae after them. Ancillae start and end in ``|0>``.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import (
    TWO_PI,
    Circuit,
    Cnot,
    ControlledU,
    Diagonal,
    LayeredCircuit,
    OneQubit,
    Permutation,
    Unitary,
    is_identity_gate,
    schedule_commuting,
    schedule_greedy,
    validate,
)
from .linalg import (
    PhaseVector,
    eig_unitary,
    gf2_invert,
    simultaneous_diagonalize,
    subset_qubits,
    walsh_coefficients,
)
from .simulator import gf2_simulate

MORSE_MAX_N = 10
PRUNE_EPS = 1e-12
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)


class PreconditionError(ValueError):
    """Input does not satisfy a pass precondition."""


@dataclass(frozen=True)
class PassResult:
    circuit: LayeredCircuit
    ancillae_used: int
    claimed_depth_bound: int
    notes: str = ""

    @property
    def depth(self) -> int:
        return self.circuit.depth


def clog2(n: int) -> int:
    return 0 if n <= 1 else (n - 1).bit_length()


def _check_valid(circuit: Circuit):
    problems = validate(circuit)
    if problems:
        raise PreconditionError("; ".join(problems))


def _result(n_data, n_anc, gates, bound, notes, global_phase=0.0) -> PassResult:
    layered = schedule_greedy(Circuit(n_data, n_anc, gates, global_phase))
    return PassResult(layered, n_anc, bound, notes)


class _Ancillae:
    def __init__(self, first: int):
        self.next = first
        self.first = first

    def take(self, k: int = 1) -> list[int]:
        out = list(range(self.next, self.next + k))
        self.next += k
        return out

    @property
    def count(self) -> int:
        return self.next - self.first


def copy_tree(root: int, targets: Sequence[int]) -> list[list[Cnot]]:
    """Doubling fan-out of ``root`` onto zeroed ``targets``.

    Each layer every current holder (root first) copies onto one new target,
    so ``k`` targets take ``ceil(log2(k + 1))`` layers.
    """
    holders, pending, layers = [root], list(targets), []
    while pending:
        layer = []
        for h in list(holders):
            if not pending:
                break
            a = pending.pop(0)
            layer.append(Cnot(h, a))
            holders.append(a)
        layers.append(layer)
    return layers


def _zip_layers(trees: Sequence[list[list]]) -> list[list]:
    depth = max((len(t) for t in trees), default=0)
    return [[g for t in trees if i < len(t) for g in t[i]] for i in range(depth)]


def _flat(layers) -> list:
    return [g for layer in layers for g in layer]


# --------------------------------------------------------------------------
# permutations

def permute_with_ancillae(p: Permutation) -> PassResult:
    """Four CNOT layers through ``n`` ancillae: copy out, clear, copy back permuted, clear."""
    n = p.n
    if n < 1:
        raise PreconditionError("permutation must act on at least one qubit")
    moved = [i for i in range(n) if p.images[i] != i]
    anc = {i: n + i for i in range(n)}
    gates = (
        [Cnot(i, anc[i]) for i in moved]
        + [Cnot(anc[i], i) for i in moved]
        + [Cnot(anc[i], p.images[i]) for i in moved]
        + [Cnot(p.images[i], anc[i]) for i in moved]
    )
    notes = "all fixed points elided" if not moved else f"{n - len(moved)} fixed points elided"
    return _result(n, n, gates, 4, notes)


def swap_gates(a: int, b: int) -> list[Cnot]:
    return [Cnot(a, b), Cnot(b, a), Cnot(a, b)]


def reflection_pairs(p: Permutation) -> tuple[list[tuple[int, int]], list[tuple[int, int]]]:
    """Split ``p`` into two sets of disjoint transpositions (first applied first).

    For a cycle ``c0 -> c1 -> ... -> c(L-1)`` the first reflection exchanges
    positions ``k`` and ``-k``, the second ``k`` and ``1-k`` (indices mod L);
    their composition advances every position by one.
    """
    first, second = [], []
    for cyc in p.cycles():
        length = len(cyc)
        for k in range(1, (length + 1) // 2):
            a, b = k, (-k) % length
            if a < b:
                first.append((cyc[a], cyc[b]))
        for k in range(length):
            a, b = k, (1 - k) % length
            if a < b:
                second.append((cyc[a], cyc[b]))
    return first, second


def permute_no_ancillae(p: Permutation) -> PassResult:
    n = p.n
    if n < 1:
        raise PreconditionError("permutation must act on at least one qubit")
    first, second = reflection_pairs(p)
    gates = []
    for pairs in (first, second):
        for i in range(3):
            gates += [swap_gates(a, b)[i] for a, b in pairs]
    return _result(n, 0, gates, 6, f"{len(first)} + {len(second)} parallel swaps")


def permutation_from_circuit(circuit: Circuit) -> Permutation:
    """Recover the qubit permutation realized by a CNOT circuit (e.g. a swap network)."""
    m = gf2_simulate(circuit)
    if not m.is_permutation():
        raise PreconditionError("CNOT circuit does not realize a qubit permutation")
    images = [0] * m.n
    for i in range(m.n):
        j = m.support(i)[0]
        images[j] = i
    return Permutation(tuple(images))


# --------------------------------------------------------------------------
# fan-out and fan-in

def _shared_qubit(gates, what: str, pick) -> int:
    if not gates:
        raise PreconditionError("no gates to parallelize")
    common = set(pick(gates[0]))
    for g in gates[1:]:
        common &= set(pick(g))
    if not common:
        raise PreconditionError(f"gates do not share a common {what}")
    return min(common)


def fanout_parallelize(circuit: Circuit) -> PassResult:
    """Copy the shared control onto ``n-1`` ancillae, fire all gates at once, uncopy."""
    _check_valid(circuit)
    gates = list(circuit.gates)
    for idx, g in enumerate(gates):
        if not isinstance(g, (ControlledU, Cnot)):
            raise PreconditionError(f"gate {idx} ({g.kind}) is not a controlled gate")
    c = _shared_qubit(gates, "control", lambda g: [g.control])
    targets = [g.target for g in gates]
    if len(set(targets)) != len(targets) or c in targets:
        raise PreconditionError("targets must be pairwise distinct and differ from the control")
    n = circuit.n_qubits
    k = len(gates)
    anc = list(range(n, n + k - 1))
    tree = copy_tree(c, anc)
    holders = [c] + anc
    body = [g.remap({c: h}) for g, h in zip(gates, holders)]
    out = _flat(tree) + body + _flat(reversed(tree))
    return _result(n, k - 1, out, 2 * clog2(k) + 1,
                   f"fan-out of qubit {c} to {k} holders", circuit.global_phase)


def _as_diagonal(g, idx: int) -> Diagonal:
    phases = g.diagonal_phases()
    if phases is None:
        raise PreconditionError(f"gate {idx} ({g.kind} on qubits {list(g.qubits)}) is not diagonal")
    return Diagonal(g.qubits, phases)


def _register_fanin(register: Sequence[int], gates: Sequence[Diagonal], alloc: _Ancillae):
    """Give each diagonal gate its own entangled copy of ``register``.

    Returns (copy layers, remapped gates); the caller appends the reversed
    copy layers to uncopy.
    """
    k = len(gates)
    trees, holders = [], {}
    for r in register:
        anc = alloc.take(k - 1)
        trees.append(copy_tree(r, anc))
        holders[r] = [r] + anc
    body = [g.remap({r: holders[r][i] for r in register}) for i, g in enumerate(gates)]
    return _zip_layers(trees), body


def diag_fanin_parallelize(circuit: Circuit) -> PassResult:
    """Parallelize diagonal gates that all touch one shared qubit."""
    _check_valid(circuit)
    gates = [_as_diagonal(g, i) for i, g in enumerate(circuit.gates)]
    s = _shared_qubit(gates, "qubit", lambda g: g.qubits)
    others = [q for g in gates for q in g.qubits if q != s]
    if len(set(others)) != len(others):
        raise PreconditionError("gates must couple the shared qubit to pairwise distinct qubits")
    n = circuit.n_qubits
    alloc = _Ancillae(n)
    tree, body = _register_fanin([s], gates, alloc)
    out = _flat(tree) + body + _flat(reversed(tree))
    return _result(n, alloc.count, out, 2 * clog2(len(gates)) + 1,
                   f"{len(gates)} diagonal gates fanned in on qubit {s}", circuit.global_phase)


def _controlled_diagonal(control: int, target: int, d: np.ndarray) -> Diagonal:
    phi = np.angle(np.diag(d))
    return Diagonal((control, target), [0.0, 0.0, phi[0], phi[1]])


def commuting_fanin_parallelize(circuit: Circuit) -> PassResult:
    """Controlled gates with mutually commuting U on one target.

    The target is rotated into the common eigenbasis, the now-diagonal
    controlled gates are fanned in, and the basis change is undone.
    """
    _check_valid(circuit)
    gates = list(circuit.gates)
    for idx, g in enumerate(gates):
        if not isinstance(g, (ControlledU, Cnot)):
            raise PreconditionError(f"gate {idx} ({g.kind}) is not a controlled gate")
    tgt = _shared_qubit(gates, "target", lambda g: [g.target])
    controls = [g.control for g in gates]
    if len(set(controls)) != len(controls):
        raise PreconditionError("controls must be pairwise distinct")
    us = [g.u if isinstance(g, ControlledU) else PAULI_X for g in gates]
    t, ds = simultaneous_diagonalize(us)
    n = circuit.n_qubits
    alloc = _Ancillae(n)
    diag = [_controlled_diagonal(c, tgt, d) for c, d in zip(controls, ds)]
    tree, body = _register_fanin([tgt], diag, alloc)
    pre, post = OneQubit(tgt, t.conj().T), OneQubit(tgt, t)
    basis = [] if is_identity_gate(pre) else [pre]
    closing = [] if is_identity_gate(post) else [post]
    out = basis + _flat(tree) + body + _flat(reversed(tree)) + closing
    notes = f"{len(gates)} commuting gates on target {tgt}"
    if not basis:
        notes += "; identity basis change elided"
    return _result(n, alloc.count, out, 2 * clog2(len(gates)) + 3, notes, circuit.global_phase)


def _basis_gate(qubits: Sequence[int], u: np.ndarray):
    return OneQubit(qubits[0], u) if len(qubits) == 1 else Unitary(tuple(qubits), u)


def power_circuit(u, k: int) -> PassResult:
    """Apply ``U^q`` to a target register, ``q`` read in binary from ``k`` controls.

    Qubit 0 is the most significant control bit. Controls are qubits
    ``0..k-1``; the target register follows.
    """
    u = np.asarray(u, dtype=complex)
    if k < 1:
        raise PreconditionError("need at least one control qubit")
    dim = u.shape[0]
    t_qubits = int(round(math.log2(dim))) if dim else 0
    if dim < 2 or 1 << t_qubits != dim:
        raise PreconditionError("operator dimension must be a power of two")
    try:
        t, d = eig_unitary(u)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from exc
    phi = np.angle(np.diag(d))
    n = k + t_qubits
    register = list(range(k, n))
    diag = []
    for j in range(k):
        power = 1 << (k - 1 - j)
        phases = np.concatenate([np.zeros(dim), power * phi])
        g = Diagonal((j, *register), phases)
        if not is_identity_gate(g):
            diag.append(g)
    notes = f"{len(diag)} controlled powers"
    if not diag:
        return _result(n, 0, [], 0, notes + "; operator is identity")
    alloc = _Ancillae(n)
    tree, body = _register_fanin(register, diag, alloc)
    pre, post = _basis_gate(register, t.conj().T), _basis_gate(register, t)
    basis = [] if is_identity_gate(pre) else [pre]
    closing = [] if is_identity_gate(post) else [post]
    out = basis + _flat(tree) + body + _flat(reversed(tree)) + closing
    return _result(n, alloc.count, out, 2 * clog2(len(diag)) + 3, notes)


def power_reference(u, k: int) -> np.ndarray:
    """Block-diagonal ``sum_q |q><q| (x) U^q`` (direct matrix powers)."""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    out = np.zeros(((1 << k) * dim,) * 2, dtype=complex)
    p = np.eye(dim, dtype=complex)
    for q in range(1 << k):
        out[q * dim:(q + 1) * dim, q * dim:(q + 1) * dim] = p
        p = p @ u
    return out


# --------------------------------------------------------------------------
# commuting (diagonal) circuit compression

def merge_diagonals(gates: Sequence) -> list[Diagonal]:
    """One gate per occupied qubit tuple (sorted), phases summed mod 2pi; identities dropped."""
    tables: dict[tuple[int, ...], np.ndarray] = {}
    for idx, g in enumerate(gates):
        dg = _as_diagonal(g, idx)
        qs = dg.qubits
        key = tuple(sorted(qs))
        k = len(qs)
        table = dg.phases.reshape((2,) * k)
        table = np.transpose(table, np.argsort(qs)).reshape(-1)
        tables[key] = tables.get(key, 0.0) + table
    out = []
    for key, table in sorted(tables.items(), key=lambda kv: (len(kv[0]), kv[0])):
        g = Diagonal(key, np.mod(table, TWO_PI))
        if not is_identity_gate(g):
            out.append(g)
    return out


def diag_compress(circuit: Circuit, log_depth: bool = False) -> PassResult:
    """Merge commuting diagonal gates per qubit tuple and pack them into layers.

    With ``log_depth`` each qubit is fanned out to one copy per merged gate
    that touches it, so all merged gates fire in a single layer.
    """
    _check_valid(circuit)
    merged = merge_diagonals(circuit.gates)
    n = circuit.n_qubits
    if not merged:
        return PassResult(LayeredCircuit(n, 0, [], circuit.global_phase), 0, 0, "all gates cancel")
    degree: dict[int, int] = defaultdict(int)
    for g in merged:
        for q in g.qubits:
            degree[q] += 1
    max_deg = max(degree.values())
    k = max(len(g.qubits) for g in merged)
    if not log_depth:
        layered = schedule_commuting(Circuit(n, 0, merged, circuit.global_phase))
        bound = min(len(merged), k * (max_deg - 1) + 1)
        return PassResult(layered, 0, bound, f"{len(merged)} merged tuples, greedy packing")

    alloc = _Ancillae(n)
    trees, holders = [], {}
    for q in sorted(degree):
        anc = alloc.take(degree[q] - 1)
        trees.append(copy_tree(q, anc))
        holders[q] = [q] + anc
    used: dict[int, int] = defaultdict(int)
    body = []
    for g in merged:
        mapping = {}
        for q in g.qubits:
            mapping[q] = holders[q][used[q]]
            used[q] += 1
        body.append(g.remap(mapping))
    tree = _zip_layers(trees)
    out = _flat(tree) + body + _flat(reversed(tree))
    notes = (f"{len(merged)} merged tuples; per-qubit fan-out, max degree {max_deg}, "
             f"{alloc.count} ancillae")
    return _result(n, alloc.count, out, 2 * clog2(max_deg) + 1, notes, circuit.global_phase)


# --------------------------------------------------------------------------
# CNOT circuits

class _SumTrees:
    """Per-row balanced XOR trees over zeroed ancillae.

    ``leaves[row]`` lists the qubits holding the row's summands. Each internal
    node gets a fresh ancilla filled from its left then right child.
    """

    def __init__(self, leaves: list[list[int]], alloc: _Ancillae):
        self.levels: list[list[tuple[int, int, int]]] = []
        self.roots: list[int] = []
        per_row = []
        for row in leaves:
            nodes, lv = list(row), 0
            while len(nodes) > 1:
                nxt = []
                for i in range(0, len(nodes) - 1, 2):
                    f = alloc.take()[0]
                    while len(self.levels) <= lv:
                        self.levels.append([])
                    self.levels[lv].append((f, nodes[i], nodes[i + 1]))
                    nxt.append(f)
                if len(nodes) % 2:
                    nxt.append(nodes[-1])
                nodes, lv = nxt, lv + 1
            per_row.append(nodes[0])
        self.roots = per_row

    def build(self) -> list[Cnot]:
        out = []
        for level in self.levels:
            out += [Cnot(a, f) for f, a, _ in level]
            out += [Cnot(b, f) for f, _, b in level]
        return out

    def unbuild(self, keep_roots: bool) -> list[Cnot]:
        keep = set(self.roots) if keep_roots else set()
        out = []
        for level in reversed(self.levels):
            nodes = [t for t in level if t[0] not in keep]
            out += [Cnot(b, f) for f, _, b in nodes]
            out += [Cnot(a, f) for f, a, _ in nodes]
        return out


def _leaf_copies(supports: list[list[int]], sources: Sequence[int], alloc: _Ancillae,
                 dedicated_singletons: bool):
    """Assign a holder to every (row, summand) slot and build the copy trees.

    The source qubit itself serves one non-singleton slot; other slots get
    fresh copies. With ``dedicated_singletons`` a one-term row always gets a
    fresh copy (it becomes a persistent output node). Returns (leaves per
    row, copy-tree layers per source, fresh singleton holders).
    """
    slots: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for r, sup in enumerate(supports):
        for pos, j in enumerate(sup):
            slots[j].append((r, pos))
    leaves = [[None] * len(sup) for sup in supports]
    trees, singles = [], set()
    for j in sorted(slots):
        src = sources[j]
        fresh = []
        own_used = False
        for r, pos in slots[j]:
            single = len(supports[r]) == 1
            if not own_used and not (single and dedicated_singletons):
                leaves[r][pos] = src
                own_used = True
            else:
                a = alloc.take()[0]
                leaves[r][pos] = a
                fresh.append(a)
                if single and dedicated_singletons:
                    singles.add(a)
        trees.append(copy_tree(src, fresh))
    return leaves, trees, singles


def _uncopy(trees, keep: set[int]) -> list[Cnot]:
    return [g for g in _flat(reversed(_zip_layers(trees))) if g.target not in keep]


def cnot_parallelize(circuit: Circuit) -> PassResult:
    """Resynthesize a CNOT circuit ``x -> Mx`` in logarithmic depth.

    Outputs ``Mx`` are accumulated on ancillae by balanced XOR trees, the
    scratch nodes are cleared, the inputs are cancelled by rebuilding them
    from the outputs with trees for ``M^-1``, and the outputs are moved back
    onto the data wires.
    """
    _check_valid(circuit)
    for idx, g in enumerate(circuit.gates):
        if not isinstance(g, Cnot):
            raise PreconditionError(f"gate {idx} ({g.kind} on qubits {list(g.qubits)}) is not a CNOT")
    n = circuit.n_qubits
    m = gf2_simulate(circuit)
    if m.is_identity():
        return PassResult(LayeredCircuit(n, 0, [], circuit.global_phase), 0, 0, "identity map")
    minv = gf2_invert(m)
    alloc = _Ancillae(n)

    # forward sums W over the inputs
    supports = [m.support(i) for i in range(n)]
    leaves, w_copy, singles = _leaf_copies(supports, list(range(n)), alloc, dedicated_singletons=True)
    w = _SumTrees(leaves, alloc)
    outputs = w.roots
    stage_b = _flat(_zip_layers(w_copy)) + w.build()
    stage_c = w.unbuild(keep_roots=True) + _uncopy(w_copy, keep=singles)

    # inverse sums V over the outputs, used to cancel the inputs
    inv_supports = [minv.support(j) for j in range(n)]
    v_leaves, v_copy, _ = _leaf_copies(inv_supports, outputs, alloc, dedicated_singletons=False)
    v = _SumTrees(v_leaves, alloc)
    cancel = [Cnot(v.roots[j], j) for j in range(n)]
    stage_d = _flat(_zip_layers(v_copy)) + v.build() + cancel + v.unbuild(keep_roots=False) + _uncopy(v_copy, set())

    stage_e = [Cnot(outputs[i], i) for i in range(n)] + [Cnot(i, outputs[i]) for i in range(n)]

    stages = [stage_b, stage_c, stage_d, stage_e]
    bound = sum(schedule_greedy(Circuit(n, alloc.count, s)).depth for s in stages)
    gates = [g for s in stages for g in s]
    notes = (f"W trees {len(w.levels)} levels, V trees {len(v.levels)} levels, "
             f"{alloc.count} ancillae, no interior sharing across rows")
    return _result(n, alloc.count, gates, bound, notes, circuit.global_phase)


# --------------------------------------------------------------------------
# arbitrary diagonal operators

def parity_phase_block(qubits: Sequence[int], theta: float) -> list:
    """Phase ``+theta`` on even parity of ``qubits`` and ``-theta`` on odd.

    A balanced CNOT tree folds the parity onto the lowest qubit, a one-qubit
    phase acts there, and the tree is undone.
    """
    qs = sorted(qubits)
    levels, nodes = [], qs
    while len(nodes) > 1:
        levels.append([Cnot(nodes[i + 1], nodes[i]) for i in range(0, len(nodes) - 1, 2)])
        nodes = nodes[0::2]
    root = qs[0]
    rz = OneQubit(root, np.diag([np.exp(1j * theta), np.exp(-1j * theta)]))
    return _flat(levels) + [rz] + _flat(reversed(levels))


def morse_synthesize(pv: PhaseVector, max_n: int = MORSE_MAX_N) -> PassResult:
    """Exact circuit for a diagonal operator from its parity-basis expansion."""
    if pv.n > max_n:
        raise PreconditionError(f"{pv.n} qubits exceeds the synthesis cap {max_n}")
    coeffs = walsh_coefficients(pv)
    gates, blocks, bound = [], 0, 0
    for s in sorted(coeffs.theta):
        theta = coeffs.theta[s]
        if s == 0 or abs(theta) <= PRUNE_EPS:
            continue
        qs = subset_qubits(s, pv.n)
        gates += parity_phase_block(qs, theta)
        blocks += 1
        bound += 2 * clog2(len(qs)) + 1
    return _result(pv.n, 0, gates, bound, f"{blocks} parity blocks", coeffs.get(0))
