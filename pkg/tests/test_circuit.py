import numpy as np
import pytest
from hypothesis import given, settings

from qparallel.circuit import (
    Circuit,
    Cnot,
    ControlledU,
    Diagonal,
    InvalidCircuitError,
    LayeredCircuit,
    OneQubit,
    Permutation,
    depth,
    longest_overlap_chain,
    schedule_greedy,
    validate,
    wrap_angle,
)
from qparallel.generators import HADAMARD, gen_qft, gen_staircase
from qparallel.simulator import full_unitary

from strategies import circuits


def test_validate_duplicate_qubit():
    c = Circuit(2, 0, [Cnot(0, 0)])
    assert validate(c) == ["duplicate qubit index at gate 0"]


def test_validate_identity_ok():
    assert validate(Circuit(1, 0, [OneQubit(0, np.eye(2))])) == []


def test_validate_non_unitary():
    assert validate(Circuit(1, 0, [OneQubit(0, [[1, 0], [0, 2]])])) == ["non-unitary at gate 0"]


def test_validate_other_rules():
    c = Circuit(2, 0, [Cnot(0, 5), Diagonal((0, 1), [0, 0, 0])])
    problems = validate(c)
    assert "qubit index out of range at gate 0" in problems
    assert "diagonal phase count mismatch at gate 1" in problems
    assert validate(Circuit(0, 0, [])) != []


def test_validate_layer_overlap():
    lc = LayeredCircuit(3, 0, [[Cnot(0, 1), Cnot(1, 2)]])
    assert any("overlapping" in p for p in validate(lc))


def test_schedule_rejects_invalid():
    with pytest.raises(InvalidCircuitError):
        schedule_greedy(Circuit(2, 0, [Cnot(1, 1)]))


def test_disjoint_gates_share_a_layer():
    assert schedule_greedy(Circuit(4, 0, [Cnot(0, 1), Cnot(2, 3)])).depth == 1


def test_staircase_depth():
    lc = schedule_greedy(Circuit(4, 0, [Cnot(0, 1), Cnot(1, 2), Cnot(2, 3)]))
    assert depth(lc) == 3


def test_qft4_depth():
    assert depth(schedule_greedy(gen_qft(4))) == 7


def test_depth_trivial():
    assert depth(LayeredCircuit(1, 0, [])) == 0
    assert depth(schedule_greedy(Circuit(1, 0, [OneQubit(0, HADAMARD)]))) == 1


def test_staircase_depth_matches_chain_oracle():
    c = gen_staircase(4, HADAMARD)
    assert depth(schedule_greedy(c)) == longest_overlap_chain(c.gates) == 3


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))


def test_permutation_cycles():
    p = Permutation((1, 2, 0, 3))
    assert p.cycles() == [[0, 1, 2]]
    assert Permutation((0, 1)).is_identity()


def test_wrap_angle():
    assert wrap_angle(3 * np.pi) == pytest.approx(np.pi)
    assert wrap_angle(-np.pi) == pytest.approx(np.pi)
    assert wrap_angle(2 * np.pi + 0.1) == pytest.approx(0.1)


def test_gate_equality_compares_payloads():
    assert ControlledU(0, 1, HADAMARD) == ControlledU(0, 1, HADAMARD.copy())
    assert ControlledU(0, 1, HADAMARD) != ControlledU(0, 1, np.eye(2))
    assert Cnot(0, 1) != Cnot(1, 0)


@settings(max_examples=60, deadline=None)
@given(circuits(max_n=5, max_gates=25))
def test_schedule_preserves_operator(c):
    lc = schedule_greedy(c)
    assert np.max(np.abs(full_unitary(lc) - full_unitary(c))) <= 1e-9


@settings(max_examples=100, deadline=None)
@given(circuits(min_n=2, max_n=8, max_gates=40))
def test_schedule_counts_and_chain(c):
    lc = schedule_greedy(c)
    assert len(lc.gates) == len(c.gates)
    assert lc.depth <= len(c.gates)
    assert lc.depth == longest_overlap_chain(c.gates)
    assert validate(lc) == []
