import math

import numpy as np
import pytest

from qparallel.circuit import Circuit, ControlledU, Permutation, SymmetricPhase, schedule_greedy, validate
from qparallel.generators import (
    FAMILIES,
    HADAMARD,
    dft_matrix,
    gen_qft,
    gen_random,
    gen_staircase,
    qft_reference,
    random_permutation,
    random_unitary,
    swap_network,
)
from qparallel.passes import diag_compress
from qparallel.simulator import full_unitary, phase_vector


@pytest.mark.parametrize("n", range(1, 9))
def test_qft_gate_count_and_depth(n):
    c = gen_qft(n)
    assert len(c.gates) == n + n * (n - 1) // 2
    assert schedule_greedy(c).depth == 2 * n - 1


def test_qft_phases():
    c = gen_qft(3)
    angles = [g.theta for g in c.gates if isinstance(g, SymmetricPhase)]
    assert angles == pytest.approx([math.pi / 2, math.pi / 4, math.pi / 2])


def test_qft_reference_is_bit_reversed_dft():
    # bit reversal is an involution, so undoing it recovers the plain DFT
    r = qft_reference(3)
    assert not np.allclose(r, dft_matrix(3))
    for x in range(8):
        rev = int(format(x, "03b")[::-1], 2)
        assert np.allclose(r[rev], dft_matrix(3)[x])


def test_qft_rejects_zero():
    with pytest.raises(ValueError):
        gen_qft(0)


def test_staircase():
    c = gen_staircase(5, HADAMARD)
    assert len(c.gates) == 4
    assert schedule_greedy(c).depth == 4
    with pytest.raises(ValueError):
        gen_staircase(1, HADAMARD)


def test_diagonal_staircase_compresses_to_two_layers():
    c = gen_staircase(5, np.diag([1, 1j]))
    r = diag_compress(c)
    assert r.depth == 2
    assert phase_vector(r.circuit).distance(phase_vector(c)) <= 1e-12


def test_random_unitary_is_unitary(rng):
    for dim in (2, 4, 8):
        u = random_unitary(dim, rng)
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) <= 1e-12


@pytest.mark.parametrize("family", FAMILIES)
def test_gen_random_deterministic_and_valid(family):
    a = gen_random(family, 6, 15, seed=9)
    b = gen_random(family, 6, 15, seed=9)
    assert a == b
    if isinstance(a, Circuit):
        assert len(a.gates) == 15 and validate(a) == []
        assert a != gen_random(family, 6, 15, seed=10)


def test_gen_random_commuting_family_commutes():
    c = gen_random("controlled-commuting", 5, 6, seed=4)
    us = [g.u for g in c.gates]
    assert all(isinstance(g, ControlledU) and g.target == 4 for g in c.gates)
    for a in us:
        for b in us:
            assert np.max(np.abs(a @ b - b @ a)) <= 1e-10


def test_gen_random_errors():
    with pytest.raises(ValueError):
        gen_random("nope", 3)
    with pytest.raises(ValueError):
        gen_random("cnot", 1, 3)


def test_swap_network_realizes_permutation():
    for seed in range(20):
        p = random_permutation(5, seed)
        u = full_unitary(swap_network(p))
        assert np.array_equal(u, p.matrix())
    assert len(swap_network(Permutation((0, 1, 2))).gates) == 0
