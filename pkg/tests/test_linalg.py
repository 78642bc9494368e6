import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qparallel.generators import HADAMARD, random_unitary
from qparallel.linalg import (
    Gf2Matrix,
    NonUnitaryError,
    NotCommutingError,
    PhaseVector,
    SingularMatrixError,
    eig_unitary,
    fwht,
    gf2_invert,
    gf2_mul,
    gf2_rank,
    parity_vector,
    simultaneous_diagonalize,
    walsh_coefficients,
    walsh_reconstruct,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
S = np.diag([1, 1j])


def mod2_matmul(a: Gf2Matrix, b: Gf2Matrix) -> np.ndarray:
    return (a.to_array().astype(int) @ b.to_array().astype(int)) % 2


def random_invertible(n, rng):
    while True:
        m = Gf2Matrix.from_array(rng.integers(0, 2, size=(n, n)))
        if gf2_rank(m) == n:
            return m


# ---------------------------------------------------------------- GF(2)

def test_identity_products():
    i4 = Gf2Matrix.identity(4)
    assert gf2_mul(i4, i4) == i4
    assert gf2_invert(i4) == i4


def test_transvection_is_involution():
    t = Gf2Matrix.from_array([[1, 0, 0], [1, 1, 0], [0, 0, 1]])
    assert gf2_mul(t, t) == Gf2Matrix.identity(3)
    assert gf2_invert(Gf2Matrix.from_array([[1, 1], [0, 1]])) == Gf2Matrix.from_array([[1, 1], [0, 1]])


def test_singular():
    with pytest.raises(SingularMatrixError):
        gf2_invert(Gf2Matrix.zeros(2))
    with pytest.raises(SingularMatrixError):
        gf2_invert(Gf2Matrix.from_array([[1, 1], [1, 1]]))


def test_dim_mismatch():
    with pytest.raises(ValueError):
        gf2_mul(Gf2Matrix.identity(2), Gf2Matrix.identity(3))


def test_random_4x4_inverse(rng):
    m = random_invertible(4, rng)
    inv = gf2_invert(m)
    assert np.array_equal(mod2_matmul(m, inv), np.eye(4, dtype=int))
    assert gf2_mul(m, inv) == Gf2Matrix.identity(4)


def test_gf2_mul_matches_integer_product(rng):
    for _ in range(20):
        a = Gf2Matrix.from_array(rng.integers(0, 2, (7, 7)))
        b = Gf2Matrix.from_array(rng.integers(0, 2, (7, 7)))
        assert np.array_equal(gf2_mul(a, b).to_array(), mod2_matmul(a, b))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 64), st.integers(0, 2**32 - 1))
def test_double_inverse(n, seed):
    m = random_invertible(n, np.random.default_rng(seed))
    inv = gf2_invert(m)
    assert gf2_invert(inv) == m
    assert np.array_equal(mod2_matmul(m, inv), np.eye(n, dtype=int))


def test_apply_and_permutation_flags():
    m = Gf2Matrix.from_array([[0, 1], [1, 0]])
    assert m.apply([1, 0]) == [0, 1]
    assert m.is_permutation()
    assert not Gf2Matrix.from_array([[1, 1], [0, 1]]).is_permutation()


# ---------------------------------------------------------------- unitaries

def test_simdiag_identity():
    t, ds = simultaneous_diagonalize([np.eye(2), np.eye(2)])
    assert np.allclose(t, np.eye(2))
    assert all(np.allclose(d, np.eye(2)) for d in ds)


def test_simdiag_already_diagonal():
    t, ds = simultaneous_diagonalize([Z, S])
    assert np.allclose(t, np.eye(2))
    assert np.allclose(ds[0], Z) and np.allclose(ds[1], S)


def test_simdiag_bit_flip():
    # X has eigenvalue +1 on (1,1)/sqrt2 and -1 on (1,-1)/sqrt2
    t, ds = simultaneous_diagonalize([X, np.eye(2)])
    assert np.allclose(t, HADAMARD, atol=1e-12)
    assert np.allclose(ds[0], np.diag([1, -1]), atol=1e-12)
    assert np.allclose(ds[1], np.eye(2), atol=1e-12)


def test_simdiag_not_commuting():
    with pytest.raises(NotCommutingError) as err:
        simultaneous_diagonalize([X, Z])
    assert err.value.pair == (0, 1)
    assert err.value.norm == pytest.approx(2.0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 4, 8]), st.integers(1, 5), st.integers(0, 2**32 - 1), st.booleans())
def test_simdiag_recomposes_commuting_family(dim, count, seed, degenerate):
    rng = np.random.default_rng(seed)
    t0 = random_unitary(dim, rng)
    us = []
    for _ in range(count):
        phases = rng.uniform(0, 2 * math.pi, dim)
        if degenerate and dim > 2:
            phases[1] = phases[0]
        us.append(t0 @ np.diag(np.exp(1j * phases)) @ t0.conj().T)
    t, ds = simultaneous_diagonalize(us)
    assert np.max(np.abs(t.conj().T @ t - np.eye(dim))) <= 1e-9
    for u, d in zip(us, ds):
        assert np.max(np.abs(t @ d @ t.conj().T - u)) <= 1e-8


def test_simdiag_degenerate_needs_refinement():
    # first matrix is degenerate, second splits the degenerate eigenspace
    rng = np.random.default_rng(5)
    t0 = random_unitary(4, rng)
    a = t0 @ np.diag([1, 1, -1, 1j]) @ t0.conj().T
    b = t0 @ np.diag([1, -1, 1, 1]) @ t0.conj().T
    t, ds = simultaneous_diagonalize([a, b])
    for u, d in zip([a, b], ds):
        assert np.max(np.abs(t @ d @ t.conj().T - u)) <= 1e-8


def test_eig_unitary_trivial_cases():
    t, d = eig_unitary(np.eye(2))
    assert np.allclose(t, np.eye(2)) and np.allclose(d, np.eye(2))
    u = np.diag([1, np.exp(1j * math.pi / 4)])
    t, d = eig_unitary(u)
    assert np.allclose(t, np.eye(2)) and np.allclose(d, u)


def test_eig_unitary_random_recomposes():
    u = random_unitary(4, np.random.default_rng(42))
    t, d = eig_unitary(u)
    assert np.max(np.abs(t @ d @ t.conj().T - u)) <= 1e-8
    assert np.max(np.abs(t.conj().T @ t - np.eye(4))) <= 1e-10
    assert np.allclose(np.abs(np.diag(d)), 1)
    phases = np.mod(np.angle(np.diag(d)), 2 * math.pi)
    assert np.all(np.diff(phases) >= 0)


def test_eig_unitary_rejects_non_unitary():
    with pytest.raises(NonUnitaryError):
        eig_unitary([[1, 0], [0, 2]])


# ---------------------------------------------------------------- parity basis

def direct_coefficient(omega, s, n):
    """theta_s by the defining sum, parity counted bit by bit."""
    total = 0.0
    for x in range(1 << n):
        ones = sum((x >> (n - 1 - q)) & 1 for q in range(n) if (s >> q) & 1)
        total += omega[x] * (1 if ones % 2 == 0 else -1)
    return total / (1 << n)


def test_constant_vector():
    c = walsh_coefficients(PhaseVector(3, [0.7] * 8))
    assert c.get(0) == pytest.approx(0.7)
    assert all(abs(v) < 1e-15 for s, v in c.theta.items() if s)


def test_single_qubit_coefficients():
    a, b = 0.3, 1.9
    c = walsh_coefficients(PhaseVector(1, [a, b]))
    assert c.get(0) == pytest.approx((a + b) / 2)
    assert c.get(1) == pytest.approx((a - b) / 2)


def test_two_qubit_reconstruction():
    omega = np.random.default_rng(11).uniform(0, 2 * math.pi, 4)
    c = walsh_coefficients(PhaseVector(2, omega))
    for s in range(4):
        assert c.get(s) == pytest.approx(direct_coefficient(omega, s, 2), abs=1e-12)
    rebuilt = sum(c.get(s) * parity_vector(s, 2) for s in range(4))
    assert np.max(np.abs(rebuilt - omega)) <= 1e-12


def test_fwht_matches_sylvester_hadamard():
    import scipy.linalg
    v = np.random.default_rng(3).normal(size=16)
    assert np.allclose(fwht(v), scipy.linalg.hadamard(16) @ v)


def test_bad_length():
    with pytest.raises(ValueError):
        walsh_coefficients([1.0, 2.0, 3.0])


@pytest.mark.parametrize("n", range(1, 11))
def test_round_trip(n):
    omega = np.random.default_rng(n).uniform(-10, 10, 1 << n)
    back = walsh_reconstruct(walsh_coefficients(PhaseVector(n, omega)))
    assert np.max(np.abs(back.omega - omega)) <= 1e-12


@pytest.mark.parametrize("n", range(1, 7))
def test_parity_vectors_orthogonal(n):
    p = np.array([parity_vector(s, n) for s in range(1 << n)])
    assert np.array_equal(p @ p.T, (1 << n) * np.eye(1 << n, dtype=int))


def test_parity_vector_full_set_is_morse_sequence():
    assert list(parity_vector(0b111, 3)) == [1, -1, -1, 1, -1, 1, 1, -1]
