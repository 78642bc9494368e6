"""Hypothesis strategies for random circuits."""
import math

import numpy as np
from hypothesis import strategies as st

from qparallel.circuit import Circuit, Cnot, ControlledU, Diagonal, OneQubit, SymmetricPhase
from qparallel.generators import random_unitary


def _pair(draw, n):
    a = draw(st.integers(0, n - 1))
    b = draw(st.integers(0, n - 2))
    return a, b + (b >= a)


@st.composite
def gates(draw, n, kinds=("one", "cu", "cnot", "sym", "diag")):
    kind = draw(st.sampled_from(kinds))
    seed = draw(st.integers(0, 2**32 - 1))
    r = np.random.default_rng(seed)
    if kind == "one":
        return OneQubit(draw(st.integers(0, n - 1)), random_unitary(2, r))
    a, b = _pair(draw, n)
    if kind == "cu":
        return ControlledU(a, b, random_unitary(2, r))
    if kind == "cnot":
        return Cnot(a, b)
    if kind == "sym":
        return SymmetricPhase(a, b, r.uniform(-math.pi, math.pi))
    if kind == "diag1":
        return Diagonal((a,), r.uniform(0, 2 * math.pi, 2))
    return Diagonal((a, b), r.uniform(0, 2 * math.pi, 4))


@st.composite
def circuits(draw, min_n=2, max_n=5, max_gates=20, kinds=("one", "cu", "cnot", "sym", "diag")):
    n = draw(st.integers(min_n, max_n))
    gs = draw(st.lists(gates(n, kinds), max_size=max_gates))
    phase = draw(st.floats(-math.pi, math.pi))
    return Circuit(n, 0, gs, phase)
