"""Depth-reducing rewrites for quantum circuits, with simulation oracles."""
from .circuit import (
    Circuit,
    Cnot,
    ControlledU,
    Diagonal,
    LayeredCircuit,
    OneQubit,
    Permutation,
    SymmetricPhase,
    Unitary,
    depth,
    schedule_greedy,
    validate,
)
from .linalg import Gf2Matrix, PhaseVector, SubsetCoefficients

__all__ = [
    "Circuit", "Cnot", "ControlledU", "Diagonal", "LayeredCircuit", "OneQubit",
    "Permutation", "SymmetricPhase", "Unitary", "depth", "schedule_greedy", "validate",
    "Gf2Matrix", "PhaseVector", "SubsetCoefficients",
]
