"""Gate-level circuits: representation, statevector simulation, builders."""

from .circuit import Circuit, Gate, OpaqueGate, Register
from .simulate import (QUBIT_BUDGET, QubitBudgetError, apply, basis_state,
                       unitary_of, zero_state)
from .builders import (build_OA, build_Os, build_Ot, build_Uur, build_Uv0,
                       build_Uvr, prep_matrix, qft_circuit)

__all__ = [
    "Circuit", "Gate", "OpaqueGate", "Register",
    "QUBIT_BUDGET", "QubitBudgetError", "apply", "basis_state", "unitary_of",
    "zero_state",
    "build_OA", "build_Os", "build_Ot", "build_Uur", "build_Uv0", "build_Uvr",
    "prep_matrix", "qft_circuit",
]
