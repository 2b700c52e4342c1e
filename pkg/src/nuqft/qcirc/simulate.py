"""Dense statevector simulation of circuits.

Basis convention: qubit q contributes 2^q to the basis index (little-endian
in qubit ids), so a register allocated first at ids 0..n-1 indexes amplitudes
directly by its value when all other qubits are |0>.

Elementary gates update amplitude pairs through flat index arrays built by
bit-doubling over the free qubits, so a gate's cost scales with the size of
its control-selected subspace; opaque register unitaries move the register
axes to the front and act on the reshaped block.
"""

from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate, OpaqueGate

QUBIT_BUDGET = 26
UNITARY_BUDGET = 12
NORM_TOL = 1e-10


class QubitBudgetError(RuntimeError):
    pass


def zero_state(num_qubits: int) -> np.ndarray:
    state = np.zeros(2**num_qubits, dtype=complex)
    state[0] = 1.0
    return state


def basis_state(num_qubits: int, index: int) -> np.ndarray:
    state = np.zeros(2**num_qubits, dtype=complex)
    state[index] = 1.0
    return state


def apply(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    """Apply a circuit's gates in order; returns a fresh statevector."""
    nq = circuit.num_qubits
    if nq > QUBIT_BUDGET:
        raise QubitBudgetError(f"{nq} qubits exceeds the {QUBIT_BUDGET}-qubit budget")
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**nq,):
        raise ValueError(f"state length {state.shape} does not match {nq} qubits")
    norm_in = np.linalg.norm(state)
    psi = state.copy()
    del state  # keep peak memory at one statevector plus per-gate temporaries
    for gate in circuit.gates:
        if isinstance(gate, OpaqueGate):
            _apply_opaque(psi, gate, nq)
        else:
            _apply_gate(psi, gate, nq)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL and abs(norm_in - 1.0) <= NORM_TOL:
        raise RuntimeError(f"norm drifted to {norm}")
    return psi


def _apply_gate(psi: np.ndarray, gate: Gate, nq: int) -> None:
    view = psi.reshape((2,) * nq)
    index: list = [slice(None)] * nq
    for q, v in zip(gate.controls, gate.ctrl_states):
        index[nq - 1 - q] = v
    tax = nq - 1 - gate.targets[0]
    # length-1 slices keep these as assignable views even on 1-qubit circuits
    index[tax] = slice(0, 1)
    s0 = view[tuple(index)]
    index[tax] = slice(1, 2)
    s1 = view[tuple(index)]
    m = gate.matrix()
    if m[0, 1] == 0 and m[1, 0] == 0:  # diagonal: scale in place
        if m[0, 0] != 1.0:
            s0 *= m[0, 0]
        if m[1, 1] != 1.0:
            s1 *= m[1, 1]
        return
    if gate.name == "X":
        tmp = s0.copy()
        s0[...] = s1
        s1[...] = tmp
        return
    new0 = m[0, 0] * s0 + m[0, 1] * s1
    new1 = m[1, 0] * s0 + m[1, 1] * s1
    s0[...] = new0
    s1[...] = new1


def _apply_opaque(psi: np.ndarray, gate: OpaqueGate, nq: int) -> None:
    """Register unitary applied through strided slice views.

    The register axes are moved to the front of a reshaped view; each
    register basis value then addresses a slice over the remaining qubits.
    Permutations are applied cycle by cycle with a single slice buffer, so
    the extra memory is one slice, not another statevector.
    """
    w = len(gate.qubits)
    tensor = psi.reshape((2,) * nq)
    axes = [nq - 1 - q for q in gate.qubits]  # MSB-first register order
    view = np.moveaxis(tensor, axes, range(w))

    def slot(b: int):
        bits = np.unravel_index(b, (2,) * w)
        # last register axis as a length-1 slice keeps this an assignable view
        return view[tuple(bits[:-1]) + (slice(bits[-1], bits[-1] + 1),)]

    if gate.perm is not None:
        perm = [gate.perm(b) for b in range(2**w)]
        visited = [False] * len(perm)
        for start in range(len(perm)):
            if visited[start] or perm[start] == start:
                visited[start] = True
                continue
            cycle = [start]
            nxt = perm[start]
            while nxt != start:
                cycle.append(nxt)
                nxt = perm[nxt]
            for b in cycle:
                visited[b] = True
            # new[cycle[i+1]] = old[cycle[i]], wrapping at the end
            buf = slot(cycle[-1]).copy()
            for i in range(len(cycle) - 1, 0, -1):
                slot(cycle[i])[...] = slot(cycle[i - 1])
            slot(cycle[0])[...] = buf
    else:
        mat = gate.matrix
        originals = [slot(b).copy() for b in range(2**w)]
        for i in range(2**w):
            acc = mat[i, 0] * originals[0]
            for j in range(1, 2**w):
                if mat[i, j] != 0:
                    acc = acc + mat[i, j] * originals[j]
            slot(i)[...] = acc


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Materialize the circuit unitary column by column."""
    nq = circuit.num_qubits
    if nq > UNITARY_BUDGET:
        raise QubitBudgetError(f"{nq} qubits exceeds the {UNITARY_BUDGET}-qubit "
                               "unitary budget")
    dim = 2**nq
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        out[:, col] = apply(circuit, basis_state(nq, col))
    return out
