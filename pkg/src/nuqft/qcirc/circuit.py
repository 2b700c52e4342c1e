"""Gate-level circuit representation over named registers.

Gates are elementary (H, X with any number of controls, the QFT phase
rotation, and X/Z-axis rotations with optional controls) or opaque unitaries
(oracle loads and state preparations) carried either as a basis permutation
function or as a dense matrix.  Multi-bit registers list their qubits
MSB-first, so a register's basis value reads off its qubit list directly.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class Gate:
    name: str  # "H", "X", "RX", "RZ", "CRM"
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    ctrl_states: tuple[int, ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.controls and len(self.ctrl_states) != len(self.controls):
            object.__setattr__(self, "ctrl_states", (1,) * len(self.controls))

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def kind(self) -> str:
        """Tally key: controlled X gates split into CNOT/TOFFOLI/MCX."""
        if self.name == "X":
            return {0: "X", 1: "CNOT", 2: "TOFFOLI"}.get(len(self.controls), "MCX")
        if self.name in ("RX", "RZ") and self.controls:
            return "C" + self.name
        return self.name

    def matrix(self) -> np.ndarray:
        if self.name == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
        if self.name == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.name == "RX":
            (theta,) = self.params
            c, s = math.cos(theta), math.sin(theta)
            return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
        if self.name == "RZ":
            (theta,) = self.params
            return np.array([[np.exp(-1j * theta), 0], [0, np.exp(1j * theta)]],
                            dtype=complex)
        if self.name == "CRM":
            (m,) = self.params
            sign = -1.0 if m > 0 else 1.0
            return np.array([[1, 0], [0, np.exp(sign * 2j * math.pi / 2 ** abs(m))]],
                            dtype=complex)
        raise ValueError(f"unknown gate {self.name}")

    def inverse(self) -> "Gate":
        if self.name in ("H", "X"):
            return self
        if self.name in ("RX", "RZ"):
            return Gate(self.name, self.targets, self.controls, self.ctrl_states,
                        tuple(-p for p in self.params))
        if self.name == "CRM":
            return Gate("CRM", self.targets, self.controls, self.ctrl_states,
                        tuple(-p for p in self.params))
        raise ValueError(f"unknown gate {self.name}")


@dataclass(frozen=True)
class OpaqueGate:
    """Unitary carried whole: a basis permutation or a small dense matrix.

    ``qubits`` lists the touched qubits MSB-first; a permutation maps the
    register's basis value b to perm(b).  ``modeled_costs`` carries the gate
    budget the construction is credited with, reported separately from
    emitted elementary gates.
    """

    label: str
    qubits: tuple[int, ...]
    perm: Callable[[int], int] | None = None
    matrix: np.ndarray | None = None
    modeled_costs: dict = field(default_factory=dict)
    self_inverse: bool = False

    @property
    def targets(self) -> tuple[int, ...]:
        return self.qubits

    def kind(self) -> str:
        return f"OPAQUE[{self.label}]"

    def inverse(self) -> "OpaqueGate":
        if self.perm is not None:
            if self.self_inverse:
                return self
            # invert lazily so unsimulated circuits never materialize tables
            fwd = self.perm
            size = 2 ** len(self.qubits)
            cache: dict = {}

            def inv(b, _fwd=fwd, _size=size, _cache=cache):
                if not _cache:
                    for a in range(_size):
                        _cache[_fwd(a)] = a
                return _cache[b]

            return OpaqueGate(self.label + "^-1", self.qubits, perm=inv,
                              modeled_costs=dict(self.modeled_costs))
        return OpaqueGate(self.label + "^-1", self.qubits,
                          matrix=self.matrix.conj().T,
                          modeled_costs=dict(self.modeled_costs))


@dataclass(frozen=True)
class Register:
    name: str
    qubits: tuple[int, ...]  # MSB first

    @property
    def width(self) -> int:
        return len(self.qubits)


class Circuit:
    """Ordered gate list over an addressed qubit layout."""

    def __init__(self):
        self.registers: dict[str, Register] = {}
        self.gates: list[Gate | OpaqueGate] = []
        self._num_qubits = 0
        self._tally: Counter = Counter()

    # Layout -------------------------------------------------------------
    def add_register(self, name: str, width: int, msb_first: bool = True) -> Register:
        if name in self.registers:
            raise ValueError(f"register {name!r} already exists")
        ids = tuple(range(self._num_qubits, self._num_qubits + width))
        self._num_qubits += width
        reg = Register(name, ids if msb_first else ids[::-1])
        self.registers[name] = reg
        return reg

    @property
    def num_qubits(self) -> int:
        return self._num_qubits

    def __getitem__(self, name: str) -> Register:
        return self.registers[name]

    def basis_index(self, values: dict[str, int]) -> int:
        """Statevector index of the basis state with given register values."""
        idx = 0
        for name, val in values.items():
            reg = self.registers[name]
            if not 0 <= val < 2**reg.width:
                raise ValueError(f"{val} does not fit register {name!r}")
            for pos, q in enumerate(reg.qubits):  # MSB first
                idx |= ((val >> (reg.width - 1 - pos)) & 1) << q
        return idx

    # Emission -----------------------------------------------------------
    def append(self, gate: Gate | OpaqueGate) -> None:
        seen = set()
        for q in gate.targets + getattr(gate, "controls", ()):
            if q in seen or not 0 <= q < self._num_qubits:
                raise ValueError(f"bad qubit index {q} in {gate.kind()}")
            seen.add(q)
        self.gates.append(gate)
        self._tally[gate.kind()] += 1

    def h(self, q):
        self.append(Gate("H", (q,)))

    def x(self, q, controls=(), ctrl_states=()):
        self.append(Gate("X", (q,), tuple(controls), tuple(ctrl_states)))

    def cnot(self, ctrl, tgt, ctrl_state=1):
        self.append(Gate("X", (tgt,), (ctrl,), (ctrl_state,)))

    def rx(self, theta, q, controls=(), ctrl_states=()):
        self.append(Gate("RX", (q,), tuple(controls), tuple(ctrl_states), (theta,)))

    def rz(self, theta, q, controls=(), ctrl_states=()):
        self.append(Gate("RZ", (q,), tuple(controls), tuple(ctrl_states), (theta,)))

    def crm(self, m, ctrl, tgt):
        self.append(Gate("CRM", (tgt,), (ctrl,), (1,), (float(m),)))

    def extend_inverse(self, gates) -> None:
        """Append the inverses of the given gates in reverse order."""
        for g in reversed(list(gates)):
            self.append(g.inverse())

    # Accounting ----------------------------------------------------------
    def gate_counts(self) -> dict[str, int]:
        return dict(self._tally)

    def recount(self) -> dict[str, int]:
        fresh = Counter(g.kind() for g in self.gates)
        return dict(fresh)

    def counts_consistent(self) -> bool:
        return Counter(self.recount()) == self._tally

    def depth(self) -> int:
        """Longest chain in the dependency DAG; gates conflict iff they share a qubit."""
        frontier = [0] * self._num_qubits
        longest = 0
        for g in self.gates:
            qs = g.targets + getattr(g, "controls", ())
            level = 1 + max((frontier[q] for q in qs), default=0)
            for q in qs:
                frontier[q] = level
            longest = max(longest, level)
        return longest

    def dumps(self) -> str:
        """Line-per-gate debug text: NAME targets | c ctrl:state ... | p params."""
        lines = []
        for g in self.gates:
            parts = [g.kind(), ",".join(map(str, g.targets))]
            ctrls = getattr(g, "controls", ())
            if ctrls:
                states = getattr(g, "ctrl_states", (1,) * len(ctrls))
                parts.append("c " + ",".join(f"{q}:{v}" for q, v in zip(ctrls, states)))
            params = getattr(g, "params", ())
            if params:
                parts.append("p " + ",".join(f"{p:.12g}" for p in params))
            lines.append(" | ".join(parts))
        return "\n".join(lines)

    def gate_count_report(self) -> dict:
        """JSON-ready tally keyed by gate type, opaque blocks listed apart."""
        emitted = {k: v for k, v in self._tally.items() if not k.startswith("OPAQUE")}
        opaque = {k: v for k, v in self._tally.items() if k.startswith("OPAQUE")}
        modeled: Counter = Counter()
        for g in self.gates:
            for kind, cost in getattr(g, "modeled_costs", {}).items():
                modeled[kind] += cost
        return {"emitted": emitted, "opaque": opaque,
                "modeled_oracle_costs": dict(modeled), "depth": self.depth()}
