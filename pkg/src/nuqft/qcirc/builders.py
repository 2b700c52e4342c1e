"""Constructors for every subcircuit of the transform.

Layout conventions shared by all builders:
  * the index register occupies qubit ids 0..n-1 with bit k of the index at
    id k, so with every other register in |0> the amplitude of index value j
    sits at statevector position j;
  * multi-bit registers are MSB-first qubit tuples (fraction bit of weight
    2^-1 first);
  * oracle loads (sample table, arccos) enter as opaque XOR-load
    permutations whose values come from the fixed-point layer, with their
    published gate budgets attached as modeled costs.
"""

from __future__ import annotations

import math

import numpy as np

from .. import fxp
from ..chebfact import SampleGrid, _effective_alpha
from .arith import increment, negate_fraction, subtract_into
from .circuit import Circuit, OpaqueGate


def qft_circuit(n: int) -> Circuit:
    """Hadamard + controlled-phase ladder; unitary equals DFT_N exactly.

    The ladder alone produces the transform in bit-reversed output order; a
    trailing swap network (emitted as CNOT triples) restores it so the
    matrix contract holds literally.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    circ = Circuit()
    circ.add_register("index", n, msb_first=False)
    for q in range(n - 1, -1, -1):
        circ.h(q)
        for q2 in range(q - 1, -1, -1):
            circ.crm(q - q2 + 1, q2, q)
    for a in range(n // 2):
        b = n - 1 - a
        circ.cnot(a, b)
        circ.cnot(b, a)
        circ.cnot(a, b)
    return circ


def build_Uv0(n: int) -> Circuit:
    """Uniform superposition plus exp(i*pi/3 sigma_X) on the flag qubit.

    The flag lands in (1/2)|0> + (i*sqrt(3)/2)|1>, block-encoding the
    constant diagonal 1/2.
    """
    circ = Circuit()
    idx = circ.add_register("index", n, msb_first=False)
    comp = circ.add_register("comp", 1)
    for q in idx.qubits:
        circ.h(q)
    circ.rx(-math.pi / 3.0, comp.qubits[0])
    return circ


def _xreg_value(pattern: int, n: int) -> float:
    """Decode the x-register of the v_r circuit: [magnitude | sign].

    Magnitude has n-1 fractional bits; sign=1 means negative.  The pattern
    (sign=1, magnitude=0) is the wrap of |x| = 1 and decodes to -1.
    """
    sign = pattern & 1
    mag = (pattern >> 1) / 2 ** (n - 1) if n > 1 else 0.0
    if sign:
        return -1.0 if mag == 0.0 else -mag
    return mag


def _theta_bit_weights(p: int) -> list[float]:
    """Bit weights of the p-bit angle register: 2 integer, p-2 fractional."""
    return [2.0 ** (1 - i) for i in range(p)]


def _arccos_perm(decode, p: int):
    """XOR-load permutation |x>|z> -> |x>|z ^ bits(arccos_p(x))>."""
    def perm(b: int, _dec=decode, _p=p) -> int:
        z = b & (2**_p - 1)
        x = b >> _p
        theta = fxp.fp_arccos(float(_dec(x)), _p)
        return (x << _p) | (z ^ theta.magnitude_numerator)
    return perm


def build_Uvr(n: int, r: int, p: int) -> Circuit:
    """Block encoding of the diagonal T_r(2j/N - 1) via bitwise X-rotations.

    Pipeline per index value j (in superposition): CNOT fan-out writes the
    fractional part of 2j/N into the x-register; for indices below N/2 a
    negation controlled on the |0> branch of the top index bit forms |x_j|
    with the sign qubit set; the opaque arccos load fills the angle
    register; each set angle bit drives exp(i*r*2^k sigma_X) on the flag
    qubit; everything but the flag is then uncomputed.
    """
    if r < 1:
        raise ValueError("r must be >= 1 (the r = 0 diagonal is the constant 1/2)")
    if p < 3:
        raise ValueError("p must be >= 3")
    circ = Circuit()
    idx = circ.add_register("index", n, msb_first=False)
    comp = circ.add_register("comp", 1)
    xreg = circ.add_register("x", n)  # n-1 magnitude bits then the sign bit
    theta = circ.add_register("theta", p)

    for q in idx.qubits:
        circ.h(q)

    start = len(circ.gates)
    mag = xreg.qubits[: n - 1]
    sign = xreg.qubits[n - 1]
    top = idx.qubits[0]  # index bit n-1
    # fan-out: index bit k (weight 2^k) -> magnitude bit of weight 2^(k-n+1)
    for k in range(n - 1):
        circ.cnot(idx.qubits[n - 1 - k], mag[n - 2 - k])
    negate_fraction(circ, mag, controls=(top,), ctrl_states=(0,))
    circ.cnot(top, sign, ctrl_state=0)
    circ.append(OpaqueGate(
        "U_arccos", tuple(mag) + (sign,) + tuple(theta.qubits),
        perm=_arccos_perm(lambda x: _xreg_value(x, n), p),
        modeled_costs={"CNOT": p * p}, self_inverse=True))
    compute = circ.gates[start:]

    for q, w in zip(theta.qubits, _theta_bit_weights(p)):
        circ.rx(-r * w, comp.qubits[0], controls=(q,))

    circ.extend_inverse(compute)
    return circ


def _t_table(grid: SampleGrid, m: int) -> list[int]:
    return [fxp.fp_encode(float(tj), m).magnitude_numerator for tj in grid.t]


def _emit_ot(circ: Circuit, grid: SampleGrid, idx_qubits, data_qubits, m: int):
    table = _t_table(grid, m)

    def perm(b: int, _tab=table, _m=m) -> int:
        z = b & (2**_m - 1)
        i = b >> _m
        return (i << _m) | (z ^ _tab[i])

    circ.append(OpaqueGate("O_t", tuple(idx_qubits) + tuple(data_qubits),
                           perm=perm, self_inverse=True))


def build_Ot(grid: SampleGrid, m: int) -> Circuit:
    """Sample-table oracle |i>|z> -> |i>|z ^ t_i^(m)>, a self-inverse XOR load."""
    if m < grid.n:
        raise ValueError("need m >= n")
    circ = Circuit()
    idx = circ.add_register("index", grid.n, msb_first=False)
    data = circ.add_register("t", m)
    _emit_ot(circ, grid, idx.qubits, data.qubits, m)
    return circ


def _emit_rounding(circ: Circuit, t_qubits, s_qubits, n: int) -> None:
    """Write s/N into the s-register given t in the t-register.

    Copy the n-bit prefix of t, then add the first dropped bit as a carry;
    the mod-N wrap is the natural overflow of the n-bit increment.  The tail
    of the s-register is untouched, so it holds s/N exactly.
    """
    for i in range(n):
        circ.cnot(t_qubits[i], s_qubits[i])
    increment(circ, tuple(s_qubits[:n]), controls=(t_qubits[n],))


def build_Os(grid: SampleGrid, n: int, m: int) -> Circuit:
    """Rounding oracle |i>|0>|0> -> |i>|s_i/N>|0> on an m-bit register.

    Composes the sample-table load into a work register with the rounding
    adder into the output register, then unloads the work register with a
    second (self-inverse) table query.
    """
    if m < n + 1:
        raise ValueError("need m >= n+1")
    circ = Circuit()
    idx = circ.add_register("index", n, msb_first=False)
    out = circ.add_register("s", m)
    work = circ.add_register("work", m)
    _emit_ot(circ, grid, idx.qubits, work.qubits, m)
    _emit_rounding(circ, work.qubits, out.qubits, n)
    _emit_ot(circ, grid, idx.qubits, work.qubits, m)
    return circ


def build_OA(n: int) -> Circuit:
    """Inner-product oracle: flag <- [i == s] for two n-bit basis registers.

    CNOT layer writes i XOR s into the second register, an X layer turns it
    into XNOR, a multi-controlled X raises the flag, then the comparison is
    uncomputed so both registers are restored.
    """
    circ = Circuit()
    ireg = circ.add_register("i", n)
    sreg = circ.add_register("s", n)
    flag = circ.add_register("flag", 1)
    start = len(circ.gates)
    for a, b in zip(ireg.qubits, sreg.qubits):
        circ.cnot(a, b)
    for b in sreg.qubits:
        circ.x(b)
    compare = circ.gates[start:]
    circ.x(flag.qubits[0], controls=tuple(sreg.qubits), ctrl_states=(1,) * n)
    circ.extend_inverse(compare)
    return circ


def prep_matrix(weights: np.ndarray, a_bits: int) -> np.ndarray:
    """Unitary whose first column is sqrt(w_q)/sqrt(|w|_1), principal roots.

    Used on the right of the select ladder; its plain transpose goes on the
    left, so complex weights recombine as w_q rather than |w_q|.
    """
    dim = 2**a_bits
    amps = np.zeros(dim, dtype=complex)
    amps[: len(weights)] = np.sqrt(np.asarray(weights, dtype=complex))
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("all-zero preparation weights")
    basis = np.eye(dim, dtype=complex)
    basis[:, 0] = amps / norm
    q, rmat = np.linalg.qr(basis)
    q[:, 0] = q[:, 0] * rmat[0, 0]  # |R_00| = 1: re-pin the first column
    return q


def build_Uur(grid: SampleGrid, n: int, m: int, p: int, K: int, r: int,
              alpha_eff: np.ndarray | None = None) -> Circuit:
    """Block encoding of the diagonal u_r via an inner weighted-unitary sum.

    Pipeline: load t~ (m bits), round to s/N, form the signed difference in
    the [sign|s] register, opaque arccos of the offset bit-shifted by 2N
    (the shift wraps mod 2, which lands samples near 1 on the negative side
    of grid point 0), then the select ladder: X-rotations by selector-weight
    times angle-bit weight, doubly controlled, plus the q-independent phase
    exp(-i*pi*N*(t - s/N)) read off the offset register bits.  The selector
    is wrapped by the weight preparation and its transpose; with K = 1 the
    single weight is real positive and no selector is needed.
    """
    if m < n + 1:
        raise ValueError("need m >= n+1")
    if not 0 <= r < K:
        raise ValueError("need 0 <= r < K")
    if alpha_eff is None:
        alpha_eff = _effective_alpha(K)
    weights = alpha_eff[:K, r]

    a_bits = math.ceil(math.log2(K)) if K > 1 else 0
    circ = Circuit()
    idx = circ.add_register("index", n, msb_first=False)
    comp = circ.add_register("comp", 1)
    sel = circ.add_register("select", a_bits) if a_bits else None
    treg = circ.add_register("t", m)
    sign = circ.add_register("sign", 1)
    sreg = circ.add_register("s", m)
    theta = circ.add_register("theta", p)

    for q in idx.qubits:
        circ.h(q)

    start = len(circ.gates)
    _emit_ot(circ, grid, idx.qubits, treg.qubits, m)
    _emit_rounding(circ, treg.qubits, sreg.qubits, n)
    subtract_into(circ, treg.qubits, sreg.qubits, sign.qubits[0])

    def decode_offset(pattern: int, _n=n, _m=m) -> float:
        signed = fxp.twos_complement_decode(pattern, _m + 1)
        shifted = (signed << (_n + 1)) % 2 ** (_m + 1)
        return fxp.twos_complement_decode(shifted, _m + 1) / 2**_m

    circ.append(OpaqueGate(
        "U_arccos_2N", (sign.qubits[0],) + tuple(sreg.qubits) + tuple(theta.qubits),
        perm=_arccos_perm(decode_offset, p),
        modeled_costs={"CNOT": p * p}, self_inverse=True))
    compute = circ.gates[start:]

    if sel is not None:
        prep = prep_matrix(weights, a_bits)
        circ.append(OpaqueGate("PREP", tuple(sel.qubits), matrix=prep))

    theta_weights = _theta_bit_weights(p)
    if sel is not None:
        for a in range(a_bits):
            sel_bit = sel.qubits[a_bits - 1 - a]  # selector bit of weight 2^a
            for q, w in zip(theta.qubits, theta_weights):
                circ.rx(-(2**a) * w, comp.qubits[0],
                        controls=(sel_bit, q), ctrl_states=(1, 1))
    for i in range(n, m + 1):  # bit weights pi*N*2^-i; lower i are 0 mod 2*pi
        circ.rz(math.pi * 2.0 ** (n - i), comp.qubits[0],
                controls=(sreg.qubits[i - 1],))
    # the sign bit carries weight -pi*N, a multiple of 2*pi: no gate

    if sel is not None:
        circ.append(OpaqueGate("PREP^T", tuple(sel.qubits), matrix=prep.T))

    circ.extend_inverse(compute)
    return circ
