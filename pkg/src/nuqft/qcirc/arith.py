"""Reversible in-place arithmetic emitted as elementary gates.

All blocks are ancilla-free: increments ripple through multi-controlled X
cascades, so simulated circuits stay within the qubit budget.  Additions are
modular over the register width, which is exactly the wraparound the
fixed-point layer models.  Registers are MSB-first qubit tuples.
"""

from __future__ import annotations

from .circuit import Circuit


def increment(circ: Circuit, reg: tuple[int, ...],
              controls: tuple[int, ...] = (),
              ctrl_states: tuple[int, ...] = ()) -> None:
    """reg <- reg + 1 mod 2^width, optionally under extra controls.

    Classic carry cascade: the bit at position i flips iff all lower bits are
    1, so from the MSB down each flip is an X controlled on every lower bit.
    """
    w = len(reg)
    for i in range(w):  # reg[0] is the MSB
        lower = reg[i + 1:]
        circ.x(reg[i], controls=tuple(lower) + tuple(controls),
               ctrl_states=(1,) * len(lower) + tuple(ctrl_states))


def complement(circ: Circuit, reg: tuple[int, ...],
               controls: tuple[int, ...] = (),
               ctrl_states: tuple[int, ...] = ()) -> None:
    """Bitwise NOT of every qubit in the register."""
    for q in reg:
        circ.x(q, controls=controls, ctrl_states=ctrl_states)


def negate_fraction(circ: Circuit, reg: tuple[int, ...],
                    controls: tuple[int, ...] = (),
                    ctrl_states: tuple[int, ...] = ()) -> None:
    """reg <- 1 - reg for a fractional register: complement then add one ulp.

    The all-zero input wraps back to zero (1 is not representable); callers
    that can receive it must give that pattern its own interpretation.
    """
    complement(circ, reg, controls, ctrl_states)
    increment(circ, reg, controls, ctrl_states)


def add_register(circ: Circuit, src: tuple[int, ...], dst: tuple[int, ...]) -> None:
    """dst <- dst + src mod 2^len(dst), src aligned to the low end of dst.

    Each source bit of weight 2^-i drives a controlled increment of the
    destination bits at weight 2^-i and above.  One CNOT per source bit, the
    rest Toffoli/MCX, so the CNOT tally stays linear in the width.
    """
    if len(src) > len(dst):
        raise ValueError("source register wider than destination")
    offset = len(dst) - len(src)
    for i, sq in enumerate(src):  # src[i] has weight 2^-(i+1) within its span
        increment(circ, dst[: offset + i + 1], controls=(sq,))


def subtract_into(circ: Circuit, x_reg: tuple[int, ...],
                  y_reg: tuple[int, ...], sign: int) -> None:
    """(sign, y_reg) <- x - y in two's complement, given x in x_reg.

    The destination is the (width+1)-qubit register [sign | y_reg].  Steps:
    complement the embedded y (sign bit included), add one, then add x.
    Overflow past the sign bit drops, which is the mod-2 wrap of the
    two's-complement embedding.
    """
    if len(x_reg) != len(y_reg):
        raise ValueError("operand widths differ")
    full = (sign,) + tuple(y_reg)
    complement(circ, full)
    increment(circ, full)
    add_register(circ, tuple(x_reg), full)
