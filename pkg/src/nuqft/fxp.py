"""Bit-exact fixed-point register arithmetic.

Every quantized scalar that appears in a simulated circuit (truncated sample
locations, rounded grid indices, signed offsets, quantized arccosines) is
produced here, so the gate-level simulator and the matrix-level block-encoding
model operate on identical values.

Values are stored sign-magnitude: an explicit sign bit plus an MSB-first
fractional bit vector, optionally preceded by integer bits (used for angles in
[0, pi]).  Circuit registers that hold two's-complement patterns are decoded
through the helpers at the bottom of this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class FixedPointValue:
    """Sign-magnitude fixed-point number.

    value = (-1)^sign * (int_value + sum_i frac[i-1] * 2^-i), frac MSB-first.
    """

    sign: int
    frac: tuple[int, ...]
    int_bits: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.sign not in (0, 1):
            raise ValueError("sign bit must be 0 or 1")
        if any(b not in (0, 1) for b in self.frac + self.int_bits):
            raise ValueError("bit vectors must contain only 0/1")

    @property
    def width(self) -> int:
        return len(self.frac)

    @property
    def magnitude_numerator(self) -> int:
        """Magnitude as an integer at scale 2^-width (integer bits included)."""
        m = 0
        for b in self.int_bits:
            m = 2 * m + b
        for b in self.frac:
            m = 2 * m + b
        return m

    def decode(self) -> float:
        return (-1.0) ** self.sign * self.magnitude_numerator / 2 ** self.width

    def dump(self) -> str:
        """Debug form ``s.b1b2...bk`` (integer bits, if any, before the dot)."""
        ib = "".join(str(b) for b in self.int_bits)
        fb = "".join(str(b) for b in self.frac)
        return f"{self.sign}{ib}.{fb}"


def _bits_from_int(value: int, width: int) -> tuple[int, ...]:
    if value < 0 or value >= 2**width:
        raise ValueError(f"{value} not representable in {width} bits")
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def fp_encode(x: float, k: int) -> FixedPointValue:
    """Truncate x in [0,1) to k fractional bits.

    Truncation (not rounding) keeps |decoded - x| <= 2^-k one-sided, which is
    the contract the downstream error bounds assume.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError(f"fp_encode requires x in [0,1), got {x}")
    if k < 1:
        raise ValueError("width must be >= 1")
    num = math.floor(x * 2**k)
    if num == 2**k:  # x indistinguishable from 1.0 at this width
        num -= 1
    return FixedPointValue(0, _bits_from_int(num, k))


def fp_neg(x: FixedPointValue, k: int | None = None) -> FixedPointValue:
    """Map x in (0,1) to 1-x via bitwise complement plus an increment of 2^-k.

    Bit-for-bit the reversible construction: complement every fractional bit,
    then add one ulp.  x = 0 would produce 1, which the k-bit register cannot
    hold; that case is rejected as overflow.
    """
    k = x.width if k is None else k
    if k != x.width:
        raise ValueError("width mismatch")
    if x.sign != 0 or x.int_bits:
        raise ValueError("fp_neg expects an unsigned fraction")
    num = x.magnitude_numerator
    if num == 0:
        raise OverflowError("fp_neg(0) = 1 is not representable")
    res = ((2**k - 1 - num) + 1) % 2**k  # complement, +1 ulp; wrap is unreachable here
    return FixedPointValue(0, _bits_from_int(res, k))


def fp_subtract(x: FixedPointValue, y: FixedPointValue) -> FixedPointValue:
    """Signed difference x - y of two k-bit fractions, exact.

    Internally the two's-complement trace: scale by 2^k, embed with a zero
    sign bit, complement y, add one, add, rescale.  The result is returned
    sign-magnitude at width k (plus the explicit sign bit).
    """
    if x.width != y.width:
        raise ValueError("operand widths differ")
    if x.sign or y.sign or x.int_bits or y.int_bits:
        raise ValueError("fp_subtract expects unsigned fractions")
    k = x.width
    X = x.magnitude_numerator
    Y = y.magnitude_numerator
    neg_y = ((2 ** (k + 1) - 1 - Y) + 1) % 2 ** (k + 1)  # two's complement of Y
    z = (X + neg_y) % 2 ** (k + 1)
    signed = z - 2 ** (k + 1) if z >= 2**k else z  # reinterpret sign bit
    sign = 1 if signed < 0 else 0
    return FixedPointValue(sign, _bits_from_int(abs(signed), k))


def fp_round_Nt(t: FixedPointValue, n: int) -> tuple[int, FixedPointValue]:
    """Round N*t to the nearest grid index, N = 2^n.

    Multiplying an m-bit fraction by N is a binary-point shift; the index is
    the n-bit prefix plus the first dropped bit as carry, reduced mod N.
    Returns the index s and the exact m-bit encoding of s/N (exact because
    m >= n+1).
    """
    m = t.width
    if m <= n:
        raise ValueError(f"need m >= n+1 bits, got m={m}, n={n}")
    if t.sign or t.int_bits:
        raise ValueError("fp_round_Nt expects an unsigned fraction")
    num = t.magnitude_numerator  # t = num / 2^m
    prefix = num >> (m - n)  # first n bits of N*t
    carry = (num >> (m - n - 1)) & 1  # bit t^(n+1)
    s = (prefix + carry) % 2**n
    s_over_N = FixedPointValue(0, _bits_from_int(s << (m - n), m))
    return s, s_over_N


# Quantized arccos: 2 integer bits + (p-2) fractional bits span [0, 4), which
# covers [0, pi]; round-to-nearest keeps |theta_hat - theta| <= 2^-(p-1).

def fp_arccos(x: FixedPointValue | float, p: int) -> FixedPointValue:
    """Quantize arccos(x) to p bits (2 integer, p-2 fractional)."""
    if p < 2:
        raise ValueError("need p >= 2 bits for an angle in [0, pi]")
    val = x if isinstance(x, float) else x.decode()
    if abs(val) > 1.0 + 1e-12:
        raise ValueError(f"arccos argument {val} outside [-1, 1]")
    val = min(1.0, max(-1.0, val))
    theta = math.acos(val)
    grid = math.floor(theta * 2 ** (p - 2) + 0.5)  # round half up on the lattice
    int_part, frac_part = divmod(grid, 2 ** (p - 2))
    return FixedPointValue(0, _bits_from_int(frac_part, p - 2),
                           int_bits=_bits_from_int(int_part, 2))


# ---------------------------------------------------------------------------
# Shared quantized pipeline for the diagonal-u construction.
#
# Both the statevector circuits and the block-encoding matrix model consume
# these integers, so their outputs agree to floating round-off.
# ---------------------------------------------------------------------------

def twos_complement_decode(pattern: int, width: int) -> int:
    """Signed integer from a two's-complement bit pattern of given width."""
    return pattern - 2**width if pattern >= 2 ** (width - 1) else pattern


def scaled_offset_bits(t_num: int, n: int, m: int) -> tuple[int, int, int]:
    """Index rounding plus signed offset for an m-bit sample t = t_num/2^m.

    Returns (s, d_pattern, y_num):
      s          grid index round(N*t) mod N,
      d_pattern  (m+1)-bit two's-complement pattern of t - s/N,
      y_num      signed integer with 2N*(t - s/N) = y_num / 2^m reduced mod 2
                 into [-1, 1) -- the natural wraparound of the binary-point
                 shift, which lands samples near 1 on the negative side of
                 grid point 0.
    """
    prefix = t_num >> (m - n)
    carry = (t_num >> (m - n - 1)) & 1
    s = (prefix + carry) % 2**n
    d = (t_num - (s << (m - n))) % 2 ** (m + 1)  # two's complement, m+1 bits
    d_signed = twos_complement_decode(d, m + 1)
    y_pattern = (d_signed << (n + 1)) % 2 ** (m + 1)
    y_num = twos_complement_decode(y_pattern, m + 1)
    return s, d, y_num


def quantized_offset(t: float, n: int, m: int) -> tuple[int, float, float]:
    """Quantize one sample location: (s, offset t~ - s/N, scaled 2N*offset).

    The scaled value is wrapped into [-1, 1); the raw offset is left
    unwrapped, matching the register the phase rotations read (the phase is
    insensitive to the wrap because N is even).
    """
    t_num = fp_encode(t, m).magnitude_numerator
    s, d_pattern, y_num = scaled_offset_bits(t_num, n, m)
    d_val = twos_complement_decode(d_pattern, m + 1) / 2**m
    return s, d_val, y_num / 2**m
