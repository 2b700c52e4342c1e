"""Fixed-point register arithmetic: exhaustive and oracle-based checks."""

import math

import numpy as np
import pytest

from nuqft import chebfact, fxp
from nuqft.fxp import (FixedPointValue, fp_arccos, fp_encode, fp_neg,
                       fp_round_Nt, fp_subtract)


def bits(s: str) -> tuple:
    return tuple(int(c) for c in s)


class TestEncode:
    def test_zero(self):
        assert fp_encode(0.0, 4).frac == bits("0000")

    def test_exact_dyadic(self):
        assert fp_encode(0.625, 3).frac == bits("101")

    def test_truncates_toward_zero(self):
        # floor(x * 2^k) / 2^k oracle
        assert fp_encode(1 / 3, 2).frac == bits("01")
        assert fp_encode(1 / 3, 2).decode() == 0.25

    def test_truncation_error_bound(self):
        rng = np.random.default_rng(0)
        for k in (3, 7, 12):
            for x in rng.uniform(0, 1, 200):
                assert 0 <= x - fp_encode(float(x), k).decode() <= 2.0**-k

    def test_range_error(self):
        with pytest.raises(ValueError):
            fp_encode(1.0, 4)
        with pytest.raises(ValueError):
            fp_encode(-0.1, 4)

    def test_roundtrip_injective_on_lattice(self):
        k = 6
        seen = {fp_encode(i / 2**k, k).frac for i in range(2**k)}
        assert len(seen) == 2**k

    def test_dump_format(self):
        assert fp_encode(0.625, 3).dump() == "0.101"


class TestNeg:
    def test_fixed_point_of_map(self):
        assert fp_neg(fp_encode(0.5, 3)).decode() == 0.5

    def test_complement_increment_trace(self):
        # complement(101) = 010, +001 -> 011
        assert fp_neg(fp_encode(0.625, 3)).frac == bits("011")
        assert fp_neg(fp_encode(0.875, 3)).decode() == 0.125

    def test_zero_overflows(self):
        with pytest.raises(OverflowError):
            fp_neg(fp_encode(0.0, 3))

    def test_exhaustive_identity(self):
        for k in range(1, 9):
            for i in range(1, 2**k):
                x = FixedPointValue(0, tuple((i >> (k - 1 - b)) & 1 for b in range(k)))
                assert fp_neg(x).decode() + x.decode() == 1.0


class TestSubtract:
    def test_equal_gives_plus_zero(self):
        z = fp_subtract(fp_encode(0.75, 4), fp_encode(0.75, 4))
        assert z.decode() == 0.0 and z.sign == 0

    def test_hand_traces(self):
        assert fp_subtract(fp_encode(0.25, 2), fp_encode(0.75, 2)).decode() == -0.5
        assert fp_subtract(fp_encode(0.75, 2), fp_encode(0.25, 2)).decode() == 0.5

    def test_exhaustive_exact(self):
        for k in (2, 4, 6, 8):
            scale = 2**k
            for xi in range(scale):
                x = fp_encode(xi / scale, k)
                for yi in range(scale):
                    y = fp_encode(yi / scale, k)
                    assert fp_subtract(x, y).decode() == (xi - yi) / scale

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            fp_subtract(fp_encode(0.5, 3), fp_encode(0.5, 4))


class TestRoundNt:
    def test_zero(self):
        assert fp_round_Nt(fp_encode(0.0, 5), 2)[0] == 0

    def test_wraparound(self):
        # 0.1110 = 0.875, N=4: round(3.5) = 4 = 0 mod 4
        s, frac = fp_round_Nt(FixedPointValue(0, bits("1110")), 2)
        assert s == 0 and frac.decode() == 0.0

    def test_plain_round(self):
        s, frac = fp_round_Nt(FixedPointValue(0, bits("0101")), 2)
        assert s == 1 and frac.decode() == 0.25

    def test_agrees_with_nearest_grid_exhaustive(self):
        for n in range(1, 5):
            for m in range(n + 1, n + 5):
                for i in range(2**m):
                    t = i / 2**m
                    s, frac = fp_round_Nt(fp_encode(t, m), n)
                    assert s == chebfact.nearest_grid(t, n)
                    assert frac.decode() == s / 2**n

    def test_precondition(self):
        with pytest.raises(ValueError):
            fp_round_Nt(fp_encode(0.5, 3), 3)


class TestArccos:
    def test_endpoints(self):
        assert fp_arccos(1.0, 8).decode() == 0.0

    def test_half_pi(self):
        theta = fp_arccos(0.0, 8).decode()
        assert abs(theta - math.pi / 2) <= 2.0**-7

    def test_pi_third_lattice_value(self):
        # round(acos(0.5) * 2^6) / 2^6 = 67/64
        assert fp_arccos(0.5, 8).decode() == 67 / 64

    def test_error_bound_random(self):
        rng = np.random.default_rng(1)
        for p in (6, 10, 16):
            xs = rng.uniform(-1, 1, 10_000)
            worst = max(abs(fp_arccos(float(x), p).decode() - math.acos(x))
                        for x in xs)
            assert worst <= 2.0 ** (-p + 1)

    def test_domain_error(self):
        with pytest.raises(ValueError):
            fp_arccos(1.5, 8)

    def test_integer_bits_layout(self):
        v = fp_arccos(-1.0, 6)  # pi = 11.0010... on the 2-integer-bit lattice
        assert v.int_bits == (1, 1)


class TestReversibility:
    """Each operation, seen as (input bits, zeroed output) -> outputs, is injective."""

    def test_neg_injective(self):
        for k in range(1, 7):
            outs = {fp_neg(fp_encode(i / 2**k, k)).frac for i in range(1, 2**k)}
            assert len(outs) == 2**k - 1

    def test_subtract_injective(self):
        for k in range(1, 7):
            outs = set()
            for xi in range(2**k):
                for yi in range(2**k):
                    z = fp_subtract(fp_encode(xi / 2**k, k), fp_encode(yi / 2**k, k))
                    outs.add((xi, yi, z.sign, z.frac))
            assert len(outs) == 4**k

    def test_round_injective(self):
        n, m = 3, 6
        outs = {(i, fp_round_Nt(fp_encode(i / 2**m, m), n)) for i in range(2**m)}
        assert len(outs) == 2**m


class TestQuantizedPipeline:
    def test_offset_matches_subtract(self):
        n, m = 3, 9
        rng = np.random.default_rng(2)
        for t in rng.uniform(0, 1, 100):
            tq = fp_encode(float(t), m)
            s, s_frac = fp_round_Nt(tq, n)
            s_pipe, d_val, _ = fxp.quantized_offset(float(t), n, m)
            assert s_pipe == s
            assert d_val == fp_subtract(tq, s_frac).decode()

    def test_scaled_offset_wraps_near_one(self):
        # t close to 1 rounds to grid index 0; the shift wraps the offset
        n, m = 2, 6
        t = 0.953125  # 61/64, round(4t) = 4 -> s = 0
        s, d_val, y = fxp.quantized_offset(t, n, m)
        assert s == 0
        assert d_val == t  # register holds the unwrapped difference
        assert y == 2 * 2**n * (t - 1.0)  # shifted value wraps mod 2

    def test_scaled_offset_in_range(self):
        rng = np.random.default_rng(3)
        for t in rng.uniform(0, 1, 500):
            _, _, y = fxp.quantized_offset(float(t), 3, 10)
            assert -1.0 <= y < 1.0
