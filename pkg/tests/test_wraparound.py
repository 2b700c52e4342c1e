"""Samples near 1 wrap to grid point 0: the trickiest path end to end.

The offset register holds the unwrapped difference t - 0, the bit-shift by
2N wraps it mod 2 onto the negative side, and the phase rotations are blind
to the wrap because N is even.  These tests drive that path through every
layer: fixed point, statevector circuits, matrix encodings, verification.
"""

import math

import numpy as np
import pytest

from nuqft import analysis, blockenc, chebfact, fxp
from nuqft.chebfact import build_plan, make_grid, nudft2_exact, nudft2_lowrank


@pytest.fixture(scope="module")
def wrap_grid_n2():
    # t_3 sits within half a cell of 1 (s = 0, offset -1/32)
    return make_grid(2, [0.05, 0.30, 0.55, 0.96875])


@pytest.fixture(scope="module")
def wrap_grid_n3():
    t = np.array([0.005, 0.13, 0.26, 0.37, 0.51, 0.63, 0.74, 0.97])
    return make_grid(3, t)


def test_grid_bookkeeping(wrap_grid_n2):
    g = wrap_grid_n2
    assert g.s[3] == 0 and g.c_s[0] == 2
    assert g.offsets()[3] == pytest.approx(-0.03125)
    assert g.scaled_offsets()[3] == pytest.approx(-0.25)


def test_fixed_point_pipeline(wrap_grid_n2):
    s, d, y = fxp.quantized_offset(0.96875, 2, 8)
    assert s == 0
    assert d == 0.96875  # register value, unwrapped
    assert y == 2 * 4 * (0.96875 - 1.0)  # shifted value, wrapped


def test_phase_insensitive_to_wrap(wrap_grid_n2):
    # exp(-i pi N d) with the unwrapped register value equals the wrapped one
    N = 4
    d = 0.96875
    assert np.exp(-1j * math.pi * N * d) == pytest.approx(
        np.exp(-1j * math.pi * N * (d - 1.0)), abs=1e-12)


def test_lowrank_matches_exact(wrap_grid_n2):
    plan = build_plan(wrap_grid_n2, 10)
    rng = np.random.default_rng(0)
    x = rng.normal(size=4) + 1j * rng.normal(size=4)
    dev = np.abs(nudft2_lowrank(plan, wrap_grid_n2, x)
                 - nudft2_exact(wrap_grid_n2, x)).max()
    assert dev < 1e-7


def test_gate_vs_model_through_wrap(wrap_grid_n2):
    for m, p, K, r in ((6, 8, 1, 0), (5, 8, 4, 1), (6, 6, 4, 3)):
        dev = blockenc.crosscheck_gate_vs_model(wrap_grid_n2, 2, m, p, K, r, "ur")
        assert dev <= 1e-10, (m, p, K, r, dev)
    dev = blockenc.crosscheck_gate_vs_model(wrap_grid_n2, 2, 6, 8, 2, 0, "os")
    assert dev == 0.0


def test_end_to_end_verification(wrap_grid_n3):
    for eps in (1e-2, 1e-3):
        rep = analysis.verify_encoding(wrap_grid_n3, eps, build_circuits=False)
        assert rep.passed, (eps, rep.measured_error)


def test_scalar_tables_through_wrap(wrap_grid_n3):
    tables = analysis.scalar_error_lemmas(wrap_grid_n3, 10, 10, 8)
    assert analysis.lemma_tables_pass(tables)


def test_randomized_gate_model_sweep():
    # many small grids, including ones with wrapped samples
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        t = rng.uniform(0, 1, 4)
        if seed % 3 == 0:
            t[3] = 1.0 - rng.uniform(0.01, 0.1) / 4  # force a wrap candidate
        g = chebfact.make_grid(2, np.sort(t))
        K = int(rng.choice([1, 2, 3, 4]))
        r = int(rng.integers(0, K))
        dev = blockenc.crosscheck_gate_vs_model(g, 2, 4, 5, K, r, "ur")
        assert dev <= 1e-10, (seed, K, r, dev)
        worst = max(worst, dev)
    assert worst <= 1e-10


def test_type1_fft_composition_path():
    # above the dense cutoff the transposed pipeline must match the
    # materialized transpose computed from the dense kernel sum
    g = chebfact.random_grid(7, 3)
    plan = build_plan(g, 12)
    rng = np.random.default_rng(1)
    x = rng.normal(size=128) + 1j * rng.normal(size=128)
    got = chebfact.nudft1_apply(plan, g, x)
    expect = chebfact.nudft2_matrix(g, "unitary").T @ x
    assert np.abs(got - expect).max() < 1e-7
