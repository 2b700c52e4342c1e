"""Classical factorization: polynomial/Bessel kernels, plans, transforms.

Independent oracles used here: a direct power-series Bessel evaluator with
frozen reference values, a Chebyshev-Gauss quadrature fit of the bivariate
kernel coefficients, and a second brute-force transform loop with a
different summation order.
"""

import json
import math

import numpy as np
import pytest

from nuqft import chebfact
from nuqft.chebfact import (LowRankPlan, alpha_table, bessel_J, build_plan,
                            cheb_S, cheb_T, jitter_grid, lowrank_matrix,
                            make_grid, nearest_grid, nudft1_apply,
                            nudft2_exact, nudft2_lowrank, nudft2_matrix,
                            random_grid, selection_matrix, truncation_error,
                            uniform_grid)

# frozen high-precision references (40-digit series evaluation)
J0_PI4 = 0.851631913704808012700406
J1_PI4 = 0.3631878383468673317955937
J2_PI4 = 0.07321832219541843166039818


class TestChebyshev:
    def test_T0_T1(self):
        assert cheb_T(0, 0.3) == 1.0
        assert cheb_T(1, -0.5) == -0.5

    def test_T3_by_recurrence_oracle(self):
        # T_3 = 2x T_2 - T_1 evaluated by hand: 4x^3 - 3x at x = 0.5
        assert cheb_T(3, 0.5) == pytest.approx(-1.0, abs=1e-15)

    def test_S_values(self):
        assert cheb_S(0, 0.7) == 1.0
        assert cheb_S(1, 0.25) == 0.5
        assert cheb_S(2, 0.5) == pytest.approx(0.0, abs=1e-15)

    def test_parity(self):
        rng = np.random.default_rng(0)
        for r in range(21):
            for x in rng.uniform(-1, 1, 20):
                assert cheb_T(r, -x) == pytest.approx(
                    (-1.0) ** r * cheb_T(r, float(x)), abs=1e-12)

    def test_domain_clamp_and_error(self):
        assert cheb_T(5, 1.0 + 1e-13) == pytest.approx(1.0)
        with pytest.raises(ValueError):
            cheb_T(2, 1.01)

    def test_bounded(self):
        rng = np.random.default_rng(1)
        for r in (2, 9, 17):
            for x in rng.uniform(-1, 1, 50):
                assert abs(cheb_T(r, float(x))) <= 1.0 + 1e-12


class TestBessel:
    def test_series_leading_terms(self):
        assert bessel_J(0, 0.0) == 1.0
        assert bessel_J(1, 0.0) == 0.0

    def test_frozen_reference_values(self):
        assert bessel_J(0, math.pi / 4) == pytest.approx(J0_PI4, abs=1e-15)
        assert bessel_J(1, math.pi / 4) == pytest.approx(J1_PI4, abs=1e-15)
        assert bessel_J(2, math.pi / 4) == pytest.approx(J2_PI4, abs=1e-15)

    def test_parity_negative_argument(self):
        assert bessel_J(0, -math.pi / 4) == pytest.approx(J0_PI4, abs=1e-15)
        assert bessel_J(1, -0.5) == pytest.approx(-bessel_J(1, 0.5), abs=1e-16)

    def test_against_scipy(self):
        scipy_special = pytest.importorskip("scipy.special")
        rng = np.random.default_rng(2)
        for nu in range(8):
            for x in rng.uniform(-4, 4, 25):
                assert bessel_J(nu, float(x)) == pytest.approx(
                    float(scipy_special.jv(nu, x)), abs=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            bessel_J(0, 5.0)


def quadrature_alpha_oracle(K: int, gamma: float) -> np.ndarray:
    """Chebyshev-Gauss quadrature fit of exp(-i*pi*gamma*x*y) coefficients.

    Independent of the Bessel route: projects the kernel on T_q(x) T_r(y)
    with the standard discrete orthogonality on Chebyshev nodes, then
    applies the first-row/column halving.
    """
    M = 48
    nodes = np.cos(np.pi * (np.arange(M) + 0.5) / M)
    f = np.exp(-1j * np.pi * gamma * np.outer(nodes, nodes))
    tmat = np.array([[math.cos(q * math.acos(x)) for x in nodes] for q in range(K)])
    coef = (4.0 / M**2) * (tmat @ f @ tmat.T)
    coef[0, :] /= 2.0
    coef[:, 0] /= 2.0
    return coef


class TestAlphaTable:
    def test_odd_parity_zero(self):
        a = alpha_table(32)
        for q in range(32):
            for r in range(32):
                if (q - r) % 2 == 1:
                    assert a[q, r] == 0.0

    def test_corner_scaling(self):
        a = alpha_table(2)
        assert a[0, 0] == pytest.approx(J0_PI4**2, abs=1e-14)

    def test_entry_1_3(self):
        # 4 i^3 J_2(-pi/4) J_1(-pi/4) = 4i J_1(pi/4) J_2(pi/4)
        a = alpha_table(4)
        assert a[1, 3] == pytest.approx(4j * J1_PI4 * J2_PI4, abs=1e-14)

    def test_symmetry(self):
        a = alpha_table(12)
        assert np.abs(a - a.T).max() < 1e-15

    def test_against_quadrature_oracle(self):
        for gamma in (0.5, 0.3):
            a = alpha_table(10, gamma)
            ref = quadrature_alpha_oracle(10, gamma)
            assert np.abs(a - ref).max() < 1e-12

    def test_preconditions(self):
        with pytest.raises(ValueError):
            alpha_table(0)
        with pytest.raises(ValueError):
            alpha_table(4, 0.6)


class TestNearestGrid:
    def test_zero(self):
        for n in (1, 3, 5):
            assert nearest_grid(0.0, n) == 0

    def test_wrap_near_one(self):
        assert nearest_grid(0.9, 2) == 0  # |0.9 - 1| = 0.1 <= 1/8

    def test_plain(self):
        assert nearest_grid(0.26, 2) == 1

    def test_tie_rounds_up(self):
        assert nearest_grid(0.1875, 3) == 2  # exactly between 1/8 and 2/8

    def test_invariant_distance(self):
        rng = np.random.default_rng(3)
        for n in (2, 4):
            N = 2**n
            for t in rng.uniform(0, 1, 200):
                s = nearest_grid(float(t), n)
                dist = min(abs(t - s / N), abs(t - s / N - 1), abs(t - s / N + 1))
                assert dist <= 1 / (2 * N) + 1e-12


class TestSampleGrid:
    def test_invariants(self):
        g = random_grid(4, 9)
        assert g.c_s.sum() == g.N
        assert g.c_max == g.c_s.max()
        assert np.all((0 <= g.s) & (g.s < g.N))
        assert np.abs(g.offsets()).max() <= 1 / (2 * g.N) + 1e-12

    def test_offsets_wrap(self):
        g = make_grid(2, [0.0, 0.3, 0.5, 0.95])
        assert g.s[3] == 0
        assert g.offsets()[3] == pytest.approx(-0.05)

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            make_grid(2, [0.0, 0.5])  # wrong length
        with pytest.raises(ValueError):
            make_grid(1, [0.0, 1.0])  # out of range

    def test_jitter_bound_and_determinism(self):
        g1 = jitter_grid(3, 0.25, 1)
        g2 = jitter_grid(3, 0.25, 1)
        assert np.array_equal(g1.t, g2.t)
        assert np.abs(g1.t - np.arange(8) / 8).max() <= 0.25 / 8

    def test_jitter_zero_is_uniform(self):
        assert np.array_equal(jitter_grid(3, 0.0, 5).t, uniform_grid(3).t)


class TestBuildPlan:
    def test_uniform_grid_constant_u(self):
        g = uniform_grid(3)
        plan = build_plan(g, 6)
        for r in range(6):
            assert np.abs(plan.u[r] - plan.u[r][0]).max() < 1e-15

    def test_v_structure(self):
        g = random_grid(3, 11)
        plan = build_plan(g, 5)
        assert np.all(plan.v[0] == 0.5)
        assert plan.v[1][4] == pytest.approx(0.0)  # x = 2*(N/2)/N - 1 = 0
        assert np.abs(plan.v[1:]).max() <= 1.0 + 1e-12

    def test_row_norms_exact(self):
        plan = build_plan(random_grid(3, 12), 7)
        assert np.array_equal(plan.alpha_row_norms,
                              np.abs(plan.alpha).sum(axis=0))

    def test_termwise_scalar_oracle(self):
        # independent re-evaluation of each u_r(j) from scratch
        g = jitter_grid(3, 0.3, 13)
        K = 8
        plan = build_plan(g, K)
        a = alpha_table(K)
        a[:, 0] *= 2.0
        offs = g.offsets()
        for r in range(K):
            for j in range(g.N):
                y = 2 * g.N * offs[j]
                val = sum(a[q, r] * np.exp(-1j * np.pi * g.N * offs[j])
                          * math.cos(q * math.acos(max(-1, min(1, y))))
                          for q in range(K))
                assert plan.u[r, j] == pytest.approx(val, abs=1e-12)

    def test_json_roundtrip(self):
        plan = build_plan(random_grid(3, 14), 5)
        restored = LowRankPlan.from_json(plan.to_json())
        assert np.allclose(restored.u, plan.u, atol=0)
        assert np.allclose(restored.v, plan.v, atol=0)
        assert json.loads(plan.to_json())["K"] == 5


class TestTransforms:
    def test_exact_uniform_is_dft(self):
        g = uniform_grid(3)
        x = np.arange(8) + 1j
        raw = nudft2_exact(g, x, "raw")
        assert np.allclose(raw, np.fft.fft(x), atol=1e-12)
        unit = nudft2_exact(g, x, "unitary")
        assert np.allclose(unit * math.sqrt(8), raw, atol=1e-12)

    def test_basis_probe(self):
        g = random_grid(3, 15)
        e0 = np.zeros(8)
        e0[0] = 1.0
        out = nudft2_exact(g, e0, "raw")
        assert np.allclose(out, np.exp(-2j * np.pi * g.t[0] * np.arange(8)),
                           atol=1e-14)

    def test_exact_vs_independent_loop(self):
        # second O(N^2) oracle, summed in the opposite order
        g = random_grid(3, 16)
        rng = np.random.default_rng(17)
        x = rng.normal(size=8) + 1j * rng.normal(size=8)
        ref = np.zeros(8, dtype=complex)
        for j in reversed(range(8)):
            for k in range(8):
                ref[k] += np.exp(-2j * np.pi * g.t[j] * k) * x[j]
        assert np.allclose(nudft2_exact(g, x, "raw"), ref, atol=1e-12)

    def test_lowrank_matches_exact(self):
        g = random_grid(4, 18)
        plan = build_plan(g, 10)
        rng = np.random.default_rng(19)
        x = rng.normal(size=16) + 1j * rng.normal(size=16)
        dev = np.abs(nudft2_lowrank(plan, g, x) - nudft2_exact(g, x)).max()
        assert dev < 1e-6

    def test_lowrank_zero(self):
        g = random_grid(3, 20)
        plan = build_plan(g, 4)
        assert np.all(nudft2_lowrank(plan, g, np.zeros(8)) == 0)

    def test_oracle_equivalence_bound(self):
        # |lowrank - exact| on random inputs <= sqrt(N) |B - B_K|_max |F M_s|
        g = random_grid(3, 21)
        K = 6
        plan = build_plan(g, K)
        bound_scale = (math.sqrt(g.N) * truncation_error(g, K)
                       * math.sqrt(g.c_max))
        rng = np.random.default_rng(22)
        for _ in range(100):
            x = rng.normal(size=8) + 1j * rng.normal(size=8)
            dev = np.linalg.norm(nudft2_lowrank(plan, g, x)
                                 - nudft2_exact(g, x))
            assert dev <= bound_scale * np.linalg.norm(x) + 1e-12

    def test_type1_is_exact_transpose(self):
        g = random_grid(3, 23)
        plan = build_plan(g, 8)
        M2 = lowrank_matrix(plan, g)
        M1 = np.array([nudft1_apply(plan, g, np.eye(8)[k]) for k in range(8)]).T
        assert np.array_equal(M1, M2.T)

    def test_type1_uniform(self):
        g = uniform_grid(3)
        plan = build_plan(g, 10)
        x = np.arange(8, dtype=complex)
        t2 = lowrank_matrix(plan, g) @ x
        t1 = nudft1_apply(plan, g, x)
        assert np.allclose(t1, lowrank_matrix(plan, g).T @ x, atol=1e-12)
        # uniform grid: the type-II matrix is symmetric, so the two agree
        assert np.allclose(t1, t2, atol=1e-9)

    def test_fft_path_agrees_with_direct(self):
        g = random_grid(7, 24)  # N = 128 > direct cutoff
        plan = build_plan(g, 12)
        rng = np.random.default_rng(25)
        x = rng.normal(size=128) + 1j * rng.normal(size=128)
        fast = nudft2_lowrank(plan, g, x)
        exact = nudft2_exact(g, x)
        assert np.abs(fast - exact).max() < 1e-7
        direct = nudft2_matrix(g) @ x
        assert np.allclose(exact, direct, atol=1e-12)

    def test_matrix_entry_modulus(self):
        g = random_grid(3, 33)
        raw = nudft2_matrix(g, "raw")
        assert np.allclose(np.abs(raw), 1.0, atol=1e-14)
        unit = nudft2_matrix(g, "unitary")
        assert np.allclose(np.abs(unit), 1 / math.sqrt(8), atol=1e-14)
        with pytest.raises(ValueError):
            nudft2_matrix(g, "other")

    def test_raw_is_sqrtN_times_unitary(self):
        g = random_grid(3, 26)
        plan = build_plan(g, 6)
        x = np.ones(8, dtype=complex)
        assert np.allclose(nudft2_lowrank(plan, g, x, "raw"),
                           math.sqrt(8) * nudft2_lowrank(plan, g, x, "unitary"),
                           atol=1e-12)


class TestTruncation:
    def test_monotone_and_small_by_16(self):
        for n, seed in ((3, 1), (4, 1), (5, 1)):
            g = random_grid(n, seed)
            errs = [truncation_error(g, K) for K in range(1, 17)]
            assert all(a >= b - 1e-15 for a, b in zip(errs, errs[1:]))
            assert errs[-1] < 1e-10

    def test_selection_matrix(self):
        g = make_grid(2, [0.01, 0.01, 0.52, 0.76])
        Ms = selection_matrix(g)
        assert Ms.sum() == 4
        assert np.array_equal(Ms[:, 0], Ms[:, 1])  # both scatter to bin 0

    def test_narrow_kernel_on_jittered_grid(self):
        # a jitter-gamma grid admits the tighter kernel scale: faster decay
        g = jitter_grid(4, 0.3, 7)
        for K in (4, 6, 8):
            assert truncation_error(g, K, gamma=0.3) \
                < truncation_error(g, K, gamma=0.5)
        plan = build_plan(g, 8, gamma=0.3)
        rng = np.random.default_rng(8)
        x = rng.normal(size=16) + 1j * rng.normal(size=16)
        dev = np.abs(nudft2_lowrank(plan, g, x) - nudft2_exact(g, x)).max()
        assert dev < 1e-6

    def test_narrow_kernel_rejects_wide_offsets(self):
        g = random_grid(3, 34)  # generic grid: offsets exceed 0.2/N
        with pytest.raises(ValueError):
            build_plan(g, 4, gamma=0.2)


class TestFileFormats:
    def test_grid_roundtrip(self, tmp_path):
        g = random_grid(3, 27)
        path = tmp_path / "g.json"
        chebfact.save_grid(g, path)
        g2 = chebfact.load_grid(path)
        assert np.array_equal(g.t, g2.t) and g2.n == 3

    def test_signal_roundtrip(self, tmp_path):
        x = np.array([1 + 2j, -0.5, 0.25j, 3.0])
        path = tmp_path / "s.csv"
        chebfact.save_signal(x, path)
        assert np.array_equal(chebfact.load_signal(path), x)

    def test_signal_header_required(self):
        with pytest.raises(ValueError):
            chebfact.signal_from_csv("1.0,2.0\n")
