"""Low-rank Chebyshev factorization of the type-II non-uniform DFT.

The transform with uniform integer frequencies and non-uniform sample
locations t_j in [0,1),

    X_k = sum_j exp(-2*pi*i * t_j * k) x_j,        k = 0..N-1,

factors, after snapping each t_j to its nearest dyadic grid point s_j/N, as

    F_II  ~=  sum_r D_{v_r} . F . M_s . D_{u_r}

where F is the DFT matrix, M_s scatters sample j onto grid bin s_j, v_r are
Chebyshev samples over the frequency axis and u_r are Chebyshev-Bessel
combinations of the per-sample offsets.  This module provides the coefficient
tables, the plan builder, the brute-force exact oracle, and the fast appliers
(type II and its transpose, type I).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

CLAMP_TOL = 1e-9
_DIRECT_DFT_MAX = 64  # dense DFT matrix below this size, FFT above


def cheb_T(r: int, x: float) -> float:
    """First-kind Chebyshev polynomial T_r(x) by the three-term recurrence."""
    x = _clamped(x, 1e-12)
    if r == 0:
        return 1.0
    t_prev, t = 1.0, x
    for _ in range(r - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t


def cheb_S(r: int, x: float) -> float:
    """Second-kind Chebyshev polynomial: S_0 = 1, S_1 = 2x, same recurrence."""
    x = _clamped(x, 1e-12)
    if r == 0:
        return 1.0
    s_prev, s = 1.0, 2.0 * x
    for _ in range(r - 1):
        s_prev, s = s, 2.0 * x * s - s_prev
    return s


def _clamped(x: float, tol: float) -> float:
    if abs(x) > 1.0 + tol:
        raise ValueError(f"Chebyshev argument {x} outside [-1, 1]")
    return min(1.0, max(-1.0, x))


def bessel_J(nu: int, x: float) -> float:
    """Bessel function of the first kind, integer order, by power series.

    Terms are accumulated until they drop below 1e-18; for x < 0 the parity
    J_nu(-x) = (-1)^nu J_nu(x) is applied.  Only small arguments occur here
    (|x| <= 4), where the series converges in a handful of terms.
    """
    if nu < 0:
        raise ValueError("order must be non-negative")
    if abs(x) > 4.0:
        raise ValueError("series evaluation restricted to |x| <= 4")
    sign = (-1.0) ** nu if x < 0 else 1.0
    x = abs(x)
    half = x / 2.0
    term = half**nu / math.factorial(nu)
    total = term
    k = 0
    while abs(term) >= 1e-18:
        k += 1
        term *= -(half * half) / (k * (nu + k))
        total += term
    return sign * total


def _bessel_any_order(nu: int, x: float) -> float:
    """J_nu for possibly negative integer order via J_{-n} = (-1)^n J_n."""
    if nu >= 0:
        return bessel_J(nu, x)
    return (-1.0) ** (-nu) * bessel_J(-nu, x)


def alpha_table(K: int, gamma: float = 0.5) -> np.ndarray:
    """K x K table of expansion coefficients for exp(-i*pi*gamma*x*y).

    Entry (q, r) is 4 i^r J_{(q+r)/2}(-gamma*pi/2) J_{(r-q)/2}(-gamma*pi/2)
    when |q - r| is even and 0 otherwise, with the first row and column
    halved and the corner quartered (the usual primed-sum convention folded
    into the coefficients).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not 0.0 < gamma <= 0.5:
        raise ValueError("gamma must lie in (0, 1/2]")
    z = -gamma * math.pi / 2.0
    out = np.zeros((K, K), dtype=complex)
    for q in range(K):
        for r in range(K):
            if (q - r) % 2 != 0:
                continue
            val = 4.0 * (1j) ** r * _bessel_any_order((q + r) // 2, z) \
                * _bessel_any_order((r - q) // 2, z)
            if q == 0 and r == 0:
                val /= 4.0
            elif q == 0 or r == 0:
                val /= 2.0
            out[q, r] = val
    return out


def _effective_alpha(K: int, gamma: float = 0.5) -> np.ndarray:
    """Coefficients actually used in the rank-1 sum u_r v_r^T.

    The r = 0 column is doubled: the constant-term halving is realized
    physically by v_0 = 1/2, so keeping it in the column as well would
    undercount that term by a factor of two.
    """
    eff = alpha_table(K, gamma)
    eff[:, 0] *= 2.0
    return eff


def nearest_grid(t: float, n: int) -> int:
    """Nearest dyadic grid index: round(N*t) with round-half-up, mod N."""
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t must lie in [0,1), got {t}")
    N = 2**n
    return int(math.floor(N * t + 0.5)) % N


def _round_unreduced(t: float, n: int) -> int:
    """round(N*t) before the mod-N wrap; may equal N for t near 1."""
    return int(math.floor(2**n * t + 0.5))


@dataclass(frozen=True)
class SampleGrid:
    """Non-uniform sample locations plus their nearest-grid bookkeeping."""

    n: int
    t: np.ndarray
    s: np.ndarray
    c_s: np.ndarray
    c_max: int

    @property
    def N(self) -> int:
        return 2**self.n

    def offsets(self) -> np.ndarray:
        """Per-sample offsets t_j - s_j/N on the torus, in [-1/2N, 1/2N].

        Samples within half a cell of 1 wrap to the negative side of grid
        point 0 (exactly what the fixed-point shift register realizes).
        """
        raw = np.array([_round_unreduced(tj, self.n) for tj in self.t])
        return self.t - raw / self.N

    def scaled_offsets(self) -> np.ndarray:
        """Chebyshev arguments 2N*(t_j - s_j/N), clamped into [-1, 1]."""
        y = 2 * self.N * self.offsets()
        if np.any(np.abs(y) > 1.0 + CLAMP_TOL):
            j = int(np.argmax(np.abs(y)))
            raise ValueError(f"scaled offset {y[j]} at sample {j} exceeds [-1,1]")
        return np.clip(y, -1.0, 1.0)


def make_grid(n: int, t) -> SampleGrid:
    t = np.asarray(t, dtype=float)
    N = 2**n
    if t.shape != (N,):
        raise ValueError(f"expected {N} sample locations, got shape {t.shape}")
    if np.any(t < 0.0) or np.any(t >= 1.0):
        raise ValueError("sample locations must lie in [0, 1)")
    s = np.array([nearest_grid(tj, n) for tj in t], dtype=int)
    c_s = np.bincount(s, minlength=N)
    return SampleGrid(n=n, t=t, s=s, c_s=c_s, c_max=int(c_s.max()))


# Grid generators (deterministic under a seed) -------------------------------

def uniform_grid(n: int) -> SampleGrid:
    N = 2**n
    return make_grid(n, np.arange(N) / N)


def jitter_grid(n: int, gamma: float, seed: int) -> SampleGrid:
    """Perturbed dyadic grid with |t_j - j/N| <= gamma/N guaranteed."""
    if not 0.0 <= gamma <= 0.5:
        raise ValueError("jitter width must lie in [0, 1/2]")
    N = 2**n
    rng = np.random.default_rng(seed)
    u = rng.uniform(-1.0, 1.0, N)
    u[0] = abs(u[0])  # keep t_0 >= 0 without wrapping
    return make_grid(n, (np.arange(N) + gamma * u) / N)


def random_grid(n: int, seed: int) -> SampleGrid:
    rng = np.random.default_rng(seed)
    return make_grid(n, rng.uniform(0.0, 1.0, 2**n))


def clustered_grid(n: int, seed: int, clusters: int = 4) -> SampleGrid:
    """Samples bunched around a few centers; drives up the occupancy c_max."""
    N = 2**n
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.05, 0.95, clusters)
    t = centers[rng.integers(0, clusters, N)] + rng.normal(0.0, 0.25 / N, N)
    return make_grid(n, np.mod(t, 1.0))


# Plan ------------------------------------------------------------------------

@dataclass(frozen=True)
class LowRankPlan:
    """Rank-K factorization data: coefficient table and diagonal vectors.

    ``alpha`` is the effective coefficient table (r = 0 column doubled to
    compensate for v_0 = 1/2); ``alpha_row_norms[r]`` is its exact column-r
    1-norm, the normalization each u_r carries through the encoding.
    """

    K: int
    gamma: float
    alpha: np.ndarray
    u: np.ndarray  # K x N complex
    v: np.ndarray  # K x N real
    alpha_row_norms: np.ndarray

    def to_json(self) -> str:
        payload = {
            "K": self.K,
            "gamma": self.gamma,
            "alpha": _complex_to_pairs(self.alpha),
            "u": _complex_to_pairs(self.u),
            "v": self.v.tolist(),
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "LowRankPlan":
        d = json.loads(text)
        alpha = _pairs_to_complex(d["alpha"])
        return LowRankPlan(
            K=d["K"], gamma=d["gamma"], alpha=alpha,
            u=_pairs_to_complex(d["u"]), v=np.asarray(d["v"], dtype=float),
            alpha_row_norms=np.abs(alpha).sum(axis=0),
        )


def _complex_to_pairs(a: np.ndarray):
    return [[[z.real, z.imag] for z in row] for row in np.asarray(a, complex)]


def _pairs_to_complex(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def build_plan(grid: SampleGrid, K: int, gamma: float = 0.5) -> LowRankPlan:
    """Evaluate the u_r and v_r diagonal vectors for a grid at rank K."""
    if K < 1:
        raise ValueError("K must be >= 1")
    N = grid.N
    eff = _effective_alpha(K, gamma)
    offs = grid.offsets()
    args = 2 * N * offs * (0.5 / gamma)  # N*(t-s/N)/gamma, = 2N*(t-s/N) at gamma=1/2
    if np.any(np.abs(args) > 1.0 + CLAMP_TOL):
        j = int(np.argmax(np.abs(args)))
        raise ValueError(f"Chebyshev argument {args[j]} at sample {j} exceeds [-1,1]")
    args = np.clip(args, -1.0, 1.0)

    phase = np.exp(-1j * math.pi * N * offs)
    tq = np.array([[cheb_T(q, a) for a in args] for q in range(K)])
    u = (eff.T @ tq) * phase[np.newaxis, :]

    xs = 2.0 * np.arange(N) / N - 1.0
    v = np.array([[cheb_T(r, x) for x in xs] for r in range(K)])
    v[0, :] = 0.5

    return LowRankPlan(K=K, gamma=gamma, alpha=eff, u=u, v=v,
                       alpha_row_norms=np.abs(eff).sum(axis=0))


# Transforms ------------------------------------------------------------------

def nudft2_matrix(grid: SampleGrid, normalization: str = "unitary") -> np.ndarray:
    """Dense type-II matrix, rows = integer frequencies, columns = samples."""
    scale = _norm_scale(grid.N, normalization)
    k = np.arange(grid.N)
    return scale * np.exp(-2j * math.pi * np.outer(k, grid.t))


def nudft2_exact(grid: SampleGrid, x, normalization: str = "unitary") -> np.ndarray:
    """Brute-force O(N^2) oracle: X_k = sum_j exp(-2*pi*i*t_j*k) x_j."""
    x = _check_signal(grid, x)
    return nudft2_matrix(grid, normalization) @ x


def _norm_scale(N: int, normalization: str) -> float:
    if normalization == "unitary":
        return 1.0 / math.sqrt(N)
    if normalization == "raw":
        return 1.0
    raise ValueError(f"unknown normalization {normalization!r}")


def _check_signal(grid: SampleGrid, x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (grid.N,):
        raise ValueError(f"signal length {x.shape} does not match N={grid.N}")
    return x


def dft_matrix(N: int, normalization: str = "unitary") -> np.ndarray:
    jk = np.outer(np.arange(N), np.arange(N))
    return _norm_scale(N, normalization) * np.exp(-2j * math.pi * jk / N)


def _apply_dft(z: np.ndarray, normalization: str) -> np.ndarray:
    if len(z) <= _DIRECT_DFT_MAX:
        return dft_matrix(len(z), normalization) @ z
    out = np.fft.fft(z)
    return out * _norm_scale(len(z), normalization)


def lowrank_matrix(plan: LowRankPlan, grid: SampleGrid,
                   normalization: str = "unitary") -> np.ndarray:
    """Materialize sum_r D_{v_r} F M_s D_{u_r} densely (desk scale)."""
    N = grid.N
    F = dft_matrix(N, normalization)
    Ms = selection_matrix(grid)
    out = np.zeros((N, N), dtype=complex)
    for r in range(plan.K):
        out += (plan.v[r][:, None] * F) @ (Ms * plan.u[r][None, :])
    return out


def selection_matrix(grid: SampleGrid) -> np.ndarray:
    """0-1 scatter matrix with entry (i, j) = 1 iff i = s_j."""
    Ms = np.zeros((grid.N, grid.N))
    Ms[grid.s, np.arange(grid.N)] = 1.0
    return Ms


def nudft2_lowrank(plan: LowRankPlan, grid: SampleGrid, x,
                   normalization: str = "unitary") -> np.ndarray:
    """Fast type-II apply: weight by u_r, scatter onto the grid, DFT, weight by v_r."""
    x = _check_signal(grid, x)
    N = grid.N
    out = np.zeros(N, dtype=complex)
    for r in range(plan.K):
        w = plan.u[r] * x
        z = np.zeros(N, dtype=complex)
        np.add.at(z, grid.s, w)
        out += plan.v[r] * _apply_dft(z, normalization)
    return out


def nudft1_apply(plan: LowRankPlan, grid: SampleGrid, x,
                 normalization: str = "unitary") -> np.ndarray:
    """Type-I apply, the exact transpose of the type-II factorization.

    At desk scale the type-II matrix is materialized and transposed so the
    duality holds to the last bit; above that the transposed pipeline
    (weight by v_r, DFT, gather at s_j, weight by u_r) runs on the FFT.
    The DFT matrix is symmetric, so its transpose needs no extra work.
    """
    x = _check_signal(grid, x)
    N = grid.N
    if N <= _DIRECT_DFT_MAX:
        return lowrank_matrix(plan, grid, normalization).T @ x
    out = np.zeros(N, dtype=complex)
    for r in range(plan.K):
        z = _apply_dft(plan.v[r] * x, normalization)
        out += plan.u[r] * z[grid.s]
    return out


def truncation_error(grid: SampleGrid, K: int, gamma: float = 0.5) -> float:
    """Max-norm error of the rank-K kernel approximation on this grid.

    Compares exp(-2*pi*i*(t_j - s_j/N)*k) entrywise against the plan's
    rank sum u_r(j) v_r(k), which reproduces the kernel exactly in the
    K -> infinity limit (no DFT involved).
    """
    plan = build_plan(grid, K, gamma)
    N = grid.N
    offs = grid.offsets()
    k = np.arange(N)
    exact = np.exp(-2j * math.pi * np.outer(offs, k))
    approx = plan.u.T @ plan.v
    return float(np.abs(exact - approx).max())


# File formats ----------------------------------------------------------------

def grid_to_json(grid: SampleGrid) -> str:
    return json.dumps({"n": grid.n, "t": grid.t.tolist()}, sort_keys=True)


def grid_from_json(text: str) -> SampleGrid:
    d = json.loads(text)
    return make_grid(int(d["n"]), d["t"])


def load_grid(path) -> SampleGrid:
    with open(path, "r", encoding="utf-8") as fh:
        return grid_from_json(fh.read())


def save_grid(grid: SampleGrid, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(grid_to_json(grid))


def signal_to_csv(x) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re", "im"])
    for z in np.asarray(x, dtype=complex):
        writer.writerow([repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def signal_from_csv(text: str) -> np.ndarray:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["re", "im"]:
        raise ValueError("signal CSV must start with header 're,im'")
    return np.array([complex(float(r), float(i)) for r, i in rows[1:]])


def load_signal(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return signal_from_csv(fh.read())


def save_signal(x, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(signal_to_csv(x))
