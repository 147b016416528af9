"""Exact sampling of fractional Brownian motion and Hölder-regularity measurement."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import linalg

from .paths import DiscretePath, UniformGrid, holder_norm

CHOLESKY_CAP = 4096
DEFAULT_EPSILON = 0.05


class FactorizationError(RuntimeError):
    pass


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for stream ``index`` of ``master_seed``; independent of scheduling."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(index),))
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


@dataclass(frozen=True)
class FbmSpec:
    hurst: float
    dim: int
    grid: UniformGrid
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.hurst < 1:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if self.grid.t_start != 0:
            raise ValueError("fBm grids must start at t = 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class HolderReport:
    lam: float
    holder_value: float
    estimated_exponent: float
    eta_proxy: float
    epsilon: float


def fbm_covariance(s, t, hurst: float):
    """E[W_s W_t] = (s^2H + t^2H - |t-s|^2H) / 2."""
    s, t = np.asarray(s, dtype=float), np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ValueError("fBm covariance needs nonnegative times")
    h2 = 2 * hurst
    out = 0.5 * (s**h2 + t**h2 - np.abs(t - s) ** h2)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=16)
def _cholesky_factor(n: int, dt: float, hurst: float) -> np.ndarray:
    t = np.arange(1, n + 1) * dt
    cov = fbm_covariance(t[:, None], t[None, :], hurst)
    try:
        return linalg.cholesky(cov, lower=True)
    except linalg.LinAlgError as exc:
        raise FactorizationError(
            f"covariance matrix not positive definite for n_steps={n}, H={hurst}"
        ) from exc


def _component_normals(spec: FbmSpec) -> np.ndarray:
    n = spec.grid.n_steps
    out = np.empty((spec.dim, n))
    for j in range(spec.dim):
        rng = np.random.default_rng(np.random.SeedSequence(int(spec.seed), spawn_key=(j,)))
        out[j] = rng.standard_normal(n)
    return out


def fgn_autocovariance(n: int, dt: float, hurst: float) -> np.ndarray:
    """Covariance of increments over cells k apart, k = 0..n-1."""
    k = np.arange(n, dtype=float)
    h2 = 2 * hurst
    rho = 0.5 * (np.abs(k + 1) ** h2 + np.abs(k - 1) ** h2 - 2 * k**h2)
    return dt**h2 * rho


def levinson_fgn(xi: np.ndarray, dt: float, hurst: float) -> np.ndarray:
    """Map standard normals ``xi`` (rows) to fractional Gaussian noise.

    Durbin-Levinson innovations: row-for-row this equals ``chol(T) @ xi`` with
    ``T`` the Toeplitz increment covariance, without forming ``T``.
    """
    xi = np.atleast_2d(xi)
    n = xi.shape[1]
    r = fgn_autocovariance(n, dt, hurst)
    x = np.empty_like(xi)
    v = r[0]
    x[:, 0] = np.sqrt(v) * xi[:, 0]
    phi = np.empty(0)
    for k in range(1, n):
        kk = (r[k] - phi @ r[k - 1 : 0 : -1]) / v
        phi = np.concatenate([phi - kk * phi[::-1], [kk]])
        v *= 1.0 - kk * kk
        if v <= 0:
            raise FactorizationError(f"Levinson recursion lost positivity at step {k} of n_steps={n}")
        x[:, k] = x[:, k - 1 :: -1] @ phi + np.sqrt(v) * xi[:, k]
    return x


def sample_fbm(spec: FbmSpec, method: str = "cholesky", cap: int = CHOLESKY_CAP) -> DiscretePath:
    """One draw of ``spec.dim`` independent fBm components, W(0) = 0.

    ``method="cholesky"`` factors the dense covariance of (W(t_1), ..., W(t_n))
    and is limited to ``n_steps <= cap``.  ``method="levinson"`` factors the
    Toeplitz increment covariance recursively in O(n^2) time and O(n) memory;
    for a given seed both produce the same path up to round-off.
    """
    n, dt = spec.grid.n_steps, spec.grid.dt
    xi = _component_normals(spec)
    if method == "cholesky":
        if n > cap:
            raise ValueError(f"n_steps={n} exceeds the Cholesky cap {cap}; use method='levinson'")
        w = xi @ _cholesky_factor(n, dt, float(spec.hurst)).T
    elif method == "levinson":
        w = np.cumsum(levinson_fgn(xi, dt, spec.hurst), axis=1)
    else:
        raise ValueError(f"unknown sampling method {method!r}")
    values = np.zeros((n + 1, spec.dim))
    values[1:] = w.T
    return DiscretePath(spec.grid, values)


def sample_fbm_batch(grid: UniformGrid, hurst: float, n_draws: int, seed: int) -> np.ndarray:
    """``n_draws`` scalar fBm paths from a single stream, shape ``(n_draws, n_steps + 1)``.

    For ensemble statistics; per-draw reproducibility goes through :func:`sample_fbm`.
    """
    n = grid.n_steps
    if n > CHOLESKY_CAP:
        raise ValueError(f"n_steps={n} exceeds the Cholesky cap {CHOLESKY_CAP}")
    FbmSpec(hurst, 1, grid, seed)
    L = _cholesky_factor(n, grid.dt, float(hurst))
    rng = np.random.default_rng(int(seed))
    out = np.zeros((n_draws, n + 1))
    out[:, 1:] = rng.standard_normal((n_draws, n)) @ L.T
    return out


def regression_lags(n_steps: int) -> np.ndarray:
    lags = []
    k = 1
    while k <= n_steps // 8:
        lags.append(k)
        k *= 2
    return np.array(lags, dtype=int)


def estimate_exponent(path: DiscretePath) -> float:
    """Slope of log E|increment at lag h| against log h over dyadic lags up to n/8."""
    lags = regression_lags(path.grid.n_steps)
    if len(lags) < 3:
        raise ValueError(f"grid with n_steps={path.grid.n_steps} too coarse for 3 regression lags")
    v = path.values
    means = np.array([np.mean(np.linalg.norm(v[k:] - v[:-k], axis=1)) for k in lags])
    if np.any(means <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.log(lags * path.grid.dt), np.log(means), 1)
    return float(slope)


def measure_regularity(
    path: DiscretePath, hurst: float, epsilon: float = DEFAULT_EPSILON, lam: Optional[float] = None
) -> HolderReport:
    if not 0 < epsilon < hurst:
        raise ValueError(f"need 0 < epsilon < hurst, got epsilon={epsilon}, hurst={hurst}")
    estimated = estimate_exponent(path)
    eta = holder_norm(path, hurst - epsilon)
    lam = hurst - epsilon if lam is None else lam
    value = eta if lam == hurst - epsilon else holder_norm(path, lam)
    return HolderReport(lam=lam, holder_value=value, estimated_exponent=estimated, eta_proxy=eta, epsilon=epsilon)
