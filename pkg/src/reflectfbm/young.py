"""Young integration by left-point sums, with dyadic refinement diagnostics and the a priori bound."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Union

import numpy as np

from .paths import DiscretePath, Window, holder_norm, sup_norm

Integrand = Union[DiscretePath, np.ndarray]


@dataclass(frozen=True)
class YoungBoundParams:
    """Exponents for the integral bound: ``gamma`` for g, ``kappa`` for f, interpolation ``beta``."""

    gamma: float
    kappa: float
    beta: float = 0.0

    def __post_init__(self):
        if not 0 < self.gamma <= 1 or not 0 < self.kappa <= 1:
            raise ValueError("gamma and kappa must lie in (0, 1]")
        if not 0 <= self.beta < 1:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if self.gamma + self.kappa <= 1:
            raise ValueError("need gamma + kappa > 1")
        if self.mu_beta <= 1:
            raise ValueError(
                f"mu_beta = gamma + kappa (1 - beta) = {self.mu_beta} must exceed 1"
            )

    @property
    def mu_beta(self) -> float:
        return self.gamma + self.kappa * (1 - self.beta)

    @property
    def c_coeff(self) -> float:
        return 2**self.beta / (2**self.mu_beta - 1)


def _integrand_values(f: Integrand, g: DiscretePath) -> np.ndarray:
    """Integrand as an ``(n+1, r, d)`` array of matrices acting on increments of g."""
    n1, d = g.values.shape
    if isinstance(f, DiscretePath):
        if f.grid != g.grid:
            raise ValueError("integrand and integrator live on different grids")
        if f.dim == 1:
            return f.values[:, :, None] * np.eye(d)[None]
        if f.dim == d:
            return f.values[:, None, :]
        raise ValueError(f"integrand of dim {f.dim} not conformable with integrator dim {d}")
    arr = np.asarray(f, dtype=float)
    if arr.ndim != 3 or arr.shape[0] != n1 or arr.shape[2] != d:
        raise ValueError(f"matrix integrand must have shape ({n1}, r, {d}), got {arr.shape}")
    return arr


def _flat(f: Integrand, g: DiscretePath) -> DiscretePath:
    """Integrand as a path in R^{r d} so that its Euclidean norm is the Frobenius norm."""
    if isinstance(f, DiscretePath):
        return f
    arr = _integrand_values(f, g)
    return DiscretePath(g.grid, arr.reshape(arr.shape[0], -1))


def left_point_cells(fvals: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Per-cell contributions f(t_k) (g(t_{k+1}) - g(t_k)), shape ``(k, r)``."""
    return np.einsum("krd,kd->kr", fvals, dg)


def young_integral(f: Integrand, g: DiscretePath, window: Window = None) -> np.ndarray:
    """Left-point Riemann-Stieltjes sum of f dg over the window.

    ``f`` is a scalar path, a path of the same dimension as ``g`` (row vector),
    or an ``(n+1, r, d)`` array of matrices.
    """
    fvals = _integrand_values(f, g)
    i, j = g.grid.window_indices(window)
    dg = np.diff(g.values[i : j + 1], axis=0)
    return left_point_cells(fvals[i:j], dg).sum(axis=0)


def refinement_defect(f: Integrand, g: DiscretePath, window: Window = None, levels: int = 4) -> List[float]:
    """``|I_l - I_{l-1}|`` for l = 1..levels, I_l the sum on the grid coarsened by 2^l."""
    i, j = g.grid.window_indices(window)
    cells = j - i
    if levels < 1 or cells % (2**levels):
        raise ValueError(f"window of {cells} cells is not divisible by 2^{levels}")
    fvals = _integrand_values(f, g)[i : j + 1]
    gvals = g.values[i : j + 1]
    sums = []
    for lev in range(levels + 1):
        step = 2**lev
        fv, gv = fvals[::step], gvals[::step]
        sums.append(left_point_cells(fv[:-1], np.diff(gv, axis=0)).sum(axis=0))
    return [float(np.linalg.norm(sums[lev] - sums[lev - 1])) for lev in range(1, levels + 1)]


def defect_decay_rate(defects) -> float:
    """Fitted exponent r with defect_l ~ 2^{r l}; r ~ kappa + gamma - 1 for regular inputs."""
    d = np.asarray(defects, dtype=float)
    if len(d) < 2 or np.any(d <= 0):
        return float("nan")
    slope, _ = np.polyfit(np.arange(1, len(d) + 1), np.log2(d), 1)
    return float(slope)


def young_bound(f: Integrand, g: DiscretePath, window: Window, params: YoungBoundParams) -> float:
    """Right-hand side of the Young estimate with discrete norms on the window:

    ||f||_inf ||g||_gamma |t-s|^gamma + c ||f||_inf^beta ||f||_kappa^(1-beta) ||g||_gamma |t-s|^mu_beta
    """
    fp = _flat(f, g)
    i, j = g.grid.window_indices(window)
    length = (j - i) * g.grid.dt
    f_inf = sup_norm(fp, window)
    if f_inf == 0:
        return 0.0
    g_gam = holder_norm(g, params.gamma, window)
    f_kap = holder_norm(fp, params.kappa, window)
    b = params.beta
    return (
        f_inf * g_gam * length**params.gamma
        + params.c_coeff * f_inf**b * f_kap ** (1 - b) * g_gam * length**params.mu_beta
    )
