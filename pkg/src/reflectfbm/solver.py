"""Reflected Young differential equations: Picard iteration, forward recursion, a priori bound.

Solves, on a uniform grid and with left-point Young sums,

    x(t) = x0 + int_0^t b(s, x) ds + int_0^t sigma(s, x) dg_s + y(t),
    y_i(t) = max_{s <= t} (z_i(s))^-,

where z is x without the regulator term y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .coefficients import CoefficientSpec
from .paths import DiscretePath, UniformGrid, holder_norm
from .skorokhod import running_regulator
from .young import left_point_cells

WINDOW_MODES = ("paper_T1", "fixed", "whole_interval")
T1_SAFETY = 0.99


class SolverError(RuntimeError):
    def __init__(self, message: str, defects: Optional[List[float]] = None):
        super().__init__(message)
        self.defects = list(defects or [])


@dataclass(frozen=True)
class SolverConfig:
    lam: float = 0.55
    gamma: float = 0.7
    tol: float = 1e-10
    max_iters: int = 1000
    window_mode: str = "paper_T1"
    window_length: Optional[float] = None
    track_holder: bool = False

    def __post_init__(self):
        if not 0.5 < self.lam < self.gamma <= 1:
            raise ValueError(f"need 1/2 < lam < gamma <= 1, got lam={self.lam}, gamma={self.gamma}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.window_mode not in WINDOW_MODES:
            raise ValueError(f"window_mode must be one of {WINDOW_MODES}")
        if self.window_mode == "fixed" and not (self.window_length and self.window_length > 0):
            raise ValueError("fixed window mode needs a positive window_length")


def c_gamma_lambda(gamma: float, lam: float) -> float:
    return 1.0 / (2 ** (gamma + lam) - 1)


@dataclass(frozen=True)
class ConstantsLedger:
    d: int
    lam: float
    gamma: float
    T: float
    K0: float
    b_inf: float
    sigma_inf: float
    nu: float
    g_norm: float
    C_d: float
    c_gl: float
    M1: float
    T1: float  # inf when M1 == 0: no window splitting needed
    M_dgl: float
    M2: float
    M3: float

    def h(self, t: float) -> float:
        """Affine part of the one-step Hölder estimate for an iterate on a window of length t."""
        lam, gam = self.lam, self.gamma
        return self.C_d * (
            self.b_inf * t ** (1 - lam)
            + self.sigma_inf * self.g_norm * t ** (gam - lam)
            + self.c_gl * self.K0 * self.g_norm * t ** (gam - lam + self.nu)
        )

    def k1_bound(self, t: float) -> float:
        """Geometric-series bound h(t) / (1 - M1 t^gamma) on the iterates' Hölder norms."""
        q = self.M1 * t**self.gamma
        return math.inf if q >= 1 else self.h(t) / (1 - q)

    def as_rows(self) -> List[Tuple[str, float]]:
        rows = [(k, float(getattr(self, k))) for k in (
            "d", "lam", "gamma", "T", "K0", "b_inf", "sigma_inf", "nu", "g_norm",
            "C_d", "c_gl", "M1", "T1", "M_dgl", "M2", "M3")]
        finite_t1 = self.T1 if math.isfinite(self.T1) else self.T
        rows.append(("h_T1", self.h(min(finite_t1, self.T))))
        rows.append(("h_T", self.h(self.T)))
        return rows


def _m3(d: int, K0: float, sigma_inf: float, nu: float, lam: float, gamma: float, T: float) -> Tuple[float, float]:
    C_d = math.sqrt(d)
    c = c_gamma_lambda(gamma, lam)
    m_dgl = (C_d + 1) * K0 * c
    m3 = T ** (1 - lam) * 2 ** (1 + 1 / gamma) * m_dgl ** (1 / gamma - 1) * (C_d + 1) * (
        sigma_inf + T**nu * K0 * c
    )
    return m_dgl, m3


def build_ledger(coeffs: CoefficientSpec, g: DiscretePath, lam: float, gamma: float) -> ConstantsLedger:
    d, T = coeffs.d, g.grid.length
    g_norm = holder_norm(g, gamma)
    C_d = math.sqrt(d)
    c = c_gamma_lambda(gamma, lam)
    K0 = coeffs.K0
    M1 = C_d * c * K0 * g_norm
    T1 = T1_SAFETY * (1 / M1) ** (1 / gamma) if M1 > 0 else math.inf
    m_dgl, m3 = _m3(d, K0, coeffs.sigma_inf, coeffs.nu, lam, gamma, T)
    return ConstantsLedger(
        d=d, lam=lam, gamma=gamma, T=T, K0=K0, b_inf=coeffs.b_inf, sigma_inf=coeffs.sigma_inf,
        nu=coeffs.nu, g_norm=g_norm, C_d=C_d, c_gl=c, M1=M1, T1=T1, M_dgl=m_dgl,
        M2=2 * (C_d + 1) * coeffs.b_inf * T ** (1 - lam), M3=m3,
    )


@dataclass
class WindowHistory:
    start: int
    end: int
    defects: List[float] = field(default_factory=list)
    holder_norms: List[float] = field(default_factory=list)
    sup_norms: List[float] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.defects) + 1


@dataclass(frozen=True)
class ReflectedSolution:
    x: DiscretePath
    y: DiscretePath
    z: DiscretePath
    iterations_per_window: Tuple[int, ...]
    residual: float
    ledger: ConstantsLedger
    history: Tuple[WindowHistory, ...] = ()

    @property
    def K1(self) -> float:
        """Measured sup over iterates of their Hölder norms per window (needs track_holder)."""
        norms = [v for h in self.history for v in h.holder_norms]
        return max(norms) if norms else float("nan")

    @property
    def K2(self) -> float:
        norms = [v for h in self.history for v in h.sup_norms]
        return max(norms) if norms else float("nan")


def _check_inputs(coeffs: CoefficientSpec, g: DiscretePath, x0, config: SolverConfig) -> np.ndarray:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (coeffs.d,):
        raise ValueError(f"x0 must have {coeffs.d} components")
    if np.any(x0 <= 0):
        raise ValueError(f"x0 must be strictly positive componentwise, got {x0}")
    if g.dim != coeffs.m:
        raise ValueError(f"driver has {g.dim} components, diffusion expects {coeffs.m}")
    if coeffs.nu < config.gamma:
        raise ValueError(f"time-Hölder exponent nu={coeffs.nu} must be >= gamma={config.gamma}")
    return x0


def solver_windows(ledger: ConstantsLedger, g: DiscretePath, config: SolverConfig) -> List[Tuple[int, int]]:
    n, dt = g.grid.n_steps, g.grid.dt
    if config.window_mode == "whole_interval":
        length = math.inf
    elif config.window_mode == "fixed":
        length = config.window_length
    else:
        length = ledger.T1
    steps = n if math.isinf(length) else int(math.floor(length / dt * (1 + 1e-12)))
    if steps < 1:
        raise ValueError(
            f"window length {length:.3g} shorter than grid spacing {dt:.3g}: refine the grid"
        )
    steps = min(steps, n)
    return [(a, min(a + steps, n)) for a in range(0, n, steps)]


def _picard_map(coeffs, t, dt, dg, x_old, z_start, y_start):
    """One application of the solution map on a window given the previous iterate."""
    inc = coeffs.drift(t[:-1], x_old[:-1]) * dt + left_point_cells(coeffs.diffusion(t[:-1], x_old[:-1]), dg)
    z = np.cumsum(np.vstack([z_start[None], inc]), axis=0)
    y = running_regulator(z, y_start)
    return z + y, y, z


def picard_solve(
    coeffs: CoefficientSpec,
    g: DiscretePath,
    x0,
    config: SolverConfig = SolverConfig(),
    start_offset=None,
) -> ReflectedSolution:
    """Picard iteration window by window.

    On each window the first iterate is the constant window-start value
    (shifted by ``start_offset`` if given); z continues from its value at the
    window start and y is the running maximum from time 0.
    """
    x0 = _check_inputs(coeffs, g, x0, config)
    ledger = build_ledger(coeffs, g, config.lam, config.gamma)
    windows = solver_windows(ledger, g, config)
    n, dt = g.grid.n_steps, g.grid.dt
    t = g.grid.times
    dgall = np.diff(g.values, axis=0)
    offset = np.zeros(coeffs.d) if start_offset is None else np.asarray(start_offset, float)

    x = np.empty((n + 1, coeffs.d))
    y = np.zeros_like(x)
    z = np.empty_like(x)
    x[0] = z[0] = x0
    histories = []
    residual = 0.0
    for a, c in windows:
        hist = WindowHistory(a, c)
        x_old = np.broadcast_to(x[a] + offset, (c - a + 1, coeffs.d)).copy()
        tw = t[a : c + 1]
        sub = DiscretePath(UniformGrid(t[a], t[a] + (c - a) * dt, c - a), x_old) if config.track_holder else None
        if config.track_holder:
            hist.holder_norms.append(holder_norm(sub, config.lam))
        hist.sup_norms.append(float(np.max(np.linalg.norm(x_old, axis=1))))
        while True:
            x_new, y_new, z_new = _picard_map(coeffs, tw, dt, dgall[a:c], x_old, z[a], y[a])
            defect = float(np.max(np.abs(x_new - x_old)))
            hist.defects.append(defect)
            hist.sup_norms.append(float(np.max(np.linalg.norm(x_new, axis=1))))
            if config.track_holder:
                hist.holder_norms.append(holder_norm(DiscretePath(sub.grid, x_new), config.lam))
            x_old = x_new
            if defect <= config.tol:
                break
            if hist.iterations >= config.max_iters:
                raise SolverError(
                    f"Picard iteration did not reach tol={config.tol} within {config.max_iters} "
                    f"iterations on window [{t[a]:.6g}, {t[c]:.6g}]",
                    hist.defects,
                )
        x[a : c + 1], y[a : c + 1], z[a : c + 1] = x_new, y_new, z_new
        residual = max(residual, defect)
        histories.append(hist)

    return ReflectedSolution(
        x=DiscretePath(g.grid, x), y=DiscretePath(g.grid, y), z=DiscretePath(g.grid, z),
        iterations_per_window=tuple(h.iterations for h in histories), residual=residual,
        ledger=ledger, history=tuple(histories),
    )


def direct_solve(coeffs: CoefficientSpec, g: DiscretePath, x0, config: SolverConfig = SolverConfig()) -> ReflectedSolution:
    """Node-by-node reflected Euler recursion: the discrete fixed point computed directly."""
    x0 = _check_inputs(coeffs, g, x0, config)
    ledger = build_ledger(coeffs, g, config.lam, config.gamma)
    windows = solver_windows(ledger, g, config)
    n, dt = g.grid.n_steps, g.grid.dt
    t = g.grid.times
    dgall = np.diff(g.values, axis=0)
    x = np.empty((n + 1, coeffs.d))
    y = np.zeros_like(x)
    z = np.empty_like(x)
    x[0] = z[0] = x0
    for k in range(n):
        tk, xk = t[k : k + 1], x[k : k + 1]
        inc = coeffs.drift(tk, xk)[0] * dt + coeffs.diffusion(tk, xk)[0] @ dgall[k]
        z[k + 1] = z[k] + inc
        y[k + 1] = np.maximum(y[k], np.maximum(-z[k + 1], 0.0))
        x[k + 1] = z[k + 1] + y[k + 1]
    return ReflectedSolution(
        x=DiscretePath(g.grid, x), y=DiscretePath(g.grid, y), z=DiscretePath(g.grid, z),
        iterations_per_window=tuple(0 for _ in windows), residual=0.0, ledger=ledger,
    )


def equation_defect(coeffs: CoefficientSpec, g: DiscretePath, x0, sol: ReflectedSolution) -> float:
    """Sup-norm gap between x and the right-hand side of the discrete equation evaluated at x."""
    x = sol.x.values
    dt = g.grid.dt
    inc = coeffs.drift(g.grid.times[:-1], x[:-1]) * dt + left_point_cells(
        coeffs.diffusion(g.grid.times[:-1], x[:-1]), np.diff(g.values, axis=0)
    )
    z = np.vstack([np.asarray(x0, float)[None], np.asarray(x0, float) + np.cumsum(inc, axis=0)])
    rhs = z + running_regulator(z)
    return float(np.max(np.abs(rhs - x)))


@dataclass(frozen=True)
class AprioriBound:
    M2: float
    M3: float
    bound: float
    g_norm: float


def apriori_bound(coeffs: CoefficientSpec, g: DiscretePath, lam: float, gamma: float, T: Optional[float] = None) -> AprioriBound:
    """||x||_lam <= M2 + M3 ||g||_gamma^(1/gamma) for any solution x on [0, T].

    With K0 = 0 the constant M3 collapses to zero and the estimate no longer
    covers a nonzero diffusion; that case is rejected.
    """
    if not 0.5 < lam < gamma <= 1:
        raise ValueError(f"need 1/2 < lam < gamma <= 1, got lam={lam}, gamma={gamma}")
    T = g.grid.length if T is None else T
    d = coeffs.d
    g_norm = holder_norm(g, gamma)
    m_dgl, m3 = _m3(d, coeffs.K0, coeffs.sigma_inf, coeffs.nu, lam, gamma, T)
    if m_dgl == 0 and coeffs.sigma_inf > 0 and g_norm > 0:
        raise ValueError("a priori bound degenerates for K0 = 0 with nonzero diffusion")
    m2 = 2 * (math.sqrt(d) + 1) * coeffs.b_inf * T ** (1 - lam)
    return AprioriBound(M2=m2, M3=m3, bound=m2 + m3 * g_norm ** (1 / gamma), g_norm=g_norm)


@dataclass(frozen=True)
class UniquenessReport:
    tau: float
    hit: bool
    gap: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.gap <= 10 * self.tol


def local_uniqueness_check(
    coeffs: CoefficientSpec, g: DiscretePath, x0, config: SolverConfig = SolverConfig(), perturbation: float = 0.1
) -> UniquenessReport:
    """Solve from two different first iterates and compare before the first boundary hit."""
    if coeffs.time_dependent:
        raise ValueError("local uniqueness check requires a time-independent diffusion")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    a = picard_solve(coeffs, g, x0, config)
    b = picard_solve(coeffs, g, x0, config, start_offset=np.full(coeffs.d, perturbation))
    threshold = 1e-8 * (1 + np.linalg.norm(x0))
    hits = np.nonzero(np.any(a.x.values <= threshold, axis=1))[0]
    hit = hits.size > 0
    k = int(hits[0]) if hit else g.grid.n_steps + 1
    gap = float(np.max(np.abs(a.x.values[:k] - b.x.values[:k]))) if k > 0 else 0.0
    tau = float(g.grid.times[k]) if hit else g.grid.t_end
    return UniquenessReport(tau=tau, hit=hit, gap=gap, tol=config.tol)
