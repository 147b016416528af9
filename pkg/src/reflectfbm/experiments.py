"""Experiment configuration, seeded Monte Carlo over fBm drivers, and CSV reports."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from .coefficients import CoefficientSpec
from .fbm import FbmSpec, derive_seed, sample_fbm
from .paths import DiscretePath, UniformGrid, format_float, holder_norm
from .solver import SolverConfig, apriori_bound, direct_solve, picard_solve
from .young import YoungBoundParams, defect_decay_rate, refinement_defect, young_bound, young_integral

FAMILIES = ("zero", "constant", "tanh", "tanh_time")


class ConfigError(ValueError):
    pass


def _floats(text: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _optional_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none") else float(text)


def _bool(text: str) -> bool:
    if text.strip().lower() in ("1", "true", "yes"):
        return True
    if text.strip().lower() in ("0", "false", "no"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    hurst: float = 0.75
    gamma: Optional[float] = None
    lambda0: Optional[float] = None
    dim: int = 1
    driver_dim: int = 1
    t_end: float = 1.0
    n_steps: int = 512
    family: str = "tanh"
    drift_a: float = 0.1
    drift_b: float = -0.5
    sigma_c: float = 0.3
    sigma_s: float = 0.2
    time_amp: float = 0.5
    time_freq: float = 2 * math.pi
    x0: Tuple[float, ...] = (1.0,)
    n_paths: int = 100
    master_seed: int = 0
    p_list: Tuple[float, ...] = (1.0, 2.0, 4.0)
    epsilon: float = 0.05
    solver: str = "direct"
    tol: float = 1e-10
    max_iters: int = 1000
    window_mode: str = "paper_T1"
    window_length: Optional[float] = None
    out_dir: str = "out"

    def __post_init__(self):
        # gamma defaults to H - 0.05, lambda0 to the midpoint of (1/2, gamma)
        if self.gamma is None:
            object.__setattr__(self, "gamma", self.hurst - 0.05)
        if self.lambda0 is None:
            object.__setattr__(self, "lambda0", (0.5 + self.gamma) / 2)
        x0 = tuple(float(v) for v in np.atleast_1d(self.x0))
        if len(x0) == 1 and self.dim > 1:
            x0 = x0 * self.dim
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "p_list", tuple(float(p) for p in self.p_list))
        self.validate()

    def validate(self) -> None:
        if not 0.5 < self.lambda0:
            raise ConfigError(f"constraint 1/2 < λ₀ violated: lambda0={self.lambda0}")
        if not self.lambda0 < self.gamma:
            raise ConfigError(f"constraint λ₀ < γ violated: lambda0={self.lambda0}, gamma={self.gamma}")
        if not self.gamma < self.hurst:
            raise ConfigError(f"constraint γ < H violated: gamma={self.gamma}, hurst={self.hurst}")
        if not self.hurst < 1:
            raise ConfigError(f"constraint H < 1 violated: hurst={self.hurst}")
        if self.dim < 1 or self.driver_dim < 1:
            raise ConfigError("dim and driver_dim must be >= 1")
        if len(self.x0) != self.dim:
            raise ConfigError(f"x0 has {len(self.x0)} entries, dim is {self.dim}")
        if self.n_paths < 1:
            raise ConfigError("n_paths must be >= 1")
        if any(p < 1 for p in self.p_list):
            raise ConfigError("moment orders in p_list must be >= 1")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.solver not in ("direct", "picard"):
            raise ConfigError("solver must be 'direct' or 'picard'")
        if not 0 < self.epsilon < self.hurst:
            raise ConfigError("need 0 < epsilon < hurst")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")

    @property
    def grid(self) -> UniformGrid:
        return UniformGrid(0.0, self.t_end, self.n_steps)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            lam=self.lambda0, gamma=self.gamma, tol=self.tol, max_iters=self.max_iters,
            window_mode=self.window_mode, window_length=self.window_length,
        )

    def coefficients(self) -> CoefficientSpec:
        d, m = self.dim, self.driver_dim
        if self.family == "zero":
            return CoefficientSpec.zero(d, m)
        a = np.full(d, self.drift_a)
        C = np.full((d, m), self.sigma_c)
        if self.family == "constant":
            return CoefficientSpec.constant(a, C)
        B = self.drift_b * np.eye(d)
        S = np.full((d, m), self.sigma_s)
        if self.family == "tanh":
            return CoefficientSpec.tanh(a, B, C, S)
        return CoefficientSpec.tanh_time(a, B, C, S, self.time_amp, self.time_freq, self.t_end)


_PARSERS = {
    "hurst": float, "gamma": _optional_float, "lambda0": _optional_float, "dim": int,
    "driver_dim": int, "t_end": float, "n_steps": int, "family": str.strip, "drift_a": float,
    "drift_b": float, "sigma_c": float, "sigma_s": float, "time_amp": float, "time_freq": float,
    "x0": _floats, "n_paths": int, "master_seed": int, "p_list": _floats, "epsilon": float,
    "solver": str.strip, "tol": float, "max_iters": int, "window_mode": str.strip,
    "window_length": _optional_float, "out_dir": str.strip,
}
assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _PARSERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for key {key!r}: {exc}") from None
    return ExperimentConfig(**values)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    return parse_config(Path(path).read_text(), str(path))


def _format_value(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, tuple):
        return ", ".join(format_float(x) for x in v)
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def format_config(config: ExperimentConfig) -> str:
    return "".join(f"{f.name} = {_format_value(getattr(config, f.name))}\n" for f in fields(config))


def emit_config(config: ExperimentConfig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(format_config(config))
    return path


# Monte Carlo


@dataclass(frozen=True)
class PathRecord:
    i: int
    seed: int
    holder_x: float
    holder_g: float
    bound: float
    ok: bool


@dataclass(frozen=True)
class MomentEstimate:
    p: float
    estimate: float
    stderr: float
    n: int


@dataclass(frozen=True)
class MomentReport:
    moments: Tuple[MomentEstimate, ...]
    paths: Tuple[PathRecord, ...] = field(repr=False)

    @property
    def all_ok(self) -> bool:
        return all(r.ok for r in self.paths)


class PathFailure(RuntimeError):
    pass


def driver_for(config: ExperimentConfig, seed: int) -> DiscretePath:
    return sample_fbm(FbmSpec(config.hurst, config.driver_dim, config.grid, seed))


def solve_path(config: ExperimentConfig, i: int) -> PathRecord:
    seed = derive_seed(config.master_seed, i)
    try:
        g = driver_for(config, seed)
        coeffs = config.coefficients()
        solve = direct_solve if config.solver == "direct" else picard_solve
        sol = solve(coeffs, g, np.array(config.x0), config.solver_config())
        hx = holder_norm(sol.x, config.lambda0)
        ab = apriori_bound(coeffs, g, config.lambda0, config.gamma)
    except (ValueError, RuntimeError) as exc:
        raise PathFailure(f"path {i} (seed {seed}) failed: {exc}") from exc
    return PathRecord(i=i, seed=seed, holder_x=hx, holder_g=ab.g_norm, bound=ab.bound, ok=hx <= ab.bound)


def summarize(records, p_list) -> Tuple[MomentEstimate, ...]:
    hx = np.array([r.holder_x for r in records])
    n = len(hx)
    out = []
    for p in p_list:
        vals = hx**p
        se = float(np.std(vals, ddof=1) / math.sqrt(n)) if n > 1 else float("nan")
        out.append(MomentEstimate(p=p, estimate=float(np.mean(vals)), stderr=se, n=n))
    return tuple(out)


def run_mc(config: ExperimentConfig, workers: int = 1) -> MomentReport:
    """Solve ``n_paths`` fBm-driven equations and estimate E ||X||_{lambda0}^p.

    Path i uses the driver seeded by ``derive_seed(master_seed, i)`` and the
    results are folded in index order, so the report does not depend on
    ``workers``.
    """
    idx = range(config.n_paths)
    if workers <= 1:
        records = [solve_path(config, i) for i in idx]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(solve_path, [config] * config.n_paths, idx, chunksize=8))
    return MomentReport(moments=summarize(records, config.p_list), paths=tuple(records))


def write_rows(path: Path, header, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return path


def emit_report(report: MomentReport, out_dir: Union[str, Path]) -> List[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    moments = write_rows(
        out / "moments.csv", ["p", "estimate", "stderr", "n"],
        [(m.p, m.estimate, m.stderr, m.n) for m in report.moments],
    )
    paths = write_rows(
        out / "paths.csv", ["i", "seed", "holder_x", "holder_g", "bound", "ok"],
        [(r.i, r.seed, r.holder_x, r.holder_g, r.bound, int(r.ok)) for r in report.paths],
    )
    return [moments, paths]


# Young bound corpus


@dataclass(frozen=True)
class YoungRecord:
    pair_id: int
    kind: str
    window: Tuple[float, float]
    integral: float
    bound: float
    beta: float
    defect_rate: float

    @property
    def ok(self) -> bool:
        return abs(self.integral) <= self.bound


def smooth_pair(rng: np.random.Generator, grid: UniformGrid) -> Tuple[DiscretePath, DiscretePath]:
    t = grid.times
    a, b, c, e = rng.uniform(-3, 3, 4)
    w1, w2 = rng.uniform(0.5, 8, 2)
    f = np.sin(w1 * t + a) + c * t**2
    g = np.cos(w2 * t + b) + e * t
    return DiscretePath(grid, f), DiscretePath(grid, g)


def fbm_pair(hurst: float, grid: UniformGrid, seed: int) -> Tuple[DiscretePath, DiscretePath]:
    w = sample_fbm(FbmSpec(hurst, 2, grid, seed))
    return w.component(0), w.component(1)


def young_corpus(
    seed: int = 0,
    n_smooth: int = 20,
    n_fbm: int = 50,
    hurst: float = 0.8,
    n_steps: int = 256,
    betas=(0.0, 0.3, 0.7),
    windows_per_pair: int = 5,
    levels: int = 4,
) -> List[YoungRecord]:
    """Integral vs bound over random windows for smooth and fBm-sampled pairs.

    Smooth pairs use gamma = kappa = 1, fBm pairs gamma = kappa = H - 0.02.
    """
    grid = UniformGrid(0.0, 1.0, n_steps)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(0,)))
    records = []
    for pid in range(n_smooth + n_fbm):
        if pid < n_smooth:
            kind, (f, g), reg = "smooth", smooth_pair(rng, grid), 1.0
        else:
            kind, (f, g), reg = "fbm", fbm_pair(hurst, grid, derive_seed(seed, pid)), hurst - 0.02
        rate = defect_decay_rate(refinement_defect(f, g, None, levels))
        for _ in range(windows_per_pair):
            i, j = sorted(rng.choice(n_steps + 1, size=2, replace=False))
            win = (float(grid.times[i]), float(grid.times[j]))
            val = float(young_integral(f, g, win)[0])
            for beta in betas:
                bnd = young_bound(f, g, win, YoungBoundParams(reg, reg, beta))
                records.append(YoungRecord(pid, kind, win, val, bnd, beta, rate))
    return records
