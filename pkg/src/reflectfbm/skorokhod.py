"""Orthant Skorokhod map: componentwise normal reflection of a path at zero."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .paths import DiscretePath, UniformGrid, Window, holder_norm

# Lipschitz constants of the orthant map in sup norm.
K_REGULATOR = 1.0
K_REFLECTOR = 2.0


@dataclass(frozen=True)
class SkorokhodSolution:
    z: DiscretePath
    x: DiscretePath
    y: DiscretePath

    def complementarity(self) -> np.ndarray:
        """Per component, sum_k x(t_{k+1}) (y(t_{k+1}) - y(t_k)).

        The regulator only moves on steps that end at the boundary, so this
        forward-point sum vanishes up to round-off.
        """
        dy = np.diff(self.y.values, axis=0)
        return np.sum(self.x.values[1:] * dy, axis=0)


@dataclass(frozen=True)
class CounterexampleReport:
    t1: float
    t2: float
    t: float
    lam: float
    norm_ydiff: float
    norm_zdiff: float
    ratio: float


@dataclass(frozen=True)
class LipschitzReport:
    input_dist: float
    reflector_dist: float
    regulator_dist: float
    K_reflector: float = K_REFLECTOR
    K_regulator: float = K_REGULATOR

    @property
    def ok(self) -> bool:
        return (
            self.regulator_dist <= self.K_regulator * self.input_dist
            and self.reflector_dist <= self.K_reflector * self.input_dist
        )


def running_regulator(zvals: np.ndarray, start=0.0) -> np.ndarray:
    """max(start, max_{j<=k} (z_j)^-) along axis 0."""
    return np.maximum(start, np.maximum.accumulate(np.maximum(-zvals, 0.0), axis=0))


def regulator(z: DiscretePath) -> DiscretePath:
    if np.any(z.values[0] < 0):
        raise ValueError(f"path must start in the nonnegative orthant, z(0) = {z.values[0]}")
    return DiscretePath(z.grid, running_regulator(z.values))


def solve_skorokhod(z: DiscretePath) -> SkorokhodSolution:
    y = regulator(z)
    return SkorokhodSolution(z=z, x=DiscretePath(z.grid, z.values + y.values), y=y)


def regulator_holder_check(z: DiscretePath, lam: float, window: Window = None) -> Tuple[float, float]:
    """(||y||_lam, sqrt(d) ||z||_lam) on the window; the first never exceeds the second."""
    y = regulator(z)
    return holder_norm(y, lam, window), np.sqrt(z.dim) * holder_norm(z, lam, window)


def _sup_dist(a: np.ndarray, b: np.ndarray) -> float:
    # max over time and components: the orthant constants 1 and 2 are sharp in
    # this norm but fail in the Euclidean one once d > 1
    return float(np.max(np.abs(a - b)))


def lipschitz_check(z1: DiscretePath, z2: DiscretePath) -> LipschitzReport:
    if z1.grid != z2.grid or z1.dim != z2.dim:
        raise ValueError("paths must share grid and dimension")
    s1, s2 = solve_skorokhod(z1), solve_skorokhod(z2)
    return LipschitzReport(
        input_dist=_sup_dist(z1.values, z2.values),
        reflector_dist=_sup_dist(s1.x.values, s2.x.values),
        regulator_dist=_sup_dist(s1.y.values, s2.y.values),
    )


def counterexample_paths(t1: float, t2: float, t: float, n_steps: int):
    """The pair z1, z2 whose regulators differ by a steep ramp on (t1, t2]."""
    if not 0 < t1 < t2 < t:
        raise ValueError(f"need 0 < t1 < t2 < t, got {t1}, {t2}, {t}")
    grid = UniformGrid(0.0, t, n_steps)
    i1, i2 = grid.index_of(t1), grid.index_of(t2)
    s = grid.times
    ramp = np.zeros_like(s)
    ramp[i1 + 1 : i2 + 1] = (t2 - s[i1 + 1 : i2 + 1]) / (t2 - t1)
    z1 = ramp - 1.0
    z1[: i1 + 1] = 0.0
    z2 = ramp.copy()
    z2[: i1 + 1] = s[: i1 + 1] / t1
    return DiscretePath(grid, z1), DiscretePath(grid, z2)


def counterexample(t1: float, t2: float, t: float, lam: float, n_steps: int) -> CounterexampleReport:
    """Regulator differences are not controlled in Hölder norm by input differences.

    On a grid containing t1 and t2, ||y2 - y1||_lam = (t2 - t1)^-lam while
    ||z2 - z1||_lam = t1^-lam.
    """
    if not 0 < lam < 1:
        raise ValueError("lam must lie in (0, 1)")
    z1, z2 = counterexample_paths(t1, t2, t, n_steps)
    y1, y2 = regulator(z1), regulator(z2)
    ny = holder_norm(y2 - y1, lam)
    nz = holder_norm(z2 - z1, lam)
    return CounterexampleReport(t1=t1, t2=t2, t=t, lam=lam, norm_ydiff=ny, norm_zdiff=nz, ratio=ny / nz)
