"""Uniform grids, discrete paths, the increment coboundary and discrete Hölder norms.

Every seminorm here is a maximum over pairs of grid nodes, so it
under-estimates the continuum supremum and is exact for piecewise-linear
data.  Window endpoints must be grid nodes; nothing is interpolated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

Window = Optional[Tuple[float, float]]

# Dense increment tables above this size would need O(n^2 d) memory.
DENSE_LIMIT = 512


@dataclass(frozen=True)
class UniformGrid:
    t_start: float
    t_end: float
    n_steps: int

    def __post_init__(self):
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)):
            raise ValueError("grid endpoints must be finite")
        if not self.t_start < self.t_end:
            raise ValueError(f"need t_start < t_end, got {self.t_start} >= {self.t_end}")
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"n_steps must be a positive integer, got {self.n_steps}")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    @property
    def length(self) -> float:
        return self.t_end - self.t_start

    @property
    def times(self) -> np.ndarray:
        return self.t_start + np.arange(self.n_steps + 1) * self.dt

    def index_of(self, t: float, rtol: float = 1e-9) -> int:
        """Node index of time ``t``; raises if ``t`` is not a grid node."""
        k = int(round((t - self.t_start) / self.dt))
        if k < 0 or k > self.n_steps or abs(self.t_start + k * self.dt - t) > rtol * max(self.dt, 1.0):
            raise ValueError(f"time {t} is not a node of {self}")
        return k

    def window_indices(self, window: Window = None) -> Tuple[int, int]:
        if window is None:
            return 0, self.n_steps
        s, t = window
        i, j = self.index_of(s), self.index_of(t)
        if i > j:
            raise ValueError(f"window start {s} after window end {t}")
        return i, j

    def refine(self, factor: int = 2) -> "UniformGrid":
        return UniformGrid(self.t_start, self.t_end, self.n_steps * factor)


@dataclass(frozen=True)
class DiscretePath:
    """A d-dimensional path sampled on a uniform grid.

    ``values`` has shape ``(n_steps + 1, dim)``: one row per node.
    """

    grid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != self.grid.n_steps + 1:
            raise ValueError(
                f"values must have shape ({self.grid.n_steps + 1}, d), got {np.shape(self.values)}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("path values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid: UniformGrid, fn: Callable[[np.ndarray], np.ndarray]) -> "DiscretePath":
        return cls(grid, fn(grid.times))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def component(self, i: int) -> "DiscretePath":
        return DiscretePath(self.grid, self.values[:, i])

    def restrict(self, window: Window) -> "DiscretePath":
        i, j = self.grid.window_indices(window)
        if i == j:
            raise ValueError("cannot restrict to a single node")
        g = UniformGrid(self.grid.t_start + i * self.grid.dt, self.grid.t_start + j * self.grid.dt, j - i)
        return DiscretePath(g, self.values[i : j + 1])

    def coarsen(self, factor: int) -> "DiscretePath":
        if self.grid.n_steps % factor:
            raise ValueError(f"n_steps={self.grid.n_steps} not divisible by {factor}")
        g = UniformGrid(self.grid.t_start, self.grid.t_end, self.grid.n_steps // factor)
        return DiscretePath(g, self.values[::factor])

    def _combine(self, other, op):
        if isinstance(other, DiscretePath):
            if other.grid != self.grid:
                raise ValueError("paths live on different grids")
            other = other.values
        return DiscretePath(self.grid, op(self.values, other))

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, c):
        return DiscretePath(self.grid, self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return DiscretePath(self.grid, -self.values)


class Increment2:
    """A 1-increment h_{st} on grid nodes, evaluated lazily.

    ``fn(i, j)`` receives broadcastable integer index arrays and returns
    values with a trailing axis of size ``dim``.
    """

    def __init__(self, grid: UniformGrid, dim: int, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        self.grid = grid
        self.dim = dim
        self._fn = fn

    @classmethod
    def from_function(cls, grid: UniformGrid, dim: int, fn) -> "Increment2":
        """Build from a function of times ``fn(s, t)`` (arrays in, ``(..., dim)`` out)."""
        times = grid.times

        def table(i, j):
            out = np.asarray(fn(times[i], times[j]), dtype=float)
            shape = np.broadcast(i, j).shape
            return out.reshape(shape + (dim,))

        return cls(grid, dim, table)

    def at(self, i, j) -> np.ndarray:
        i, j = np.asarray(i), np.asarray(j)
        return self._fn(i, j)

    def dense(self) -> np.ndarray:
        """Full ``(n+1, n+1, dim)`` table; refused above the memory guard."""
        n = self.grid.n_steps
        if n > DENSE_LIMIT:
            raise MemoryError(f"dense Increment2 table refused for n_steps={n} > {DENSE_LIMIT}")
        idx = np.arange(n + 1)
        return self.at(idx[:, None], idx[None, :])


class Increment3:
    """A 2-increment h_{sut} on grid nodes, evaluated lazily."""

    def __init__(self, grid: UniformGrid, dim: int, fn):
        self.grid = grid
        self.dim = dim
        self._fn = fn

    def at(self, i, u, j) -> np.ndarray:
        return self._fn(np.asarray(i), np.asarray(u), np.asarray(j))

    def dense(self) -> np.ndarray:
        n = self.grid.n_steps
        if n > DENSE_LIMIT // 8:
            raise MemoryError(f"dense Increment3 table refused for n_steps={n}")
        idx = np.arange(n + 1)
        return self.at(idx[:, None, None], idx[None, :, None], idx[None, None, :])


def delta1(g: DiscretePath) -> Increment2:
    v = g.values
    return Increment2(g.grid, g.dim, lambda i, j: v[j] - v[i])


def delta2(h: Increment2) -> Increment3:
    return Increment3(h.grid, h.dim, lambda s, u, t: h.at(s, t) - h.at(s, u) - h.at(u, t))


def gamma_rho_norm(h: Increment3, gamma: float, rho: float, window: Window = None) -> float:
    """max |h_{sut}| / ((u-s)^gamma (t-u)^rho) over node triples s < u < t."""
    i0, j0 = h.grid.window_indices(window)
    dt = h.grid.dt
    best = 0.0
    for s in range(i0, j0 - 1):
        u = np.arange(s + 1, j0)[:, None]
        t = np.arange(s + 2, j0 + 1)[None, :]
        mask = t > u
        uu, tt = np.broadcast_arrays(u, t)
        uu, tt = uu[mask], tt[mask]
        vals = np.linalg.norm(h.at(s, uu, tt), axis=-1)
        denom = ((uu - s) * dt) ** gamma * ((tt - uu) * dt) ** rho
        best = max(best, float(np.max(vals / denom)))
    return best


def _window_values(f: DiscretePath, window: Window) -> Tuple[np.ndarray, int]:
    i, j = f.grid.window_indices(window)
    return f.values[i : j + 1], j - i


def _holder_sq_by_lag(v: np.ndarray) -> np.ndarray:
    """Per lag k = 1..n, the max squared increment norm, shape (n, d) -> (n,)."""
    n = v.shape[0] - 1
    out = np.empty(n)
    for k in range(1, n + 1):
        dv = v[k:] - v[:-k]
        out[k - 1] = np.max(np.einsum("ij,ij->i", dv, dv))
    return out


def holder_norm(f: DiscretePath, lam: float, window: Window = None) -> float:
    """Discrete λ-Hölder seminorm max_{u<v} |f(v)-f(u)| / (v-u)^λ on the window."""
    if not 0 < lam <= 1:
        raise ValueError(f"Hölder exponent must lie in (0, 1], got {lam}")
    v, n = _window_values(f, window)
    if n == 0:
        raise ValueError("degenerate window: no node pairs")
    # power-of-two rescaling is exact and keeps squared increments in range
    peak = float(np.max(np.abs(v)))
    if peak == 0:
        return 0.0
    scale = 2.0 ** int(np.frexp(peak)[1])
    lags = np.arange(1, n + 1) * f.grid.dt
    sq = _holder_sq_by_lag(v / scale)
    return scale * float(np.sqrt(np.max(sq / lags ** (2 * lam))))


def holder_norm_componentwise(f: DiscretePath, lam: float, window: Window = None) -> np.ndarray:
    return np.array([holder_norm(f.component(i), lam, window) for i in range(f.dim)])


def sup_norm(f: DiscretePath, window: Window = None) -> float:
    v, _ = _window_values(f, window)
    return float(np.max(np.linalg.norm(v, axis=1)))


def write_path_csv(target: Union[str, Path], path: DiscretePath, names: Optional[Sequence[str]] = None) -> None:
    """CSV with header ``t,x_1,...,x_d`` (or custom column names), 17 significant digits."""
    names = list(names) if names is not None else [f"x_{i + 1}" for i in range(path.dim)]
    if len(names) != path.dim:
        raise ValueError("one column name per component required")
    write_columns_csv(target, ["t"] + names, np.column_stack([path.times, path.values]))


def write_columns_csv(target: Union[str, Path], header: Sequence[str], data: np.ndarray) -> None:
    with open(target, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in np.atleast_2d(data):
            w.writerow([format_float(x) for x in row])


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def read_path_csv(source: Union[str, Path]) -> DiscretePath:
    with open(source, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "t":
        raise ValueError(f"{source}: first column must be 't'")
    data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float)
    if data.shape[0] < 2:
        raise ValueError(f"{source}: need at least two nodes")
    t = data[:, 0]
    grid = UniformGrid(float(t[0]), float(t[-1]), len(t) - 1)
    if not np.allclose(t, grid.times, rtol=0, atol=1e-9 * max(grid.length, 1.0)):
        raise ValueError(f"{source}: time column is not a uniform grid")
    return DiscretePath(grid, data[:, 1:])
