"""Built-in drift/diffusion families with known Lipschitz, sup and time-Hölder constants.

Every family has the form

    b(t, x)     = a + B tanh(x)
    sigma(t, x) = c(t) (C + diag(tanh(x)) S),    c(t) = 1 + amp sin(freq t)

with ``B = S = 0`` for the constant family and ``amp = 0`` for the
time-homogeneous one.  Norms are Euclidean on vectors, Frobenius on matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class CoefficientSpec:
    family: str
    a: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    amp: float = 0.0
    freq: float = 0.0
    horizon: float = 1.0

    def __post_init__(self):
        for name in ("a", "B", "C", "S"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        d, m = self.C.shape
        if self.a.shape != (d,) or self.B.shape != (d, d) or self.S.shape != (d, m):
            raise ValueError("inconsistent coefficient shapes")
        if not 0 <= self.amp < 1:
            raise ValueError("time modulation amplitude must lie in [0, 1)")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")

    # constructors

    @classmethod
    def zero(cls, d: int, m: int) -> "CoefficientSpec":
        return cls("zero", np.zeros(d), np.zeros((d, d)), np.zeros((d, m)), np.zeros((d, m)))

    @classmethod
    def constant(cls, a, C) -> "CoefficientSpec":
        C = np.atleast_2d(np.asarray(C, dtype=float))
        d, m = C.shape
        return cls("constant", np.broadcast_to(np.asarray(a, float), (d,)), np.zeros((d, d)), C, np.zeros((d, m)))

    @classmethod
    def tanh(cls, a, B, C, S) -> "CoefficientSpec":
        return cls("tanh", a, np.atleast_2d(B), np.atleast_2d(C), np.atleast_2d(S))

    @classmethod
    def tanh_time(cls, a, B, C, S, amp: float, freq: float, horizon: float = 1.0) -> "CoefficientSpec":
        return cls("tanh_time", a, np.atleast_2d(B), np.atleast_2d(C), np.atleast_2d(S), amp, freq, horizon)

    # shape and constants

    @property
    def d(self) -> int:
        return self.C.shape[0]

    @property
    def m(self) -> int:
        return self.C.shape[1]

    @property
    def time_dependent(self) -> bool:
        return self.amp != 0 and self.freq != 0

    @property
    def nu(self) -> float:
        # c(t) is Lipschitz, hence nu = 1 >= any admissible gamma.
        return 1.0

    @property
    def b_inf(self) -> float:
        return float(np.linalg.norm(self.a) + np.linalg.norm(self.B, 2) * np.sqrt(self.d))

    @property
    def _sigma_base_inf(self) -> float:
        return float(np.linalg.norm(self.C) + np.linalg.norm(self.S))

    @property
    def sigma_inf(self) -> float:
        return (1 + self.amp) * self._sigma_base_inf

    @property
    def K0(self) -> float:
        """One constant serving as Lipschitz bound of b and sigma in x and time-Hölder bound of sigma."""
        lip_b = np.linalg.norm(self.B, 2)
        lip_sigma = (1 + self.amp) * np.max(np.linalg.norm(self.S, axis=1))
        time_holder = self.amp * abs(self.freq) * self._sigma_base_inf * self.horizon ** (1 - self.nu)
        return float(max(lip_b, lip_sigma, time_holder))

    # evaluation on batches: t (k,), x (k, d)

    def drift(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        return self.a + np.tanh(x) @ self.B.T

    def diffusion(self, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        base = self.C[None] + np.tanh(x)[:, :, None] * self.S[None]
        if self.amp:
            base = base * (1 + self.amp * np.sin(self.freq * np.asarray(t)))[:, None, None]
        return base
