"""Coefficients of the powers of the shift series ``A = sum_j a_j L^j``.

``beta[n][r]`` is the coefficient of ``L^r`` in ``A^n``, equivalently the
coefficient of ``x^r`` in ``(a_0 + a_1 x + ...)^n``. Rows are built by
repeated discrete convolution with ``a`` and truncated at shift ``R``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import MassExceedsOne


@dataclass(frozen=True)
class BetaTriangle:
    """Dense table ``beta[n - 1, r]`` for ``1 <= n <= N``, ``0 <= r <= R``."""

    a: np.ndarray
    N: int
    R: int
    beta: np.ndarray

    @property
    def k_eff(self) -> float:
        return math.fsum(self.a)

    @property
    def j_max(self) -> int:
        nz = np.flatnonzero(self.a)
        return int(nz[-1]) if nz.size else 0

    def row(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.N:
            raise IndexError(f"row {n} outside 1..{self.N}")
        return self.beta[n - 1]

    def lossless(self, n: int) -> bool:
        """True when row ``n`` carries every coefficient of ``A^n``."""
        return self.R >= n * self.j_max


def build_triangle(a, N: int, R: int) -> BetaTriangle:
    """Compute ``beta[n][r]`` for ``n <= N``, ``r <= R`` from unit-scale weights."""
    a = np.array(a, dtype=float).ravel()
    if a.size == 0:
        a = np.zeros(1)
    if not np.all(np.isfinite(a)) or np.any(a < 0.0):
        raise ValueError("weights must be finite and nonnegative")
    if math.fsum(a) >= 1.0:
        raise MassExceedsOne(f"sum of weights {math.fsum(a):.6g} >= 1")
    if N < 1 or R < 0:
        raise ValueError("need N >= 1 and R >= 0")
    N, R = int(N), int(R)
    a_cut = a[:R + 1]
    beta = np.zeros((N, R + 1))
    beta[0, :a_cut.size] = a_cut
    for n in range(1, N):
        beta[n] = np.convolve(beta[n - 1], a_cut)[:R + 1]
    beta.setflags(write=False)
    a.setflags(write=False)
    return BetaTriangle(a=a, N=N, R=R, beta=beta)


def mass_check(tri: BetaTriangle, n: int) -> tuple[float, bool]:
    """Row mass ``sum_r beta[n][r]`` and whether it is exact.

    When the row is truncated (``R < n * j_max``) the sum is only a lower
    bound on ``k_eff ** n`` and the flag is False.
    """
    return math.fsum(tri.row(n)), tri.lossless(n)
