"""Solutions ``y = f + h * f`` for inputs mixing Dirac atoms and a regular part.

The input is ``f = sum_i w_i delta(t - t_i) + f1``. Atoms are resolved in
closed form (``w_i h(t - t_i)``), only ``f1`` is integrated numerically. Two
routes compute ``h_delta * f1``:

* :func:`solve` convolves samples of ``h_delta`` with ``f1`` directly;
* :func:`convolve_gamma_route` rescales ``f1`` to unit step, convolves it with
  each ``gamma_n`` and recombines the shifted results with ``beta[n][r]``.

Both use the product trapezoidal rule with one-sided limits at the cell
edges of ``h_delta``, which keeps them second order when ``delta`` is a
multiple of the grid step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import GridMismatch, OutOfHorizon
from .resolvent import Resolvent

_STEP_RTOL = 1e-9


@dataclass(frozen=True)
class Constant:
    c: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, self.c, 0.0)


@dataclass(frozen=True)
class TwoPlusSin:
    """``2 + sin(t)`` for ``t >= 0``."""

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, 2.0 + np.sin(t), 0.0)


@dataclass(frozen=True)
class Function:
    """Wraps an arbitrary vectorized callable; zero for negative times."""

    fn: Callable

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0.0, self.fn(np.maximum(t, 0.0)), 0.0)


@dataclass(frozen=True)
class Samples:
    """Values of ``f1`` on the grid ``i * step``."""

    step: float
    values: np.ndarray

    def __post_init__(self):
        if not self.step > 0.0:
            raise ValueError("sample step must be positive")
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class InputSignal:
    """``sum_i w_i delta(t - t_i) + regular``; ``regular=None`` means zero."""

    atoms: tuple = ()
    regular: object = None

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        times = [t for t, _ in atoms]
        if any(t < 0.0 for t in times):
            raise ValueError("atom times must be nonnegative")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("atom times must be strictly increasing")
        object.__setattr__(self, "atoms", atoms)


@dataclass(frozen=True)
class Solution:
    """Dirac part (pass-through atoms) and sampled regular part of ``y``."""

    atoms: tuple
    grid: np.ndarray
    regular_samples: np.ndarray
    regular_input: np.ndarray = field(repr=False)
    atom_response: np.ndarray = field(repr=False)
    convolution: np.ndarray = field(repr=False)
    quadrature_error: float | None = None


def uniform_grid(horizon: float, step: float) -> np.ndarray:
    """Grid ``0, step, ..., horizon``; ``step`` must divide ``horizon``."""
    m = round(horizon / step)
    if m < 1 or abs(m * step - horizon) > _STEP_RTOL * horizon:
        raise GridMismatch(f"step {step!r} does not divide horizon {horizon!r}")
    return np.arange(m + 1) * step


def grid_step(grid) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0:
        raise GridMismatch("grid must be 1-D, start at 0 and have >= 2 points")
    step = (grid[-1] - grid[0]) / (grid.size - 1)
    if not step > 0.0 or np.max(np.abs(np.diff(grid) - step)) > _STEP_RTOL * max(step, grid[-1]):
        raise GridMismatch("grid must be uniform and increasing")
    return step


def _regular_on_grid(regular, grid, step):
    if regular is None:
        return np.zeros(grid.size)
    if isinstance(regular, Samples):
        if abs(regular.step - step) > _STEP_RTOL * step:
            raise GridMismatch(f"sample step {regular.step!r} != grid step {step!r}")
        if regular.values.size < grid.size:
            raise GridMismatch("fewer samples than grid points")
        return np.array(regular.values[:grid.size])
    return np.asarray(regular(grid), dtype=float)


def _check_horizon(res, grid, f):
    if grid[-1] > res.horizon * (1.0 + 1e-12):
        raise OutOfHorizon(f"grid ends at {grid[-1]} > horizon {res.horizon}")
    for t, _ in f.atoms:
        if t > res.horizon:
            raise OutOfHorizon(f"atom at {t} > horizon {res.horizon}")


def trapezoid_convolve(k_right, k_left, f, step):
    """Product trapezoid for ``int_0^{t_m} k(t_m - tau) f(tau) dtau``.

    ``k_right``/``k_left`` hold right and left limits of ``k`` at lags
    ``0, step, 2 step, ...``; ``f`` is continuous on the grid. The node
    weight at a jump of ``k`` is the mean of its one-sided limits.
    """
    k_right = np.asarray(k_right, dtype=float)
    k_left = np.asarray(k_left, dtype=float)
    f = np.asarray(f, dtype=float)
    M = f.size
    k_mid = 0.5 * (k_right[:M] + k_left[:M])
    full = np.convolve(k_mid, f)[:M]
    out = full - k_mid * f[0] - k_mid[0] * f
    out += 0.5 * k_left[:M] * f[0] + 0.5 * k_right[0] * f
    out[0] = 0.0
    return step * out


def atom_response(res: Resolvent, atoms, grid):
    """``sum_i w_i h_delta(t - t_i)`` for ``t >= t_i`` on the grid."""
    out = np.zeros(grid.size)
    for t_i, w_i in atoms:
        lag = grid - t_i
        on = lag >= 0.0
        if np.any(on):
            out[on] += w_i * res(lag[on])
    return out


def _direct_convolution(res, f1, step, M):
    lags = np.arange(M) * step
    return trapezoid_convolve(res(lags), res(lags, side="left"), f1, step)


def solve(res: Resolvent, f: InputSignal, grid, estimate_error: bool = False) -> Solution:
    """Evaluate the regular part of ``y = f + h_delta * f`` on ``grid``.

    With ``estimate_error`` the convolution is repeated on the half-step grid
    and a Richardson estimate of the quadrature error is attached (only for
    closed-form regular parts).
    """
    grid = np.asarray(grid, dtype=float)
    step = grid_step(grid)
    _check_horizon(res, grid, f)
    f1 = _regular_on_grid(f.regular, grid, step)
    conv = _direct_convolution(res, f1, step, grid.size)
    atoms = atom_response(res, f.atoms, grid)
    qerr = None
    if estimate_error and f.regular is not None and not isinstance(f.regular, Samples):
        fine_grid = np.arange(2 * grid.size - 1) * (0.5 * step)
        fine = _direct_convolution(res, f.regular(fine_grid), 0.5 * step, fine_grid.size)
        qerr = float(np.max(np.abs(fine[::2] - conv))) * 4.0 / 3.0
    return Solution(atoms=f.atoms, grid=grid, regular_samples=f1 + atoms + conv,
                    regular_input=f1, atom_response=atoms, convolution=conv,
                    quadrature_error=qerr)


def scale_signal(f1, delta: float):
    """Measure-preserving rescale ``(S_delta f1)(t) = f1(t / delta) / delta``."""
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    if f1 is None:
        return None
    if isinstance(f1, Samples):
        return Samples(f1.step * delta, f1.values / delta)
    if isinstance(f1, Constant):
        return Constant(f1.c / delta)
    return Function(lambda t, _f=f1, _d=delta: _f(t / _d) / _d)


def _gamma_lags(res, n, p, M):
    """Right and left limits of ``gamma_n`` at lags ``i / p``, ``i < M``."""
    count = min(M, n * p + 1)
    i = np.arange(count)
    right = np.zeros(M)
    left = np.zeros(M)
    right[:count] = res.gamma(n, i / p)
    left[:count] = right[:count]
    if n == 1:
        # rect jumps at 0 and 1; the grid hits both edges
        left[0] = 0.0
        if p < M:
            left[p] = 1.0
    return right, left


def convolve_gamma_route(res: Resolvent, f: InputSignal, grid) -> Solution:
    """Same output as :func:`solve`, with ``h_delta * f1`` assembled from ``gamma_n * f1``.

    Requires ``delta`` to be an integer multiple ``p`` of the grid step. The
    signal is mapped to unit step by ``S_{1/delta}``; each ``gamma_n * F`` is
    computed by product trapezoid on the grid ``i / p``, shifted by ``r``
    cells, weighted by ``beta[n][r]``, and mapped back by ``S_delta``.
    """
    grid = np.asarray(grid, dtype=float)
    step = grid_step(grid)
    _check_horizon(res, grid, f)
    p = round(res.delta / step)
    if p < 1 or abs(p * step - res.delta) > _STEP_RTOL * res.delta:
        raise GridMismatch(f"delta {res.delta!r} is not a multiple of grid step {step!r}")
    M = grid.size
    f1 = _regular_on_grid(f.regular, grid, step)
    unit_signal = res.delta * f1  # S_{1/delta} f1 sampled at v_i = i / p
    total = np.zeros(M)
    if np.any(unit_signal):
        for n in range(1, res.N + 1):
            right, left = _gamma_lags(res, n, p, M)
            part = trapezoid_convolve(right, left, unit_signal, 1.0 / p)
            row = res.triangle.beta[n - 1]
            r_max = min(row.size - 1, (M - 1) // p)
            spread = np.zeros(r_max * p + 1)
            spread[::p] = row[:r_max + 1]
            total += np.convolve(part, spread)[:M]
    conv = total / res.delta
    atoms = atom_response(res, f.atoms, grid)
    return Solution(atoms=f.atoms, grid=grid, regular_samples=f1 + atoms + conv,
                    regular_input=f1, atom_response=atoms, convolution=conv)


def signal_l1(f: InputSignal, horizon: float, grid=None) -> float:
    """``sum |w_i| + int_0^T |f1|`` (trapezoid on ``grid`` for the regular part)."""
    mass = math.fsum(abs(w) for t, w in f.atoms if t <= horizon)
    if f.regular is None:
        return mass
    if isinstance(f.regular, Constant):
        return mass + abs(f.regular.c) * horizon
    if grid is None:
        grid = np.linspace(0.0, horizon, 4097)
    grid = np.asarray(grid, dtype=float)
    vals = np.abs(_regular_on_grid(f.regular, grid, grid_step(grid)))
    return mass + float(np.trapezoid(vals, grid) if hasattr(np, "trapezoid") else np.trapz(vals, grid))


def from_dict(doc: dict) -> InputSignal:
    """Parse ``{"atoms": [[t, w], ...], "regular": {...}}``; unknown fields raise."""
    if not isinstance(doc, dict):
        raise ValueError("signal document must be an object")
    extra = set(doc) - {"atoms", "regular"}
    if extra:
        raise ValueError(f"unknown signal fields: {sorted(extra)}")
    atoms = doc.get("atoms", [])
    if not isinstance(atoms, list) or not all(isinstance(a, list) and len(a) == 2 for a in atoms):
        raise ValueError("'atoms' must be a list of [t, w] pairs")
    reg = doc.get("regular")
    regular = None
    if reg is not None:
        kind = reg.get("type") if isinstance(reg, dict) else None
        allowed = {"constant": {"c"}, "two_plus_sin": set(), "samples": {"step", "values"}}
        if kind not in allowed:
            raise ValueError(f"unknown regular type {kind!r}")
        extra = set(reg) - allowed[kind] - {"type"}
        missing = allowed[kind] - set(reg)
        if extra or missing:
            raise ValueError(f"regular {kind}: unknown {sorted(extra)}, missing {sorted(missing)}")
        if kind == "constant":
            regular = Constant(float(reg["c"]))
        elif kind == "two_plus_sin":
            regular = TwoPlusSin()
        else:
            regular = Samples(float(reg["step"]), reg["values"])
    return InputSignal(atoms=tuple(tuple(a) for a in atoms), regular=regular)
