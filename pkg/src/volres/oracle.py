"""Brute-force reference solvers used by the tests and ``volres validate``.

Nothing here touches the series machinery: the resolvent equation
``h = g + g * h`` is marched directly with the product trapezoidal rule, and
the Neumann series is summed by repeated discrete convolution. Only kernel
evaluation is shared with the main pipeline.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import MassExceedsOne


@dataclass(frozen=True)
class QuadratureSolution:
    step: float
    t: np.ndarray
    values: np.ndarray
    order: int = 2


def _node_values(g, g_left, t):
    """Node weights and left limits of the kernel on the grid."""
    right = np.asarray(g(t), dtype=float)
    if g_left is None:
        return right, right
    # mean of one-sided limits keeps the trapezoid second order at node-aligned jumps
    left = np.asarray(g_left(t), dtype=float)
    mid = 0.5 * (right + left)
    mid[0] = right[0]
    return mid, left


def _trapezoid_mass(samples, step):
    if samples.size < 2:
        return 0.0
    return step * (math.fsum(samples) - 0.5 * (samples[0] + samples[-1]))


def solve_volterra_direct(g, step: float, horizon: float, g_left=None,
                          mass_hint: float | None = None) -> QuadratureSolution:
    """March ``h_m = g_m + step * sum'' g_{m-j} h_j`` on ``0, step, ..., horizon``.

    ``g`` is a vectorized callable; pass ``g_left`` (left limits) for kernels
    with jumps on grid nodes. The implicit diagonal term is solved exactly.
    """
    if not step > 0.0:
        raise ValueError("step must be positive")
    M = int(round(horizon / step))
    t = np.arange(M + 1) * step
    gv, gl = _node_values(g, g_left, t)
    mass = mass_hint if mass_hint is not None else _trapezoid_mass(np.abs(gv), step)
    if mass >= 1.0:
        raise MassExceedsOne(f"kernel mass {mass:.6g} >= 1")
    h = np.zeros(M + 1)
    h[0] = gv[0]
    diag = 1.0 - 0.5 * step * gv[0]
    for m in range(1, M + 1):
        # g_{m-j} for j = 1 .. m-1 is gv[m-1:0:-1]
        interior = np.dot(gv[m - 1:0:-1], h[1:m]) if m > 1 else 0.0
        # the s = 0 end of the integrand sees g just below t_m
        rhs = gv[m] + step * (0.5 * gl[m] * h[0] + interior)
        h[m] = rhs / diag
    return QuadratureSolution(step=step, t=t, values=h)


def convolve(f, g, step: float):
    """Trapezoid samples of ``(f * g)(t_m) = int_0^{t_m} f(t_m - s) g(s) ds``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    M = min(f.size, g.size)
    f, g = f[:M], g[:M]
    out = np.empty(M)
    out[0] = 0.0
    for m in range(1, M):
        prod = f[m::-1] * g[:m + 1]
        out[m] = step * (prod.sum() - 0.5 * (prod[0] + prod[-1]))
    return out


def convolve_limits(f_right, f_left, g_right, g_left, step: float):
    """Like :func:`convolve` for functions with jumps at grid nodes.

    At each node the integrand ``f(t - s) g(s)`` takes the mean of its left
    and right limits in ``s``, which are ``f((t-s)+) g(s-)`` and
    ``f((t-s)-) g(s+)``.
    """
    fr, fl, gr, gl = (np.asarray(a, dtype=float) for a in (f_right, f_left, g_right, g_left))
    M = min(fr.size, gr.size)
    out = np.empty(M)
    out[0] = 0.0
    for m in range(1, M):
        s_plus = fl[m::-1] * gr[:m + 1]
        s_minus = fr[m::-1] * gl[:m + 1]
        mid = 0.5 * (s_plus + s_minus)
        out[m] = step * (mid[1:-1].sum() + 0.5 * (s_plus[0] + s_minus[-1]))
    return out


def neumann_direct(g_samples, step: float, depth: int):
    """Partial Neumann sum ``sum_{n <= depth} g^{*n}`` on the sample grid.

    Returns ``(total, masses)`` where ``masses[n - 1]`` is the trapezoid L1
    mass of the ``n``-th convolution power.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    g = np.asarray(g_samples, dtype=float)
    term = g.copy()
    total = g.copy()
    masses = [_trapezoid_mass(np.abs(term), step)]
    for _ in range(1, depth):
        term = convolve(term, g, step)
        total += term
        masses.append(_trapezoid_mass(np.abs(term), step))
    return total, masses
