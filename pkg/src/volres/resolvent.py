"""Resolvent of a piecewise-constant kernel as a finite operator series.

For the unit-step kernel ``g = sum_j a_j rect(t - j)`` the resolvent is::

    h(x) = sum_{n >= 1} sum_r beta[n][r] gamma_n(x - r)

and the step-``delta`` kernel with heights ``beta_j`` has ``a_j = beta_j delta``
and ``h_delta(t) = h(t / delta) / delta``. The series depth is cut at the
first ``N`` for which the sup-norm tail bound
``max(beta) * k_eff**N / (1 - k_eff)`` falls below the tolerance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import BetaTriangle, build_triangle
from .exceptions import MassExceedsOne, OutOfHorizon, TolUnreachable
from .gamma import GammaEvaluator
from .gamma import pieces as gamma_pieces
from .kernels import PiecewiseKernel

DEFAULT_MAX_DEPTH = 5000

# points this close (relative) to a cell edge are treated as on the edge
_SNAP = 1e-10


def tail_bound(g_sup: float, k: float, depth: int) -> float:
    """Sup-norm bound on ``sum_{n > depth} g^{*n}``."""
    if g_sup == 0.0:
        return 0.0
    return g_sup * k ** depth / (1.0 - k)


def required_depth(g_sup: float, k: float, tol: float) -> int:
    """Smallest ``N >= 1`` with ``tail_bound(g_sup, k, N) <= tol``."""
    if g_sup == 0.0 or k == 0.0:
        return 1
    n = max(1, math.ceil(math.log(tol * (1.0 - k) / g_sup) / math.log(k)))
    # guard the log estimate against rounding on either side
    while n > 1 and tail_bound(g_sup, k, n - 1) <= tol:
        n -= 1
    while tail_bound(g_sup, k, n) > tol:
        n += 1
    return n


@dataclass(frozen=True)
class Resolvent:
    """Evaluator for ``h_delta`` on ``[0, horizon]``.

    Build with :func:`build`; call with times (scalar or array).
    """

    delta: float
    horizon: float
    triangle: BetaTriangle
    N: int
    tail_bound_sup: float
    k_eff: float
    g_sup: float
    tol: float
    gamma: GammaEvaluator = field(default_factory=GammaEvaluator, compare=False, repr=False)

    @property
    def R(self) -> int:
        return self.triangle.R

    def __call__(self, t, side="right"):
        return eval_resolvent(self, t, side=side)

    def unit(self, x, side="right"):
        """Unit-scale resolvent ``h(x)`` for ``0 <= x <= horizon / delta``."""
        xs = np.asarray(x, dtype=float)
        out = _unit_series(self, xs, side)
        return float(out) if xs.ndim == 0 else out


def build(pk: PiecewiseKernel, horizon: float, tol: float,
          max_depth: int = DEFAULT_MAX_DEPTH, gamma: GammaEvaluator | None = None) -> Resolvent:
    """Assemble the resolvent of ``pk`` on ``[0, horizon]`` to sup-norm ``tol``."""
    if not (horizon > 0.0) or not (tol > 0.0):
        raise ValueError("horizon and tol must be positive")
    delta = pk.delta
    R = max(0, math.ceil(horizon / delta - _SNAP))
    betas = np.asarray(pk.betas)[:R + 1]
    a = betas * delta
    k_eff = math.fsum(a)
    if k_eff >= 1.0:
        raise MassExceedsOne(f"k_eff = {k_eff:.6g} >= 1")
    g_sup = float(betas.max()) if betas.size else 0.0
    N = required_depth(g_sup, k_eff, tol)
    if N > max_depth:
        raise TolUnreachable(
            f"tolerance {tol:g} needs depth {N} > {max_depth} (k_eff = {k_eff:.6g})")
    tri = build_triangle(a, N, R)
    return Resolvent(delta=delta, horizon=float(horizon), triangle=tri, N=N,
                     tail_bound_sup=tail_bound(g_sup, k_eff, N), k_eff=k_eff,
                     g_sup=g_sup, tol=float(tol), gamma=gamma or GammaEvaluator())


def _split(x, side):
    near = np.rint(x)
    x = np.where(np.abs(x - near) <= _SNAP * np.maximum(1.0, near), near, x)
    if side == "right":
        m = np.floor(x)
    elif side == "left":
        m = np.ceil(x) - 1.0
    else:
        raise ValueError("side must be 'right' or 'left'")
    return m, x - m


def _unit_series(res: Resolvent, x, side):
    flat = np.atleast_1d(x).ravel()
    m, s = _split(flat, side)
    out = np.zeros(flat.shape)
    live = m >= 0
    if not np.any(live):
        return out.reshape(np.shape(x))
    m_live = m[live].astype(np.int64)
    s_uniq, inv = np.unique(s[live], return_inverse=True)
    table = res.gamma.pieces(res.N, s_uniq)
    beta = res.triangle.beta
    N, R = res.N, res.R
    # pad on the left so that beta_pad[:, N + r] = beta[:, r] and r < 0 reads 0
    beta_pad = np.concatenate([np.zeros((N, N)), beta], axis=1)
    acc = np.zeros(m_live.shape)
    for n in range(1, N + 1):
        j = np.arange(n)
        cols = N + m_live[:, None] - j[None, :]
        coef = beta_pad[n - 1][np.minimum(cols, N + R)]
        acc += np.einsum("ij,ji->i", coef, table[n - 1][:, inv])
    out[live] = acc
    return out.reshape(np.shape(x))


def eval_resolvent(res: Resolvent, t, side="right"):
    """``h_delta(t)``; zero for ``t < 0``, :class:`OutOfHorizon` past the horizon."""
    ts = np.asarray(t, dtype=float)
    if np.any(ts > res.horizon * (1.0 + 1e-12)):
        raise OutOfHorizon(f"t > horizon = {res.horizon}")
    out = _unit_series(res, ts / res.delta, side) / res.delta
    return float(out) if ts.ndim == 0 else out


def unit_direct(res: Resolvent, x):
    """Unit-scale ``h(x)`` by summing ``beta[n][r] gamma(n, x - r)`` term by term.

    Independent of the piece-table path used by :func:`eval_resolvent`; meant
    for cross-checks.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    total = np.zeros(xs.shape)
    r = np.arange(res.R + 1)
    shifted = xs[..., None] - r
    n_closed = min(res.N, res.gamma.n_switch)
    for n in range(1, n_closed + 1):
        total += res.gamma(n, shifted) @ res.triangle.beta[n - 1]
    if res.N > n_closed:
        # one recurrence pass covers every remaining order
        m = np.floor(shifted)
        table = gamma_pieces(res.N, shifted - m)
        for n in range(n_closed + 1, res.N + 1):
            idx = np.clip(m, 0, n - 1).astype(np.int64)
            vals = np.take_along_axis(table[n - 1], idx[None, ...], axis=0)[0]
            vals = np.where((m >= 0) & (m < n), vals, 0.0)
            total += vals @ res.triangle.beta[n - 1]
    return float(total[0]) if np.ndim(x) == 0 else total


def scaling_check(res: Resolvent, t):
    """Pair ``(delta * h_delta(delta t), h_unit(t))`` from two code paths."""
    ts = np.asarray(t, dtype=float)
    scaled = res.delta * eval_resolvent(res, res.delta * ts)
    return scaled, unit_direct(res, ts)
