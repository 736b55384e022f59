"""The universal functions ``gamma_n``, n-fold self-convolutions of ``rect``.

``rect`` is the indicator of [0, 1), so ``gamma_n`` is the cardinal B-spline
of order ``n`` (the Irwin-Hall density): a piecewise polynomial of degree
``n - 1`` supported on [0, n] with unit mass. Two evaluation routes are
provided:

* the alternating binomial sum of truncated powers (``gamma_closed``), and
* the positive two-term recurrence (``gamma_recurrence``)::

      gamma_n(t) = (t gamma_{n-1}(t) + (n - t) gamma_{n-1}(t - 1)) / (n - 1)

The binomial sum cancels catastrophically as ``n`` grows, so
:class:`GammaEvaluator` only uses it up to ``n_switch``.
"""
from __future__ import annotations

import math
import threading

import numpy as np

DEFAULT_N_SWITCH = 18


def _as_array(t):
    return np.asarray(t, dtype=float)


def _unwrap(out, like):
    return float(out) if np.ndim(like) == 0 else out


def gamma_closed(n: int, t, n_switch: int = DEFAULT_N_SWITCH):
    """Closed form ``sum_r (-1)^r C(n, r) (t - r)_+^(n-1) / (n - 1)!``.

    The sum is evaluated at ``min(t, n - t)`` (``gamma_n`` is symmetric about
    ``n / 2``), which keeps the cancellation bounded near the right edge.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > n_switch:
        raise OverflowError(
            f"closed form is numerically unreliable for n={n} > n_switch={n_switch}")
    ts = _as_array(t)
    if n == 1:
        out = ((ts >= 0.0) & (ts < 1.0)).astype(float)
        return _unwrap(out, t)
    inside = (ts > 0.0) & (ts < n)
    u = np.where(inside, np.minimum(ts, n - ts), 0.0)
    acc = np.zeros_like(u)
    for r in range(int(math.ceil(n / 2.0)) + 1):
        d = u - r
        acc += (-1) ** r * math.comb(n, r) * np.where(d > 0.0, d, 0.0) ** (n - 1)
    out = np.where(inside, acc / math.factorial(n - 1), 0.0)
    return _unwrap(out, t)


def pieces(n_max: int, s):
    """Table of ``gamma_n(s + j)`` for ``n = 1 .. n_max`` and ``j = 0 .. n - 1``.

    ``s`` holds offsets in [0, 1]. Returns a list whose entry ``n - 1`` has
    shape ``(n,) + s.shape``. At ``s = 1`` the values are left limits, so
    ``gamma_1`` reads 1 on the closed cell.
    """
    s = _as_array(s)
    table = [np.ones((1,) + s.shape)]
    prev = table[0]
    for n in range(2, n_max + 1):
        cur = np.empty((n,) + s.shape)
        inv = 1.0 / (n - 1)
        cur[0] = s * prev[0] * inv
        for j in range(1, n - 1):
            cur[j] = ((s + j) * prev[j] + (n - s - j) * prev[j - 1]) * inv
        cur[n - 1] = (1.0 - s) * prev[n - 2] * inv
        table.append(cur)
        prev = cur
    return table


def gamma_recurrence(n: int, t):
    """Evaluate ``gamma_n`` through the positive-weight recurrence."""
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    ts = _as_array(t)
    m = np.floor(ts)
    s = ts - m
    row = pieces(n, s)[n - 1]
    ok = (m >= 0) & (m < n)
    idx = np.clip(m, 0, n - 1).astype(int)
    val = np.take_along_axis(row, idx[None, ...], axis=0)[0]
    out = np.where(ok, val, 0.0)
    return _unwrap(out, t)


class GammaEvaluator:
    """Dispatching evaluator for ``gamma_n`` with a memo of piece tables.

    Parameters
    ----------
    n_switch : int
        Orders up to this value use the closed form; larger ones use the
        recurrence.
    """

    def __init__(self, n_switch: int = DEFAULT_N_SWITCH):
        if n_switch < 1:
            raise ValueError("n_switch must be >= 1")
        self.n_switch = int(n_switch)
        self._cache = {}
        self._lock = threading.Lock()

    def __call__(self, n: int, t):
        if n <= self.n_switch:
            return gamma_closed(n, t, self.n_switch)
        return gamma_recurrence(n, t)

    def pieces(self, n_max: int, s):
        """Memoized :func:`pieces`; returned arrays are read-only."""
        s = np.ascontiguousarray(s, dtype=float)
        key = (int(n_max), s.shape, s.tobytes())
        with self._lock:
            hit = self._cache.get(key)
        if hit is not None:
            return hit
        table = pieces(n_max, s)
        for row in table:
            row.setflags(write=False)
        with self._lock:
            # first writer wins so every caller sees the same arrays
            return self._cache.setdefault(key, table)

    def pieces_on_grid(self, n_max: int, step: float, offset: float, count: int):
        """Piece tables for the uniform grid ``offset + i * step`` (fractional parts)."""
        x = offset + step * np.arange(count)
        return self.pieces(n_max, x - np.floor(x))

    def clear(self):
        with self._lock:
            self._cache.clear()


def gamma(n: int, t, evaluator: GammaEvaluator | None = None):
    """``gamma_n(t)`` using the default dispatch (closed form for small n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (evaluator or _DEFAULT)(n, t)


_DEFAULT = GammaEvaluator()
