import math
import threading

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import rect_power_by_quadrature, trapezoid
from volres.gamma import GammaEvaluator, gamma, gamma_closed, gamma_recurrence, pieces


@pytest.mark.parametrize("n, t, expected", [
    (1, 0.5, 1.0), (1, 1.0, 0.0), (1, 0.0, 1.0), (2, 1.0, 1.0),
    (2, 0.0, 0.0), (3, 1.5, 0.75),
])
def test_closed_form_values(n, t, expected):
    assert gamma_closed(n, t) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("n, t, expected", [
    (2, 0.5, 0.5), (4, 2.0, 2.0 / 3.0), (3, 1.5, 0.75),
])
def test_recurrence_values(n, t, expected):
    assert gamma_recurrence(n, t) == pytest.approx(expected, rel=1e-14)


def test_recurrence_large_order():
    # oracle: Simpson self-convolution of gamma_25, (gamma_25 * gamma_25)(25)
    value = gamma_recurrence(50, 25.0)
    assert 0.0 < value < 1.0
    assert value == pytest.approx(0.19485378795758596, rel=1e-10)


@pytest.mark.parametrize("n, t, expected", [(1, -0.1, 0.0), (3, 3.0, 0.0), (2, 0.25, 0.25)])
def test_dispatch_values(n, t, expected):
    assert gamma(n, t) == pytest.approx(expected, abs=1e-15)


def test_closed_form_guards_large_order():
    with pytest.raises(OverflowError):
        gamma_closed(19, 1.0)
    assert gamma_closed(19, 1.0, n_switch=19) > 0.0


@pytest.mark.parametrize("n", [1, 2, 5, 18, 30, 60])
def test_support(n):
    ev = GammaEvaluator()
    t = np.array([-2.0, -1e-12, float(n), n + 1e-9, n + 3.0])
    assert np.all(ev(n, t) == 0.0)
    if n >= 2:
        assert ev(n, 0.0) == 0.0


@pytest.mark.parametrize("n", range(1, 31))
def test_normalization(n):
    h = 1e-3
    t = np.arange(0.0, n + h / 2, h)
    vals = gamma(n, t)
    if n == 1:
        vals[-1] = 1.0  # left limit at the jump
    assert trapezoid(vals, h) == pytest.approx(1.0, abs=1e-8 if n > 1 else 1e-15)


@pytest.mark.parametrize("n", range(2, 31))
def test_symmetry_and_mode(n):
    t = np.linspace(0.0, n / 2.0, 400)[1:]
    left = gamma(n, t)
    right = gamma(n, n - t)
    np.testing.assert_allclose(left, right, rtol=1e-10, atol=1e-300)
    assert np.all(np.diff(left) >= -1e-15)
    grid = np.linspace(0.0, n, 2001)
    vals = gamma(n, grid)
    assert vals.max() <= gamma(n, n / 2.0) * (1 + 1e-14)


@pytest.mark.parametrize("n", range(1, 19))
def test_closed_matches_recurrence(n):
    t = np.linspace(0.0, n, 1002)[1:-1]
    c = gamma_closed(n, t)
    r = gamma_recurrence(n, t)
    assert np.max(np.abs(c - r) / np.abs(r)) <= 1e-10


def test_recurrence_matches_quadrature_convolution():
    table = rect_power_by_quadrature(10)
    for n in range(2, 11):
        t, vals = table[n]
        assert np.max(np.abs(gamma_recurrence(n, t) - vals)) <= 1e-6, n


def test_convolution_recurrence_in_gamma():
    # gamma_n(t) = int_{t-1}^{t} gamma_{n-1}(s) ds, Simpson on a fine sub-grid
    for n in range(2, 11):
        for t in np.linspace(0.05, n - 0.05, 13):
            s = np.linspace(t - 1.0, t, 2001)
            y = gamma(n - 1, s)
            if n == 2:
                y = np.where((s >= 0) & (s < 1), 1.0, 0.0)
            w = np.ones(s.size)
            w[1:-1:2], w[2:-1:2] = 4, 2
            integral = (s[1] - s[0]) / 3 * np.dot(w, y)
            tol = 1e-6 if n > 2 else 2e-3  # n = 2 integrates a jump
            assert integral == pytest.approx(gamma(n, t), abs=tol)


@given(n=st.integers(1, 40), t=st.floats(-5.0, 50.0))
def test_nonnegative_and_bounded(n, t):
    v = gamma_recurrence(n, t)
    assert 0.0 <= v <= 1.0


def test_pieces_match_pointwise():
    s = np.array([0.0, 0.3, 0.999])
    table = pieces(12, s)
    for n in range(1, 13):
        for j in range(n):
            np.testing.assert_allclose(table[n - 1][j], gamma_recurrence(n, s + j), rtol=1e-12, atol=1e-15)


def test_pieces_left_limit_at_one():
    table = pieces(4, np.array([1.0]))
    assert table[0][0, 0] == 1.0
    assert table[1][0, 0] == pytest.approx(1.0)
    assert table[1][1, 0] == 0.0


def test_cache_is_consistent_and_thread_safe():
    ev = GammaEvaluator()
    s = np.linspace(0, 1, 50, endpoint=False)
    fresh = pieces(20, s)
    results = []

    def work():
        results.append(ev.pieces(20, s))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(r is results[0] for r in results)
    for got, want in zip(results[0], fresh):
        np.testing.assert_array_equal(got, want)
    grid = ev.pieces_on_grid(20, 0.02, 0.0, 50)
    for got, want in zip(grid, fresh):
        np.testing.assert_array_equal(got, want)


def test_closed_form_is_continuous():
    # smoothness itself is not asserted numerically, only continuity at knots
    for n in range(2, 12):
        for knot in range(1, n):
            lo = gamma(n, knot - 1e-9)
            hi = gamma(n, knot + 1e-9)
            assert abs(hi - lo) < 1e-7
    assert math.isclose(gamma(2, 1.0), 1.0)
