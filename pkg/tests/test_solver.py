import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import trapezoid
from volres import kernels, oracle, resolvent, solver
from volres.exceptions import GridMismatch, OutOfHorizon
from volres.solver import Constant, InputSignal, Samples, TwoPlusSin


@pytest.fixture(scope="module")
def exp_fine():
    pk = kernels.discretize(kernels.Exponential(0.5, 1.0), 0.01, 5.0)
    return resolvent.build(pk, 5.0, 1e-10)


def test_unit_atom_gives_resolvent(exp_resolvent):
    grid = solver.uniform_grid(5.0, 0.025)
    sol = solver.solve(exp_resolvent, InputSignal(atoms=[(0.0, 1.0)]), grid)
    np.testing.assert_array_equal(sol.regular_samples, exp_resolvent(grid))
    assert sol.atoms == ((0.0, 1.0),)


def test_zero_input(exp_resolvent):
    grid = solver.uniform_grid(5.0, 0.05)
    sol = solver.solve(exp_resolvent, InputSignal(), grid)
    assert np.all(sol.regular_samples == 0.0)
    assert sol.atoms == ()


def test_constant_input_exponential_kernel(exp_fine):
    grid = solver.uniform_grid(5.0, 0.01)
    sol = solver.solve(exp_fine, InputSignal(regular=Constant(1.0)), grid)
    exact = 1.0 + (1.0 - np.exp(-0.5 * grid))
    # windowed certificate: T * k theta^2 delta / (1 - k_bound)^2
    k_bound = max(0.5, exp_fine.k_eff)
    cert = 5.0 * 0.5 * 0.01 / (1 - k_bound) ** 2
    assert np.max(np.abs(sol.regular_samples - exact)) <= cert


def test_atoms_before_first_time(exp_resolvent):
    grid = solver.uniform_grid(5.0, 0.05)
    sol = solver.solve(exp_resolvent, InputSignal(atoms=[(2.0, 3.0)]), grid)
    assert np.all(sol.regular_samples[grid < 2.0] == 0.0)


def test_routes_agree_constant_kernel(const_resolvent):
    grid = solver.uniform_grid(5.0, 0.0625)
    f = InputSignal(regular=Constant(1.0))
    a = solver.solve(const_resolvent, f, grid, estimate_error=True)
    b = solver.convolve_gamma_route(const_resolvent, f, grid)
    assert np.max(np.abs(a.convolution - b.convolution)) <= 5 * a.quadrature_error
    # (h * 1)(1) = int_0^1 0.5 exp(0.5 t) dt = exp(0.5) - 1
    i1 = int(round(1.0 / 0.0625))
    assert b.convolution[i1] == pytest.approx(math.exp(0.5) - 1.0, abs=5 * a.quadrature_error)


def test_gamma_route_zero_signal(const_resolvent):
    grid = solver.uniform_grid(5.0, 0.25)
    sol = solver.convolve_gamma_route(const_resolvent, InputSignal(), grid)
    assert np.all(sol.convolution == 0.0)


def test_gamma_route_atoms_are_exact_shifts(exp_resolvent):
    grid = solver.uniform_grid(5.0, 0.025)
    atoms = [(0.3, 2.0), (1.7, -0.5)]
    sol = solver.convolve_gamma_route(exp_resolvent, InputSignal(atoms=atoms), grid)
    want = np.zeros(grid.size)
    for t_i, w_i in atoms:
        on = grid >= t_i
        want[on] += w_i * exp_resolvent(grid[on] - t_i)
    np.testing.assert_array_equal(sol.regular_samples, want)


def test_gamma_route_needs_aligned_grid(exp_resolvent):
    with pytest.raises(GridMismatch):
        solver.convolve_gamma_route(exp_resolvent, InputSignal(regular=Constant(1.0)),
                                    np.linspace(0, 5, 7))


def test_errors(exp_resolvent):
    with pytest.raises(OutOfHorizon):
        solver.solve(exp_resolvent, InputSignal(), np.linspace(0, 6, 13))
    with pytest.raises(OutOfHorizon):
        solver.solve(exp_resolvent, InputSignal(atoms=[(5.5, 1.0)]), np.linspace(0, 5, 11))
    with pytest.raises(GridMismatch):
        solver.solve(exp_resolvent, InputSignal(regular=Samples(0.1, np.ones(51))),
                     np.linspace(0, 5, 101))
    with pytest.raises(ValueError):
        InputSignal(atoms=[(1.0, 1.0), (0.5, 1.0)])


def test_scale_signal():
    c = solver.scale_signal(Constant(3.0), 0.5)
    assert c(np.array([0.0, 1.0])).tolist() == [6.0, 6.0]
    f = solver.scale_signal(TwoPlusSin(), 0.5)
    t = np.linspace(0, 3, 7)
    np.testing.assert_allclose(f(t), (2.0 + np.sin(t / 0.5)) / 0.5, rtol=1e-15)
    assert f(-1.0) == 0.0
    s = Samples(0.1, np.linspace(-1, 1, 21))
    for delta in (0.5, 0.3, 7.0):
        back = solver.scale_signal(solver.scale_signal(s, delta), 1.0 / delta)
        np.testing.assert_allclose(back.values, s.values, rtol=1e-15, atol=1e-15)
        assert back.step == pytest.approx(s.step, rel=1e-15)


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(alpha, beta):
    pk = kernels.discretize(kernels.PowerLaw(0.5, 1.0, 1.0), 0.1, 4.0)
    res = resolvent.build(pk, 4.0, 1e-10)
    grid = solver.uniform_grid(4.0, 0.05)
    u = np.sin(grid) + 1.0
    v = np.exp(-grid)
    f = InputSignal(atoms=[(0.5, 1.0)], regular=Samples(0.05, u))
    g = InputSignal(atoms=[(1.25, 2.0)], regular=Samples(0.05, v))
    mix = InputSignal(atoms=[(0.5, alpha), (1.25, 2.0 * beta)],
                      regular=Samples(0.05, alpha * u + beta * v))
    ys = [solver.solve(res, x, grid).regular_samples for x in (f, g, mix)]
    np.testing.assert_allclose(ys[2], alpha * ys[0] + beta * ys[1], atol=1e-12, rtol=0)


def test_shift_commutes_with_convolution(exp_resolvent):
    step = 0.025
    grid = solver.uniform_grid(5.0, step)
    base = np.where(grid < np.pi, np.sin(grid) ** 2, 0.0)
    shift = 40  # one time unit
    shifted = np.concatenate([np.zeros(shift), base[:-shift]])
    a = solver.solve(exp_resolvent, InputSignal(regular=Samples(step, base)), grid).convolution
    b = solver.solve(exp_resolvent, InputSignal(regular=Samples(step, shifted)), grid).convolution
    np.testing.assert_allclose(b[shift:], a[:-shift], atol=1e-12)
    assert np.all(b[:shift] == 0.0)


def test_local_l1_bound(exp_resolvent):
    step = 0.025
    grid = solver.uniform_grid(5.0, step)
    sol = solver.solve(exp_resolvent, InputSignal(regular=TwoPlusSin()), grid)
    h_l1 = exp_resolvent.k_eff / (1 - exp_resolvent.k_eff)
    assert trapezoid(np.abs(sol.convolution), step) <= h_l1 * trapezoid(2 + np.sin(grid), step)


def test_volterra_residual_of_solution(exp_resolvent):
    # y = f1 + g_delta * y for the regular part when there are no atoms
    step = 0.005
    grid = solver.uniform_grid(5.0, step)
    sol = solver.solve(exp_resolvent, InputSignal(regular=TwoPlusSin()), grid)
    pk = kernels.discretize(kernels.Exponential(0.5, 1.0), 0.05, 5.0)
    y = sol.regular_samples
    gy = oracle.convolve_limits(pk(grid), pk(grid, side="left"), y, y, step)
    resid = np.abs(y - sol.regular_input - gy)
    assert resid.max() <= 1e-4


def test_signal_json():
    sig = solver.from_dict({"atoms": [[0.5, 1.0], [1.0, 2.0]],
                            "regular": {"type": "samples", "step": 0.1, "values": [1, 2, 3]}})
    assert sig.atoms == ((0.5, 1.0), (1.0, 2.0))
    assert sig.regular.values.tolist() == [1.0, 2.0, 3.0]
    assert isinstance(solver.from_dict({"regular": {"type": "two_plus_sin"}}).regular, TwoPlusSin)
    for bad in ({"atoms": [[1, 2, 3]]}, {"regular": {"type": "constant"}},
                {"regular": {"type": "constant", "c": 1, "d": 2}}, {"foo": 1}):
        with pytest.raises(ValueError):
            solver.from_dict(bad)


def test_signal_l1():
    sig = InputSignal(atoms=[(0.5, -2.0)], regular=Constant(1.5))
    assert solver.signal_l1(sig, 4.0) == pytest.approx(8.0)
    two = solver.signal_l1(InputSignal(regular=TwoPlusSin()), math.pi)
    assert two == pytest.approx(2 * math.pi + 2.0, rel=1e-6)
