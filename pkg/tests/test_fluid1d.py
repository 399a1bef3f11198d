import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twotemp import fluid1d as fl
from twotemp.chapman_enskog import relax_f
from twotemp.core_model import GasModel
from twotemp.equilibrium import MacroState
from twotemp.errors import ValidationError


def centres(n, lo=0.0, hi=1.0):
    x = np.linspace(lo, hi, n + 1)
    return 0.5 * (x[1:] + x[:-1])


def test_rankine_hugoniot_hand_values():
    r, v, t = fl.rankine_hugoniot(2.0, 1.4)
    assert r == pytest.approx(8 / 3)
    assert v == pytest.approx(3 / 8)
    assert t == pytest.approx(1.6875)
    assert fl.rankine_hugoniot(2.0, 5 / 3)[0] == pytest.approx(16 / 7)
    assert fl.rankine_hugoniot(1.0, 1.4) == pytest.approx((1.0, 1.0, 1.0))
    with pytest.raises(ValidationError):
        fl.rankine_hugoniot(0.5, 1.4)


def test_exact_riemann_star_state():
    # Sod problem at gamma = 1.4: p* = 0.30313, u* = 0.92745
    left, right = (1.0, 0.0, 1.0), (0.125, 0.0, 0.1)
    s = np.array([-0.01, 0.01])
    w = fl.exact_riemann(left, right, 1.4, s)
    assert w[:, 2] == pytest.approx([0.30313, 0.30313], abs=1e-5)
    assert w[:, 1] == pytest.approx([0.92745, 0.92745], abs=1e-5)
    far = fl.exact_riemann(left, right, 1.4, np.array([-5.0, 5.0]))
    assert far[0] == pytest.approx(left) and far[1] == pytest.approx(right)


def test_exact_riemann_uniform():
    w = fl.exact_riemann((1.0, 0.3, 1.0), (1.0, 0.3, 1.0), 5 / 3, np.linspace(-2, 2, 9))
    assert np.allclose(w, [1.0, 0.3, 1.0])


def test_sod_shock_tube():
    gas = GasModel(2.0)
    x = centres(400)
    left = x < 0.5
    rho = np.where(left, 1.0, 0.125)
    p = np.where(left, 1.0, 0.1)
    st0 = fl.FluidState1D.from_primitive(x, rho, 0.0, p / rho, p / rho, gas.delta, kappa=0.0)
    final = fl.advance(st0, fl.CoefficientProvider.euler(gas), 0.15, 0.4, "transmissive",
                       diffusion=False).final
    w = final.primitives()
    exact = fl.exact_riemann((1, 0, 1), (0.125, 0, 0.1), fl.GAMMA_TR, (x - 0.5) / 0.15)
    l1 = np.sum(np.abs(w[:, 0] - exact[:, 0])) / np.sum(exact[:, 0])
    assert l1 < 0.01
    # frozen internal energy is advected passively
    assert np.all(w[:, 3] > 0)


def _smooth_state(gas, n=64, **kw):
    x = centres(n)
    return fl.FluidState1D.from_primitive(
        x, 1.0 + 0.2 * np.sin(2 * np.pi * x), 0.1 * np.cos(2 * np.pi * x),
        1.0 + 0.1 * np.sin(4 * np.pi * x), 0.9 + 0.05 * np.cos(2 * np.pi * x), gas.delta, **kw)


@pytest.mark.parametrize("mode", ["eps2", "eps1"])
def test_periodic_conservation(mode):
    gas = GasModel(2.0)
    st0 = _smooth_state(gas, scaling_mode=mode, eps=0.1)
    final = fl.advance(st0, fl.CoefficientProvider.analytic(gas), 0.3).final
    assert np.allclose(final.totals(), st0.totals(), rtol=1e-12, atol=1e-13)


def test_homogeneous_relaxation_closed_form():
    gas = GasModel(3.0)
    s = MacroState(1.2, (0, 0, 0), 1.8, 1.0)
    eps, kappa = 0.2, 1.5
    st0 = fl.FluidState1D.from_primitive(centres(5), s.rho, 0.0, s.t_tr, s.t_int, gas.delta,
                                         eps=eps, kappa=kappa)
    traj = fl.advance(st0, fl.CoefficientProvider.analytic(gas), 0.5, n_out=5)
    rate = eps * kappa * relax_f(s, gas) / s.rho * (2 / 3 + 2 / gas.delta)
    for t, state in zip(traj.times, traj.states):
        w = state.primitives()
        assert np.allclose(w[:, 2] - w[:, 3], 0.8 * math.exp(-rate * t), rtol=1e-10)


def test_frozen_relaxation_and_euler_provider():
    gas = GasModel(3.0, 0.5, 0.5)
    cp = fl.CoefficientProvider.euler(gas)
    c = cp.evaluate(np.array([1.0]), np.array([1.5]), np.array([1.0]))
    assert all(float(c[k][0]) == 0.0 for k in fl.COEFF_NAMES)
    assert not cp.k_available()
    st0 = fl.FluidState1D.from_primitive(centres(4), 1.0, 0.0, 1.5, 1.0, gas.delta, kappa=0.0)
    w = fl.advance(st0, cp, 0.2, diffusion=False).final.primitives()
    assert np.allclose(w[:, 2], 1.5) and np.allclose(w[:, 3], 1.0)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.01, 2.0))
def test_relaxation_update_monotone(t_tr, t_int, dt):
    gas = GasModel(2.0)
    st0 = fl.FluidState1D.from_primitive(centres(3), 1.0, 0.2, t_tr, t_int, gas.delta)
    c = fl.CoefficientProvider.analytic(gas).evaluate(np.ones(3), np.full(3, t_tr),
                                                      np.full(3, t_int))
    w = fl.relaxation_update(st0, c, dt).primitives()
    gap0, gap1 = t_tr - t_int, w[0, 2] - w[0, 3]
    assert abs(gap1) <= abs(gap0) + 1e-14 and gap0 * gap1 >= 0
    assert np.allclose(fl.relaxation_update(st0, c, dt).totals(), st0.totals(), rtol=1e-14)


def test_tabulated_matches_live():
    gas = GasModel(3.0, 0.5, 0.5)
    tab = fl.CoefficientProvider.tabulate(gas, basis_size=(4, 2), include_k=False)
    live = fl.CoefficientProvider.live(gas, basis_size=(4, 2), include_k=False)
    args = (np.array([1.7]), np.array([2.6]), np.array([1.4]))
    a, b = tab.evaluate(*args), live.evaluate(*args)
    for k in ("lambda_mu", "lambda_trtr", "lambda_intint", "f_relax"):
        assert float(a[k][0]) == pytest.approx(float(b[k][0]), rel=1e-4)


def test_shock_density_ratio():
    gas = GasModel(2.0)
    prof = fl.shock_structure(MacroState(1.0, (0, 0, 0), 1.0, 1.0), 1.5,
                              fl.CoefficientProvider.analytic(gas), gas, eps=0.1, n_cells=160,
                              x_range=(-4.0, 8.0), tol=1e-6, max_time=100.0)
    assert prof.density_ratio == pytest.approx(fl.rankine_hugoniot(1.5, 1.4)[0], rel=1e-4)
    assert prof.shock_thickness() > 0 and prof.relaxation_zone_width() > 0


@pytest.mark.parametrize("kw", [dict(eps=0.0), dict(kappa=-1.0), dict(scaling_mode="eps3")])
def test_state_validation(kw):
    with pytest.raises(ValidationError):
        fl.FluidState1D.from_primitive(centres(4), 1.0, 0.0, 1.0, 1.0, 2.0, **kw)


def test_boundary_and_provider_validation():
    with pytest.raises(ValidationError):
        fl.Boundary("inflow-outflow")
    with pytest.raises(ValidationError):
        fl.CoefficientProvider.analytic(GasModel(2.0, 0.5, 0.0))
    with pytest.raises(ValidationError):
        fl.advance(_smooth_state(GasModel(2.0)), fl.CoefficientProvider.euler(GasModel(2.0)),
                   0.1, cfl=1.5)
