import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.special import erf

from twotemp.chapman_enskog import relax_f
from twotemp.collision_quadrature import (
    RESONANT_INVARIANTS,
    STANDARD_INVARIANTS,
    TestFunction,
    branch_prefactors,
    dirichlet_form,
    dirichlet_matrix_mc,
    energy_partner_integral,
    fit_nu_bounds,
    h_functional_rate,
    invariant,
    nu_model,
    q_s_moments,
    q_s_mr_mr_mc,
    q_s_mr_mr_pointwise,
    weak_q_linear_mc,
    weak_q_mc,
)
from twotemp.core_model import GasModel
from twotemp.equilibrium import MacroState
from twotemp.errors import ValidationError

HOT = MacroState(1.2, (0.1, 0.0, 0.0), 1.6, 1.0)


@pytest.mark.parametrize("tag", STANDARD_INVARIANTS)
def test_invariants_have_zero_weak_source(gas, tag):
    est = weak_q_mc(HOT, invariant(tag), gas, theta=0.4, n=20_000, seed=1)
    assert abs(est.value) < 1e-11 * max(1.0, est.std_error) + 1e-11


@pytest.mark.parametrize("tag", RESONANT_INVARIANTS)
def test_resonant_invariants(gas, tag):
    est = weak_q_mc(HOT, invariant(tag), gas, theta=0.0, n=20_000, seed=2)
    assert abs(est.value) < 1e-11


def test_unknown_invariant():
    with pytest.raises(ValidationError):
        invariant("spin")


@pytest.mark.parametrize("delta,alpha,beta", [(2.0, 0.0, 0.0), (3.0, 0.5, 0.5), (5.0, 1.2, 0.3)])
def test_relax_f_against_source_moment(delta, alpha, beta):
    # closed form vs. deterministic integral of the pointwise source against I
    gas = GasModel(delta, alpha, beta)
    s = MacroState(1.3, (0, 0, 0), 1.7, 1.1)
    moment = q_s_moments([lambda c, i: i], s, gas)[0]
    assert moment == pytest.approx(relax_f(s, gas) * 0.6, rel=1e-10)


def test_relax_f_hand_value():
    # delta = 2, alpha = beta = 0, C_r = rho = T = 1: 4 sqrt(pi) Gamma(5/2) / (7/2) = 12 pi / 7
    gas = GasModel(2.0, 0.0, 0.0)
    assert relax_f(MacroState(1.0, (0, 0, 0), 1.0, 1.0), gas) == pytest.approx(12 * math.pi / 7,
                                                                                rel=1e-14)


def test_weak_energy_exchange_by_sampling(gas):
    est = weak_q_mc(HOT, invariant("internal_energy"), gas, theta=1.0, n=400_000, seed=3)
    assert abs(est.z_score(relax_f(HOT, gas) * (HOT.t_tr - HOT.t_int))) < 4


def test_dirichlet_form_symmetric_and_nonnegative(gas):
    s = MacroState(1.0, (0, 0, 0), 1.3, 1.0)
    h = TestFunction(lambda xi, i: xi[..., 0] * np.sum(xi * xi, axis=-1))
    g = TestFunction(lambda xi, i: xi[..., 0] * i)
    hg = dirichlet_form(h, g, s, gas, 20_000, 4)
    gh = dirichlet_form(g, h, s, gas, 20_000, 4)
    assert hg.value == pytest.approx(gh.value, rel=1e-12)
    mean, se = dirichlet_matrix_mc([h, g], s, gas, 20_000, 4)
    assert np.allclose(mean, mean.T) and np.all(se >= 0)
    assert np.all(np.linalg.eigvalsh(mean) > -1e-12)


def test_dirichlet_form_vanishes_on_invariants(gas):
    s = MacroState(1.0, (0, 0, 0), 1.3, 1.0)
    h = invariant("kinetic_energy")
    assert abs(dirichlet_form(h, h, s, gas, 10_000, 5).value) < 1e-20


def test_linear_source_of_invariant_is_zero(gas):
    h = TestFunction(lambda xi, i: xi[..., 0] * i)
    est = weak_q_linear_mc(HOT, h, invariant("energy"), gas, 0.3, 20_000, 6)
    assert abs(est.value) < 1e-11


def test_h_functional_nonpositive(gas):
    s = MacroState(1.0, (0, 0, 0), 1.5, 1.0)
    est = h_functional_rate(s, lambda xi, i: 0.2 * np.tanh(xi[..., 0]), gas, 0.3, 200_000, 7)
    assert est.value < 3 * est.std_error


def test_branch_prefactors_agree_and_detect_faults(gas):
    standard, resonant = branch_prefactors(gas)
    assert standard == pytest.approx(resonant, rel=1e-10)
    assert resonant == pytest.approx(gas.pair_rate_constant, rel=1e-12)
    faulty, _ = branch_prefactors(gas, c_s=1.01 * gas.c_s)
    assert faulty / resonant - 1.0 == pytest.approx(0.01, rel=1e-8)


def test_nu_closed_forms():
    s = MacroState(1.4, (0.2, 0.0, 0.0), 1.3, 0.7)
    xi = np.array([[0.2, 0.0, 0.0], [1.5, -0.3, 0.4], [3.0, 2.0, 1.0]])
    i = np.array([0.0, 0.5, 4.0])
    maxwell = GasModel(2.0, 0.0, 0.0)
    assert np.allclose(nu_model(xi, i, s, maxwell), maxwell.pair_rate_constant * 1.4, rtol=1e-12)
    # beta = 1: mean of a noncentral chi with 3 degrees of freedom;
    # alpha = 1: E(I + I*) = I + delta T / 2
    quad = GasModel(3.0, 1.0, 1.0)
    a = np.linalg.norm(xi - np.array(s.u), axis=1) / math.sqrt(1.3)
    a_safe = np.where(a > 0, a, 1.0)
    chi = np.where(a > 0, math.sqrt(2 / math.pi) * np.exp(-0.5 * a * a)
                   + (a + 1 / a_safe) * erf(a / math.sqrt(2)), 2 * math.sqrt(2 / math.pi))
    expect = quad.pair_rate_constant * 1.4 * math.sqrt(1.3) * chi * (i + 1.5 * 0.7)
    assert np.allclose(nu_model(xi, i, s, quad), expect, rtol=1e-10)


def test_nu_bounds_bracket(gas):
    s = MacroState(1.0, (0, 0, 0), 1.0, 1.0)
    lo, hi = fit_nu_bounds(s, gas, np.linspace(0, 5, 8), np.linspace(0, 10, 8))
    assert 0 < lo <= hi
    xi = np.array([[2.2, 0.0, 0.0]])
    w = (1 + 2.2) ** gas.beta * (1 + 3.3) ** gas.alpha
    assert lo * w <= nu_model(xi, 3.3, s, gas) <= hi * w


def test_nu_rejects_bad_branch(gas):
    with pytest.raises(ValidationError):
        nu_model(np.zeros(3), 1.0, MacroState(1.0), gas, branch="elastic")


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-6, 30.0), st.floats(1e-3, 10.0), st.sampled_from([0.0, 0.5, 1.5]),
       st.sampled_from([0.3, 0.5, 1.2]))
def test_energy_partner_integral(kappa, i, p, alpha):
    # in y = kappa x the integrand decays on the unit scale
    z = kappa * i
    body, _ = integrate.quad(lambda y: y**p * (z + y) ** alpha * math.exp(-y), 0, np.inf,
                             epsabs=0, epsrel=1e-12, limit=400)
    ref = body * kappa ** -(p + 1 + alpha)
    assert float(energy_partner_integral(kappa, i, p, alpha)) == pytest.approx(ref, rel=1e-9)


def test_pointwise_source_zero_at_equal_temperatures(gas):
    s = MacroState(1.0, (0, 0, 0), 1.2, 1.2)
    assert np.all(q_s_mr_mr_pointwise([0.5, 1.0], [0.1, 2.0], s, gas) == 0)


def test_pointwise_source_against_sampling(gas):
    s = MacroState(1.0, (0, 0, 0), 1.5, 1.0)
    q = float(q_s_mr_mr_pointwise(0.9, 0.8, s, gas)[0])
    est = q_s_mr_mr_mc(np.array([0.9, 0.0, 0.0]), 0.8, s, gas, 200_000, 8)
    assert abs(est.z_score(q)) < 4
