import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twotemp.chapman_enskog import (
    McParams,
    SpectralBasis,
    analytic_coefficients,
    constrained_solve,
    eigenvalue_c,
    gram_exact,
    gram_mc,
    relax_f,
    relax_k,
    solve_abc,
    transport_coeffs,
)
from twotemp.core_model import GasModel
from twotemp.equilibrium import MacroState, m_r_integral
from twotemp.errors import ValidationError


@pytest.mark.parametrize("delta", [2.0, 3.0, 5.0])
def test_galerkin_matches_closed_forms(delta):
    gas = GasModel(delta)
    s = MacroState(1.3, (0, 0, 0), 1.5, 1.0)
    tc = transport_coeffs(solve_abc(s, gas, SpectralBasis(4, 3)))
    ref = analytic_coefficients(s, gas)
    for name in ("lambda_mu", "lambda_trtr", "lambda_intint"):
        assert getattr(tc, name) == pytest.approx(getattr(ref, name), rel=1e-10)
    assert abs(tc.lambda_trint) < 1e-12 and abs(tc.lambda_inttr) < 1e-12


def test_closed_form_hand_values():
    # delta = 2, rho = T = 1, C_r = 1: nu_0 = 4 pi B(1, 1) = 4 pi
    gas = GasModel(2.0)
    s = MacroState(1.0, (0, 0, 0), 1.0, 1.0)
    ref = analytic_coefficients(s, gas)
    assert ref.lambda_mu == pytest.approx(2 / (4 * math.pi))
    assert ref.lambda_trtr == pytest.approx(7.5 / (4 * math.pi))
    assert ref.lambda_intint == pytest.approx(1.0 / (2 * math.pi))
    assert eigenvalue_c(s, gas) == pytest.approx(2 * math.pi)
    with pytest.raises(ValidationError):
        analytic_coefficients(s, GasModel(2.0, 0.5, 0.0))


def test_gram_exact_against_sampling():
    gas = GasModel(3.0, 0.5, 0.5)
    s = MacroState(1.0, (0, 0, 0), 1.4, 1.0)
    basis = SpectralBasis(3, 2, "vector")
    exact = gram_exact(basis, s, gas)
    mean, se = gram_mc(basis, s, gas, 200_000, 11)
    # the first function is a collision invariant, zero on both sides up to round-off
    floor = 1e-12 * np.max(np.abs(exact))
    assert np.all(np.abs(mean - exact) <= 4.5 * se + floor)


@pytest.mark.parametrize("kind", ["tensor", "vector", "scalar"])
def test_basis_orthonormal(kind):
    gas = GasModel(3.0)
    s = MacroState(1.1, (0, 0, 0), 1.4, 0.9)
    basis = SpectralBasis(4, 3, kind)
    funcs = basis.functions(s, gas)
    gram = np.array([[m_r_integral(lambda xi, i: f(xi, i) * g(xi, i), s, gas, 16, 16)
                      for g in funcs] for f in funcs]) / s.rho
    # one Cartesian component of the angular factor: equal norms, no overlap
    scale = np.diag(gram)
    assert np.allclose(gram, np.diag(scale), atol=1e-10)
    assert np.allclose(scale, scale[0], rtol=1e-10)


def test_constrained_solve_respects_constraints():
    rng = np.random.default_rng(0)
    q = rng.normal(size=(5, 5))
    gram = q @ q.T + 5 * np.eye(5)
    cons = np.array([[1.0, 0, 0, 0, 0]])
    rhs = np.array([0.0, 1, 2, 3, 4])
    sol = constrained_solve(gram, rhs, cons)
    assert abs(sol.coeffs[0]) < 1e-14
    assert sol.min_eigenvalue > 0


@pytest.mark.parametrize("delta,ratio", [(2.0, 0.5), (3.0, 1.0), (5.0, 2.0)])
def test_coefficients_positive(delta, ratio):
    gas = GasModel(delta, 0.5, 0.5)
    s = MacroState(1.0, (0, 0, 0), ratio, 1.0)
    sol = solve_abc(s, gas, SpectralBasis(4, 2))
    tc = transport_coeffs(sol)
    assert tc.lambda_mu > 0 and tc.lambda_trtr > 0 and tc.lambda_intint > 0
    assert sol.min_eigenvalue > 0


@settings(max_examples=6, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(0.5, 2.0))
def test_coefficient_homogeneity(rho, scale):
    # rho-independent; viscosity ~ T^(1 - w), heat ~ T^(2 - w), w = alpha + beta / 2
    gas = GasModel(3.0, 0.5, 0.5)
    w = gas.alpha + 0.5 * gas.beta
    base = transport_coeffs(solve_abc(MacroState(1.0, (0, 0, 0), 1.4, 1.0), gas,
                                      SpectralBasis(4, 2)))
    moved = transport_coeffs(solve_abc(MacroState(rho, (0, 0, 0), 1.4 * scale, scale), gas,
                                       SpectralBasis(4, 2)))
    assert moved.lambda_mu == pytest.approx(base.lambda_mu * scale ** (1 - w), rel=1e-9)
    assert moved.lambda_trtr == pytest.approx(base.lambda_trtr * scale ** (2 - w), rel=1e-9)
    assert moved.lambda_intint == pytest.approx(base.lambda_intint * scale ** (2 - w), rel=1e-9)
    assert relax_f(MacroState(rho, (0, 0, 0), 1.4 * scale, scale), gas) == pytest.approx(
        relax_f(MacroState(1.0, (0, 0, 0), 1.4, 1.0), gas) * rho**2 * scale ** w, rel=1e-12)


def test_relax_k_converged_value():
    # regression value; the n_i = 8 basis is within 1e-3 of n_i = 12
    gas = GasModel(2.0, 0.5, 0.5)
    s = MacroState(1.0, (0, 0, 0), 2.0, 1.0)
    res = relax_k(s, gas)
    assert res.value == pytest.approx(-0.34087, abs=2e-5)
    assert res.kernel_overlap < 1e-8
    finer = relax_k(s, gas, SpectralBasis(8, 10, "scalar")).value
    assert abs(finer - res.value) < 1e-3


def test_relax_k_continuous_through_equality():
    gas = GasModel(2.0, 0.5, 0.5)
    at = relax_k(MacroState(1.0, (0, 0, 0), 1.0, 1.0), gas, SpectralBasis(6, 4, "scalar")).value
    near = relax_k(MacroState(1.0, (0, 0, 0), 1.01, 1.0), gas,
                   SpectralBasis(6, 4, "scalar")).value
    assert math.isfinite(at) and abs(at - near) < 0.05 * abs(near)


def test_mc_params_validation():
    with pytest.raises(ValidationError):
        McParams(method="guess")
    with pytest.raises(ValidationError):
        SpectralBasis(1, 1)
