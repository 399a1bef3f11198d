import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twotemp.core_model import GasModel
from twotemp.equilibrium import (
    MacroState,
    ReferenceScales,
    TwoTempMaxwellian,
    eval_m_r,
    eval_m_s,
    from_dimensionless,
    m_r_integral,
    moments_from_samples,
    sample_m_r,
    to_dimensionless,
)
from twotemp.errors import ValidationError


@pytest.mark.parametrize("delta", [2.0, 3.0, 5.0])
def test_m_r_moments_by_quadrature(delta):
    gas = GasModel(delta)
    s = MacroState(1.7, (0.3, 0.0, -0.1), 1.4, 0.8)
    mx = TwoTempMaxwellian(s, gas)
    assert m_r_integral(lambda xi, i: np.ones(len(i)), s, gas, 16, 16) == pytest.approx(1.7, rel=1e-13)
    mom = m_r_integral(lambda xi, i: xi[:, 0], s, gas, 16, 16)
    assert mom == pytest.approx(1.7 * 0.3, rel=1e-13)
    e_tr = m_r_integral(lambda xi, i: np.sum((xi - s.u) ** 2, axis=1), s, gas, 16, 16)
    assert e_tr == pytest.approx(3 * 1.7 * 1.4, rel=1e-13)
    e_int = m_r_integral(lambda xi, i: i, s, gas, 16, 16)
    assert e_int == pytest.approx(0.5 * delta * 1.7 * 0.8, rel=1e-13)
    # quadrature-free spot value of the density at the mean velocity and I = T_int
    expected = 1.7 / (2 * math.pi * 1.4) ** 1.5 * 0.8 ** (0.5 * delta - 1) * math.exp(-1) \
        / 0.8 ** (0.5 * delta) / math.gamma(0.5 * delta)
    assert float(eval_m_r(mx, np.array(s.u), 0.8)) == pytest.approx(expected, rel=1e-13)


def test_m_s_requires_equal_temperatures():
    gas = GasModel(3.0)
    with pytest.raises(ValidationError):
        eval_m_s(MacroState(1.0, (0, 0, 0), 1.0, 2.0), gas, np.zeros(3), 1.0)
    s = MacroState(1.0, (0, 0, 0), 1.3, 1.3)
    assert float(eval_m_s(s, gas, np.zeros(3), 0.5)) > 0


def test_negative_energy_rejected():
    mx = TwoTempMaxwellian(MacroState(1.0), GasModel(2.0))
    with pytest.raises(ValidationError):
        eval_m_r(mx, np.zeros(3), -1.0)


@pytest.mark.parametrize(
    "kwargs",
    [dict(rho=0.0), dict(rho=1.0, t_tr=-1.0), dict(rho=1.0, u=(1.0, 2.0)),
     dict(rho=float("inf"))],
)
def test_state_validation(kwargs):
    with pytest.raises(ValidationError):
        MacroState(**kwargs)


def test_zero_temperature_needs_no_maxwellian():
    s = MacroState(1.0, (0, 0, 0), 0.0, 1.0)
    with pytest.raises(ValidationError):
        s.require_positive()


def test_sampled_moments(rng):
    gas = GasModel(3.0)
    s = MacroState(1.0, (0.5, 0.0, 0.0), 2.0, 0.5)
    xi, i = sample_m_r(s, gas, 400_000, rng)
    m = moments_from_samples(xi, i, 1.0 / len(i), gas.delta)
    assert m.rho == pytest.approx(1.0)
    assert m.u[0] == pytest.approx(0.5, abs=5 * math.sqrt(2.0 / 400_000))
    assert m.t_tr == pytest.approx(2.0, rel=5 * math.sqrt(2 / 3 / 400_000))
    assert m.t_int == pytest.approx(0.5, rel=5 * math.sqrt(2 / 3 / 400_000))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=3, max_size=3), st.integers(0, 2**31))
def test_moments_translation_invariant(shift, seed):
    r = np.random.default_rng(seed)
    xi = r.normal(size=(50, 3))
    i = r.gamma(1.5, size=50)
    a = moments_from_samples(xi, i, 1.0, 3.0)
    b = moments_from_samples(xi + np.array(shift), i, 1.0, 3.0)
    assert b.t_tr == pytest.approx(a.t_tr, rel=1e-10, abs=1e-12)
    assert np.allclose(np.array(b.u) - shift, a.u, atol=1e-12)


def test_temperature_mixture():
    s = MacroState(1.0, (0, 0, 0), 2.0, 1.0)
    assert s.temperature(2.0) == pytest.approx((6 + 2) / 5)
    eq = s.equilibrated(2.0)
    assert eq.t_tr == eq.t_int == pytest.approx(1.6)


def test_reference_scales_roundtrip():
    ref = ReferenceScales(n0=2.0, t0=300.0, l0=0.1, time0=1e-3, m=4.0, k_b=1.5, w_theta0=0.7)
    assert ref.xi0 == pytest.approx(math.sqrt(1.5 * 300 / 4))
    assert ref.knudsen == pytest.approx(ref.xi0 / (0.1 * 2.0 * 0.7))
    q = {"t_tr": 450.0, "u": 3.0, "p": 12.0}
    back = from_dimensionless(to_dimensionless(q, ref), ref)
    for k in q:
        assert float(back[k]) == pytest.approx(q[k])
    with pytest.raises(ValidationError):
        to_dimensionless({"speed": 1.0}, ref)
    with pytest.raises(ValidationError):
        ReferenceScales(1, 1, 1, 1, 1, 1).knudsen
