import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twotemp.core_model import (
    GasModel,
    bl_collide_resonant,
    bl_collide_standard,
    c_s_from_c_r,
    kernel_b_r,
    kernel_b_s,
    sigma_r,
    sigma_s,
    total_energy,
)
from twotemp.errors import DomainError, ValidationError


@pytest.mark.parametrize(
    "delta, alpha, beta, expected",
    [
        # Gamma(3.5) / (Gamma(1.5) Gamma(2)) by hand
        (2.0, 0.0, 0.0, 3.75),
        # Gamma(5.5) / (Gamma(2) Gamma(3.5)) = 4.5 * 3.5
        (3.0, 0.5, 1.0, 15.75),
    ],
)
def test_c_s_hand_values(delta, alpha, beta, expected):
    assert c_s_from_c_r(1.0, delta, alpha, beta) == pytest.approx(expected, rel=1e-14)
    assert GasModel(delta, alpha, beta, c_r=2.0).c_s == pytest.approx(2 * expected, rel=1e-14)


def test_gas_derived_quantities():
    g2 = GasModel(2.0)
    assert g2.gamma == pytest.approx(1.4)
    assert g2.beta_r == pytest.approx(1.0)
    assert g2.p == 0.0
    g3 = GasModel(3.0)
    assert g3.beta_r == pytest.approx(math.pi / 8.0, rel=1e-14)
    assert g3.pair_rate_constant == pytest.approx(4 * math.pi * math.pi / 8.0, rel=1e-14)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(delta=1.5),
        dict(delta=2.0, alpha=1.0),
        dict(delta=3.0, alpha=-0.1),
        dict(delta=3.0, beta=1.5),
        dict(delta=3.0, c_r=0.0),
        dict(delta=3.0, theta=1.2),
        dict(delta=float("nan")),
    ],
)
def test_gas_validation(kwargs):
    with pytest.raises(ValidationError):
        GasModel(**kwargs)


def test_c_s_cannot_be_set():
    with pytest.raises(TypeError):
        GasModel(3.0, c_s=2.0)


def test_kernel_integrates_to_resonant(gas):
    """Integrating B_s over R with the measure R^(1/2) (1-R)^(delta-1) gives B_r."""
    from scipy import integrate

    def integrand(r):
        return kernel_b_s(1.3, 0.4, 0.9, r, gas) * r**0.5 * (1 - r) ** (gas.delta - 1)

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-12)
    assert val == pytest.approx(kernel_b_r(1.3, 0.4, 0.9, gas), rel=1e-10)


vectors = st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(np.array)
energies = st.floats(1e-6, 20.0)
fractions = st.floats(1e-6, 1 - 1e-6)


@st.composite
def unit_vectors(draw):
    v = draw(vectors)
    n = np.linalg.norm(v)
    return v / n if n > 1e-3 else np.array([0.0, 0.0, 1.0])


@settings(max_examples=200, deadline=None)
@given(vectors, vectors, energies, energies, fractions, fractions, unit_vectors())
def test_standard_collision_conserves(c, cs, i, js, big_r, r, sig):
    cp, csp, ip, jp = bl_collide_standard(c, cs, i, js, big_r, r, sig)
    scale = 1.0 + np.abs(c).sum() + np.abs(cs).sum()
    assert np.allclose(cp + csp, c + cs, rtol=0, atol=1e-13 * scale)
    e0 = 0.5 * (c @ c + cs @ cs) + i + js
    e1 = 0.5 * (cp @ cp + csp @ csp) + ip + jp
    assert e1 == pytest.approx(e0, rel=1e-13)
    assert ip >= 0 and jp >= 0
    # the post-collision relative speed carries R of the pair energy
    assert np.sum((cp - csp) ** 2) / 4 == pytest.approx(big_r * total_energy(np.linalg.norm(c - cs), i, js),
                                                        rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(vectors, vectors, energies, energies, fractions, unit_vectors())
def test_resonant_collision_preserves_speed_and_internal_energy(c, cs, i, js, r, sig):
    cp, csp, ip, jp = bl_collide_resonant(c, cs, i, js, r, sig)
    assert np.linalg.norm(cp - csp) == pytest.approx(np.linalg.norm(c - cs), rel=1e-13, abs=1e-14)
    assert ip + jp == pytest.approx(i + js, rel=1e-14)
    assert np.allclose(cp + csp, c + cs, atol=1e-13 * (1 + np.abs(c).sum() + np.abs(cs).sum()))


@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 6.0), energies, energies, fractions, fractions,
       st.sampled_from([(2.0, 0.0, 0.0), (3.0, 0.5, 0.5), (5.0, 1.2, 1.0)]))
def test_microreversibility(g, i, js, big_r, r, params):
    gas = GasModel(*params)
    e = total_energy(g, i, js)
    ip, jp = r * (1 - big_r) * e, (1 - r) * (1 - big_r) * e
    gp = 2 * math.sqrt(big_r * e)
    p = gas.p
    fwd = (i * js) ** p * g * g * sigma_s(g, i, js, ip, jp, gas)
    bwd = (ip * jp) ** p * gp * gp * sigma_s(gp, ip, jp, i, js, gas)
    assert bwd == pytest.approx(fwd, rel=1e-9)
    ip, jp = r * (i + js), (1 - r) * (i + js)
    fwd = (i * js) ** p * sigma_r(g, i, js, ip, jp, gas)
    bwd = (ip * jp) ** p * sigma_r(g, ip, jp, i, js, gas)
    assert bwd == pytest.approx(fwd, rel=1e-12)


def test_sigma_s_domain_errors(gas):
    with pytest.raises(DomainError):
        sigma_s(0.0, 0.0, 0.0, 0.0, 0.0, gas)
    with pytest.raises(DomainError):
        sigma_s(1.0, 0.1, 0.1, 5.0, 5.0, gas)
