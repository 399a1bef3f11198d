"""Equilibrium distributions, sampling, moments and unit conversion."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core_model import GasModel
from .errors import ValidationError
from .quadrature import gamma_rule, normal_rule


@dataclass(frozen=True)
class MacroState:
    """Density, bulk velocity and the two temperatures (m = k_B = 1).

    Temperatures may be zero only for degenerate particle moments; the
    Maxwellians require them strictly positive.
    """

    rho: float
    u: tuple = (0.0, 0.0, 0.0)
    t_tr: float = 1.0
    t_int: float = 1.0

    def __post_init__(self) -> None:
        u = tuple(float(x) for x in np.asarray(self.u, dtype=float).ravel())
        if len(u) != 3:
            raise ValidationError("u must have three components")
        object.__setattr__(self, "u", u)
        for name in ("rho", "t_tr", "t_int"):
            object.__setattr__(self, name, float(getattr(self, name)))
        values = (self.rho, self.t_tr, self.t_int) + u
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("macroscopic state must be finite")
        if self.rho <= 0.0:
            raise ValidationError(f"rho must be positive, got {self.rho}")
        if self.t_tr < 0.0 or self.t_int < 0.0:
            raise ValidationError("temperatures must be nonnegative")

    def temperature(self, delta: float) -> float:
        """Total temperature (3 T_tr + delta T_int)/(3 + delta)."""
        return (3.0 * self.t_tr + delta * self.t_int) / (3.0 + delta)

    def equilibrated(self, delta: float) -> "MacroState":
        t = self.temperature(delta)
        return MacroState(self.rho, self.u, t, t)

    def with_temperatures(self, t_tr: float, t_int: float) -> "MacroState":
        return MacroState(self.rho, self.u, t_tr, t_int)

    def require_positive(self) -> None:
        if self.t_tr <= 0.0 or self.t_int <= 0.0:
            raise ValidationError("Maxwellian requires positive temperatures")


@dataclass(frozen=True)
class TwoTempMaxwellian:
    state: MacroState
    gas: GasModel

    def __post_init__(self) -> None:
        self.state.require_positive()

    @property
    def log_norm(self) -> float:
        s, d = self.state, self.gas.delta
        return (
            math.log(s.rho)
            - 1.5 * math.log(2.0 * math.pi * s.t_tr)
            - 0.5 * d * math.log(s.t_int)
            - gammaln(0.5 * d)
        )


def eval_m_r(mx: TwoTempMaxwellian, xi, i):
    """M_r(xi, I); ``xi`` has shape (..., 3)."""
    s, gas = mx.state, mx.gas
    xi = np.asarray(xi, dtype=float)
    i = np.asarray(i, dtype=float)
    if np.any(i < 0.0):
        raise ValidationError("internal energy must be nonnegative")
    c2 = np.sum((xi - np.asarray(s.u)) ** 2, axis=-1)
    with np.errstate(divide="ignore"):
        log_i = np.where(i > 0.0, np.log(np.where(i > 0.0, i, 1.0)), -np.inf)
    if gas.p == 0.0:
        power = np.zeros_like(i)
    else:
        power = gas.p * log_i
    out = np.exp(mx.log_norm + power - 0.5 * c2 / s.t_tr - i / s.t_int)
    return out


def eval_m_s(state: MacroState, gas: GasModel, xi, i):
    """One-temperature equilibrium; ``state`` must have T_tr == T_int."""
    if state.t_tr != state.t_int:
        raise ValidationError("eval_m_s needs T_tr == T_int")
    return eval_m_r(TwoTempMaxwellian(state, gas), xi, i)


def sample_m_r(state: MacroState, gas: GasModel, n: int, rng: np.random.Generator):
    """Exact samples of M_r/rho: Gaussian velocities and Gamma internal energies."""
    state.require_positive()
    xi = np.asarray(state.u) + math.sqrt(state.t_tr) * rng.standard_normal((n, 3))
    i = rng.gamma(0.5 * gas.delta, state.t_int, size=n)
    return xi, i


def m_r_integral(fn, state: MacroState, gas: GasModel, n_v: int = 64, n_i: int = 64):
    """Tensor Gauss-Hermite x generalized Gauss-Laguerre value of the M_r integral of fn.

    ``fn(xi, i)`` receives xi of shape (k, 3) and i of shape (k,). The rule is
    exact for polynomials up to degree 2n-1 per variable.
    """
    state.require_positive()
    x, wx = normal_rule(n_v)
    y, wi = gamma_rule(n_i, 0.5 * gas.delta)
    vx, vy, vz = np.meshgrid(x, x, x, indexing="ij")
    v = np.stack([vx.ravel(), vy.ravel(), vz.ravel()], axis=1)
    wv = (wx[:, None, None] * wx[None, :, None] * wx[None, None, :]).ravel()
    xi = np.asarray(state.u) + math.sqrt(state.t_tr) * v
    total = 0.0
    for ik in range(n_i):
        vals = np.asarray(fn(xi, np.full(len(v), y[ik] * state.t_int)), dtype=float)
        total += wi[ik] * np.sum(wv * vals)
    return state.rho * total


def moments_from_samples(xi, i, weights, delta: float) -> MacroState:
    """Density, velocity and the two temperatures of a weighted particle set."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    i = np.atleast_1d(np.asarray(i, dtype=float))
    w = np.broadcast_to(np.asarray(weights, dtype=float), i.shape)
    if len(i) == 0:
        raise ValidationError("moments of an empty particle set")
    rho = float(np.sum(w))
    if rho <= 0.0:
        raise ValidationError("total statistical weight must be positive")
    u = np.sum(w[:, None] * xi, axis=0) / rho
    c2 = np.sum((xi - u) ** 2, axis=1)
    t_tr = float(np.sum(w * c2) / (3.0 * rho))
    t_int = float(2.0 / delta * np.sum(w * i) / rho)
    return MacroState(rho, tuple(u), max(t_tr, 0.0), t_int)


@dataclass(frozen=True)
class ReferenceScales:
    """Reference values for the dimensionless formulation.

    ``w_theta0`` is the reference collision-rate coefficient, that is the mean
    collision frequency of the reference equilibrium divided by n0.
    """

    n0: float
    t0: float
    l0: float
    time0: float
    m: float
    k_b: float
    w_theta0: float | None = None

    def __post_init__(self) -> None:
        for name in ("n0", "t0", "l0", "time0", "m", "k_b"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"reference {name} must be positive")
        if self.w_theta0 is not None and not self.w_theta0 > 0.0:
            raise ValidationError("reference w_theta0 must be positive")

    @property
    def xi0(self) -> float:
        return math.sqrt(self.k_b * self.t0 / self.m)

    @property
    def strouhal(self) -> float:
        return self.l0 / (self.time0 * self.xi0)

    @property
    def knudsen(self) -> float:
        if self.w_theta0 is None:
            raise ValidationError("w_theta0 is needed for the Knudsen number")
        return self.xi0 / (self.l0 * self.n0 * self.w_theta0)

    def units(self) -> dict[str, float]:
        """Physical value of one dimensionless unit for each quantity kind."""
        xi0 = self.xi0
        p0 = self.n0 * self.k_b * self.t0
        return {
            "t": self.time0,
            "x": self.l0,
            "xi": xi0,
            "u": xi0,
            "i": self.k_b * self.t0,
            "f": self.n0 / (self.m * xi0**5),
            "n": self.n0,
            "rho": self.m * self.n0,
            "t_tr": self.t0,
            "t_int": self.t0,
            "temperature": self.t0,
            "p": p0,
            "q": p0 * xi0,
            "e": self.m * xi0**2,
        }


def to_dimensionless(quantities: dict[str, float], ref: ReferenceScales) -> dict[str, float]:
    units = ref.units()
    unknown = set(quantities) - set(units)
    if unknown:
        raise ValidationError(f"unknown quantity kinds: {sorted(unknown)}")
    return {k: np.asarray(v, dtype=float) / units[k] for k, v in quantities.items()}


def from_dimensionless(quantities: dict[str, float], ref: ReferenceScales) -> dict[str, float]:
    units = ref.units()
    unknown = set(quantities) - set(units)
    if unknown:
        raise ValidationError(f"unknown quantity kinds: {sorted(unknown)}")
    return {k: np.asarray(v, dtype=float) * units[k] for k, v in quantities.items()}
