"""Gas parameters, model cross sections and kernels, Borgnakke-Larsen collision maps.

Units are dimensionless with m = k_B = 1. All functions broadcast over numpy
arrays; vectors carry their components on the last axis.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, ValidationError


def c_s_from_c_r(c_r: float, delta: float, alpha: float, beta: float) -> float:
    """Standard-collision constant tied to the resonant one.

    The ratio is the inverse of the Beta function B((beta+3)/2, delta+alpha), which
    makes the R-integrated standard kernel equal to the resonant kernel.
    """
    a = 0.5 * (beta + 3.0)
    b = delta + alpha
    return float(c_r * np.exp(gammaln(a + b) - gammaln(a) - gammaln(b)))


@dataclass(frozen=True)
class GasModel:
    """Model parameters of the polyatomic gas.

    ``c_s`` is derived from ``c_r`` and cannot be set independently.
    """

    delta: float
    alpha: float = 0.0
    beta: float = 0.0
    c_r: float = 1.0
    theta: float = 0.0
    c_s: float = field(init=False)

    def __post_init__(self) -> None:
        for name in ("delta", "alpha", "beta", "c_r", "theta"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.delta < 2.0:
            raise ValidationError(f"delta must be >= 2, got {self.delta}")
        if not 0.0 <= self.alpha < 0.5 * self.delta:
            raise ValidationError(f"alpha must lie in [0, delta/2), got {self.alpha}")
        if not 0.0 <= self.beta <= 1.0:
            raise ValidationError(f"beta must lie in [0, 1], got {self.beta}")
        if self.c_r <= 0.0:
            raise ValidationError(f"c_r must be positive, got {self.c_r}")
        if not 0.0 <= self.theta <= 1.0:
            raise ValidationError(f"theta must lie in [0, 1], got {self.theta}")
        object.__setattr__(
            self, "c_s", c_s_from_c_r(self.c_r, self.delta, self.alpha, self.beta)
        )

    def replace(self, **changes) -> "GasModel":
        return dataclasses.replace(self, **changes)

    @property
    def p(self) -> float:
        """Exponent delta/2 - 1 of the internal-energy density of states."""
        return 0.5 * self.delta - 1.0

    @property
    def gamma(self) -> float:
        """Equilibrium ratio of specific heats."""
        return (self.delta + 5.0) / (self.delta + 3.0)

    @property
    def beta_r(self) -> float:
        """Normalizer of the r-split density, B(delta/2, delta/2)."""
        h = 0.5 * self.delta
        return float(np.exp(2.0 * gammaln(h) - gammaln(self.delta)))

    @property
    def pair_rate_constant(self) -> float:
        """4 pi C_r B(delta/2, delta/2): pair rate per unit (I+I*)^alpha |g|^beta."""
        return 4.0 * np.pi * self.c_r * self.beta_r


def _as_float(x):
    return np.asarray(x, dtype=float)


def total_energy(g_mag, i, i_star):
    """Center-of-mass collision energy E = g^2/4 + I + I*."""
    return 0.25 * _as_float(g_mag) ** 2 + _as_float(i) + _as_float(i_star)


def sigma_s(g_mag, i, i_star, i_prime, i_star_prime, gas: GasModel):
    """Standard-collision cross section of the model kernel."""
    g = _as_float(g_mag)
    i, i_star = _as_float(i), _as_float(i_star)
    ip, isp = _as_float(i_prime), _as_float(i_star_prime)
    e = total_energy(g, i, i_star)
    if np.any(e <= 0.0):
        raise DomainError("total collision energy must be positive")
    gp2 = 4.0 * (e - ip - isp)
    if np.any(gp2 < -1e-12 * 4.0 * e):
        raise DomainError("post-collision energies exceed the available energy")
    gp = np.sqrt(np.maximum(gp2, 0.0))
    d, a, b = gas.delta, gas.alpha, gas.beta
    return (
        gas.c_s
        * 0.25 ** (0.5 * (b + 1.0))
        * (i + i_star) ** a
        * (ip + isp) ** a
        * (ip * isp) ** gas.p
        * e ** (-(d + a + 0.5 * (b + 1.0)))
        * g ** (b - 1.0)
        * gp ** (b + 1.0)
    )


def sigma_r(g_mag, i, i_star, i_prime, i_star_prime, gas: GasModel):
    """Resonant-collision cross section of the model kernel."""
    g = _as_float(g_mag)
    s = _as_float(i) + _as_float(i_star)
    ip, isp = _as_float(i_prime), _as_float(i_star_prime)
    if np.any(s <= 0.0) and gas.alpha < gas.delta - 1.0:
        raise DomainError("sigma_r is singular at I + I* = 0")
    return (
        gas.c_r
        * (ip * isp) ** gas.p
        / s ** (gas.delta - 1.0 - gas.alpha)
        * g ** (gas.beta - 1.0)
    )


def kernel_b_s(g_mag, i, i_star, r_frac, gas: GasModel):
    """B_s = C_s (I+I*)^alpha |g|^beta R^(beta/2) (1-R)^alpha."""
    r = _as_float(r_frac)
    return (
        gas.c_s
        * (_as_float(i) + _as_float(i_star)) ** gas.alpha
        * _as_float(g_mag) ** gas.beta
        * r ** (0.5 * gas.beta)
        * (1.0 - r) ** gas.alpha
    )


def kernel_b_r(g_mag, i, i_star, gas: GasModel):
    """B_r = C_r (I+I*)^alpha |g|^beta."""
    return (
        gas.c_r
        * (_as_float(i) + _as_float(i_star)) ** gas.alpha
        * _as_float(g_mag) ** gas.beta
    )


def bl_collide_standard(c, c_star, i, i_star, r_frac, r_split, sigma_dir):
    """Inelastic Borgnakke-Larsen collision.

    R sends a fraction of E to the relative motion along ``sigma_dir``; r splits
    the remaining internal energy between the partners.
    """
    c, c_star = _as_float(c), _as_float(c_star)
    i, i_star = _as_float(i), _as_float(i_star)
    big_r, r = _as_float(r_frac), _as_float(r_split)
    sig = _as_float(sigma_dir)
    g = c - c_star
    com = 0.5 * (c + c_star)
    e = 0.25 * np.sum(g * g, axis=-1) + i + i_star
    half = np.sqrt(big_r * e)[..., None] * sig
    e_int = (1.0 - big_r) * e
    return com + half, com - half, r * e_int, (1.0 - r) * e_int


def bl_collide_resonant(c, c_star, i, i_star, r_split, sigma_dir):
    """Elastic-in-translation collision; internal energy is only redistributed."""
    c, c_star = _as_float(c), _as_float(c_star)
    s = _as_float(i) + _as_float(i_star)
    r = _as_float(r_split)
    g = c - c_star
    com = 0.5 * (c + c_star)
    half = 0.5 * np.linalg.norm(g, axis=-1)[..., None] * _as_float(sigma_dir)
    return com + half, com - half, r * s, (1.0 - r) * s


@dataclass(frozen=True)
class CollisionSample:
    """A batch of pre/post collision records with importance weights.

    Arrays share a leading sample axis. ``outcome`` is ``"standard"`` or
    ``"resonant"``.
    """

    c: np.ndarray
    c_star: np.ndarray
    i: np.ndarray
    i_star: np.ndarray
    r_frac: np.ndarray
    r_split: np.ndarray
    sigma_dir: np.ndarray
    c_prime: np.ndarray
    c_star_prime: np.ndarray
    i_prime: np.ndarray
    i_star_prime: np.ndarray
    weight: np.ndarray
    outcome: str

    def momentum_residual(self) -> np.ndarray:
        before = self.c + self.c_star
        after = self.c_prime + self.c_star_prime
        scale = np.maximum(np.linalg.norm(self.c, axis=-1) + np.linalg.norm(self.c_star, axis=-1), 1e-300)
        return np.linalg.norm(after - before, axis=-1) / scale

    def energy_residual(self) -> np.ndarray:
        def energy(v, w, i, j):
            return 0.5 * (np.sum(v * v, axis=-1) + np.sum(w * w, axis=-1)) + i + j

        before = energy(self.c, self.c_star, self.i, self.i_star)
        after = energy(self.c_prime, self.c_star_prime, self.i_prime, self.i_star_prime)
        return np.abs(after - before) / np.maximum(before, 1e-300)
