"""One-dimensional finite-volume solver for the two-temperature Euler and
Navier-Stokes systems.

Conserved variables per cell are (rho, rho u, E_tr, rho e_int) with
E_tr = 3/2 rho T_tr + 1/2 rho u^2 and rho e_int = delta/2 rho T_int. The
hyperbolic part is the gamma = 5/3 Euler system for the translational variables
plus the internal energy advected as a passive scalar. Viscous and heat-flux
terms are scaled by eps; the relaxation source is eps kappa F (T_tr - T_int) in
"eps2" mode and kappa F [1 + eps K] (T_tr - T_int) in "eps1" mode.

A step is Strang split: half relaxation, MUSCL-HLL with SSP-RK2, explicit
diffusion, half relaxation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .chapman_enskog import (
    SpectralBasis,
    analytic_coefficients,
    relax_f,
    relax_k,
    solve_abc,
    transport_coeffs,
)
from .core_model import GasModel
from .equilibrium import MacroState
from .errors import ConvergenceError, PositivityError, ValidationError

GAMMA_TR = 5.0 / 3.0
MODES = ("eps2", "eps1")
BOUNDARIES = ("periodic", "transmissive", "inflow-outflow")
PROVIDER_MODES = ("analytic-alpha0beta0", "tabulated", "live", "euler")
COEFF_NAMES = ("lambda_mu", "lambda_trtr", "lambda_trint", "lambda_inttr", "lambda_intint")
PROFILE_COLUMNS = ("x", "rho", "u", "T_tr", "T_int", "p", "q_tr", "q_int")
_NG = 2


# --------------------------------------------------------------------------
# Coefficients
# --------------------------------------------------------------------------

def _scaling_exponents(gas: GasModel) -> dict[str, float]:
    """Degree of homogeneity in the temperatures at fixed T_tr/T_int.

    The coefficients do not depend on rho.
    """
    w = gas.alpha + 0.5 * gas.beta
    out = {"lambda_mu": 1.0 - w, "k_relax": 0.0}
    for name in COEFF_NAMES[1:]:
        out[name] = 2.0 - w
    return out


def relax_f_array(rho, t_tr, t_int, gas: GasModel) -> np.ndarray:
    """Vectorized relaxation coefficient F(rho, T_tr, T_int)."""
    unit = relax_f(MacroState(1.0, (0.0, 0.0, 0.0), 1.0, 1.0), gas)
    return unit * np.asarray(rho) ** 2 * np.asarray(t_tr) ** (0.5 * gas.beta) * np.asarray(t_int) ** gas.alpha


@dataclass
class CoefficientProvider:
    """Transport and relaxation coefficients as functions of (rho, T_tr, T_int).

    ``tabulated`` stores each coefficient divided by T_int to its homogeneity
    degree as a cubic spline in log(T_tr/T_int); ``live`` runs the Galerkin
    solver at every distinct state; ``analytic-alpha0beta0`` uses closed forms;
    ``euler`` carries only the relaxation coefficient and zero transport.
    """

    gas: GasModel
    mode: str
    table: dict | None = None
    basis_size: tuple[int, int] = (8, 4)
    include_k: bool = True
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.mode not in PROVIDER_MODES:
            raise ValidationError(f"unknown coefficient mode {self.mode!r}")
        if self.mode == "analytic-alpha0beta0" and (self.gas.alpha or self.gas.beta):
            raise ValidationError("analytic coefficients need alpha = beta = 0")
        if self.mode == "tabulated" and self.table is None:
            raise ValidationError("tabulated mode needs a table")

    @classmethod
    def analytic(cls, gas: GasModel) -> "CoefficientProvider":
        return cls(gas, "analytic-alpha0beta0", include_k=False)

    @classmethod
    def euler(cls, gas: GasModel) -> "CoefficientProvider":
        return cls(gas, "euler", include_k=False)

    @classmethod
    def live(cls, gas: GasModel, basis_size=(8, 4), include_k: bool = True):
        return cls(gas, "live", basis_size=tuple(basis_size), include_k=include_k)

    @classmethod
    def tabulate(cls, gas: GasModel, ratios=None, basis_size=(8, 4), include_k: bool = True):
        """Build the table from live evaluations at T_int = 1, rho = 1."""
        ratios = np.geomspace(0.25, 4.0, 17) if ratios is None else np.asarray(ratios, float)
        if np.any(np.diff(ratios) <= 0.0) or ratios[0] <= 0.0:
            raise ValidationError("table ratios must be positive and increasing")
        src = cls.live(gas, basis_size, include_k)
        rows = [src._live_point(1.0, float(r), 1.0) for r in ratios]
        table = {"log_ratio": np.log(ratios)}
        for name in rows[0]:
            table[name] = np.array([row[name] for row in rows])
        return cls(gas, "tabulated", table=table, basis_size=tuple(basis_size),
                   include_k=include_k)

    def _live_point(self, rho: float, t_tr: float, t_int: float) -> dict[str, float]:
        key = (rho, t_tr, t_int)
        if key not in self._cache:
            state = MacroState(rho, (0.0, 0.0, 0.0), t_tr, t_int)
            n_c, n_i = self.basis_size
            sol = solve_abc(state, self.gas, SpectralBasis(n_c, n_i, "tensor"))
            tc = transport_coeffs(sol)
            row = {name: getattr(tc, name) for name in COEFF_NAMES}
            if self.include_k:
                row["k_relax"] = relax_k(state, self.gas,
                                         SpectralBasis(n_c, n_i, "scalar")).value
            self._cache[key] = row
        return self._cache[key]

    def evaluate(self, rho, t_tr, t_int) -> dict[str, np.ndarray]:
        rho, t_tr, t_int = (np.atleast_1d(np.asarray(v, dtype=float))
                            for v in (rho, t_tr, t_int))
        rho, t_tr, t_int = np.broadcast_arrays(rho, t_tr, t_int)
        if np.any(rho <= 0.0) or np.any(t_tr <= 0.0) or np.any(t_int <= 0.0):
            raise ValidationError("coefficients need positive rho and temperatures")
        out = {"f_relax": relax_f_array(rho, t_tr, t_int, self.gas)}
        if self.mode == "euler":
            out.update({name: np.zeros(rho.shape) for name in COEFF_NAMES})
            return out
        if self.mode == "analytic-alpha0beta0":
            # the closed forms are rho-independent and bilinear in the temperatures
            unit = analytic_coefficients(MacroState(1.0, (0.0, 0.0, 0.0), 1.0, 1.0), self.gas)
            zero = np.zeros(rho.shape)
            out.update(lambda_mu=unit.lambda_mu * t_tr, lambda_trtr=unit.lambda_trtr * t_tr**2,
                       lambda_trint=zero, lambda_inttr=zero.copy(),
                       lambda_intint=unit.lambda_intint * t_tr * t_int)
            return out
        if self.mode == "live":
            for k in range(rho.size):
                row = self._live_point(float(rho.flat[k]), float(t_tr.flat[k]),
                                       float(t_int.flat[k]))
                for name, value in row.items():
                    out.setdefault(name, np.empty(rho.shape)).flat[k] = value
            return out
        log_r = np.log(t_tr / t_int)
        lo, hi = self.table["log_ratio"][0], self.table["log_ratio"][-1]
        if np.any(log_r < lo - 1e-12) or np.any(log_r > hi + 1e-12):
            raise ValidationError("T_tr/T_int outside the tabulated range")
        degrees = _scaling_exponents(self.gas)
        for name, values in self.table.items():
            if name == "log_ratio":
                continue
            spline = CubicSpline(self.table["log_ratio"], values)
            out[name] = spline(log_r) * t_int ** degrees[name]
        return out

    def k_available(self) -> bool:
        return self.mode in ("tabulated", "live") and self.include_k


# --------------------------------------------------------------------------
# State
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Boundary:
    """Boundary treatment.

    For "inflow-outflow", ``inflow`` fixes the left ghost cells in primitive
    variables (rho, u, T_tr, T_int). The right side extrapolates; with
    ``back_pressure`` set it keeps rho and u and imposes the pressure with
    equal temperatures.
    """

    kind: str = "periodic"
    inflow: tuple | None = None
    back_pressure: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in BOUNDARIES:
            raise ValidationError(f"unknown boundary {self.kind!r}")
        if self.kind == "inflow-outflow" and self.inflow is None:
            raise ValidationError("inflow-outflow boundary needs an inflow state")


@dataclass(frozen=True)
class FluidState1D:
    x: np.ndarray
    cons: np.ndarray
    delta: float
    scaling_mode: str = "eps2"
    eps: float = 0.1
    kappa: float = 1.0
    time: float = 0.0

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=float)
        cons = np.array(self.cons, dtype=float)
        if x.ndim != 1 or len(x) < 3:
            raise ValidationError("need at least three cells")
        if cons.shape != (len(x), 4):
            raise ValidationError("conserved array must have shape (n, 4)")
        if not np.allclose(np.diff(x), x[1] - x[0], rtol=1e-9, atol=0.0):
            raise ValidationError("grid must be uniform")
        if self.scaling_mode not in MODES:
            raise ValidationError(f"scaling_mode must be one of {MODES}")
        if not self.eps > 0.0 or not self.kappa >= 0.0:
            raise ValidationError("eps must be positive and kappa nonnegative")
        if self.delta < 2.0:
            raise ValidationError("delta must be >= 2")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "cons", cons)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def from_primitive(cls, x, rho, u, t_tr, t_int, delta: float, **kw) -> "FluidState1D":
        x = np.asarray(x, dtype=float)
        fields = np.broadcast_arrays(x, *(np.asarray(v, dtype=float)
                                          for v in (rho, u, t_tr, t_int)))
        w = np.stack(fields[1:], axis=1)
        return cls(x, prim_to_cons(w, delta), float(delta), **kw)

    def primitives(self) -> np.ndarray:
        """Columns rho, u, T_tr, T_int."""
        return cons_to_prim(self.cons, self.delta)

    def totals(self) -> np.ndarray:
        """Cell sums of mass, momentum and total energy times dx."""
        c = self.cons
        return self.dx * np.array([c[:, 0].sum(), c[:, 1].sum(), (c[:, 2] + c[:, 3]).sum()])


def prim_to_cons(w: np.ndarray, delta: float) -> np.ndarray:
    rho, u, ttr, tint = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    return np.stack([rho, rho * u, 1.5 * rho * ttr + 0.5 * rho * u * u,
                     0.5 * delta * rho * tint], axis=-1)


def cons_to_prim(c: np.ndarray, delta: float) -> np.ndarray:
    rho = c[..., 0]
    u = c[..., 1] / rho
    ttr = (c[..., 2] - 0.5 * rho * u * u) / (1.5 * rho)
    tint = c[..., 3] / (0.5 * delta * rho)
    return np.stack([rho, u, ttr, tint], axis=-1)


def _check_positive(w: np.ndarray, what: str) -> None:
    bad = ~((w[:, 0] > 0.0) & (w[:, 2] > 0.0) & (w[:, 3] > 0.0) & np.all(np.isfinite(w), axis=1))
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise PositivityError(f"nonpositive state after {what} in cell {k}", cell=k)


# --------------------------------------------------------------------------
# Hyperbolic part
# --------------------------------------------------------------------------

def physical_flux(w: np.ndarray, delta: float) -> np.ndarray:
    rho, u, ttr, tint = w[..., 0], w[..., 1], w[..., 2], w[..., 3]
    e_tr = 1.5 * rho * ttr + 0.5 * rho * u * u
    return np.stack([rho * u, rho * u * u + rho * ttr, (e_tr + rho * ttr) * u,
                     0.5 * delta * rho * tint * u], axis=-1)


def hyperbolic_flux(w_left: np.ndarray, w_right: np.ndarray, delta: float) -> np.ndarray:
    """HLL flux between primitive states with speeds u -/+ sqrt(5/3 T_tr)."""
    w_left, w_right = np.asarray(w_left, dtype=float), np.asarray(w_right, dtype=float)
    if (np.any(w_left[..., [0, 2]] <= 0.0) or np.any(w_right[..., [0, 2]] <= 0.0)
            or np.any(w_left[..., 3] < 0.0) or np.any(w_right[..., 3] < 0.0)):
        raise ValidationError("HLL flux needs positive density and temperature")
    a_l = np.sqrt(GAMMA_TR * w_left[..., 2])
    a_r = np.sqrt(GAMMA_TR * w_right[..., 2])
    s_l = np.minimum(w_left[..., 1] - a_l, w_right[..., 1] - a_r)
    s_r = np.maximum(w_left[..., 1] + a_l, w_right[..., 1] + a_r)
    f_l, f_r = physical_flux(w_left, delta), physical_flux(w_right, delta)
    u_l, u_r = prim_to_cons(w_left, delta), prim_to_cons(w_right, delta)
    s_l_, s_r_ = s_l[..., None], s_r[..., None]
    mid = (s_r_ * f_l - s_l_ * f_r + s_l_ * s_r_ * (u_r - u_l)) / (s_r_ - s_l_)
    return np.where(s_l_ >= 0.0, f_l, np.where(s_r_ <= 0.0, f_r, mid))


def _minmod(a, b):
    return np.where(a * b > 0.0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _pad(w: np.ndarray, bc: Boundary, n_ghost: int = _NG) -> np.ndarray:
    if bc.kind == "periodic":
        return np.concatenate([w[-n_ghost:], w, w[:n_ghost]])
    right = np.repeat(w[-1:], n_ghost, axis=0)
    if bc.back_pressure is not None:
        right[:, 2:] = bc.back_pressure / right[:, :1]
    if bc.kind == "transmissive":
        left = np.repeat(w[:1], n_ghost, axis=0)
    else:
        left = np.repeat(np.asarray(bc.inflow, dtype=float)[None, :], n_ghost, axis=0)
    return np.concatenate([left, w, right])


def _admissible(w):
    return (w[:, 0] > 0.0) & (w[:, 2] > 0.0) & (w[:, 3] >= 0.0)


def hyperbolic_rhs(cons: np.ndarray, delta: float, dx: float, bc: Boundary) -> np.ndarray:
    """-(F_{j+1/2} - F_{j-1/2})/dx with minmod MUSCL on primitive variables."""
    w = cons_to_prim(cons, delta)
    _check_positive(w, "hyperbolic stage")
    wp = _pad(w, bc)
    slope = np.zeros_like(wp)
    slope[1:-1] = _minmod(wp[1:-1] - wp[:-2], wp[2:] - wp[1:-1])
    left = wp[1:-2] + 0.5 * slope[1:-2]
    right = wp[2:-1] - 0.5 * slope[2:-1]
    # fall back to first order where the reconstruction leaves the admissible set
    left = np.where(_admissible(left)[:, None], left, wp[1:-2])
    right = np.where(_admissible(right)[:, None], right, wp[2:-1])
    flux = hyperbolic_flux(left, right, delta)
    return -(flux[1:] - flux[:-1]) / dx


# --------------------------------------------------------------------------
# Relaxation and diffusion
# --------------------------------------------------------------------------

def relaxation_rate(w: np.ndarray, coeffs: dict, delta: float, scaling_mode: str,
                    eps: float, kappa: float, use_k: bool = True) -> np.ndarray:
    """Decay rate of T_tr - T_int under the frozen linear relaxation source."""
    f = coeffs["f_relax"]
    if scaling_mode == "eps2":
        s = eps * kappa * f
    else:
        k = coeffs.get("k_relax") if use_k else None
        s = kappa * f * (1.0 + eps * k) if k is not None else kappa * f
    return s * (2.0 / 3.0 + 2.0 / delta) / w[:, 0]


def relaxation_update(state: FluidState1D, coeffs: dict, dt: float,
                      use_k: bool = True) -> FluidState1D:
    """Exact solution of the frozen-coefficient relaxation ODE over dt.

    T_tr - T_int decays exponentially while 3 T_tr + delta T_int, rho and rho u
    stay fixed.
    """
    if not dt > 0.0:
        raise ValidationError("dt must be positive")
    w = state.primitives()
    d = state.delta
    rate = relaxation_rate(w, coeffs, d, state.scaling_mode, state.eps, state.kappa, use_k)
    gap = (w[:, 2] - w[:, 3]) * np.exp(-rate * dt)
    total = 3.0 * w[:, 2] + d * w[:, 3]
    cons = state.cons.copy()
    cons[:, 2] = state.cons[:, 2] + 1.5 * w[:, 0] * ((total + d * gap) / (3.0 + d) - w[:, 2])
    cons[:, 3] = state.cons[:, 3] + 0.5 * d * w[:, 0] * ((total - 3.0 * gap) / (3.0 + d) - w[:, 3])
    # keep total energy exact in floating point
    cons[:, 3] = state.cons[:, 2] + state.cons[:, 3] - cons[:, 2]
    return replace(state, cons=cons)


def diffusive_fluxes(w_pad: np.ndarray, coeff_pad: dict, dx: float) -> np.ndarray:
    """Face fluxes G with dU/dt = dG/dx for the viscous and heat terms."""
    lam = {k: 0.5 * (coeff_pad[k][1:] + coeff_pad[k][:-1]) for k in COEFF_NAMES}
    u = w_pad[:, 1]
    u_face = 0.5 * (u[1:] + u[:-1])
    du = np.diff(u) / dx
    dlog_tr = np.diff(np.log(w_pad[:, 2])) / dx
    dlog_int = np.diff(np.log(w_pad[:, 3])) / dx
    tau = 4.0 / 3.0 * lam["lambda_mu"] * du
    g = np.zeros((len(du), 4))
    g[:, 1] = tau
    g[:, 2] = u_face * tau + lam["lambda_trtr"] * dlog_tr + lam["lambda_trint"] * dlog_int
    g[:, 3] = lam["lambda_inttr"] * dlog_tr + lam["lambda_intint"] * dlog_int
    return g


def ns_diffusion(state: FluidState1D, coeffs: CoefficientProvider, eps: float | None = None,
                 bc: Boundary | None = None) -> np.ndarray:
    """Per-cell eps dG/dx of the viscous and heat-flux terms, central in space."""
    if state.n < 3:
        raise ValidationError("diffusion needs at least three cells")
    eps = state.eps if eps is None else eps
    bc = bc or Boundary("periodic")
    wp = _pad(state.primitives(), bc, 1)
    cp = coeffs.evaluate(wp[:, 0], wp[:, 2], wp[:, 3])
    g = diffusive_fluxes(wp, cp, state.dx)
    return eps * (g[1:] - g[:-1]) / state.dx


def heat_fluxes(state: FluidState1D, coeffs: CoefficientProvider,
                bc: Boundary | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Cell-centred q_tr and q_int from central gradients."""
    bc = bc or Boundary("periodic")
    w = state.primitives()
    wp = _pad(w, bc, 1)
    c = coeffs.evaluate(w[:, 0], w[:, 2], w[:, 3])
    dlog_tr = (np.log(wp[2:, 2]) - np.log(wp[:-2, 2])) / (2.0 * state.dx)
    dlog_int = (np.log(wp[2:, 3]) - np.log(wp[:-2, 3])) / (2.0 * state.dx)
    q_tr = -state.eps * (c["lambda_trtr"] * dlog_tr + c["lambda_trint"] * dlog_int)
    q_int = -state.eps * (c["lambda_inttr"] * dlog_tr + c["lambda_intint"] * dlog_int)
    return q_tr, q_int


# --------------------------------------------------------------------------
# Time stepping
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    times: list
    states: list
    steps: int

    @property
    def final(self) -> FluidState1D:
        return self.states[-1]


def stable_dt(state: FluidState1D, coeffs: CoefficientProvider, cfl: float,
              diffusion: bool = True) -> float:
    """Largest step allowed by the CFL condition and explicit diffusion."""
    w = state.primitives()
    speed = np.max(np.abs(w[:, 1]) + np.sqrt(GAMMA_TR * w[:, 2]))
    dt = cfl * state.dx / speed
    if diffusion:
        c = coeffs.evaluate(w[:, 0], w[:, 2], w[:, 3])
        diffusivity = np.max(state.eps * np.maximum.reduce([
            4.0 / 3.0 * c["lambda_mu"] / w[:, 0],
            (c["lambda_trtr"] + np.abs(c["lambda_trint"])) / (1.5 * w[:, 0] * w[:, 2]),
            (c["lambda_intint"] + np.abs(c["lambda_inttr"]))
            / (0.5 * state.delta * w[:, 0] * w[:, 3]),
        ]))
        if diffusivity > 0.0:
            dt = min(dt, state.dx**2 / (4.0 * diffusivity))
    return float(dt)


def _relax_midpoint(state: FluidState1D, coeffs: CoefficientProvider, dt: float,
                    use_k: bool) -> FluidState1D:
    """Relaxation over dt with coefficients taken at the predicted midpoint state."""
    w = state.primitives()
    half = relaxation_update(state, coeffs.evaluate(w[:, 0], w[:, 2], w[:, 3]), 0.5 * dt, use_k)
    w = half.primitives()
    return relaxation_update(state, coeffs.evaluate(w[:, 0], w[:, 2], w[:, 3]), dt, use_k)


def step(state: FluidState1D, coeffs: CoefficientProvider, dt: float, bc: Boundary,
         diffusion: bool = True, use_k: bool = True) -> FluidState1D:
    """One Strang-split step of size dt."""
    s = _relax_midpoint(state, coeffs, 0.5 * dt, use_k)
    u0 = s.cons
    u1 = u0 + dt * hyperbolic_rhs(u0, s.delta, s.dx, bc)
    u2 = 0.5 * (u0 + u1 + dt * hyperbolic_rhs(u1, s.delta, s.dx, bc))
    _check_positive(cons_to_prim(u2, s.delta), "hyperbolic step")
    s = replace(s, cons=u2)
    if diffusion:
        s = replace(s, cons=s.cons + dt * ns_diffusion(s, coeffs, bc=bc))
        _check_positive(s.primitives(), "diffusion step")
    s = _relax_midpoint(s, coeffs, 0.5 * dt, use_k)
    return replace(s, time=state.time + dt)


def advance(state: FluidState1D, coeffs: CoefficientProvider, t_end: float, cfl: float = 0.4,
            bc: Boundary | str = "periodic", n_out: int = 1, diffusion: bool = True,
            use_k: bool = True, max_steps: int = 10_000_000,
            dt_max: float | None = None) -> Trajectory:
    """March to ``t_end`` and keep ``n_out`` evenly spaced snapshots after the start."""
    if not 0.0 < cfl < 1.0:
        raise ValidationError("cfl must lie in (0, 1)")
    if not t_end > state.time:
        raise ValidationError("t_end must exceed the current time")
    bc = Boundary(bc) if isinstance(bc, str) else bc
    marks = list(np.linspace(state.time, t_end, n_out + 1)[1:])
    times, states = [state.time], [state]
    steps = 0
    while marks:
        dt = stable_dt(state, coeffs, cfl, diffusion)
        if dt_max is not None:
            dt = min(dt, dt_max)
        target = marks[0]
        hit = state.time + dt >= target * (1.0 - 1e-14)
        if hit:
            dt = target - state.time
        if dt <= 0.0:
            raise ValidationError("non-positive time step")
        state = step(state, coeffs, dt, bc, diffusion, use_k)
        steps += 1
        if hit:
            state = replace(state, time=target)
            times.append(target)
            states.append(state)
            marks.pop(0)
        if steps > max_steps:
            raise ConvergenceError("maximum number of steps exceeded")
    return Trajectory(times, states, steps)


def write_profile(path, state: FluidState1D, coeffs: CoefficientProvider,
                  bc: Boundary | str = "periodic") -> None:
    bc = Boundary(bc) if isinstance(bc, str) else bc
    w = state.primitives()
    q_tr, q_int = heat_fluxes(state, coeffs, bc)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(PROFILE_COLUMNS)
        for k in range(state.n):
            row = (state.x[k], w[k, 0], w[k, 1], w[k, 2], w[k, 3], w[k, 0] * w[k, 2],
                   q_tr[k], q_int[k])
            out.writerow([repr(float(v)) for v in row])


# --------------------------------------------------------------------------
# Shock structure
# --------------------------------------------------------------------------

def rankine_hugoniot(mach: float, gamma: float) -> tuple[float, float, float]:
    """Density, velocity and temperature ratios across a normal shock."""
    if mach < 1.0:
        raise ValidationError("upstream Mach number must be at least 1")
    m2 = mach * mach
    r = (gamma + 1.0) * m2 / ((gamma - 1.0) * m2 + 2.0)
    p = 1.0 + 2.0 * gamma / (gamma + 1.0) * (m2 - 1.0)
    return r, 1.0 / r, p / r


@dataclass(frozen=True)
class ShockProfile:
    state: FluidState1D
    upstream: tuple
    downstream: tuple
    expected_downstream: tuple
    residual: float
    steps: int

    @property
    def density_ratio(self) -> float:
        return self.downstream[0] / self.upstream[0]

    def relaxation_zone_width(self) -> float:
        """Integral width of |T_tr - T_int| normalized by its peak."""
        w = self.state.primitives()
        gap = np.abs(w[:, 2] - w[:, 3])
        return float(gap.sum() * self.state.dx / gap.max())

    def shock_thickness(self) -> float:
        """Density jump over the steepest density slope."""
        rho = self.state.primitives()[:, 0]
        return float((rho.max() - rho.min()) / (np.max(np.abs(np.diff(rho))) / self.state.dx))


def shock_structure(upstream: MacroState, mach: float, coeffs: CoefficientProvider,
                    gas: GasModel, eps: float, mode: str = "eps2", kappa: float = 1.0,
                    n_cells: int = 400, x_range: tuple = (-2.0, 6.0), cfl: float = 0.4,
                    tol: float = 1e-9, max_time: float = 400.0, check_every: float = 1.0,
                    use_k: bool = True) -> ShockProfile:
    """Steady shock in the shock frame by time marching.

    Upstream is an equilibrium state moving at Mach ``mach`` relative to the
    equilibrium sound speed; the left boundary holds it fixed and the right one
    imposes the jump-condition pressure as back pressure. Density, velocity
    and temperatures downstream are left to the flow. Marching stops when the
    relative change of the conserved variables per unit time falls below ``tol``.
    """
    if mach <= 1.0:
        raise ValidationError("upstream Mach number must exceed 1")
    if upstream.t_tr != upstream.t_int:
        raise ValidationError("upstream state must be in equilibrium")
    rho1, t1 = upstream.rho, upstream.t_tr
    u1 = mach * math.sqrt(gas.gamma * t1)
    r, v, tr = rankine_hugoniot(mach, gas.gamma)
    x = np.linspace(*x_range, n_cells + 1)
    x = 0.5 * (x[1:] + x[:-1])
    right = x > 0.0
    state = FluidState1D.from_primitive(
        x, np.where(right, rho1 * r, rho1), np.where(right, u1 * v, u1),
        np.where(right, t1 * tr, t1), np.where(right, t1 * tr, t1), gas.delta,
        scaling_mode=mode, eps=eps, kappa=kappa)
    bc = Boundary("inflow-outflow", (rho1, u1, t1, t1), back_pressure=rho1 * t1 * r * tr)
    residual = math.inf
    steps = 0
    while state.time < max_time:
        before = state.cons
        traj = advance(state, coeffs, state.time + check_every, cfl, bc, use_k=use_k)
        state, steps = traj.final, steps + traj.steps
        residual = float(np.max(np.abs(state.cons - before)) / np.max(np.abs(before))
                         / check_every)
        if residual < tol:
            break
    else:
        raise ConvergenceError(f"shock did not converge, residual {residual:.3e}",
                               residual=residual)
    w = state.primitives()
    return ShockProfile(state, (rho1, u1, t1, t1), tuple(w[-1]),
                        (rho1 * r, u1 * v, t1 * tr, t1 * tr), residual, steps)


# --------------------------------------------------------------------------
# Exact Riemann solver for the translational subsystem
# --------------------------------------------------------------------------

def exact_riemann(left: tuple, right: tuple, gamma: float, s) -> np.ndarray:
    """Exact solution (rho, u, p) of the Euler Riemann problem at similarity
    coordinates s = x/t; ``left`` and ``right`` are (rho, u, p)."""
    rl, ul, pl = left
    rr, ur, pr = right
    al, ar = math.sqrt(gamma * pl / rl), math.sqrt(gamma * pr / rr)
    g1 = (gamma - 1.0) / (2.0 * gamma)
    g2 = (gamma + 1.0) / (2.0 * gamma)

    def branch(p, rk, pk, ak):
        if p > pk:
            a = 2.0 / ((gamma + 1.0) * rk)
            b = (gamma - 1.0) / (gamma + 1.0) * pk
            return (p - pk) * math.sqrt(a / (p + b))
        return 2.0 * ak / (gamma - 1.0) * ((p / pk) ** g1 - 1.0)

    def gap(p):
        return branch(p, rl, pl, al) + branch(p, rr, pr, ar) + ur - ul

    if 2.0 * (al + ar) / (gamma - 1.0) <= ur - ul:
        raise ValidationError("initial data generate vacuum")
    hi = max(pl, pr)
    while gap(hi) < 0.0:
        hi *= 2.0
    p_star = brentq(gap, 1e-14 * min(pl, pr), hi, xtol=1e-15, maxiter=500)
    u_star = 0.5 * (ul + ur) + 0.5 * (branch(p_star, rr, pr, ar) - branch(p_star, rl, pl, al))

    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty((len(s), 3))
    for k, sk in enumerate(s):
        if sk <= u_star:
            rho, u, p = _riemann_side(sk, rl, ul, pl, al, p_star, u_star, gamma, g1, g2, -1.0)
        else:
            rho, u, p = _riemann_side(sk, rr, ur, pr, ar, p_star, u_star, gamma, g1, g2, 1.0)
        out[k] = rho, u, p
    return out


def _riemann_side(s, rk, uk, pk, ak, p_star, u_star, gamma, g1, g2, sign):
    """State on one side of the contact; sign = -1 for the left wave."""
    if p_star > pk:
        shock = uk + sign * ak * math.sqrt(g2 * p_star / pk + g1)
        if sign * (s - shock) >= 0.0:
            return rk, uk, pk
        q = p_star / pk
        gm = (gamma - 1.0) / (gamma + 1.0)
        return rk * (q + gm) / (gm * q + 1.0), u_star, p_star
    head = uk + sign * ak
    a_star = ak * (p_star / pk) ** g1
    tail = u_star + sign * a_star
    if sign * (s - head) >= 0.0:
        return rk, uk, pk
    if sign * (s - tail) <= 0.0:
        return rk * (p_star / pk) ** (1.0 / gamma), u_star, p_star
    u = 2.0 / (gamma + 1.0) * (-sign * ak + (gamma - 1.0) / 2.0 * uk + s)
    ratio = 2.0 / (gamma + 1.0) - sign * (gamma - 1.0) / ((gamma + 1.0) * ak) * (uk - s)
    return (rk * ratio ** (2.0 / (gamma - 1.0)), u,
            pk * ratio ** (2.0 * gamma / (gamma - 1.0)))
