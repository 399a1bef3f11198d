"""Weak-form collision integrals, collision frequency, Dirichlet form and the
pointwise inelastic source Q_s(M_r, M_r).

Monte-Carlo estimators sample the pre-collision pair from M_r x M_r, the split
r from Beta(delta/2, delta/2), the kinetic fraction R from
Beta((beta+3)/2, alpha+delta) and the direction uniformly. With these proposals
the residual weight is (I+I*)^alpha |g|^beta times a constant, because
C_s B((beta+3)/2, alpha+delta) = C_r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import gammaln, hyperu

from .core_model import GasModel, bl_collide_resonant, bl_collide_standard
from .equilibrium import MacroState, TwoTempMaxwellian, eval_m_r, sample_m_r
from .errors import MonteCarloError, QuadratureError, ValidationError
from .quadrature import beta_rule, gamma_rule, uniform_rule
from .rng import McEstimate, combine_batches, run_batches, uniform_sphere

Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]

STANDARD_INVARIANTS = ("mass", "momentum_x", "momentum_y", "momentum_z", "energy")
RESONANT_INVARIANTS = STANDARD_INVARIANTS + ("kinetic_energy", "internal_energy")


@dataclass(frozen=True)
class TestFunction:
    """Test function of the molecular velocity xi (shape (..., 3)) and energy I."""

    __test__ = False  # keep pytest from collecting this class

    evaluator: Evaluator
    tag: str = "general"

    def __call__(self, xi, i):
        return np.asarray(self.evaluator(xi, i), dtype=float)


def invariant(tag: str) -> TestFunction:
    """Collision invariants. ``energy`` is |xi|^2 + 2I; the last two are resonant only."""
    table = {
        "mass": lambda xi, i: np.ones_like(i),
        "momentum_x": lambda xi, i: xi[..., 0],
        "momentum_y": lambda xi, i: xi[..., 1],
        "momentum_z": lambda xi, i: xi[..., 2],
        "energy": lambda xi, i: np.sum(xi * xi, axis=-1) + 2.0 * i,
        "kinetic_energy": lambda xi, i: np.sum(xi * xi, axis=-1),
        "internal_energy": lambda xi, i: np.asarray(i, dtype=float),
    }
    if tag not in table:
        raise ValidationError(f"unknown invariant {tag!r}")
    return TestFunction(table[tag], tag)


def zeta_eta(t_tr: float, t_int: float) -> tuple[float, float]:
    """zeta = T_tr T_int / |T_tr - T_int| and eta = sign(T_tr - T_int).

    At equal temperatures zeta is infinite and eta is zero.
    """
    diff = t_tr - t_int
    if diff == 0.0:
        return math.inf, 0.0
    return t_tr * t_int / abs(diff), math.copysign(1.0, diff)


def weak_prefactor(state: MacroState, gas: GasModel) -> float:
    """2 pi n^2 C_r B(delta/2, delta/2): converts E[w * Delta g] into (Q(M_r, M_r), g)."""
    return 2.0 * math.pi * state.rho**2 * gas.c_r * gas.beta_r


@dataclass(frozen=True)
class CollisionBatch:
    """Pre-collision sample and both post-collision outcomes sharing r and sigma."""

    xi: np.ndarray
    xi_star: np.ndarray
    i: np.ndarray
    i_star: np.ndarray
    weight: np.ndarray
    std: tuple
    res: tuple


def sample_collisions(state: MacroState, gas: GasModel, rng: np.random.Generator, m: int,
                      standard: bool = True) -> CollisionBatch:
    xi, i = sample_m_r(state, gas, m, rng)
    xs, js = sample_m_r(state, gas, m, rng)
    h = 0.5 * gas.delta
    r_split = rng.beta(h, h, size=m)
    sigma = uniform_sphere(rng, m)
    res = bl_collide_resonant(xi, xs, i, js, r_split, sigma)
    std = None
    if standard:
        r_frac = rng.beta(0.5 * (gas.beta + 3.0), gas.alpha + gas.delta, size=m)
        std = bl_collide_standard(xi, xs, i, js, r_frac, r_split, sigma)
    g = np.linalg.norm(xi - xs, axis=1)
    weight = (i + js) ** gas.alpha * g**gas.beta
    return CollisionBatch(xi, xs, i, js, weight, std, res)


def _delta(fn: Evaluator, b: CollisionBatch, post: tuple) -> np.ndarray:
    return fn(post[0], post[2]) + fn(post[1], post[3]) - fn(b.xi, b.i) - fn(b.xi_star, b.i_star)


def _check_finite(values: np.ndarray, b: CollisionBatch) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        sample = {"xi": b.xi[k].tolist(), "xi_star": b.xi_star[k].tolist(),
                  "i": float(b.i[k]), "i_star": float(b.i_star[k])}
        raise MonteCarloError("non-finite Monte-Carlo weight", sample)


def _estimate(per_sample, state, gas, n, seed, scale, standard=True, n_batches=32, workers=1):
    if n < 10_000:
        raise ValidationError("Monte-Carlo estimates need n >= 10^4")

    def batch_sum(rng, m):
        b = sample_collisions(state, gas, rng, m, standard=standard)
        x = per_sample(b)
        _check_finite(x, b)
        return x.sum(axis=0)

    means, sizes = run_batches(batch_sum, n, seed, n_batches=n_batches, workers=workers)
    mean, se = combine_batches(scale * means, sizes)
    return mean, se


def weak_q_mc(state: MacroState, g: TestFunction, gas: GasModel, theta: float, n: int,
              seed: int, workers: int = 1) -> McEstimate:
    """Monte-Carlo estimate of (Q_theta(M_r, M_r), g)."""
    if not 0.0 <= theta <= 1.0:
        raise ValidationError("theta must lie in [0, 1]")

    def per_sample(b):
        d = (1.0 - theta) * _delta(g, b, b.res)
        if theta > 0.0:
            d = d + theta * _delta(g, b, b.std)
        return b.weight * d

    v, se = _estimate(per_sample, state, gas, n, seed, weak_prefactor(state, gas),
                      standard=theta > 0.0, workers=workers)
    return McEstimate(float(v), float(se), n, seed)


def weak_q_linear_mc(state: MacroState, h: TestFunction, g: TestFunction, gas: GasModel,
                     theta: float, n: int, seed: int, workers: int = 1) -> McEstimate:
    """Monte-Carlo estimate of (Q_theta(M_r, M_r h), g) for the bilinear operator.

    Uses the symmetrized weight (h + h*)/2 times Delta g.
    """

    def per_sample(b):
        hh = 0.5 * (h(b.xi, b.i) + h(b.xi_star, b.i_star))
        d = (1.0 - theta) * _delta(g, b, b.res)
        if theta > 0.0:
            d = d + theta * _delta(g, b, b.std)
        return b.weight * hh * d

    v, se = _estimate(per_sample, state, gas, n, seed, weak_prefactor(state, gas),
                      standard=theta > 0.0, workers=workers)
    return McEstimate(float(v), float(se), n, seed)


def dirichlet_prefactor(state: MacroState, gas: GasModel) -> float:
    """pi n^2 C_r B(delta/2, delta/2): converts E[w Dh Dg] into (L_r h, M_r g)."""
    return math.pi * state.rho**2 * gas.c_r * gas.beta_r


def dirichlet_form(h: TestFunction, g: TestFunction, state: MacroState, gas: GasModel,
                   n: int, seed: int, workers: int = 1) -> McEstimate:
    """Monte-Carlo estimate of (L_r h, M_r g) as a quarter-sum of paired differences."""

    def per_sample(b):
        return b.weight * _delta(h, b, b.res) * _delta(g, b, b.res)

    v, se = _estimate(per_sample, state, gas, n, seed, dirichlet_prefactor(state, gas),
                      standard=False, workers=workers)
    return McEstimate(float(v), float(se), n, seed)


def dirichlet_matrix_mc(funcs: list[Evaluator], state: MacroState, gas: GasModel, n: int,
                        seed: int, workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """All pairwise Dirichlet forms on one shared sample stream.

    Returns (mean, std_error) matrices; both are exactly symmetric.
    """

    def per_sample(b):
        d = np.stack([_delta(f, b, b.res) for f in funcs], axis=1)
        return (b.weight[:, None, None] * d[:, :, None] * d[:, None, :])

    mean, se = _estimate(per_sample, state, gas, n, seed, dirichlet_prefactor(state, gas),
                         standard=False, workers=workers)
    return 0.5 * (mean + mean.T), 0.5 * (se + se.T)


def h_functional_rate(state: MacroState, h: Evaluator, gas: GasModel, theta: float, n: int,
                      seed: int, workers: int = 1) -> McEstimate:
    """Estimate of the entropy-production functional for f = M_r (1 + h).

    The functional is the weak form of Q_theta(f, f) against log(f / I^(delta/2-1)).
    Pre-collision pairs are drawn from M_r x M_r and reweighted by (1+h)(1+h*).
    """
    def log_f(xi, i):
        hv = np.asarray(h(xi, i), dtype=float)
        if np.any(hv <= -1.0):
            raise ValidationError("h must stay above -1")
        c2 = np.sum((xi - np.asarray(state.u)) ** 2, axis=-1)
        return -0.5 * c2 / state.t_tr - i / state.t_int + np.log1p(hv)

    def per_sample(b):
        rw = (1.0 + h(b.xi, b.i)) * (1.0 + h(b.xi_star, b.i_star))
        d = (1.0 - theta) * _delta(log_f, b, b.res)
        if theta > 0.0:
            d = d + theta * _delta(log_f, b, b.std)
        return b.weight * rw * d

    v, se = _estimate(per_sample, state, gas, n, seed, weak_prefactor(state, gas),
                      standard=theta > 0.0, workers=workers)
    return McEstimate(float(v), float(se), n, seed)


# --------------------------------------------------------------------------
# Collision frequency
# --------------------------------------------------------------------------

def branch_prefactors(gas: GasModel, c_s: float | None = None) -> tuple[float, float]:
    """R- and r-integrated kernel constants of the standard and resonant branches.

    Each equals 4 pi C B_R B_r with the Beta integrals evaluated by adaptive
    quadrature; for the model kernels the two coincide. ``c_s`` overrides the
    derived constant (used for fault injection).
    """
    c_s = gas.c_s if c_s is None else c_s
    p = gas.p
    a = 0.5 * (gas.beta + 1.0)
    b = gas.alpha + gas.delta - 1.0
    opts = dict(epsabs=0.0, epsrel=1e-13, limit=200)
    r_int, _ = integrate.quad(lambda r: (r * (1.0 - r)) ** p, 0.0, 1.0, **opts)
    big_r_int, _ = integrate.quad(lambda x: x**a * (1.0 - x) ** b, 0.0, 1.0, **opts)
    standard = 4.0 * math.pi * c_s * big_r_int * r_int
    resonant = 4.0 * math.pi * gas.c_r * r_int
    return standard, resonant


def _shc(x):
    """sinh(x)/x, stable at small x."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 6.0, np.sinh(xs) / xs)


def _speed_factor(s, t: float, beta: float, n: int) -> np.ndarray:
    """E |s e - W|^beta for W ~ N(0, t I_3), by radial Gauss-Laguerre quadrature."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if beta == 0.0:
        return np.ones_like(s)
    y, w = gamma_rule(n, 1.5 + 0.5 * beta)
    d = np.sqrt(2.0 * t * y)
    norm = (2.0 * t) ** (0.5 * beta) * math.exp(gammaln(1.5 + 0.5 * beta) - gammaln(1.5))
    # exp(-s^2/2t) sinh(s d/t)/(s d/t), written without overflow
    x = s[:, None] * d[None, :] / t
    big = x > 30.0
    xs = np.where(big, 1.0, x)
    ang = np.where(
        big,
        np.exp(-0.5 * (s[:, None] - d[None, :]) ** 2 / t + 0.5 * d[None, :] ** 2 / t
               - np.log(2.0 * np.where(big, x, 1.0))),
        np.exp(-0.5 * s[:, None] ** 2 / t) * _shc(xs),
    )
    return norm * ang @ w


def _energy_factor(i, t: float, alpha: float, delta: float, tol: float = 1e-12) -> np.ndarray:
    """E (I + I*)^alpha for I* ~ Gamma(delta/2, t).

    Adaptive quadrature with the algebraic endpoint weight on [0, 8] plus the
    tail; Gauss-Laguerre converges only algebraically near I = 0.
    """
    i = np.atleast_1d(np.asarray(i, dtype=float))
    if alpha == 0.0:
        return np.ones_like(i)
    k = 0.5 * delta
    log_norm = -gammaln(k)
    out = np.empty(i.shape)
    for x in np.unique(i):
        x_t = x / t

        def body(y):
            return math.exp(log_norm - y) * (x_t + y) ** alpha

        head, e1 = integrate.quad(body, 0.0, 8.0, weight="alg", wvar=(k - 1.0, 0.0),
                                  epsabs=0.0, epsrel=1e-13, limit=200)
        tail, e2 = integrate.quad(lambda y: y ** (k - 1.0) * body(y), 8.0, np.inf,
                                  epsabs=0.0, epsrel=1e-13, limit=200)
        value = head + tail
        if (e1 + e2) > tol * value:
            raise QuadratureError(f"energy factor not converged at I = {x:g}")
        out[i == x] = t**alpha * value
    return out


def nu_model(xi, i, background: MacroState, gas: GasModel, branch: str = "resonant",
             c_s: float | None = None, n_quad: int = 96, tol: float = 1e-8):
    """Collision frequency nu(xi, I) against the equilibrium ``background``.

    The velocity and energy integrals factorize. The velocity factor is a
    Gauss rule checked against a coarser one; the energy factor is adaptive.
    """
    background.require_positive()
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    s = np.linalg.norm(xi - np.asarray(background.u), axis=-1)
    standard, resonant = branch_prefactors(gas, c_s)
    if branch == "standard":
        pref = standard
    elif branch == "resonant":
        pref = resonant
    else:
        raise ValidationError(f"unknown branch {branch!r}")

    fine = _speed_factor(s, background.t_tr, gas.beta, n_quad)
    coarse = _speed_factor(s, background.t_tr, gas.beta, n_quad - 32)
    err = np.max(np.abs(fine - coarse) / np.abs(fine))
    if err > tol:
        raise QuadratureError(f"collision frequency quadrature not converged ({err:.2e})")
    energy = _energy_factor(i, background.t_int, gas.alpha, gas.delta)
    out = pref * background.rho * fine * energy
    return out if out.size > 1 else float(out[0])


def fit_nu_bounds(background: MacroState, gas: GasModel, speeds, energies):
    """Tightest constants with nu_lo w <= nu <= nu_hi w, w = (1+|xi|)^beta (1+I)^alpha,
    on the tensor grid ``speeds`` x ``energies``."""
    sp, en = np.meshgrid(np.asarray(speeds, float), np.asarray(energies, float), indexing="ij")
    xi = np.zeros((sp.size, 3))
    xi[:, 0] = sp.ravel()
    xi = xi + np.asarray(background.u)
    nu = np.asarray(nu_model(xi, en.ravel(), background, gas))
    w = (1.0 + sp.ravel()) ** gas.beta * (1.0 + en.ravel()) ** gas.alpha
    ratio = nu / w
    return float(ratio.min()), float(ratio.max())


# --------------------------------------------------------------------------
# Pointwise Q_s(M_r, M_r)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PointwiseResolution:
    n_g: int = 96
    n_r: int = 32


LADDER = (
    PointwiseResolution(64, 24),
    PointwiseResolution(96, 32),
    PointwiseResolution(128, 48),
    PointwiseResolution(192, 64),
)


_U_SWITCH = 1.5
_PARTNER_NODES = 64


_U_TINY = 1e-3


def _scaled_partner(z: float, p: float, alpha: float, n: int = 16) -> float:
    """Integral over s > 0 of s^p (1+s)^alpha exp(-z s) for small z.

    Gauss-Jacobi on [0, 1], Gauss-Legendre on dyadic panels up to S >= 2/z and
    Gauss-Laguerre beyond S. The branch point s = -1 stays at least three
    half-widths from every panel.
    """
    def f(s):
        return (1.0 + s) ** alpha * np.exp(-z * s)

    x, w = beta_rule(n, p + 1.0, 1.0)
    total = float(w @ f(x)) / (p + 1.0)
    t, wt = uniform_rule(n)
    lo = 1.0
    while lo * z < 2.0:
        s = lo * (1.5 + 0.5 * t)
        total += lo * float(wt @ (s**p * f(s)))
        lo *= 2.0
    y, wy = gamma_rule(_PARTNER_NODES, 1.0)
    s = lo + y / z
    total += math.exp(-z * lo) / z * float(wy @ (s**p * (1.0 + s) ** alpha))
    return total


def energy_partner_integral(kappa, i, p: float, alpha: float):
    """Integral over x > 0 of x^p (i + x)^alpha exp(-kappa x), elementwise.

    For kappa*i < 1.5 this is Gamma(p+1) i^(p+1+alpha) U(p+1, p+2+alpha, kappa*i)
    with Tricomi's U. scipy's U is slow for moderate arguments, so larger
    kappa*i use generalized Gauss-Laguerre in x, where the branch point at
    x = -i is far enough from the axis for round-off accuracy at 64 nodes.
    scipy's U loses digits at small arguments when its second parameter is an
    integer, so kappa*i below 1e-3 uses a composite rule in x/i instead.
    """
    kappa, i = np.broadcast_arrays(np.asarray(kappa, dtype=float),
                                   np.asarray(i, dtype=float))
    lg = gammaln(p + 1.0)
    if alpha == 0.0:
        return np.exp(lg) * kappa ** (-(p + 1.0))
    z = kappa * i
    out = np.empty(z.shape)
    small = z < _U_SWITCH
    if np.any(small):
        ks, i_s = kappa[small], i[small]
        safe_i = np.where(i_s > 0.0, i_s, 1.0)
        with np.errstate(invalid="ignore", over="ignore"):
            val = np.exp(lg) * safe_i ** (p + 1.0 + alpha) * hyperu(
                p + 1.0, p + 2.0 + alpha, ks * safe_i)
        at_zero = np.exp(gammaln(p + 1.0 + alpha)) * ks ** (-(p + 1.0 + alpha))
        out[small] = np.where(i_s > 0.0, val, at_zero)
    tiny = (z > 0.0) & (z < _U_TINY)
    for k in np.flatnonzero(tiny):
        out.flat[k] = (np.exp(lg) / math.gamma(p + 1.0) * i.flat[k] ** (p + 1.0 + alpha)
                       * _scaled_partner(float(z.flat[k]), p, alpha))
    rest = ~small | ~np.isfinite(out)
    if np.any(rest):
        x, w = gamma_rule(_PARTNER_NODES, p + 1.0)
        kr, ir = kappa[rest], i[rest]
        inner = (ir[..., None] + x / kr[..., None]) ** alpha @ w
        out[rest] = np.exp(lg) * kr ** (-(p + 1.0)) * inner
    return out


def _q_s_reduced(c, i, state: MacroState, gas: GasModel, res: PointwiseResolution):
    """Gain and loss parts of Q_s(M_r,M_r)(|c|, I) divided by I^(delta/2-1).

    The split r, the scattering direction and the direction of g = c - c* are
    integrated in closed form, as is the partner energy I*. What remains is
      K |g|^(2+beta) exp(-(c^2 + g^2/4)/T_tr) shc(c g / T_tr)
      R^((beta+1)/2) (1-R)^(alpha+delta-1) [exp(-kappa(R)(g^2/4 + I)) J(kappa(R))
                                            - exp(-g^2/(4T_tr) - I/T_int) J(1/T_int)]
    over |g| and R, with kappa(R) = R/T_tr + (1-R)/T_int and J the partner
    integral of ``energy_partner_integral``.
    """
    tt, ti = state.t_tr, state.t_int
    d, al, be, p = gas.delta, gas.alpha, gas.beta, gas.p
    c = np.atleast_1d(np.asarray(c, dtype=float))
    i = np.atleast_1d(np.asarray(i, dtype=float))
    log_k2 = 2.0 * (math.log(state.rho) - 1.5 * math.log(2 * math.pi * tt)
                    - 0.5 * d * math.log(ti) - gammaln(0.5 * d))
    a_r, b_r = 0.5 * (be + 3.0), al + d
    log_b = gammaln(a_r) + gammaln(b_r) - gammaln(a_r + b_r)
    big_r, w_r = beta_rule(res.n_r, a_r, b_r)
    kap = big_r / tt + (1.0 - big_r) / ti
    xg, wg = beta_rule(res.n_g, 3.0 + be, 1.0)
    g_span = 14.0 * math.sqrt(max(tt, ti))
    base = (math.log(16.0 * math.pi**2) + math.log(gas.c_s) + math.log(gas.beta_r)
            + log_k2 - math.log(3.0 + be))
    gain = np.empty(c.shape)
    loss = np.empty(c.shape)
    for k in range(c.size):
        ck, ik = c[k], i[k]
        g_max = 2.0 * ck + g_span
        g = g_max * xg
        arg = np.maximum(ck * g / tt, 1e-300)
        ang = np.exp(-(ck - 0.5 * g) ** 2 / tt) * np.where(
            arg > 1e-8, -np.expm1(-2.0 * arg) / (2.0 * arg), 1.0)
        outer = wg * ang
        j_gain = energy_partner_integral(kap, ik, p, al)
        j_loss = float(energy_partner_integral(1.0 / ti, ik, p, al))
        e_kin = 0.25 * g * g
        g_term = np.exp(-np.outer(e_kin + ik, kap)) @ (w_r * j_gain)
        l_term = np.exp(-e_kin / tt - ik / ti) * j_loss
        scale = math.exp(base + log_b + (3.0 + be) * math.log(g_max))
        gain[k] = scale * np.sum(outer * g_term)
        loss[k] = scale * np.sum(outer * l_term)
    return gain, loss


def q_s_mr_mr_pointwise(c_mag, i, state: MacroState, gas: GasModel, tol: float = 1e-8,
                        return_parts: bool = False):
    """Q_s(M_r, M_r) at peculiar speed |c| and internal energy I.

    Exactly zero when T_tr == T_int. Two tensor resolutions are compared and a
    QuadratureError is raised when they differ by more than ``tol`` relative to
    the gain-term magnitude.
    """
    state.require_positive()
    c_mag = np.atleast_1d(np.asarray(c_mag, dtype=float))
    i = np.atleast_1d(np.asarray(i, dtype=float))
    c_mag, i = np.broadcast_arrays(c_mag, i)
    if state.t_tr == state.t_int:
        z = np.zeros(c_mag.shape)
        return (z, z, z) if return_parts else z
    cm, im = c_mag.ravel(), i.ravel()
    prev = _q_s_reduced(cm, im, state, gas, LADDER[0])
    for res in LADDER[1:]:
        cur = _q_s_reduced(cm, im, state, gas, res)
        err = np.abs((cur[0] - cur[1]) - (prev[0] - prev[1])) / np.maximum(
            np.abs(cur[0]) + np.abs(cur[1]), 1e-300)
        if np.max(err) <= tol:
            break
        prev = cur
    else:
        raise QuadratureError(f"pointwise source quadrature not converged ({np.max(err):.2e})")
    gf, lf = cur
    ip = i.ravel() ** gas.p if gas.p != 0.0 else np.ones(i.size)
    q = ((gf - lf) * ip).reshape(c_mag.shape)
    if return_parts:
        return q, (gf * ip).reshape(c_mag.shape), (lf * ip).reshape(c_mag.shape)
    return q


def q_s_mr_mr_mc(xi, i: float, state: MacroState, gas: GasModel, n: int, seed: int,
                 workers: int = 1) -> McEstimate:
    """Direct Monte-Carlo estimate of Q_s(M_r, M_r)(xi, I) at one point.

    Partners come from M_r, (R, r, sigma) from their proposals; the gain term is
    reweighted by the Maxwellian at the post-collision states.
    """
    state.require_positive()
    xi = np.asarray(xi, dtype=float)
    mx = TwoTempMaxwellian(state, gas)
    m_here = float(eval_m_r(mx, xi, i))
    tt, ti = state.t_tr, state.t_int
    u = np.asarray(state.u)
    log_k = mx.log_norm
    pref = 4.0 * math.pi * gas.c_r * gas.beta_r * state.rho
    def batch_sum(rng, m):
        xs, js = sample_m_r(state, gas, m, rng)
        big_r = rng.beta(0.5 * (gas.beta + 3.0), gas.alpha + gas.delta, size=m)
        sig = uniform_sphere(rng, m)
        xv = np.broadcast_to(xi, xs.shape)
        iv = np.full(m, i)
        cp, csp, ip, isp = bl_collide_standard(xv, xs, iv, js, big_r, np.full(m, 0.5), sig)
        cp2 = np.sum((cp - u) ** 2, axis=1) + np.sum((csp - u) ** 2, axis=1)
        cs2 = np.sum((xs - u) ** 2, axis=1)
        # M'M*'/(I'I*')^p (I I*)^p / (M*/n), the r-dependence having cancelled
        log_gain = (log_k - 0.5 * cp2 / tt - (ip + isp) / ti + 0.5 * cs2 / tt + js / ti)
        gain = np.exp(log_gain) * (i ** gas.p if gas.p != 0.0 else 1.0)
        g = np.linalg.norm(xv - xs, axis=1)
        w = (i + js) ** gas.alpha * g**gas.beta
        x = pref * w * (gain - m_here)
        return x.sum()

    means, sizes = run_batches(batch_sum, n, seed, workers=workers)
    v, se = combine_batches(means, sizes)
    return McEstimate(float(v), float(se), n, seed)


def pointwise_moment_nodes(state: MacroState, gas: GasModel, n_c: int = 48, n_i: int = 48):
    """Outer tensor rule over (|c|, I) for integrals of the pointwise source.

    Returns speeds, energies and weights such that sum(w * Q(c, I)/I^p * psi)
    approximates the integral of Q psi over velocity space and I.

    The source carries a non-analytic I^(p+1+alpha) term at I = 0, so the
    energy axis uses a graded panel I = I_s t^2 on [0, I_s] with a Gauss-Jacobi
    rule in t, and shifted Gauss-Laguerre beyond I_s = 4 T_max.
    """
    t_max = max(state.t_tr, state.t_int)
    c_max = 10.0 * math.sqrt(t_max)
    xc, wc = beta_rule(n_c, 3.0, 1.0)
    speeds = c_max * xc
    w_speed = wc * 4.0 * math.pi * c_max**3 / 3.0
    p = gas.p
    i_s = 4.0 * t_max
    t, wt = beta_rule(n_i, 2.0 * p + 2.0, 1.0)
    lower = i_s * t * t
    w_lower = wt * i_s ** (p + 1.0) / (p + 1.0)
    y, wy = gamma_rule(n_i, 1.0)
    upper = i_s + t_max * y
    w_upper = wy * t_max * np.exp(y + p * np.log(upper))
    energies = np.concatenate([lower, upper])
    w_energy = np.concatenate([w_lower, w_upper])
    cc, ii = np.meshgrid(speeds, energies, indexing="ij")
    ww = np.outer(w_speed, w_energy)
    return cc.ravel(), ii.ravel(), ww.ravel()


def q_s_moments(psis: list[Callable], state: MacroState, gas: GasModel, n_c: int = 48,
                n_i: int = 48, tol: float = 1e-8) -> np.ndarray:
    """Integrals of Q_s(M_r, M_r) psi(|c|, I) for radial test functions psi."""
    if state.t_tr == state.t_int:
        return np.zeros(len(psis))
    cc, ii, ww = pointwise_moment_nodes(state, gas, n_c, n_i)
    vals = [np.asarray(psi(cc, ii), float) for psi in psis]

    def moments(res):
        gain, loss = _q_s_reduced(cc, ii, state, gas, res)
        scale = np.array([np.sum(ww * (gain + loss) * np.abs(v)) for v in vals])
        return np.array([np.sum(ww * (gain - loss) * v) for v in vals]), scale

    coarse, _ = moments(LADDER[0])
    fine, scale = moments(LADDER[1])
    err = np.max(np.abs(fine - coarse) / np.maximum(scale, 1e-300))
    if err > tol:
        raise QuadratureError(f"source moment quadrature not converged ({err:.2e})")
    return fine
