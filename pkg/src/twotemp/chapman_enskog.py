"""Galerkin solution of the linearized resonant equations and the transport and
relaxation coefficients built from it.

Basis functions are P(c) S_k(|c|^2 / 2T_tr) L_n(I / T_int), normalized under the
M_r weight, where S_k is a Sonine (generalized Laguerre) polynomial, L_n the
Laguerre polynomial of order delta/2 - 1 and P(c) one of c_x c_y (tensor),
c_x (vector) or 1 (scalar).

The Dirichlet form of the resonant operator factorizes into a translational and
an internal expectation, each polynomial in the reduced collision variables, so
the default Gram matrix is computed by Gauss rules that are exact for the basis.
A Monte-Carlo Gram on a shared sample stream is available as a check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, null_space
from scipy.special import eval_genlaguerre, gammaln

from .collision_quadrature import (
    dirichlet_matrix_mc,
    dirichlet_prefactor,
    q_s_moments,
    weak_prefactor,
)
from .core_model import GasModel
from .equilibrium import MacroState
from .errors import GalerkinError, ValidationError
from .quadrature import beta_rule, gamma_rule, normal_rule, uniform_rule

KINDS = ("tensor", "vector", "scalar")
_SONINE_ORDER = {"tensor": 2.5, "vector": 1.5, "scalar": 0.5}
_PREFACTOR_DEGREE = {"tensor": 2, "vector": 1, "scalar": 0}


def relax_f(state: MacroState, gas: GasModel) -> float:
    """Relaxation coefficient F with (I, Q_s(M_r, M_r)) = F (T_tr - T_int)."""
    d, a, b = gas.delta, gas.alpha, gas.beta
    log_c = (
        (b + 2.0) * math.log(2.0)
        + 0.5 * math.log(math.pi)
        + gammaln(d + a + 1.0)
        + 2.0 * gammaln(0.5 * d)
        + gammaln(0.5 * (b + 5.0))
        - math.log(d + a + 0.5 * (b + 3.0))
        - 2.0 * gammaln(d)
    )
    return (math.exp(log_c) * gas.c_r * state.rho**2
            * state.t_tr ** (0.5 * b) * state.t_int**a)


@dataclass(frozen=True)
class SpectralBasis:
    """Product polynomial basis; index (k, n) is stored at k * n_i + n."""

    n_c: int = 8
    n_i: int = 4
    kind: str = "vector"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValidationError(f"basis kind must be one of {KINDS}, got {self.kind!r}")
        if self.n_c < 2 or self.n_i < 1:
            raise ValidationError("basis needs n_c >= 2 and n_i >= 1")

    @property
    def size(self) -> int:
        return self.n_c * self.n_i

    @property
    def sonine_order(self) -> float:
        return _SONINE_ORDER[self.kind]

    def indices(self) -> list[tuple[int, int]]:
        return [(k, n) for k in range(self.n_c) for n in range(self.n_i)]

    def doubled(self) -> "SpectralBasis":
        return SpectralBasis(2 * self.n_c, 2 * self.n_i, self.kind)

    def prefactor_sq(self, x, t_tr: float):
        """Isotropic mean of P(c)^2 at fixed x = |c|^2 / (2 T_tr)."""
        if self.kind == "vector":
            return 2.0 * t_tr * x / 3.0
        if self.kind == "tensor":
            return 4.0 * t_tr**2 * x**2 / 15.0
        return np.ones_like(x)

    def speed_norms(self, t_tr: float) -> np.ndarray:
        x, w = gamma_rule(self.n_c + 4, 1.5)
        s = self.speed_polys(x)
        return (w * self.prefactor_sq(x, t_tr)) @ (s * s)

    def energy_norms(self, gas: GasModel) -> np.ndarray:
        y, w = gamma_rule(self.n_i + 2, 0.5 * gas.delta)
        p = self.energy_polys(y, gas)
        return w @ (p * p)

    def speed_polys(self, x) -> np.ndarray:
        """Unnormalized S_k(x), shape (..., n_c)."""
        x = np.asarray(x, dtype=float)
        return np.stack([eval_genlaguerre(k, self.sonine_order, x)
                         for k in range(self.n_c)], axis=-1)

    def energy_polys(self, y, gas: GasModel) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.stack([eval_genlaguerre(n, gas.p, y) for n in range(self.n_i)], axis=-1)

    def speed_part(self, c2, state: MacroState) -> np.ndarray:
        """Normalized radial factors S_k / sqrt(norm_k) at |c|^2 = c2."""
        return self.speed_polys(0.5 * np.asarray(c2) / state.t_tr) / np.sqrt(
            self.speed_norms(state.t_tr))

    def energy_part(self, i, state: MacroState, gas: GasModel) -> np.ndarray:
        return self.energy_polys(np.asarray(i) / state.t_int, gas) / np.sqrt(
            self.energy_norms(gas))

    def prefactor(self, c) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        if self.kind == "vector":
            return c[..., 0]
        if self.kind == "tensor":
            return c[..., 0] * c[..., 1]
        return np.ones(c.shape[:-1])

    def evaluate(self, c, i, state: MacroState, gas: GasModel) -> np.ndarray:
        """Orthonormal basis values at peculiar velocity c, shape (..., size)."""
        c = np.asarray(c, dtype=float)
        sp = self.speed_part(np.sum(c * c, axis=-1), state)
        en = self.energy_part(i, state, gas)
        radial = (sp[..., :, None] * en[..., None, :]).reshape(sp.shape[:-1] + (self.size,))
        return self.prefactor(c)[..., None] * radial

    def functions(self, state: MacroState, gas: GasModel) -> list:
        """Basis functions of the molecular velocity xi, for Monte-Carlo use."""
        u = np.asarray(state.u)

        def make(a):
            return lambda xi, i: self.evaluate(np.asarray(xi) - u, i, state, gas)[..., a]

        return [make(a) for a in range(self.size)]

    def kernel_overlaps(self, state: MacroState, gas: GasModel) -> np.ndarray:
        """(psi, M_r phi_a) / rho for the resonant invariants psi in this symmetry class.

        Vector: psi = c_x. Scalar: psi in {1, |c|^2, I}. Tensor: no invariants.
        """
        if self.kind == "tensor":
            return np.zeros((0, self.size))
        x, wx = gamma_rule(self.n_c + 4, 1.5)
        y, wy = gamma_rule(self.n_i + 2, 0.5 * gas.delta)
        s = self.speed_polys(x) / np.sqrt(self.speed_norms(state.t_tr))
        p = self.energy_polys(y, gas) / np.sqrt(self.energy_norms(gas))
        if self.kind == "vector":
            rows = [(2.0 * state.t_tr * x / 3.0, np.ones_like(y))]
        else:
            rows = [(np.ones_like(x), np.ones_like(y)),
                    (2.0 * state.t_tr * x, np.ones_like(y)),
                    (np.ones_like(x), state.t_int * y)]
        out = [np.kron((wx * fx) @ s, (wy * fy) @ p) for fx, fy in rows]
        return np.array(out)


# --------------------------------------------------------------------------
# Exact Gram matrix of the resonant Dirichlet form
# --------------------------------------------------------------------------

def _velocity_expectations(basis: SpectralBasis, state: MacroState, gas: GasModel):
    """V[i, j] = E[K(c_i, c_j) S(c_i) S(c_j)^T] over the reduced resonant variables.

    Slots are c, c*, c', c*'. The relative speed carries the |g|^beta weight,
    normalized to an expectation. K is the isotropic contraction of the
    prefactors: c_i.c_j/3 for vectors, ((c_i.c_j)^2 - |c_i|^2 |c_j|^2/3)/10 for
    the xy tensor component and 1 for scalars.
    """
    t = state.t_tr
    deg = 2 * (2 * (basis.n_c - 1) + _PREFACTOR_DEGREE[basis.kind])
    n_lin = deg // 2 + 1
    n_sq = deg // 4 + 1
    gx, wgx = normal_rule(n_lin)
    gy2, wgy = gamma_rule(n_sq, 0.5)
    xg, wxg = gamma_rule(n_sq, 0.5 * (gas.beta + 3.0))
    mu, wmu = uniform_rule(n_lin)
    half_sd = math.sqrt(0.5 * t)
    norms = np.sqrt(basis.speed_norms(t))
    nc = basis.n_c
    v = np.zeros((4, 4, nc, nc))
    # common G_x, G_y, G_z, mu grid; the loop runs over relative speeds
    (ax, ay, az, am), wbase = _grid(gx, gy2, gx, mu, wgx, wgy, wgx, wmu)
    gxv = half_sd * ax
    gyv = np.sqrt(t * ay)
    gzv = half_sd * az
    sx = np.sqrt(np.maximum(1.0 - am * am, 0.0))
    sz = am
    for xk, wk in zip(xg, wxg):
        hg = math.sqrt(t * xk)  # |g|/2
        slots = [
            np.stack([gxv, gyv, gzv + hg], axis=-1),
            np.stack([gxv, gyv, gzv - hg], axis=-1),
            np.stack([gxv + hg * sx, gyv, gzv + hg * sz], axis=-1),
            np.stack([gxv - hg * sx, gyv, gzv - hg * sz], axis=-1),
        ]
        sq = [np.sum(s * s, axis=-1) for s in slots]
        polys = [basis.speed_polys(0.5 * q / t) / norms for q in sq]
        w = wk * wbase
        for a in range(4):
            for b in range(a, 4):
                if basis.kind == "scalar":
                    kern = 1.0
                else:
                    dot = np.sum(slots[a] * slots[b], axis=-1)
                    if basis.kind == "vector":
                        kern = dot / 3.0
                    else:
                        kern = (dot * dot - sq[a] * sq[b] / 3.0) / 10.0
                m = (polys[a] * (w * kern)[:, None]).T @ polys[b]
                v[a, b] += m
                if b != a:
                    v[b, a] += m.T
    return v


def _grid(*args):
    n = len(args) // 2
    nodes = np.meshgrid(*args[:n], indexing="ij")
    weights = np.meshgrid(*args[n:], indexing="ij")
    w = np.ones(nodes[0].size)
    for wg in weights:
        w = w * wg.ravel()
    return tuple(x.ravel() for x in nodes), w


def _energy_expectations(basis: SpectralBasis, state: MacroState, gas: GasModel):
    """U[i, j] = E[P(I_i) P(I_j)^T] with the (I+I*)^alpha weight normalized out."""
    h = 0.5 * gas.delta
    nq = basis.n_i + 2
    sn, sw = gamma_rule(nq, gas.delta + gas.alpha)
    bn, bw = beta_rule(nq, h, h)
    (s, rho_, r), w = _grid(sn, bn, bn, sw, bw, bw)
    s = s * state.t_int
    energies = [s * rho_, s * (1.0 - rho_), s * r, s * (1.0 - r)]
    polys = [basis.energy_part(e, state, gas) for e in energies]
    u = np.zeros((4, 4, basis.n_i, basis.n_i))
    for a in range(4):
        for b in range(4):
            u[a, b] = (polys[a] * w[:, None]).T @ polys[b]
    return u


def _weight_means(state: MacroState, gas: GasModel) -> tuple[float, float]:
    """E|g|^beta and E (I+I*)^alpha for a pair drawn from M_r x M_r."""
    eg = (4.0 * state.t_tr) ** (0.5 * gas.beta) * math.exp(
        gammaln(1.5 + 0.5 * gas.beta) - gammaln(1.5))
    es = state.t_int**gas.alpha * math.exp(gammaln(gas.delta + gas.alpha) - gammaln(gas.delta))
    return eg, es


_SIGNS = np.array([-1.0, -1.0, 1.0, 1.0])


def gram_exact(basis: SpectralBasis, state: MacroState, gas: GasModel) -> np.ndarray:
    """Dirichlet-form matrix (L_r phi_b, M_r phi_a) by exact Gauss quadrature."""
    state.require_positive()
    v = _velocity_expectations(basis, state, gas)
    u = _energy_expectations(basis, state, gas)
    eg, es = _weight_means(state, gas)
    g = np.zeros((basis.size, basis.size))
    for a in range(4):
        for b in range(4):
            g += _SIGNS[a] * _SIGNS[b] * np.kron(v[a, b], u[a, b])
    g *= dirichlet_prefactor(state, gas) * eg * es
    return 0.5 * (g + g.T)


def gram_mc(basis: SpectralBasis, state: MacroState, gas: GasModel, n: int, seed: int,
            workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo Dirichlet-form matrix and its standard errors.

    Uses the xy (tensor) or x (vector) component directly, without the
    isotropic contraction used by the exact rule.
    """
    return dirichlet_matrix_mc(basis.functions(state, gas), state, gas, n, seed,
                               workers=workers)


def source_linear_form(basis: SpectralBasis, state: MacroState, gas: GasModel) -> np.ndarray:
    """l_a = 2 (I, Q_s(M_r, M_r phi_a)) by exact quadrature.

    Only scalar functions contribute; vector and tensor ones vanish by isotropy.
    With Delta I = (1-R)|g|^2/4 - R(I+I*), the expectation splits into a
    translational part with weight |g|^(beta+2) or |g|^beta and an internal part
    with weight S^(alpha+1) or S^alpha.
    """
    state.require_positive()
    if basis.kind != "scalar":
        return np.zeros(basis.size)
    t, ti = state.t_tr, state.t_int
    d, al, be = gas.delta, gas.alpha, gas.beta
    a_r, b_r = 0.5 * (be + 3.0), d + al
    mean_r = a_r / (a_r + b_r)
    nl = 2 * basis.n_c + 2
    gz, wz = normal_rule(nl)
    gp, wp = gamma_rule(nl, 1.0)

    def speed_mean(extra):
        xg, wx = gamma_rule(nl, 0.5 * (be + extra + 3.0))
        (z, q, x), w = _grid(gz, gp, xg, wz, wp, wx)
        # c = G + (|g|/2) e_z with G ~ N(0, t/2), |G_perp|^2 ~ t * Gamma(1)
        hg = np.sqrt(t * x)
        c2 = t * q + (math.sqrt(0.5 * t) * z + hg) ** 2
        mom = (4.0 * t) ** (0.5 * (be + extra)) * math.exp(
            gammaln(1.5 + 0.5 * (be + extra)) - gammaln(1.5))
        return mom * (w @ basis.speed_part(c2, state))

    def energy_mean(extra):
        h = 0.5 * d
        sr, ws = gamma_rule(basis.n_i + 2, d + al + extra)
        br, wb = beta_rule(basis.n_i + 2, h, h)
        (s, rr), w = _grid(sr, br, ws, wb)
        mom = ti ** (al + extra) * math.exp(gammaln(d + al + extra) - gammaln(d))
        return mom * (w @ basis.energy_part(ti * s * rr, state, gas))

    gain = (1.0 - mean_r) * 0.25 * np.kron(speed_mean(2.0), energy_mean(0.0))
    loss = mean_r * np.kron(speed_mean(0.0), energy_mean(1.0))
    return 2.0 * weak_prefactor(state, gas) * (gain - loss)


# --------------------------------------------------------------------------
# Assembly and solution
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class McParams:
    """Gram evaluation settings. ``method`` is ``"exact"`` or ``"mc"``."""

    method: str = "exact"
    n_samples: int = 200_000
    seed: int = 0
    workers: int = 1
    entry_budget: float = 1e-3

    def __post_init__(self) -> None:
        if self.method not in ("exact", "mc"):
            raise ValidationError(f"unknown Gram method {self.method!r}")
        if self.entry_budget <= 0.0:
            raise ValidationError("entry_budget must be positive")


@dataclass(frozen=True)
class AssembledSystem:
    basis: SpectralBasis
    gram: np.ndarray
    gram_se: np.ndarray
    rhs: dict
    constraints: np.ndarray


def _rhs(basis: SpectralBasis, state: MacroState, gas: GasModel) -> dict:
    """Projections (A_xy, M_r phi), (B_x, M_r phi), (C_x, M_r phi) by Gauss quadrature."""
    x, wx = gamma_rule(basis.n_c + 4, 1.5)
    y, wy = gamma_rule(basis.n_i + 2, 0.5 * gas.delta)
    s = basis.speed_polys(x) / np.sqrt(basis.speed_norms(state.t_tr))
    p = basis.energy_polys(y, gas) / np.sqrt(basis.energy_norms(gas))
    pre = basis.prefactor_sq(x, state.t_tr)
    rho = state.rho
    ones_y = wy @ p
    if basis.kind == "tensor":
        return {"A": rho * np.kron((wx * pre) @ s, ones_y)}
    if basis.kind == "vector":
        b = rho * np.kron((wx * pre * (x - 2.5)) @ s, ones_y)
        c = rho * np.kron((wx * pre) @ s, (wy * (y - 0.5 * gas.delta)) @ p)
        return {"B": b, "C": c}
    return {}


def assemble_system(basis: SpectralBasis, state: MacroState, gas: GasModel,
                    mc: McParams | None = None) -> AssembledSystem:
    """Gram matrix, right-hand sides and kernel constraints for one basis."""
    state.require_positive()
    mc = mc or McParams()
    if mc.method == "exact":
        g = gram_exact(basis, state, gas)
        se = np.zeros_like(g)
    else:
        g, se = gram_mc(basis, state, gas, mc.n_samples, mc.seed, mc.workers)
        scale = np.sqrt(np.outer(np.abs(np.diag(g)), np.abs(np.diag(g))))
        worst = float(np.max(se / np.maximum(scale, 1e-300)))
        if worst > mc.entry_budget:
            raise GalerkinError(
                f"Gram entry std error {worst:.2e} of entry scale exceeds budget {mc.entry_budget:.1e}")
    return AssembledSystem(basis, g, se, _rhs(basis, state, gas),
                           basis.kernel_overlaps(state, gas))


@dataclass(frozen=True)
class ConstrainedSolve:
    coeffs: np.ndarray
    residual: float
    constraint_residual: float
    min_eigenvalue: float


def constrained_solve(gram: np.ndarray, rhs: np.ndarray, constraints: np.ndarray,
                      min_ratio: float = 1e-12) -> ConstrainedSolve:
    """Solve gram a = rhs on the null space of ``constraints``.

    The reduced matrix must be positive definite; its smallest eigenvalue
    relative to the largest is checked against ``min_ratio``.
    """
    n = gram.shape[0]
    z = null_space(constraints) if constraints.size else np.eye(n)
    red = z.T @ gram @ z
    red = 0.5 * (red + red.T)
    evals, evecs = eigh(red)
    if evals[0] <= min_ratio * evals[-1]:
        raise GalerkinError(
            f"reduced Gram matrix not positive definite (eigenvalues {evals[0]:.3e}, {evals[-1]:.3e})")
    a_red = evecs @ ((evecs.T @ (z.T @ rhs)) / evals)
    a = z @ a_red
    res = float(np.linalg.norm(z.T @ (gram @ a - rhs)) / max(np.linalg.norm(rhs), 1e-300))
    cres = 0.0
    if constraints.size:
        cres = float(np.max(np.abs(constraints @ a))
                     / max(np.linalg.norm(constraints) * np.linalg.norm(a), 1e-300))
    return ConstrainedSolve(a, res, cres, float(evals[0]))


@dataclass(frozen=True)
class CESolution:
    """Coefficients of A, B, C (and optionally D~) in their orthonormal bases."""

    state: MacroState
    gas: GasModel
    basis_a: SpectralBasis
    basis_bc: SpectralBasis
    coeff_a: np.ndarray
    coeff_b: np.ndarray
    coeff_c: np.ndarray
    gram_residual: float
    constraint_residual: float
    min_eigenvalue: float
    mc_error_budget: float = 0.0
    basis_d: SpectralBasis | None = None
    coeff_d: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    def radial(self, which: str, c_mag, i) -> np.ndarray:
        """Scalar function A, B, C or D~ of (|c|, I) represented by the solution."""
        basis, coeffs = {
            "A": (self.basis_a, self.coeff_a),
            "B": (self.basis_bc, self.coeff_b),
            "C": (self.basis_bc, self.coeff_c),
            "D": (self.basis_d, self.coeff_d),
        }[which]
        if coeffs is None:
            raise ValidationError(f"solution has no {which} component")
        c_mag = np.asarray(c_mag, dtype=float)
        sp = basis.speed_part(c_mag**2, self.state)
        en = basis.energy_part(i, self.state, self.gas)
        radial = (sp[..., :, None] * en[..., None, :]).reshape(sp.shape[:-1] + (basis.size,))
        return radial @ coeffs

    def h1(self, grad_u: np.ndarray, grad_t_tr: np.ndarray, grad_t_int: np.ndarray):
        """First-order perturbation h_1(xi, I) for given macroscopic gradients."""
        s, gas = self.state, self.gas
        u = np.asarray(s.u)
        du = np.asarray(grad_u, dtype=float)
        shear = du + du.T
        gt = np.asarray(grad_t_tr, dtype=float) / s.t_tr
        gi = np.asarray(grad_t_int, dtype=float) / s.t_int

        def h(xi, i):
            c = np.asarray(xi) - u
            c2 = np.sum(c * c, axis=-1)
            cm = np.sqrt(c2)
            a_ij = np.einsum("...i,...j->...ij", c, c) - c2[..., None, None] * np.eye(3) / 3.0
            ta = np.einsum("ij,...ij->...", shear, a_ij)
            return (-0.5 / s.t_tr * ta * self.radial("A", cm, i)
                    - (c @ gt) * self.radial("B", cm, i)
                    - (c @ gi) * self.radial("C", cm, i))

        return h


def solve_abc(state: MacroState, gas: GasModel, basis: SpectralBasis | None = None,
              mc: McParams | None = None) -> CESolution:
    """Solve L_r(A_ij A) = A_ij, L_r(c_i B) = B_i, L_r(c_i C) = C_i.

    ``basis`` sets the vector basis; the tensor basis uses the same sizes.
    """
    basis = basis or SpectralBasis()
    bv = SpectralBasis(basis.n_c, basis.n_i, "vector")
    bt = SpectralBasis(basis.n_c, basis.n_i, "tensor")
    mc = mc or McParams()
    sys_t = assemble_system(bt, state, gas, mc)
    sys_v = assemble_system(bv, state, gas, mc)
    sa = constrained_solve(sys_t.gram, sys_t.rhs["A"], sys_t.constraints)
    sb = constrained_solve(sys_v.gram, sys_v.rhs["B"], sys_v.constraints)
    sc = constrained_solve(sys_v.gram, sys_v.rhs["C"], sys_v.constraints)
    budget = 0.0
    if mc.method == "mc":
        budget = float(max(np.max(sys_t.gram_se), np.max(sys_v.gram_se)))
    return CESolution(
        state=state, gas=gas, basis_a=bt, basis_bc=bv,
        coeff_a=sa.coeffs, coeff_b=sb.coeffs, coeff_c=sc.coeffs,
        gram_residual=max(sa.residual, sb.residual, sc.residual),
        constraint_residual=max(sb.constraint_residual, sc.constraint_residual),
        min_eigenvalue=min(sa.min_eigenvalue, sb.min_eigenvalue),
        mc_error_budget=budget,
    )


@dataclass(frozen=True)
class TransportCoefficients:
    """Viscosity, the four heat-flux coefficients and the relaxation coefficients.

    ``lambda_trint`` multiplies grad(T_int)/T_int in the translational heat flux
    and ``lambda_inttr`` multiplies grad(T_tr)/T_tr in the internal heat flux.
    """

    lambda_mu: float
    lambda_trtr: float
    lambda_trint: float
    lambda_inttr: float
    lambda_intint: float
    f_relax: float
    k_relax: float | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _radial_moment(basis: SpectralBasis, coeffs, state: MacroState, gas: GasModel,
                   speed_power: int, energy_power: int) -> float:
    """E[|c|^speed_power I^energy_power F(|c|, I)] under M_r / rho, F from the basis."""
    x, wx = gamma_rule(basis.n_c + 4, 1.5)
    y, wy = gamma_rule(basis.n_i + 2, 0.5 * gas.delta)
    s = basis.speed_polys(x) / np.sqrt(basis.speed_norms(state.t_tr))
    p = basis.energy_polys(y, gas) / np.sqrt(basis.energy_norms(gas))
    sv = (wx * (2.0 * state.t_tr * x) ** (0.5 * speed_power)) @ s
    ev = (wy * (state.t_int * y) ** energy_power) @ p
    return float(np.kron(sv, ev) @ coeffs)


def transport_coeffs(sol: CESolution, k_relax: float | None = None) -> TransportCoefficients:
    """Transport coefficients from a Galerkin solution by exact Gauss quadrature."""
    s, gas = sol.state, sol.gas
    rho, t = s.rho, s.t_tr
    mu = rho / (15.0 * t) * _radial_moment(sol.basis_a, sol.coeff_a, s, gas, 4, 0)
    trtr = rho / 6.0 * _radial_moment(sol.basis_bc, sol.coeff_b, s, gas, 4, 0)
    trint = rho / 6.0 * _radial_moment(sol.basis_bc, sol.coeff_c, s, gas, 4, 0)
    inttr = rho / 3.0 * _radial_moment(sol.basis_bc, sol.coeff_b, s, gas, 2, 1)
    intint = rho / 3.0 * _radial_moment(sol.basis_bc, sol.coeff_c, s, gas, 2, 1)
    return TransportCoefficients(mu, trtr, trint, inttr, intint, relax_f(s, gas), k_relax)


# --------------------------------------------------------------------------
# Second relaxation coefficient
# --------------------------------------------------------------------------

_NEAR_EQUAL = 1e-3
# K converges slowly in the energy degree; n_i = 8 is within 1e-3 of n_i = 12
K_BASIS = SpectralBasis(8, 8, "scalar")


def d_projection(basis: SpectralBasis, state: MacroState, gas: GasModel,
                 moment_nodes: int = 48) -> np.ndarray:
    """(D, M_r phi_a) for the scalar basis.

    D = D_1 + Q_s(M_r, M_r) / (F (T_tr - T_int) M_r); the first part is
    polynomial and projected by Gauss rules, the second from moments of the
    pointwise source.
    """
    if basis.kind != "scalar":
        raise ValidationError("D is projected on the scalar basis")
    t, ti, rho = state.t_tr, state.t_int, state.rho
    d = gas.delta
    x, wx = gamma_rule(basis.n_c + 4, 1.5)
    y, wy = gamma_rule(basis.n_i + 2, 0.5 * d)
    s = basis.speed_polys(x) / np.sqrt(basis.speed_norms(t))
    p = basis.energy_polys(y, gas) / np.sqrt(basis.energy_norms(gas))
    # D_1 = (1/rho) [(2x/3 - 1)/T_tr - (2y/delta - 1)/T_int]
    one_x, one_y = wx @ s, wy @ p
    d1 = (np.kron((wx * (2.0 * x / 3.0 - 1.0)) @ s, one_y) / t
          - np.kron(one_x, (wy * (2.0 * y / d - 1.0)) @ p) / ti)
    speed_norm = np.sqrt(basis.speed_norms(t))
    energy_norm = np.sqrt(basis.energy_norms(gas))

    def psi(a):
        k, n = divmod(a, basis.n_i)

        def f(c, i):
            return (eval_genlaguerre(k, basis.sonine_order, 0.5 * c * c / t) / speed_norm[k]
                    * eval_genlaguerre(n, gas.p, i / ti) / energy_norm[n])

        return f

    qm = q_s_moments([psi(a) for a in range(basis.size)], state, gas,
                     n_c=moment_nodes, n_i=moment_nodes, tol=1e-6)
    d2 = qm / (relax_f(state, gas) * (t - ti))
    return d1 + d2


@dataclass(frozen=True)
class KRelaxResult:
    value: float
    coeff_d: np.ndarray
    projection: np.ndarray
    kernel_overlap: float
    min_eigenvalue: float


def _k_relax_at(state: MacroState, gas: GasModel, basis: SpectralBasis,
                mc: McParams) -> KRelaxResult:
    system = assemble_system(basis, state, gas, mc)
    proj = d_projection(basis, state, gas)
    overlap = float(np.max(np.abs(system.constraints @ proj))
                    / max(np.linalg.norm(proj), 1e-300))
    sol = constrained_solve(system.gram, proj, system.constraints)
    ell = source_linear_form(basis, state, gas)
    return KRelaxResult(float(ell @ sol.coeffs), sol.coeffs, proj, overlap,
                        sol.min_eigenvalue)


def relax_k(state: MacroState, gas: GasModel, basis: SpectralBasis | None = None,
            mc: McParams | None = None) -> KRelaxResult:
    """K = 2 (I, Q_s(M_r, M_r D~)) with L_r D~ = D solved on the scalar basis.

    Within a relative temperature gap of 1e-3 the value is the mean of the
    evaluations at T_int -/+ the gap, which is symmetric about equality.
    """
    state.require_positive()
    basis = basis or K_BASIS
    if basis.kind != "scalar":
        basis = SpectralBasis(basis.n_c, basis.n_i, "scalar")
    mc = mc or McParams()
    t_mean = state.temperature(gas.delta)
    gap = state.t_tr - state.t_int
    if abs(gap) >= _NEAR_EQUAL * t_mean:
        return _k_relax_at(state, gas, basis, mc)
    h = _NEAR_EQUAL * t_mean
    lo = _k_relax_at(state.with_temperatures(state.t_tr, state.t_tr - h), gas, basis, mc)
    hi = _k_relax_at(state.with_temperatures(state.t_tr, state.t_tr + h), gas, basis, mc)
    return KRelaxResult(0.5 * (lo.value + hi.value), 0.5 * (lo.coeff_d + hi.coeff_d),
                        0.5 * (lo.projection + hi.projection),
                        max(lo.kernel_overlap, hi.kernel_overlap),
                        min(lo.min_eigenvalue, hi.min_eigenvalue))


# --------------------------------------------------------------------------
# Closed forms for alpha = beta = 0
# --------------------------------------------------------------------------

def collision_rate_maxwell(state: MacroState, gas: GasModel) -> float:
    """nu_0 = 4 pi C_r B(delta/2, delta/2) rho, the constant frequency at alpha = beta = 0."""
    return gas.pair_rate_constant * state.rho


def eigenvalue_c(state: MacroState, gas: GasModel) -> float:
    """lambda with L_r[c_x (I/T_int - delta/2)] = lambda c_x (I/T_int - delta/2)."""
    return 0.5 * collision_rate_maxwell(state, gas)


def analytic_coefficients(state: MacroState, gas: GasModel) -> TransportCoefficients:
    """Closed-form transport coefficients for alpha = beta = 0.

    A = 2/nu_0, B = 3(|c|^2/2T_tr - 5/2)/nu_0 and C = (I/T_int - delta/2)/lambda
    with lambda = nu_0/2.
    """
    if gas.alpha != 0.0 or gas.beta != 0.0:
        raise ValidationError("closed forms need alpha = beta = 0")
    nu0 = collision_rate_maxwell(state, gas)
    rho, t, ti = state.rho, state.t_tr, state.t_int
    c0 = 1.0 / eigenvalue_c(state, gas)
    return TransportCoefficients(
        lambda_mu=2.0 * rho * t / nu0,
        lambda_trtr=7.5 * rho * t * t / nu0,
        lambda_trint=0.0,
        lambda_inttr=0.0,
        lambda_intint=0.5 * gas.delta * rho * t * ti * c0,
        f_relax=relax_f(state, gas),
    )
