"""Spatially homogeneous stochastic-particle simulation of the mixed collision model.

Pairs are selected by a majorant-frequency (no-time-counter) scheme: candidate
pairs are drawn at the majorant rate and accepted with probability
(I+I*)^alpha |g|^beta / w_max. Accepted pairs undergo a standard collision with
probability theta and a resonant one otherwise. The R-dependent factor of the
standard kernel is absorbed into the Beta proposal for R, so both branches share
the same acceptance weight.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats
from scipy.integrate import solve_ivp

from .chapman_enskog import relax_f
from .core_model import GasModel, bl_collide_resonant, bl_collide_standard
from .equilibrium import MacroState, moments_from_samples
from .errors import MajorantViolation, ValidationError
from .rng import stream, uniform_sphere

MAJORANT_SAFETY = 1.5
PILOT_PAIRS = 4096
SNAPSHOT_COLUMNS = ("t", "rho", "ux", "uy", "uz", "T_tr", "T_int")


@dataclass(frozen=True)
class ParticleEnsemble:
    """Equal-weight particles in a unit volume; ``weight`` is the number density per particle."""

    xi: np.ndarray
    i: np.ndarray
    weight: float
    time: float = 0.0

    def __post_init__(self) -> None:
        xi = np.asarray(self.xi, dtype=float)
        i = np.asarray(self.i, dtype=float)
        if xi.ndim != 2 or xi.shape[1] != 3 or i.shape != (xi.shape[0],):
            raise ValidationError("particles need xi of shape (n, 3) and i of shape (n,)")
        if np.any(i < 0.0):
            raise ValidationError("internal energies must be nonnegative")
        if not self.weight > 0.0:
            raise ValidationError("weight per particle must be positive")
        if self.time < 0.0:
            raise ValidationError("time must be nonnegative")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "i", i)

    @property
    def n(self) -> int:
        return len(self.i)

    def moments(self, delta: float) -> MacroState:
        return moments_from_samples(self.xi, self.i, self.weight, delta)

    def temperature_errors(self, delta: float) -> tuple[float, float]:
        """Sampling standard errors of T_tr and T_int estimated from this ensemble."""
        c = self.xi - self.xi.mean(axis=0)
        c2 = np.einsum("ij,ij->i", c, c)
        root_n = math.sqrt(self.n)
        return (float(c2.std(ddof=1)) / (3.0 * root_n),
                2.0 / delta * float(self.i.std(ddof=1)) / root_n)

    def totals(self) -> dict[str, np.ndarray | float]:
        """Momentum, kinetic energy and internal energy summed over particles."""
        return {
            "momentum": self.xi.sum(axis=0),
            "kinetic": 0.5 * float(np.sum(self.xi * self.xi)),
            "internal": float(self.i.sum()),
        }


def sample_ensemble(state: MacroState, gas: GasModel, n: int, rng: np.random.Generator,
                    exact_moments: bool = True) -> ParticleEnsemble:
    """Draw n particles from M_r of ``state``.

    With ``exact_moments`` the sample is shifted and scaled so its velocity and
    both temperatures equal those of ``state`` exactly.
    """
    state.require_positive()
    if n < 2:
        raise ValidationError("an ensemble needs at least two particles")
    v = rng.standard_normal((n, 3))
    i = rng.gamma(0.5 * gas.delta, 1.0, size=n)
    if exact_moments:
        v = v - v.mean(axis=0)
        v = v / math.sqrt(np.sum(v * v) / (3.0 * n))
        i = i / i.mean() * 0.5 * gas.delta
    xi = np.asarray(state.u) + math.sqrt(state.t_tr) * v
    return ParticleEnsemble(xi, state.t_int * i, state.rho / n)


def _norm(v: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("...k,...k->...", v, v))


def pair_weight(xi_a, xi_b, i_a, i_b, gas: GasModel) -> np.ndarray:
    g = _norm(xi_a - xi_b)
    return (i_a + i_b) ** gas.alpha * g**gas.beta


def estimate_majorant(ens: ParticleEnsemble, gas: GasModel, rng: np.random.Generator,
                      n_pilot: int = PILOT_PAIRS, safety: float = MAJORANT_SAFETY) -> float:
    """Safety factor times the largest weight over pilot pairs and the extreme pair.

    The extreme pair doubles the largest internal energy and the largest
    peculiar speed, which bounds every pair in the ensemble.
    """
    a = rng.integers(0, ens.n, size=n_pilot)
    b = (a + rng.integers(1, ens.n, size=n_pilot)) % ens.n
    pilot = pair_weight(ens.xi[a], ens.xi[b], ens.i[a], ens.i[b], gas).max()
    d = ens.xi - ens.xi.mean(axis=0)
    top_s = 2.0 * math.sqrt(np.einsum("ij,ij->i", d, d).max())
    top_i = 2.0 * ens.i.max()
    extreme = top_i**gas.alpha * top_s**gas.beta
    return safety * max(pilot, extreme)


def max_stable_dt(ens: ParticleEnsemble, gas: GasModel, w_max: float) -> float:
    """Largest dt for which the expected candidate count stays below n/2."""
    rate = gas.pair_rate_constant * w_max * ens.weight * (ens.n - 1)
    return 1.0 / rate


def dsmc_step(ens: ParticleEnsemble, gas: GasModel, theta: float, dt: float,
              rng: np.random.Generator, w_max: float | None = None) -> ParticleEnsemble:
    """Advance the ensemble by dt with majorant-frequency pair selection.

    Candidate pairs within a step are disjoint. ``w_max`` overrides the
    majorant of the acceptance weight; a candidate above it raises
    MajorantViolation carrying the offending pair.
    """
    if ens.n < 2:
        raise ValidationError("dsmc_step needs at least two particles")
    if not dt > 0.0:
        raise ValidationError("dt must be positive")
    if not 0.0 <= theta <= 1.0:
        raise ValidationError("theta must lie in [0, 1]")
    if w_max is None:
        w_max = estimate_majorant(ens, gas, rng)
    bound = max_stable_dt(ens, gas, w_max)
    if dt > bound:
        raise ValidationError(f"dt={dt:.3e} exceeds the majorant stability bound {bound:.3e}")
    mean_pairs = 0.5 * ens.n * (ens.n - 1) * ens.weight * gas.pair_rate_constant * w_max * dt
    m = min(int(rng.poisson(mean_pairs)), ens.n // 2)
    if m == 0:
        return replace(ens, time=ens.time + dt)
    # particles are exchangeable, so shuffling once makes candidate pairs (k, m + k)
    perm = rng.permutation(ens.n)
    xi, i = ens.xi[perm], ens.i[perm]
    w = pair_weight(xi[:m], xi[m : 2 * m], i[:m], i[m : 2 * m], gas)
    if np.any(w > w_max):
        k = int(np.argmax(w))
        raise MajorantViolation(
            f"acceptance probability {w[k] / w_max:.4f} > 1",
            {"xi": xi[k].tolist(), "xi_star": xi[m + k].tolist(), "i": float(i[k]),
             "i_star": float(i[m + k]), "w": float(w[k]), "w_max": float(w_max)},
        )
    a = np.flatnonzero(rng.random(m) * w_max < w)
    b = a + m
    k = len(a)
    standard = rng.random(k) < theta
    h = 0.5 * gas.delta
    r_split = rng.beta(h, h, size=k)
    sigma = uniform_sphere(rng, k)
    for mask, kind in ((standard, "standard"), (~standard, "resonant")):
        if not np.any(mask):
            continue
        pa, pb = a[mask], b[mask]
        if kind == "standard":
            r_frac = rng.beta(0.5 * (gas.beta + 3.0), gas.alpha + gas.delta, size=len(pa))
            out = bl_collide_standard(xi[pa], xi[pb], i[pa], i[pb], r_frac,
                                      r_split[mask], sigma[mask])
        else:
            out = bl_collide_resonant(xi[pa], xi[pb], i[pa], i[pb], r_split[mask], sigma[mask])
        xi[pa], xi[pb], i[pa], i[pb] = out
    return replace(ens, xi=xi, i=i, time=ens.time + dt)


@dataclass(frozen=True)
class RelaxationSeries:
    """Snapshot means over replicas with their standard errors.

    With several replicas the errors are taken across them; a single run reports
    the sampling error of its own particle ensemble.
    """

    t: np.ndarray
    rho: np.ndarray
    u: np.ndarray
    t_tr: np.ndarray
    t_int: np.ndarray
    t_tr_se: np.ndarray
    t_int_se: np.ndarray
    n_replicas: int
    energy_drift: float

    def states(self) -> list[MacroState]:
        return [MacroState(r, tuple(u), a, b)
                for r, u, a, b in zip(self.rho, self.u, self.t_tr, self.t_int)]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(SNAPSHOT_COLUMNS)
            for k in range(len(self.t)):
                out.writerow([repr(float(v)) for v in (self.t[k], self.rho[k], *self.u[k],
                                                      self.t_tr[k], self.t_int[k])])


def _run_replica(initial, gas, theta, n_particles, times, seed, key, dt_fraction):
    rng = stream(seed, key)
    ens = sample_ensemble(initial, gas, n_particles, rng)
    start = ens.totals()
    snaps = [ens.moments(gas.delta)]
    errors = [ens.temperature_errors(gas.delta)]
    for t_next in times[1:]:
        while ens.time < t_next * (1.0 - 1e-14):
            w_max = estimate_majorant(ens, gas, rng)
            dt = min(dt_fraction * max_stable_dt(ens, gas, w_max), t_next - ens.time)
            ens = dsmc_step(ens, gas, theta, dt, rng, w_max=w_max)
        snaps.append(ens.moments(gas.delta))
        errors.append(ens.temperature_errors(gas.delta))
    end = ens.totals()
    e0 = start["kinetic"] + start["internal"]
    drift = abs(end["kinetic"] + end["internal"] - e0) / e0
    return snaps, np.array(errors), drift


def dsmc_relaxation_run(initial: MacroState, gas: GasModel, theta: float, n_particles: int,
                        t_end: float, n_snapshots: int, seed: int, n_replicas: int = 1,
                        dt_fraction: float = 0.5, workers: int = 1) -> RelaxationSeries:
    """Homogeneous relaxation from M_r of ``initial`` sampled at evenly spaced times.

    Each replica uses its own random stream; standard errors are taken across
    replicas. ``dt_fraction`` scales the step relative to the majorant bound;
    since candidate pairs are disjoint, no particle collides twice in a step.
    """
    if n_particles < 10_000:
        raise ValidationError("relaxation runs need at least 10^4 particles")
    if not t_end > 0.0 or n_snapshots < 2:
        raise ValidationError("need t_end > 0 and at least two snapshots")
    if n_replicas < 1:
        raise ValidationError("need at least one replica")
    times = np.linspace(0.0, t_end, n_snapshots)
    def one(r):
        return _run_replica(initial, gas, theta, n_particles, times, seed, r, dt_fraction)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(one, range(n_replicas)))
    else:
        runs = [one(r) for r in range(n_replicas)]
    rho = np.array([[s.rho for s in snaps] for snaps, _, _ in runs])
    u = np.array([[s.u for s in snaps] for snaps, _, _ in runs])
    ttr = np.array([[s.t_tr for s in snaps] for snaps, _, _ in runs])
    tint = np.array([[s.t_int for s in snaps] for snaps, _, _ in runs])
    if n_replicas > 1:
        ttr_se = ttr.std(axis=0, ddof=1) / math.sqrt(n_replicas)
        tint_se = tint.std(axis=0, ddof=1) / math.sqrt(n_replicas)
    else:
        ttr_se, tint_se = runs[0][1][:, 0], runs[0][1][:, 1]
    return RelaxationSeries(times, rho.mean(axis=0), u.mean(axis=0), ttr.mean(axis=0),
                            tint.mean(axis=0), ttr_se, tint_se, n_replicas,
                            max(d for _, _, d in runs))


def relaxation_rhs(state: MacroState, gas: GasModel, theta: float) -> tuple[float, float]:
    """(dT_tr/dt, dT_int/dt) of the homogeneous relaxation equations."""
    s = theta * relax_f(state, gas) * (state.t_tr - state.t_int) / state.rho
    return -2.0 * s / 3.0, 2.0 * s / gas.delta


def relaxation_ode(initial: MacroState, gas: GasModel, theta: float, times) -> np.ndarray:
    """Stiff-integrator solution (T_tr, T_int) at ``times``, shape (len(times), 2)."""
    times = np.asarray(times, dtype=float)

    def rhs(_, y):
        return relaxation_rhs(initial.with_temperatures(max(y[0], 0.0), max(y[1], 0.0)),
                              gas, theta)

    sol = solve_ivp(rhs, (0.0, float(times[-1])), [initial.t_tr, initial.t_int],
                    method="Radau", t_eval=times, rtol=1e-11, atol=1e-13)
    if not sol.success:
        raise ValidationError(f"relaxation ODE failed: {sol.message}")
    return sol.y.T


def equilibrium_chi2(ens: ParticleEnsemble, state: MacroState, gas: GasModel,
                     n_bins: int = 20) -> tuple[float, float]:
    """Chi-square p-values of the peculiar-speed and internal-energy marginals against M_r.

    Bins are equiprobable under the reference distribution.
    """
    c2 = np.sum((ens.xi - np.asarray(state.u)) ** 2, axis=1) / state.t_tr
    y = ens.i / state.t_int
    pvals = []
    for x, dist in ((c2, stats.chi2(3)), (y, stats.gamma(0.5 * gas.delta))):
        edges = dist.ppf(np.linspace(0.0, 1.0, n_bins + 1))
        counts = np.bincount(np.searchsorted(edges[1:-1], x, side="right"), minlength=n_bins)
        pvals.append(float(stats.chisquare(counts).pvalue))
    return pvals[0], pvals[1]
