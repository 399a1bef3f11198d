"""Command-line driver: ``twotemp {coeffs,verify,relax,shock,riemann} --config run.yaml``.

Every run writes its artifacts plus ``manifest.json`` (resolved config, code
version and SHA-256 of each artifact) into the output directory. JSON is
written with sorted keys and no timestamps so reruns are byte-identical.

Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 failed checks.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field
from pydantic import ValidationError as SchemaError

from . import __version__
from . import chapman_enskog as ce
from . import fluid1d as fl
from . import particle_oracle as po
from . import verification as vf
from .core_model import GasModel
from .equilibrium import MacroState
from .errors import NumericalError, ValidationError
from .rng import stream

log = logging.getLogger("twotemp")

COMMANDS = ("coeffs", "verify", "relax", "shock", "riemann")
OUT_ENV = "TWOTEMP_OUT"
DEFAULT_OUT = "twotemp-out"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_CHECKS = 0, 2, 3, 4


# --------------------------------------------------------------------------
# Configuration schema
# --------------------------------------------------------------------------

class _Block(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GasBlock(_Block):
    delta: float = 2.0
    alpha: float = 0.0
    beta: float = 0.0
    c_r: float = 1.0
    theta: float = Field(0.05, ge=0.0, le=1.0)


class StateBlock(_Block):
    rho: float = 1.0
    u: tuple[float, float, float] = (0.0, 0.0, 0.0)
    t_tr: float = 2.0
    t_int: float = 1.0


class NumericsBlock(_Block):
    basis: tuple[int, int] = (8, 4)
    basis_ladder: list[tuple[int, int]] = [(4, 2), (6, 3), (8, 4)]
    include_k: bool = True
    mc_samples: int = Field(1_000_000, gt=0)
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    # fluid
    cells: int = Field(200, ge=3)
    cfl: float = Field(0.4, gt=0.0, lt=1.0)
    eps: float = Field(0.1, gt=0.0)
    kappa: float = Field(1.0, ge=0.0)
    scaling_mode: Literal["eps2", "eps1"] = "eps2"
    coeff_mode: Literal["auto", "analytic-alpha0beta0", "tabulated", "live", "euler"] = "auto"
    mach: float = Field(2.0, gt=1.0)
    x_range: tuple[float, float] = (-2.0, 8.0)
    tol: float = Field(1e-7, gt=0.0)
    max_time: float = Field(400.0, gt=0.0)
    riemann_left: tuple[float, float, float] = (1.0, 0.0, 1.0)
    riemann_right: tuple[float, float, float] = (0.125, 0.0, 0.1)
    riemann_time: float = Field(0.15, gt=0.0)
    # particles
    particles: int = Field(100_000, ge=10_000)
    replicas: int = Field(1, ge=1)
    snapshots: int = Field(20, ge=1)
    t_end: float | None = Field(None, gt=0.0)
    relaxation_times: float = Field(2.0, gt=0.0)
    dt_fraction: float = Field(0.5, gt=0.0, le=1.0)
    run_dsmc: bool = True
    # verification
    checks: list[int] | None = None
    fault_c_s_scale: float = Field(1.0, gt=0.0)


class OutputBlock(_Block):
    directory: str | None = None
    formats: list[Literal["json", "csv"]] = ["json", "csv"]


class RunConfig(_Block):
    task: Literal["coeffs", "verify", "relax", "shock", "riemann"] | None = None
    gas: GasBlock = GasBlock()
    state: StateBlock = StateBlock()
    numerics: NumericsBlock = NumericsBlock()
    output: OutputBlock = OutputBlock()

    def gas_model(self) -> GasModel:
        g = self.gas
        return GasModel(g.delta, g.alpha, g.beta, g.c_r, g.theta)

    def macro_state(self) -> MacroState:
        s = self.state
        return MacroState(s.rho, s.u, s.t_tr, s.t_int)


def load_config(path: str | os.PathLike, command: str, seed: int | None = None,
                out: str | None = None) -> RunConfig:
    """Parse and validate a YAML config; CLI overrides win over file values."""
    try:
        raw = yaml.safe_load(Path(path).read_text()) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("config must be a mapping")
    try:
        cfg = RunConfig.model_validate(raw)
    except SchemaError as exc:
        raise ValidationError(f"invalid config: {exc}") from exc
    if cfg.task is not None and cfg.task != command:
        raise ValidationError(f"config task {cfg.task!r} does not match command {command!r}")
    numerics = cfg.numerics.model_copy(update={"seed": seed} if seed is not None else {})
    directory = out or cfg.output.directory or os.environ.get(OUT_ENV) or DEFAULT_OUT
    return cfg.model_copy(update={
        "task": command, "numerics": numerics,
        "output": cfg.output.model_copy(update={"directory": directory}),
    })


# --------------------------------------------------------------------------
# Output helpers
# --------------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy to builtins, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


class RunOutput:
    """Collects artifacts of one run and writes the manifest."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.directory = Path(cfg.output.directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.artifacts: list[str] = []

    def _register(self, name: str) -> Path:
        self.artifacts.append(name)
        return self.directory / name

    def json(self, name: str, payload: dict) -> None:
        if "json" not in self.cfg.output.formats:
            return
        text = json.dumps(_clean(payload), sort_keys=True, indent=2) + "\n"
        self._register(name).write_text(text)

    def csv(self, name: str, header, rows) -> None:
        if "csv" not in self.cfg.output.formats:
            return
        with open(self._register(name), "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(header)
            for row in rows:
                out.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v
                              for v in row])

    def finish(self) -> Path:
        files = {}
        for name in sorted(set(self.artifacts)):
            files[name] = hashlib.sha256((self.directory / name).read_bytes()).hexdigest()
        manifest = {
            "command": self.cfg.task,
            "version": __version__,
            "config": self.cfg.model_dump(mode="json"),
            "artifacts": files,
        }
        path = self.directory / "manifest.json"
        path.write_text(json.dumps(_clean(manifest), sort_keys=True, indent=2) + "\n")
        return path


def _provider(cfg: RunConfig, gas: GasModel) -> fl.CoefficientProvider:
    mode = cfg.numerics.coeff_mode
    if mode == "auto":
        mode = "analytic-alpha0beta0" if gas.alpha == 0.0 and gas.beta == 0.0 else "tabulated"
    if mode == "analytic-alpha0beta0":
        return fl.CoefficientProvider.analytic(gas)
    if mode == "euler":
        return fl.CoefficientProvider.euler(gas)
    include_k = cfg.numerics.include_k and cfg.numerics.scaling_mode == "eps1"
    if mode == "live":
        return fl.CoefficientProvider.live(gas, cfg.numerics.basis, include_k)
    return fl.CoefficientProvider.tabulate(gas, basis_size=cfg.numerics.basis,
                                           include_k=include_k)


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------

def cmd_coeffs(cfg: RunConfig) -> int:
    gas, state = cfg.gas_model(), cfg.macro_state()
    ladder = sorted(set(map(tuple, cfg.numerics.basis_ladder)) | {tuple(cfg.numerics.basis)})
    rows = []
    for n_c, n_i in ladder:
        sol = ce.solve_abc(state, gas, ce.SpectralBasis(n_c, n_i))
        k = None
        if cfg.numerics.include_k and state.t_tr != state.t_int:
            k = ce.relax_k(state, gas, ce.SpectralBasis(n_c, n_i, "scalar")).value
        rows.append({"basis": [n_c, n_i], **ce.transport_coeffs(sol, k).as_dict(),
                     "min_eigenvalue": sol.min_eigenvalue,
                     "constraint_residual": sol.constraint_residual})
    final = next(r for r in rows if tuple(r["basis"]) == tuple(cfg.numerics.basis))
    previous = [r for r in rows if r is not final]
    names = list(fl.COEFF_NAMES) + ["f_relax", "k_relax"]
    uncertainty = {}
    for name in names:
        if final[name] is None:
            continue
        # truncation estimate: change against the next smaller basis
        diffs = [abs(final[name] - r[name]) for r in previous[-1:] if r[name] is not None]
        uncertainty[name] = diffs[0] if diffs else 0.0
    out = RunOutput(cfg)
    out.json("coeffs.json", {
        "coefficients": {n: final[n] for n in names},
        "uncertainty": uncertainty,
        "convergence": rows,
        "state": cfg.state.model_dump(mode="json"),
        "gas": cfg.gas.model_dump(mode="json"),
    })
    out.csv("coeffs.csv", ("name", "value", "uncertainty"),
            [(n, final[n], uncertainty.get(n, float("nan")))
             for n in names if final[n] is not None])
    out.finish()
    for n in names:
        if final[n] is not None:
            print(f"{n:>14s} = {final[n]: .10e} +/- {uncertainty[n]:.1e}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    n = cfg.numerics
    settings = vf.VerifySettings(theta=cfg.gas.theta, seed=n.seed, workers=n.workers,
                                 fault_c_s_scale=n.fault_c_s_scale)
    unknown = set(n.checks or ()) - set(vf.CHECKS)
    if unknown:
        raise ValidationError(f"unknown checks {sorted(unknown)}")
    results = vf.run_suite(settings, n.checks, report=lambda r: print(r.line(), flush=True))
    out = RunOutput(cfg)
    payload = []
    for r in results:
        d = r.to_dict()
        d.pop("runtime")
        payload.append(d)
    out.json("verify.json", {"checks": payload})
    out.csv("verify.csv", ("number", "name", "status", "metric", "margin"),
            [(r.number, r.name, r.status, r.metric, r.margin) for r in results])
    out.finish()
    failed = [r.number for r in results if r.status == vf.FAIL]
    if failed:
        print(f"failed checks: {failed}")
        return EXIT_CHECKS
    return EXIT_OK


def cmd_relax(cfg: RunConfig) -> int:
    gas, state = cfg.gas_model(), cfg.macro_state()
    n, theta = cfg.numerics, cfg.gas.theta
    state.require_positive()
    rate = theta * ce.relax_f(state, gas) / state.rho * (2.0 / 3.0 + 2.0 / gas.delta)
    t_end = n.t_end if n.t_end is not None else (n.relaxation_times / rate if rate > 0 else 1.0)
    times = np.linspace(0.0, t_end, n.snapshots + 1)
    ode = po.relaxation_ode(state, gas, theta, times)
    # homogeneous fluid run: the eps2 source with eps * kappa = theta
    x = (np.arange(4) + 0.5) / 4
    fstate = fl.FluidState1D.from_primitive(x, state.rho, state.u[0], state.t_tr, state.t_int,
                                            gas.delta, eps=1.0, kappa=theta)
    traj = fl.advance(fstate, fl.CoefficientProvider.euler(gas), t_end, n.cfl, "periodic",
                      n_out=n.snapshots, diffusion=False, dt_max=t_end / (20 * n.snapshots))
    fluid = np.array([s.primitives()[0, 2:4] for s in traj.states])
    header = ["t", "T_tr_ode", "T_int_ode", "T_tr_fluid", "T_int_fluid"]
    columns = [times, ode[:, 0], ode[:, 1], fluid[:, 0], fluid[:, 1]]
    out = RunOutput(cfg)
    summary = {"relaxation_rate": rate, "t_end": t_end,
               "fluid_max_abs_error": float(np.max(np.abs(fluid - ode)))}
    if n.run_dsmc:
        series = po.dsmc_relaxation_run(state, gas, theta, n.particles, t_end, n.snapshots + 1,
                                        seed=n.seed, n_replicas=n.replicas,
                                        dt_fraction=n.dt_fraction, workers=n.workers)
        series.to_csv(out._register("dsmc.csv"))
        header += ["T_tr_dsmc", "T_int_dsmc", "T_tr_dsmc_se", "T_int_dsmc_se"]
        columns += [series.t_tr, series.t_int, series.t_tr_se, series.t_int_se]
        z = (series.t_int[1:] - ode[1:, 1]) / series.t_int_se[1:]
        summary.update(dsmc_max_abs_z=float(np.max(np.abs(z))),
                       dsmc_energy_drift=series.energy_drift)
    out.csv("relax.csv", header, zip(*columns))
    out.json("relax.json", summary)
    out.finish()
    print(json.dumps(_clean(summary), sort_keys=True))
    return EXIT_OK


def cmd_shock(cfg: RunConfig) -> int:
    gas, n = cfg.gas_model(), cfg.numerics
    s = cfg.state
    if s.t_tr != s.t_int:
        raise ValidationError("shock upstream state must have t_tr == t_int")
    upstream = MacroState(s.rho, (0.0, 0.0, 0.0), s.t_tr, s.t_int)
    provider = _provider(cfg, gas)
    prof = fl.shock_structure(upstream, n.mach, provider, gas, eps=n.eps,
                              mode=n.scaling_mode, kappa=n.kappa, n_cells=n.cells,
                              x_range=n.x_range, cfl=n.cfl, tol=n.tol, max_time=n.max_time,
                              use_k=provider.k_available())
    r, v, t = fl.rankine_hugoniot(n.mach, gas.gamma)
    report = {
        "mach": n.mach, "gamma": gas.gamma,
        "expected": {"density_ratio": r, "velocity_ratio": v, "temperature_ratio": t},
        "observed": {"density_ratio": prof.density_ratio,
                     "velocity_ratio": prof.downstream[1] / prof.upstream[1],
                     "t_tr_ratio": prof.downstream[2] / prof.upstream[2],
                     "t_int_ratio": prof.downstream[3] / prof.upstream[3]},
        "density_ratio_error": abs(prof.density_ratio - r),
        "residual": prof.residual, "steps": prof.steps,
        "relaxation_zone_width": prof.relaxation_zone_width(),
        "shock_thickness": prof.shock_thickness(),
        "coefficients": provider.mode,
    }
    out = RunOutput(cfg)
    fl.write_profile(out._register("shock_profile.csv"), prof.state, provider,
                     fl.Boundary("inflow-outflow", prof.upstream,
                                 back_pressure=s.rho * s.t_tr * r * t))
    out.json("shock.json", report)
    out.finish()
    print(f"M={n.mach:g} gamma={gas.gamma:.6g}: density ratio {prof.density_ratio:.8f}"
          f" (jump conditions {r:.8f})")
    return EXIT_OK


def cmd_riemann(cfg: RunConfig) -> int:
    gas, n = cfg.gas_model(), cfg.numerics
    left, right = n.riemann_left, n.riemann_right
    x = (np.arange(n.cells) + 0.5) / n.cells
    mid = x < 0.5
    rho = np.where(mid, left[0], right[0])
    p = np.where(mid, left[2], right[2])
    st = fl.FluidState1D.from_primitive(x, rho, np.where(mid, left[1], right[1]), p / rho,
                                        p / rho, gas.delta, eps=n.eps, kappa=0.0)
    traj = fl.advance(st, fl.CoefficientProvider.euler(gas), n.riemann_time, n.cfl,
                      "transmissive", diffusion=False)
    w = traj.final.primitives()
    exact = fl.exact_riemann(left, right, fl.GAMMA_TR, (x - 0.5) / n.riemann_time)
    num = np.column_stack([w[:, 0], w[:, 1], w[:, 0] * w[:, 2]])
    l1 = {name: float(np.sum(np.abs(num[:, k] - exact[:, k])) / np.sum(np.abs(exact[:, k])))
          for k, name in enumerate(("rho", "u", "p")) if np.any(exact[:, k] != 0.0)}
    out = RunOutput(cfg)
    out.csv("riemann.csv", ("x", "rho", "u", "p", "rho_exact", "u_exact", "p_exact"),
            np.column_stack([x, num, exact]))
    out.json("riemann.json", {"relative_l1": l1, "steps": traj.steps, "cells": n.cells})
    out.finish()
    print(json.dumps(l1, sort_keys=True))
    return EXIT_OK


HANDLERS = {"coeffs": cmd_coeffs, "verify": cmd_verify, "relax": cmd_relax,
            "shock": cmd_shock, "riemann": cmd_riemann}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twotemp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="YAML run configuration")
        p.add_argument("--seed", type=int, default=None, help="override numerics.seed")
        p.add_argument("--out", default=None,
                       help=f"output directory (default: ${OUT_ENV} or ./{DEFAULT_OUT})")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.command, args.seed, args.out)
        return HANDLERS[args.command](cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
