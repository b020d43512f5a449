"""Time integration of the coupled velocity-vorticity system and its limits.

Three steppers share one scheme:

* the regularized system, a Voigt mass operator on the momentum equation
  coupled to an independently evolved vorticity field w,
* the plain momentum equation in rotational form (alpha = 0, w replaced by
  curl u at every evaluation),
* the Stokes limit when advection is disabled in the parameters.

Scheme: CNAB2. Crank-Nicolson on the stiff linear terms, Adams-Bashforth-2
on the nonlinear terms, one Crank-Nicolson/explicit-Euler step to bootstrap
the multistep history. Every linear solve is Fourier-diagonal, including
the Voigt mass operator, so one step costs one nonlinear evaluation plus
mode-wise arithmetic:

    ((1 + a^2 L) + (nu dt / 2) L) u_next
        = ((1 + a^2 L) - (nu dt / 2) L) u + dt (AB2[N_u] + P f)

with L = 4 pi^2 |k|^2, and the same update without the a^2 term for w.
Forcing is evaluated once per step at the midpoint t + dt/2, which keeps
the scheme second order for modulated forces.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, DivergedError
from .operators import ModelParams, cross_term, nonlinear_terms
from .spectral import (
    GridSpec,
    SpectralVectorField,
    collocation_points,
    curl,
    forward_transform_vector,
    gradient,
    forward_transform,
    leray_project,
    project_coeffs,
    random_vector_field,
    inverse_transform_vector,
)

logger = logging.getLogger(__name__)

GROWTH_LIMIT = 1e6  # abort when |u| grows beyond this factor of its start


@dataclass(frozen=True)
class SchemeConfig:
    """Time step, horizon and output cadences of one run."""

    dt: float
    t_end: float
    scheme: str = "cnab2"
    diag_every: int = 1      # steps between diagnostics rows
    snapshot_every: int = 0  # steps between snapshots, 0 disables

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be > 0, got {self.dt}")
        if self.t_end < 0.0:
            raise ConfigError(f"t_end must be >= 0, got {self.t_end}")
        if self.scheme != "cnab2":
            raise ConfigError(f"unknown scheme '{self.scheme}'")
        if self.diag_every < 1:
            raise ConfigError("diag_every must be >= 1")
        if self.snapshot_every < 0:
            raise ConfigError("snapshot_every must be >= 0")

    def step_plan(self) -> list[float]:
        """Step sizes covering [0, t_end]: full dt steps plus one short
        remainder step when the horizon is not a step multiple."""
        full = int(math.floor(self.t_end / self.dt + 1e-9))
        remainder = self.t_end - full * self.dt
        plan = [self.dt] * full
        if remainder > 1e-9 * self.dt:
            plan.append(remainder)
        return plan


@dataclass
class VvvState:
    """Coupled pair (u, w) plus multistep history."""

    u: SpectralVectorField
    w: SpectralVectorField
    t: float
    params: ModelParams
    step_count: int = 0
    history: tuple[np.ndarray, np.ndarray] | None = None  # (cross, wadv) at last step
    prev_dt: float | None = None


@dataclass
class NseState:
    """Velocity-only state; the vorticity is derived on demand."""

    u: SpectralVectorField
    t: float
    params: ModelParams
    step_count: int = 0
    history: np.ndarray | None = None  # cross term at last step
    prev_dt: float | None = None


# ---------------------------------------------------------------------------
# Initial data


def init_taylor_green(grid: GridSpec, amplitude: float = 1.0) -> SpectralVectorField:
    """Taylor-Green velocity, divergence-free and band-limited to 8 modes."""
    x, y, z = collocation_points(grid)
    two_pi = 2.0 * np.pi
    samples = np.stack([
        np.sin(two_pi * x) * np.cos(two_pi * y) * np.cos(two_pi * z),
        -np.cos(two_pi * x) * np.sin(two_pi * y) * np.cos(two_pi * z),
        np.zeros_like(x),
    ])
    field = forward_transform_vector(samples, grid)
    return SpectralVectorField(grid, field.coeffs * amplitude)


def random_smooth_velocity(grid: GridSpec, seed: int, modes: int = 2,
                           amplitude: float = 1.0) -> SpectralVectorField:
    """Seeded solenoidal field with |k_j| <= modes, L2 norm = amplitude."""
    if modes < 1:
        raise ConfigError(f"mode cutoff must be >= 1, got {modes}")
    return random_vector_field(grid, seed, cutoff=modes,
                               amplitude=amplitude, solenoidal=True)


def perturbed_divergence_w0(grid: GridSpec, u0: SpectralVectorField, seed: int,
                            amplitude: float = 1.0, shell: int = 1) -> SpectralVectorField:
    """curl u0 plus a gradient whose divergence lives on the |k|^2 = shell^2 sphere."""
    if shell < 1:
        raise ConfigError(f"divergence shell must be >= 1, got {shell}")
    rng = np.random.default_rng(seed)
    phi = forward_transform(rng.standard_normal((grid.n,) * 3), grid)
    keep = grid.ksq == shell * shell
    if not keep.any():
        raise ConfigError(f"no lattice modes on the |k|^2 = {shell * shell} sphere")
    phi.coeffs *= keep
    grad_phi = gradient(phi)
    norm = np.sqrt(np.sum(np.abs(grad_phi.coeffs) ** 2))
    if norm == 0.0:
        raise ConfigError("divergence perturbation vanished, use another seed")
    coeffs = curl(u0).coeffs + grad_phi.coeffs * (amplitude / norm)
    return SpectralVectorField(grid, coeffs)


# ---------------------------------------------------------------------------
# Steppers


def _check_finite(coeffs: np.ndarray, step: int, t: float, name: str) -> None:
    if not np.all(np.isfinite(coeffs)):
        raise DivergedError(step, t, f"non-finite values in {name}")


def _forcing_terms(params: ModelParams, t_mid: float):
    if params.forcing is None:
        return 0.0, 0.0
    return params.forcing.momentum_at(t_mid), params.forcing.curl_at(t_mid)


def _ab2_weights(state, dt: float) -> tuple[float, float]:
    """Explicit extrapolation weights; (1.5, -0.5) for uniform steps."""
    ratio = dt / (2.0 * state.prev_dt)
    return 1.0 + ratio, -ratio


def step_vvv(state: VvvState, cfg: SchemeConfig, dt: float | None = None) -> VvvState:
    """Advance the coupled system by one CNAB2 step."""
    grid = state.u.grid
    p = state.params
    dt = cfg.dt if dt is None else dt
    lam = grid.lap

    if p.disable_advection:
        cross = np.zeros_like(state.u.coeffs)
        wadv = np.zeros_like(state.w.coeffs)
    else:
        cross, wadv = nonlinear_terms(state.u, state.w)
    if state.history is None:
        expl_u, expl_w = -cross, wadv
    else:
        b1, b0 = _ab2_weights(state, dt)
        prev_cross, prev_wadv = state.history
        expl_u = -(b1 * cross + b0 * prev_cross)
        expl_w = b1 * wadv + b0 * prev_wadv

    f_mom, f_curl = _forcing_terms(p, state.t + 0.5 * dt)
    mass = 1.0 + p.alpha**2 * lam
    visc = 0.5 * p.nu * dt * lam

    u_new = ((mass - visc) * state.u.coeffs + dt * (expl_u + f_mom)) / (mass + visc)
    u_new = project_coeffs(u_new, grid)
    w_new = ((1.0 - visc) * state.w.coeffs + dt * (expl_w + f_curl)) / (1.0 + visc)

    step = state.step_count + 1
    t_new = state.t + dt
    _check_finite(u_new, step, t_new, "u")
    _check_finite(w_new, step, t_new, "w")
    return VvvState(
        u=SpectralVectorField(grid, u_new),
        w=SpectralVectorField(grid, w_new),
        t=t_new,
        params=p,
        step_count=step,
        history=(cross, wadv),
        prev_dt=dt,
    )


def step_nse(state: NseState, cfg: SchemeConfig, dt: float | None = None) -> NseState:
    """One CNAB2 step of the rotational-form momentum equation."""
    grid = state.u.grid
    p = state.params
    dt = cfg.dt if dt is None else dt
    lam = grid.lap

    if p.disable_advection:
        cross = np.zeros_like(state.u.coeffs)
    else:
        cross = cross_term(curl(state.u), state.u).coeffs
    if state.history is None:
        expl = -cross
    else:
        b1, b0 = _ab2_weights(state, dt)
        expl = -(b1 * cross + b0 * state.history)

    f_mom, _ = _forcing_terms(p, state.t + 0.5 * dt)
    visc = 0.5 * p.nu * dt * lam
    u_new = ((1.0 - visc) * state.u.coeffs + dt * (expl + f_mom)) / (1.0 + visc)
    u_new = project_coeffs(u_new, grid)

    step = state.step_count + 1
    t_new = state.t + dt
    _check_finite(u_new, step, t_new, "u")
    return NseState(
        u=SpectralVectorField(grid, u_new),
        t=t_new,
        params=p,
        step_count=step,
        history=cross,
        prev_dt=dt,
    )


def cfl_advisory(u: SpectralVectorField, dt: float) -> float:
    """Advisory bound dt <= 0.5 dx / |u|_inf; reported, never enforced."""
    umax = float(np.max(np.abs(inverse_transform_vector(u))))
    if umax == 0.0:
        return math.inf
    return 0.5 / (u.grid.n * umax)


# ---------------------------------------------------------------------------
# Run loop


@dataclass
class RunResult:
    state: VvvState | NseState
    records: list


def run(model: str, u0: SpectralVectorField, params: ModelParams,
        cfg: SchemeConfig, w0: SpectralVectorField | None = None,
        on_record=None, on_snapshot=None, step_hook=None) -> RunResult:
    """Integrate to t_end, emitting diagnostics at the configured cadence.

    `model` is "vvv" or "nse"; w0 is only meaningful for "vvv" and defaults
    to curl u0. Deterministic given identical inputs. A detected blow-up
    raises DivergedError after flushing everything emitted so far.
    """
    from .diagnostics import EnergyBudget, make_record

    if model not in ("vvv", "nse"):
        raise ConfigError(f"unknown model '{model}'")
    plan = cfg.step_plan()

    if model == "vvv":
        u_start = leray_project(u0)
        if w0 is None:
            w0 = curl(u_start)
        state: VvvState | NseState = VvvState(
            u=u_start, w=w0.copy(), t=0.0, params=params)
        stepper = step_vvv
    else:
        state = NseState(u=leray_project(u0), t=0.0, params=params)
        stepper = step_nse

    advisory = cfl_advisory(state.u, cfg.dt)
    if cfg.dt > advisory:
        logger.info("dt=%g exceeds advisory CFL bound %g", cfg.dt, advisory)
    else:
        logger.info("dt=%g within advisory CFL bound %g", cfg.dt, advisory)

    budget = EnergyBudget(params, state.u)
    initial_l2 = float(np.sqrt(np.sum(np.abs(state.u.coeffs) ** 2)))

    records = []

    def emit(st):
        rec = make_record(st, energy_budget_residual=budget.residual)
        records.append(rec)
        if on_record is not None:
            on_record(rec)

    emit(state)
    if step_hook is not None:
        step_hook(state)
    if on_snapshot is not None and cfg.snapshot_every > 0:
        on_snapshot(state)

    steps = len(plan)
    for i, dt_i in enumerate(plan, start=1):
        state = stepper(state, cfg, dt=dt_i)
        l2_u = float(np.sqrt(np.sum(np.abs(state.u.coeffs) ** 2)))
        if initial_l2 > 0.0 and l2_u > GROWTH_LIMIT * initial_l2:
            raise DivergedError(i, state.t,
                                f"l2_u grew to {l2_u:.3e}, beyond "
                                f"{GROWTH_LIMIT:.0e} x initial")
        budget.update(state.t, state.u)
        if step_hook is not None:
            step_hook(state)
        if i % cfg.diag_every == 0 or i == steps:
            emit(state)
        if on_snapshot is not None and cfg.snapshot_every > 0 and (
                i % cfg.snapshot_every == 0 or i == steps):
            on_snapshot(state)
    return RunResult(state=state, records=records)
