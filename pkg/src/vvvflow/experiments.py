"""Convergence studies: alpha sweeps, the alpha=0 reduction and dt refinement.

Each sweep holds the spatial resolution fixed so that only the dependence
on the swept parameter is measured, runs its members in ascending value
index, and fits a convergence order by least squares in log-log. Reports
pass against a declared order window; the window is one sided by default
because the underlying bounds are lower bounds on the rate, so measured
superconvergence is a pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import EnergyBudget, _coeff_h1, _coeff_l2
from .errors import ConfigError
from .models import SchemeConfig, VvvState, NseState, run, step_nse, step_vvv
from .operators import ModelParams
from .spectral import GridSpec, SpectralVectorField, curl, leray_project

FLOOR = 1e-13  # below this every error is round-off, order is meaningless

STRONG_REFERENCE_NOTE = (
    "assumes the reference solution stays strong on [0, t_end]"
)


@dataclass(frozen=True)
class Scenario:
    """Base problem shared by all members of a sweep."""

    grid: GridSpec
    u0: SpectralVectorField
    params: ModelParams
    cfg: SchemeConfig
    w0: SpectralVectorField | None = None  # None selects curl u0


@dataclass(frozen=True)
class SweepPlan:
    scenario: Scenario
    variable: str                       # "alpha" | "dt" | "n"
    values: tuple[float, ...]
    reference: str = "analytic"         # "analytic" | "finest-member" | "nse"
    compare_every: int = 10             # reference comparison cadence (steps)
    order_window: tuple[float, float] = (0.85, math.inf)

    def __post_init__(self):
        if self.variable not in ("alpha", "dt", "n"):
            raise ConfigError(f"unknown sweep variable '{self.variable}'")
        if self.reference not in ("analytic", "finest-member", "nse"):
            raise ConfigError(f"unknown reference policy '{self.reference}'")
        values = tuple(float(v) for v in self.values)
        if len(values) < 3:
            raise ConfigError(f"sweep needs >= 3 values, got {len(values)}")
        if any(v <= 0.0 for v in values):
            raise ConfigError("sweep values must be positive")
        if any(b >= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep values must be strictly decreasing")
        object.__setattr__(self, "values", values)
        if self.compare_every < 1:
            raise ConfigError("compare_every must be >= 1")


@dataclass
class ConvergenceReport:
    variable: str
    values: tuple[float, ...]
    errors: dict[str, tuple[float, ...]]   # norm name -> per-value errors
    orders: dict[str, float]               # fitted order per norm
    residuals: dict[str, float]            # RMS log-fit residual per norm
    order_window: tuple[float, float]
    passed: bool
    at_floor: dict[str, bool]
    notes: tuple[str, ...] = ()

    def summary(self) -> str:
        lo, hi = self.order_window
        lines = [f"# convergence in {self.variable}, order window [{lo:g}, {hi:g}]"]
        for note in self.notes:
            lines.append(f"# {note}")
        for name, errs in self.errors.items():
            if self.at_floor[name]:
                lines.append(f"{name}: at round-off floor, order indeterminate")
                continue
            lines.append(
                f"{name}: order {self.orders[name]:.3f} "
                f"(fit residual {self.residuals[name]:.2e})"
            )
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)

    def to_csv(self) -> str:
        names = list(self.errors)
        rows = [",".join([self.variable] + names)]
        for i, v in enumerate(self.values):
            rows.append(",".join(
                [f"{v:.17g}"] + [f"{self.errors[n][i]:.17g}" for n in names]))
        return "\n".join(rows) + "\n"


def fit_order(pairs) -> tuple[float, float]:
    """Least-squares slope of log(error) against log(h).

    Returns (order, residual) where residual is the RMS deviation of the
    log errors from the fitted line. Needs at least 3 positive pairs.
    """
    pairs = [(float(h), float(e)) for h, e in pairs]
    if len(pairs) < 3:
        raise ConfigError(f"order fit needs >= 3 pairs, got {len(pairs)}")
    if any(h <= 0.0 or e <= 0.0 for h, e in pairs):
        raise ConfigError("order fit needs positive step sizes and errors")
    log_h = np.log([h for h, _ in pairs])
    log_e = np.log([e for _, e in pairs])
    slope, intercept = np.polyfit(log_h, log_e, 1)
    residual = float(np.sqrt(np.mean((log_e - (slope * log_h + intercept)) ** 2)))
    return float(slope), residual


def _assemble(plan: SweepPlan, errors: dict[str, list[float]],
              notes: tuple[str, ...]) -> ConvergenceReport:
    orders, residuals, at_floor = {}, {}, {}
    passed = True
    lo, hi = plan.order_window
    for name, errs in errors.items():
        if max(errs) < FLOOR:
            at_floor[name] = True
            orders[name] = math.nan
            residuals[name] = math.nan
            continue
        at_floor[name] = False
        order, residual = fit_order(zip(plan.values, errs))
        orders[name] = order
        residuals[name] = residual
        if not (lo <= order <= hi):
            passed = False
    return ConvergenceReport(
        variable=plan.variable,
        values=plan.values,
        errors={k: tuple(v) for k, v in errors.items()},
        orders=orders,
        residuals=residuals,
        order_window=plan.order_window,
        passed=passed,
        at_floor=at_floor,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# Alpha sweep against the run's own curl


def sweep_alpha_curl_mismatch(plan: SweepPlan) -> ConvergenceReport:
    """Per alpha: max-in-time L2 and L2-in-time H1 norms of w - curl u.

    The initial vorticity is pinned to curl u0, the hypothesis under which
    the mismatch starts at zero and stays O(alpha).
    """
    if plan.variable != "alpha":
        raise ConfigError("curl-mismatch sweep must sweep alpha")
    if plan.reference != "analytic":
        raise ConfigError("curl-mismatch sweep compares within each run; "
                          "reference policy must be 'analytic'")
    _require_alpha_range(plan.values)
    sc = plan.scenario
    errors = {"curl_mismatch_max_l2": [], "curl_mismatch_l2t_h1": []}
    for alpha in plan.values:
        params = replace(sc.params, alpha=alpha)
        tracker = _MismatchTracker(sc.grid)
        try:
            run("vvv", sc.u0, params, sc.cfg, w0=None, step_hook=tracker)
        except Exception as exc:
            raise ConfigError(f"sweep member alpha={alpha} failed: {exc}") from exc
        errors["curl_mismatch_max_l2"].append(tracker.max_l2)
        errors["curl_mismatch_l2t_h1"].append(math.sqrt(tracker.h1_sq_integral))
    return _assemble(plan, errors, notes=(STRONG_REFERENCE_NOTE,))


class _MismatchTracker:
    def __init__(self, grid: GridSpec):
        self.lap = grid.lap
        self.max_l2 = 0.0
        self.h1_sq_integral = 0.0
        self._t_prev = None
        self._h1_sq_prev = 0.0

    def __call__(self, state: VvvState) -> None:
        diff = state.w.coeffs - curl(state.u).coeffs
        self.max_l2 = max(self.max_l2, _coeff_l2(diff))
        h1_sq = float(np.sum(self.lap * np.abs(diff) ** 2))
        if self._t_prev is not None:
            self.h1_sq_integral += 0.5 * (state.t - self._t_prev) * (
                self._h1_sq_prev + h1_sq)
        self._t_prev, self._h1_sq_prev = state.t, h1_sq


# ---------------------------------------------------------------------------
# Alpha sweep against an unregularized reference run


def sweep_alpha_nse_deviation(plan: SweepPlan) -> ConvergenceReport:
    """Per alpha: max-in-time deviation of velocity and vorticity from the
    unregularized solution computed at identical resolution and time step,
    so the shared time-discretization error cancels at leading order."""
    if plan.variable != "alpha":
        raise ConfigError("deviation sweep must sweep alpha")
    if plan.reference != "nse":
        raise ConfigError("deviation sweep needs reference policy 'nse'")
    _require_alpha_range(plan.values)
    sc = plan.scenario

    reference = _ReferenceTrajectory(plan.compare_every, sc.grid)
    run("nse", sc.u0, replace(sc.params, alpha=0.0), sc.cfg,
        step_hook=reference)

    errors = {"u_deviation_max_l2": [], "vorticity_deviation_max_l2": []}
    for alpha in plan.values:
        params = replace(sc.params, alpha=alpha)
        tracker = _DeviationTracker(reference)
        try:
            run("vvv", sc.u0, params, sc.cfg, w0=None, step_hook=tracker)
        except Exception as exc:
            raise ConfigError(f"sweep member alpha={alpha} failed: {exc}") from exc
        errors["u_deviation_max_l2"].append(tracker.max_u)
        errors["vorticity_deviation_max_l2"].append(tracker.max_vort)
    return _assemble(plan, errors, notes=(STRONG_REFERENCE_NOTE,))


class _ReferenceTrajectory:
    """Masked reference coefficients stored every `every` steps."""

    def __init__(self, every: int, grid: GridSpec):
        self.every = every
        self.grid = grid
        self.mask = grid.dealias_mask
        self.snapshots: dict[int, np.ndarray] = {}

    def __call__(self, state) -> None:
        if state.step_count % self.every == 0:
            self.snapshots[state.step_count] = state.u.coeffs[:, self.mask].copy()

    def dense(self, step: int) -> np.ndarray:
        packed = self.snapshots[step]
        out = np.zeros((3,) + self.mask.shape, dtype=np.complex128)
        out[:, self.mask] = packed
        return out


class _DeviationTracker:
    def __init__(self, reference: _ReferenceTrajectory):
        self.reference = reference
        self.max_u = 0.0
        self.max_vort = 0.0

    def __call__(self, state: VvvState) -> None:
        if state.step_count % self.reference.every != 0:
            return
        diff = SpectralVectorField(
            state.u.grid, state.u.coeffs - self.reference.dense(state.step_count))
        self.max_u = max(self.max_u, _coeff_l2(diff.coeffs))
        self.max_vort = max(self.max_vort, _coeff_l2(curl(diff).coeffs))


def _require_alpha_range(values) -> None:
    for v in values:
        if v == 0.0:
            raise ConfigError("alpha=0 is outside the sweep range; use the "
                              "alpha=0 reduction check instead")
        if not 0.0 < v <= 1.0:
            raise ConfigError(f"alpha sweep values must lie in (0, 1], got {v}")


# ---------------------------------------------------------------------------
# Reduction at alpha = 0


@dataclass(frozen=True)
class ReductionResult:
    passed: bool
    max_deviation: float
    first_offending_time: float | None


REDUCTION_TOL = 1e-9


def reduction_check_alpha_zero(scenario: Scenario,
                               tol: float = REDUCTION_TOL) -> ReductionResult:
    """Run the coupled system at alpha=0 and the plain momentum solver side
    by side from identical data; their velocities must agree to round-off
    accumulation since the vorticity equation is then the exact curl of the
    momentum equation, step by step."""
    if scenario.params.alpha != 0.0:
        raise ConfigError("reduction check requires alpha = 0")
    cfg = scenario.cfg
    u0 = leray_project(scenario.u0)
    w0 = scenario.w0 if scenario.w0 is not None else curl(u0)
    vvv = VvvState(u=u0, w=w0.copy(), t=0.0, params=scenario.params)
    nse = NseState(u=u0.copy(), t=0.0, params=scenario.params)
    max_dev = 0.0
    first_bad = None
    for dt_i in cfg.step_plan():
        vvv = step_vvv(vvv, cfg, dt=dt_i)
        nse = step_nse(nse, cfg, dt=dt_i)
        dev = _coeff_l2(vvv.u.coeffs - nse.u.coeffs)
        if dev > max_dev:
            max_dev = dev
        if dev > tol and first_bad is None:
            first_bad = vvv.t
    return ReductionResult(passed=first_bad is None,
                           max_deviation=max_dev,
                           first_offending_time=first_bad)


# ---------------------------------------------------------------------------
# Temporal refinement of the energy identity


def dt_refinement_energy(scenario: Scenario, dts) -> ConvergenceReport:
    """Energy-identity defect per dt and the fitted temporal order."""
    dts = tuple(float(dt) for dt in dts)
    plan = SweepPlan(scenario=scenario, variable="dt", values=dts,
                     reference="analytic", order_window=(1.8, 2.2))
    sc = scenario
    errors = {"energy_budget_residual": []}
    for dt in dts:
        cfg = replace(sc.cfg, dt=dt, diag_every=1)
        result = run("vvv", sc.u0, sc.params, cfg, w0=sc.w0)
        errors["energy_budget_residual"].append(
            max(rec.energy_budget_residual for rec in result.records))
    return _assemble(plan, errors, notes=())
