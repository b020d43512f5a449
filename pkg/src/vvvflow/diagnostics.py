"""Norms, the energy budget, divergence decay and the blow-up indicator.

Norms are computed spectrally (Parseval); on mean-free fields the
homogeneous Sobolev weight (4 pi^2 |k|^2)^s is equivalent to the full norm.
The energy budget tracks the defect of

    a^2 |grad u(t)|^2 + |u(t)|^2 + 2 nu int_0^t |grad u|^2
        = a^2 |grad u0|^2 + |u0|^2 + 2 int_0^t (u, f)

with trapezoid time integrals at the sampling cadence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .operators import ModelParams
from .spectral import SpectralScalarField, SpectralVectorField, curl, divergence


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Per-sample scalar diagnostics of a run."""

    t: float
    l2_u: float
    h1_u: float
    l2_w: float
    h1_w: float
    div_w_l2: float
    curl_mismatch_l2: float
    curl_mismatch_h1: float
    energy_budget_residual: float
    blow_up_indicator: float
    pressure_reconstructed: bool = False


def sobolev_norm(f, s: int = 0) -> float:
    """Homogeneous H^s norm, (sum (4 pi^2 |k|^2)^s |fhat|^2)^(1/2), s in 0..4."""
    if s not in (0, 1, 2, 3, 4):
        raise ConfigError(f"sobolev order must be an integer in 0..4, got {s}")
    if not isinstance(f, (SpectralScalarField, SpectralVectorField)):
        raise TypeError(f"expected a spectral field, got {type(f).__name__}")
    weight = f.grid.lap ** s if s > 0 else 1.0
    return float(np.sqrt(np.sum(weight * np.abs(f.coeffs) ** 2)))


def l2_inner(a, b) -> float:
    """L2 inner product of two real fields, evaluated spectrally."""
    if a.grid != b.grid:
        raise ConfigError("inner product of fields on different grids")
    return float(np.sum(a.coeffs * np.conj(b.coeffs)).real)


def _coeff_l2(coeffs: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))


def _coeff_h1(coeffs: np.ndarray, lap: np.ndarray) -> float:
    return float(np.sqrt(np.sum(lap * np.abs(coeffs) ** 2)))


class EnergyBudget:
    """Streaming defect of the momentum energy identity.

    Feed uniformly or nonuniformly sampled states through `update`; the
    running residual and its maximum over the samples are exposed as
    attributes.
    """

    def __init__(self, params: ModelParams, u0: SpectralVectorField):
        self._params = params
        self._lap = u0.grid.lap
        self._initial = self._energy(u0.coeffs)
        self._t = 0.0
        self._grad_sq = self._grad_sq_of(u0.coeffs)
        self._force = self._force_of(0.0, u0)
        self._visc_integral = 0.0
        self._force_integral = 0.0
        self.residual = 0.0
        self.max_residual = 0.0

    def _energy(self, coeffs: np.ndarray) -> float:
        a2 = self._params.alpha**2
        return float(np.sum((1.0 + a2 * self._lap) * np.abs(coeffs) ** 2))

    def _grad_sq_of(self, coeffs: np.ndarray) -> float:
        return float(np.sum(self._lap * np.abs(coeffs) ** 2))

    def _force_of(self, t: float, u: SpectralVectorField) -> float:
        if self._params.forcing is None:
            return 0.0
        f = self._params.forcing.momentum_at(t)
        return float(np.sum(u.coeffs * np.conj(f)).real)

    def update(self, t: float, u: SpectralVectorField) -> float:
        dt = t - self._t
        if dt < 0.0:
            raise ConfigError("energy budget samples must be time ordered")
        grad_sq = self._grad_sq_of(u.coeffs)
        force = self._force_of(t, u)
        self._visc_integral += 0.5 * dt * (self._grad_sq + grad_sq)
        self._force_integral += 0.5 * dt * (self._force + force)
        self._t, self._grad_sq, self._force = t, grad_sq, force
        lhs = self._energy(u.coeffs) + 2.0 * self._params.nu * self._visc_integral
        rhs = self._initial + 2.0 * self._force_integral
        self.residual = abs(lhs - rhs)
        self.max_residual = max(self.max_residual, self.residual)
        return self.residual


def energy_budget_residual(samples, params: ModelParams) -> float:
    """Max energy-identity defect over a sampled trajectory.

    `samples` is a sequence of (t, u) pairs starting at the initial state;
    fewer than two samples is an error.
    """
    samples = list(samples)
    if len(samples) < 2:
        raise ConfigError("energy budget needs at least 2 trajectory samples")
    t0, u0 = samples[0]
    if abs(t0) > 0.0:
        raise ConfigError("first sample must be the initial state at t=0")
    budget = EnergyBudget(params, u0)
    for t, u in samples[1:]:
        budget.update(t, u)
    return budget.max_residual


def curl_mismatch(state) -> tuple[float, float]:
    """L2 and H1 norms of w - curl u for a coupled state."""
    diff = state.w.coeffs - curl(state.u).coeffs
    lap = state.u.grid.lap
    return _coeff_l2(diff), _coeff_h1(diff, lap)


def blow_up_indicator(state) -> float:
    """alpha |grad u|; a positive floor as alpha -> 0 would flag a singularity."""
    alpha = getattr(state.params, "alpha", 0.0)
    if not hasattr(state, "w"):
        return 0.0
    return alpha * _coeff_h1(state.u.coeffs, state.u.grid.lap)


def divergence_decay_rate(times, values) -> float:
    """Least-squares slope of log(values) against time.

    Samples at or below the round-off floor, 1e-12 of the initial value,
    are truncated from the fit window; an entirely nonpositive series is an
    error. Returns the fitted exponential rate (negative for decay).
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise ConfigError("times and values must be 1-d arrays of equal length")
    if len(times) < 10:
        raise ConfigError(f"decay fit needs >= 10 samples, got {len(times)}")
    if not (values > 0.0).any():
        raise ConfigError("decay fit needs at least one positive sample")
    floor = 1e-12 * values[values > 0.0][0]
    bad = np.nonzero(values <= floor)[0]
    end = bad[0] if len(bad) else len(values)
    if end < 2:
        raise ConfigError("decay fit window has fewer than 2 usable samples")
    t, v = times[:end], values[:end]
    slope, _ = np.polyfit(t, np.log(v), 1)
    return float(slope)


def make_record(state, energy_budget_residual: float = 0.0,
                pressure_reconstructed: bool = False) -> DiagnosticsRecord:
    """Assemble the diagnostics row for a state snapshot."""
    lap = state.u.grid.lap
    l2_u = _coeff_l2(state.u.coeffs)
    h1_u = _coeff_h1(state.u.coeffs, lap)
    if hasattr(state, "w"):
        w_coeffs = state.w.coeffs
        mis_l2, mis_h1 = curl_mismatch(state)
        indicator = state.params.alpha * h1_u
    else:
        w_coeffs = curl(state.u).coeffs
        mis_l2 = mis_h1 = 0.0
        indicator = 0.0
    div_w = _coeff_l2(divergence(SpectralVectorField(state.u.grid, w_coeffs)).coeffs)
    rec = DiagnosticsRecord(
        t=state.t,
        l2_u=l2_u,
        h1_u=h1_u,
        l2_w=_coeff_l2(w_coeffs),
        h1_w=_coeff_h1(w_coeffs, lap),
        div_w_l2=div_w,
        curl_mismatch_l2=mis_l2,
        curl_mismatch_h1=mis_h1,
        energy_budget_residual=energy_budget_residual,
        blow_up_indicator=indicator,
        pressure_reconstructed=pressure_reconstructed,
    )
    for name in ("l2_u", "h1_u", "l2_w", "h1_w"):
        if not np.isfinite(getattr(rec, name)):
            raise ConfigError(f"non-finite diagnostic {name} at t={state.t}")
    return rec
