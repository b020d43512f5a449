"""Model parameters, Voigt mass inversion and the alias-free nonlinear terms.

The momentum equation is advanced in rotational form, so its nonlinear term
is the Leray-projected cross product of the vorticity variable with the
velocity. The vorticity-dynamics equation carries the unprojected advective
combination -(u.grad)w + (w.grad)u and the unprojected Laplacian, which
keeps the divergence of w dynamically meaningful instead of enforcing it.

Every product is evaluated on the 3n/2 padded grid (see `spectral`), so the
discrete antisymmetry and cancellation identities of the advection operator
hold to round-off and curl commutes exactly with the momentum nonlinearity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError
from .spectral import (
    GridSpec,
    SpectralVectorField,
    SpectralScalarField,
    TWO_PI,
    coeffs_from_padded,
    curl,
    divergence,
    leray_project,
    padded_samples,
    project_coeffs,
    require_same_grid,
)

__all__ = [
    "Forcing",
    "ModelParams",
    "leray_project",
    "helmholtz_invert",
    "helmholtz_apply",
    "cross_term",
    "advect",
    "nonlinear_terms",
    "vvv_momentum_rhs",
    "vorticity_rhs",
    "reconstruct_pressure",
]


class Forcing:
    """Body force, ingested once.

    The solenoidal part and the curl are precomputed spectrally. A scalar
    modulation m(t) multiplies both; None means a steady force.
    """

    def __init__(self, field: SpectralVectorField,
                 modulation: Callable[[float], float] | None = None):
        self.grid = field.grid
        self.modulation = modulation
        # Mean-zero by construction: the dealias mask excludes k=0.
        raw = field.coeffs * field.grid.dealias_mask
        self.raw_coeffs = raw
        self.momentum_coeffs = project_coeffs(raw, field.grid)
        self.curl_coeffs = curl(SpectralVectorField(field.grid, raw)).coeffs

    def factor(self, t: float) -> float:
        return 1.0 if self.modulation is None else float(self.modulation(t))

    def momentum_at(self, t: float) -> np.ndarray:
        return self.momentum_coeffs * self.factor(t)

    def curl_at(self, t: float) -> np.ndarray:
        return self.curl_coeffs * self.factor(t)

    def raw_at(self, t: float) -> np.ndarray:
        return self.raw_coeffs * self.factor(t)


def cosine_modulation(omega: float) -> Callable[[float], float]:
    return lambda t: float(np.cos(omega * t))


@dataclass(frozen=True)
class ModelParams:
    """Viscosity, Voigt length and forcing for one model run."""

    nu: float = 1.0
    alpha: float = 0.0
    forcing: Forcing | None = None
    disable_advection: bool = False  # pure Stokes dynamics, used by tests

    def __post_init__(self):
        if not self.nu > 0.0:
            raise ConfigError(f"viscosity nu must be > 0, got {self.nu}")
        if self.alpha < 0.0:
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}")


# ---------------------------------------------------------------------------
# Fourier-diagonal operators


def helmholtz_apply(v: SpectralVectorField, alpha: float) -> SpectralVectorField:
    """Apply I + alpha^2 A, mode-wise multiplication by 1 + alpha^2 4pi^2|k|^2."""
    return SpectralVectorField(v.grid, v.coeffs * (1.0 + alpha**2 * v.grid.lap))


def helmholtz_invert(v: SpectralVectorField, alpha: float) -> SpectralVectorField:
    """Invert I + alpha^2 A on mean-free fields; alpha=0 is the identity."""
    if alpha < 0.0:
        raise ConfigError(f"alpha must be >= 0, got {alpha}")
    return SpectralVectorField(v.grid, v.coeffs / (1.0 + alpha**2 * v.grid.lap))


# ---------------------------------------------------------------------------
# Nonlinear terms


def cross_term(w: SpectralVectorField, u: SpectralVectorField) -> SpectralVectorField:
    """Leray-projected pointwise cross product P(w x u), alias-free."""
    grid = require_same_grid(w, u)
    wp = padded_samples(w.coeffs, grid)
    up = padded_samples(u.coeffs, grid)
    prod = np.stack([
        wp[1] * up[2] - wp[2] * up[1],
        wp[2] * up[0] - wp[0] * up[2],
        wp[0] * up[1] - wp[1] * up[0],
    ])
    coeffs = coeffs_from_padded(prod, grid)
    return SpectralVectorField(grid, project_coeffs(coeffs, grid))


_DIV_RTOL = 1e-10


def _require_solenoidal(u: SpectralVectorField) -> None:
    div_norm = np.sqrt(np.sum(np.abs(divergence(u).coeffs) ** 2))
    scale = np.sqrt(np.sum(u.grid.lap * np.abs(u.coeffs) ** 2))
    if div_norm > _DIV_RTOL * max(scale, 1e-300):
        raise ConfigError(
            f"advecting field is not solenoidal: |div u| = {div_norm:.3e} "
            f"exceeds {_DIV_RTOL:.0e} relative to |u|_H1 = {scale:.3e}"
        )


def advect(u: SpectralVectorField, v: SpectralVectorField,
           project: bool = False) -> SpectralVectorField:
    """Dealiased advection (u.grad)v, optionally Leray-projected.

    u must be solenoidal; v is arbitrary (it need not be divergence-free).
    """
    grid = require_same_grid(u, v)
    _require_solenoidal(u)
    up = padded_samples(u.coeffs, grid)
    ik = [1j * TWO_PI * grid.k_along(j) for j in range(3)]
    grad_v = np.stack([v.coeffs * ik[j] for j in range(3)])  # (3 deriv, 3 comp, ...)
    gp = padded_samples(grad_v, grid)
    adv = np.einsum("jxyz,jcxyz->cxyz", up, gp)
    coeffs = coeffs_from_padded(adv, grid)
    if project:
        coeffs = project_coeffs(coeffs, grid)
    return SpectralVectorField(grid, coeffs)


def nonlinear_terms(u: SpectralVectorField, w: SpectralVectorField) -> tuple[np.ndarray, np.ndarray]:
    """Both nonlinear terms from one set of padded products.

    Returns raw coefficient arrays (cross, wadv) with

        cross = P(w x u)
        wadv  = -(u.grad)w + (w.grad)u   (unprojected)

    computed from the nine pointwise products u_a w_b plus (div w) u. The
    advective contractions use the conservative form, exact here because u
    is spectrally solenoidal and the padded products are alias-free.
    """
    grid = require_same_grid(u, w)
    up = padded_samples(u.coeffs, grid)
    wp = padded_samples(w.coeffs, grid)
    divw_p = padded_samples(divergence(w).coeffs, grid)

    prods = up[:, None] * wp[None, :]          # prods[a, b] = u_a w_b
    t_hat = coeffs_from_padded(prods, grid)    # (3, 3, n, n, n)
    divw_u_hat = coeffs_from_padded(divw_p * up, grid)

    cross = np.stack([
        t_hat[2, 1] - t_hat[1, 2],
        t_hat[0, 2] - t_hat[2, 0],
        t_hat[1, 0] - t_hat[0, 1],
    ])
    cross = project_coeffs(cross, grid)

    ik = [1j * TWO_PI * grid.k_along(j) for j in range(3)]
    wadv = np.empty_like(cross)
    for i in range(3):
        acc = np.zeros_like(t_hat[0, 0])
        for j in range(3):
            acc += ik[j] * (t_hat[i, j] - t_hat[j, i])
        wadv[i] = acc - divw_u_hat[i]
    return cross, wadv


# ---------------------------------------------------------------------------
# Right-hand sides of the coupled system


def vvv_momentum_rhs(u: SpectralVectorField, w: SpectralVectorField,
                     params: ModelParams, t: float = 0.0) -> SpectralVectorField:
    """P f - nu A u - P(w x u), the evolution of (I + alpha^2 A)u.

    Pressure is eliminated by the projection; the returned field is the
    right-hand side before inversion of the Voigt mass operator.
    """
    grid = require_same_grid(u, w)
    rhs = -params.nu * grid.lap * u.coeffs
    if not params.disable_advection:
        cross, _ = nonlinear_terms(u, w)
        rhs = rhs - cross
    if params.forcing is not None:
        rhs = rhs + params.forcing.momentum_at(t)
    return SpectralVectorField(grid, rhs)


def vorticity_rhs(u: SpectralVectorField, w: SpectralVectorField,
                  params: ModelParams, t: float = 0.0) -> SpectralVectorField:
    """curl f + nu Lap w - (u.grad)w + (w.grad)u, unprojected.

    The Laplacian is applied without projection so that the divergence of w
    obeys its own advection-diffusion decay law instead of being imposed.
    """
    grid = require_same_grid(u, w)
    rhs = -params.nu * grid.lap * w.coeffs
    if not params.disable_advection:
        _, wadv = nonlinear_terms(u, w)
        rhs = rhs + wadv
    if params.forcing is not None:
        rhs = rhs + params.forcing.curl_at(t)
    return SpectralVectorField(grid, rhs)


def reconstruct_pressure(u: SpectralVectorField, w: SpectralVectorField,
                         params: ModelParams, t: float = 0.0) -> SpectralScalarField:
    """Bernoulli pressure, mode-wise solve of grad p = (I - P)(f - w x u)."""
    grid = require_same_grid(u, w)
    wp = padded_samples(w.coeffs, grid)
    up = padded_samples(u.coeffs, grid)
    raw = np.stack([
        wp[1] * up[2] - wp[2] * up[1],
        wp[2] * up[0] - wp[0] * up[2],
        wp[0] * up[1] - wp[1] * up[0],
    ])
    h = -coeffs_from_padded(raw, grid)
    if params.forcing is not None:
        h = h + params.forcing.raw_at(t)
    k = [grid.k_along(j).astype(np.float64) for j in range(3)]
    kdoth = k[0] * h[0] + k[1] * h[1] + k[2] * h[2]
    ksq = np.where(grid.ksq == 0, 1, grid.ksq).astype(np.float64)
    p = kdoth / (1j * TWO_PI * ksq)
    p *= grid.dealias_mask
    return SpectralScalarField(grid, p)
