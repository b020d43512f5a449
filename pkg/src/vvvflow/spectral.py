"""Fourier representation of mean-zero periodic fields on the unit torus.

Conventions
-----------
All fields live on [0,1]^3 and are expanded as

    f(x) = sum_k fhat(k) exp(2*pi*i k.x)

over integer wavevectors k. Coefficients are stored as full complex arrays
of shape (n, n, n) in DFT wrap-around order along each axis
(0, 1, ..., n/2-1, -n/2, ..., -1), axis order (k1, k2, k3), which makes
snapshots portable. The k=0 coefficient is identically zero (mean-free
fields) and the 2/3-rule dealias mask, |k_j| <= floor(n/3) and k != 0, is
applied whenever coefficients enter the representation. The physical
wavenumber of mode k is 2*pi*k, so the Laplacian multiplier is
-4*pi^2*|k|^2 and the smallest eigenvalue of the Stokes operator on this
grid is 4*pi^2.

Quadratic products are never formed on the native grid. `padded_samples`
and `coeffs_from_padded` move fields to a 3n/2 collocation grid, where
products of retained modes are exactly alias-free, so the discrete
advection identities hold to round-off.

All operations are pure functions of their inputs; nothing here mutates a
field in place.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
from scipy import fft as _fft

from .errors import ConfigError, GridMismatchError, SymmetryError

TWO_PI = 2.0 * np.pi

# Smallest Stokes eigenvalue on the unit torus (|k| = 1 shell).
LAMBDA_1 = 4.0 * np.pi**2

_fft_workers = 1


def set_fft_workers(count: int) -> None:
    """Set the worker count for FFT calls. 0 selects os.cpu_count()."""
    global _fft_workers
    if count < 0:
        raise ConfigError(f"fft worker count must be >= 0, got {count}")
    _fft_workers = count if count > 0 else (os.cpu_count() or 1)


def fft_workers() -> int:
    return _fft_workers


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Wavevector lattice and dealias mask for an n^3 grid on [0,1]^3."""

    n: int
    cutoff: int
    kvec: np.ndarray          # (n,) integer wavenumbers, wrap-around order
    ksq: np.ndarray           # (n,n,n) integer |k|^2
    dealias_mask: np.ndarray  # (n,n,n) bool, True iff mode retained
    lap: np.ndarray           # (n,n,n) float, 4*pi^2*|k|^2
    volume: float = 1.0

    def __eq__(self, other):
        return isinstance(other, GridSpec) and other.n == self.n

    def __hash__(self):
        return hash(self.n)

    def k_along(self, axis: int) -> np.ndarray:
        """Integer wavenumbers broadcast along one 0-based axis."""
        shape = [1, 1, 1]
        shape[axis] = self.n
        return self.kvec.reshape(shape)

    @property
    def retained_mode_count(self) -> int:
        return int(self.dealias_mask.sum())


def make_grid(n: int) -> GridSpec:
    """Build the grid for n points per axis.

    n must be even and at least 8; the dealias cutoff is floor(n/3).
    """
    if n % 2 != 0:
        raise ConfigError(f"grid size must be even, got n={n}")
    if n < 8:
        raise ConfigError(f"grid size must be >= 8, got n={n}")
    kvec = np.rint(np.fft.fftfreq(n) * n).astype(np.int64)
    cutoff = n // 3
    k1 = kvec[:, None, None]
    k2 = kvec[None, :, None]
    k3 = kvec[None, None, :]
    ksq = k1 * k1 + k2 * k2 + k3 * k3
    mask = (
        (np.abs(k1) <= cutoff)
        & (np.abs(k2) <= cutoff)
        & (np.abs(k3) <= cutoff)
        & (ksq > 0)
    )
    lap = (TWO_PI**2) * ksq.astype(np.float64)
    return GridSpec(n=n, cutoff=cutoff, kvec=kvec, ksq=ksq,
                    dealias_mask=mask, lap=lap)


@dataclass
class SpectralScalarField:
    """Complex coefficients of a mean-zero real scalar field."""

    grid: GridSpec
    coeffs: np.ndarray  # (n,n,n) complex128

    def __post_init__(self):
        n = self.grid.n
        if self.coeffs.shape != (n, n, n):
            raise GridMismatchError(
                f"scalar coefficients have shape {self.coeffs.shape}, "
                f"expected {(n, n, n)}"
            )

    def copy(self) -> "SpectralScalarField":
        return SpectralScalarField(self.grid, self.coeffs.copy())


@dataclass
class SpectralVectorField:
    """Three scalar components stored as one (3,n,n,n) coefficient array."""

    grid: GridSpec
    coeffs: np.ndarray  # (3,n,n,n) complex128

    def __post_init__(self):
        n = self.grid.n
        if self.coeffs.shape != (3, n, n, n):
            raise GridMismatchError(
                f"vector coefficients have shape {self.coeffs.shape}, "
                f"expected {(3, n, n, n)}"
            )

    def component(self, i: int) -> SpectralScalarField:
        return SpectralScalarField(self.grid, self.coeffs[i])

    def copy(self) -> "SpectralVectorField":
        return SpectralVectorField(self.grid, self.coeffs.copy())


def zero_scalar(grid: GridSpec) -> SpectralScalarField:
    return SpectralScalarField(grid, np.zeros((grid.n,) * 3, dtype=np.complex128))


def zero_vector(grid: GridSpec) -> SpectralVectorField:
    return SpectralVectorField(grid, np.zeros((3,) + (grid.n,) * 3, dtype=np.complex128))


def require_same_grid(*fields) -> GridSpec:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatchError(
                f"fields on different grids (n={grid.n} vs n={f.grid.n})"
            )
    return grid


# ---------------------------------------------------------------------------
# Transforms


def forward_transform(samples: np.ndarray, grid: GridSpec) -> SpectralScalarField:
    """Collocation samples -> dealiased, mean-free spectral coefficients."""
    n = grid.n
    samples = np.asarray(samples)
    if samples.shape != (n, n, n):
        raise GridMismatchError(
            f"sample array has shape {samples.shape}, expected {(n, n, n)}"
        )
    coeffs = _fft.fftn(samples, workers=_fft_workers) / float(n**3)
    coeffs *= grid.dealias_mask
    return SpectralScalarField(grid, coeffs)


def forward_transform_vector(samples: np.ndarray, grid: GridSpec) -> SpectralVectorField:
    samples = np.asarray(samples)
    if samples.shape != (3, grid.n, grid.n, grid.n):
        raise GridMismatchError(
            f"sample array has shape {samples.shape}, expected "
            f"{(3, grid.n, grid.n, grid.n)}"
        )
    coeffs = _fft.fftn(samples, axes=(1, 2, 3), workers=_fft_workers) / float(grid.n**3)
    coeffs *= grid.dealias_mask
    return SpectralVectorField(grid, coeffs)


_SYMMETRY_RTOL = 1e-12


def _real_samples(coeffs: np.ndarray, n: int) -> np.ndarray:
    """ifft and strip the imaginary residue after checking it is noise."""
    phys = _fft.ifftn(coeffs, axes=(-3, -2, -1), workers=_fft_workers) * float(n**3)
    scale = np.max(np.abs(phys))
    if scale > 0.0:
        residue = np.max(np.abs(phys.imag)) / scale
        if residue > _SYMMETRY_RTOL:
            raise SymmetryError(
                f"imaginary residue {residue:.3e} exceeds {_SYMMETRY_RTOL:.0e}; "
                "coefficients violate conjugate symmetry"
            )
    return np.ascontiguousarray(phys.real)


def inverse_transform(f: SpectralScalarField) -> np.ndarray:
    """Spectral coefficients -> real collocation samples."""
    return _real_samples(f.coeffs, f.grid.n)


def inverse_transform_vector(v: SpectralVectorField) -> np.ndarray:
    return _real_samples(v.coeffs, v.grid.n)


def collocation_points(grid: GridSpec) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Meshgrid of the n^3 collocation points of [0,1)^3."""
    x = np.arange(grid.n) / grid.n
    return np.meshgrid(x, x, x, indexing="ij")


# ---------------------------------------------------------------------------
# Differential operators (all diagonal in Fourier space)


def derivative(f: SpectralScalarField, axis: int) -> SpectralScalarField:
    """Partial derivative along axis 1, 2 or 3."""
    if axis not in (1, 2, 3):
        raise ConfigError(f"axis must be 1, 2 or 3, got {axis}")
    mult = 1j * TWO_PI * f.grid.k_along(axis - 1)
    return SpectralScalarField(f.grid, f.coeffs * mult)


def gradient(f: SpectralScalarField) -> SpectralVectorField:
    grid = f.grid
    out = np.empty((3,) + f.coeffs.shape, dtype=np.complex128)
    for j in range(3):
        out[j] = f.coeffs * (1j * TWO_PI * grid.k_along(j))
    return SpectralVectorField(grid, out)


def curl(v: SpectralVectorField) -> SpectralVectorField:
    """Spectral curl, (i 2 pi k) x vhat per mode."""
    grid = v.grid
    ik = [1j * TWO_PI * grid.k_along(j) for j in range(3)]
    c = v.coeffs
    out = np.stack([
        ik[1] * c[2] - ik[2] * c[1],
        ik[2] * c[0] - ik[0] * c[2],
        ik[0] * c[1] - ik[1] * c[0],
    ])
    return SpectralVectorField(grid, out)


def divergence(v: SpectralVectorField) -> SpectralScalarField:
    grid = v.grid
    out = np.zeros(v.coeffs.shape[1:], dtype=np.complex128)
    for j in range(3):
        out += v.coeffs[j] * (1j * TWO_PI * grid.k_along(j))
    return SpectralScalarField(grid, out)


def laplacian(f):
    """Laplacian of a scalar or vector field (multiplier -4*pi^2*|k|^2)."""
    if isinstance(f, SpectralScalarField):
        return SpectralScalarField(f.grid, f.coeffs * (-f.grid.lap))
    if isinstance(f, SpectralVectorField):
        return SpectralVectorField(f.grid, f.coeffs * (-f.grid.lap))
    raise TypeError(f"expected a spectral field, got {type(f).__name__}")


def project_coeffs(coeffs: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Leray projection of raw (3,n,n,n) coefficients onto solenoidal fields."""
    k = [grid.k_along(j).astype(np.float64) for j in range(3)]
    kdotv = k[0] * coeffs[0] + k[1] * coeffs[1] + k[2] * coeffs[2]
    ksq = grid.ksq.astype(np.float64)
    ksq_safe = np.where(grid.ksq == 0, 1.0, ksq)
    factor = kdotv / ksq_safe
    out = np.stack([coeffs[j] - k[j] * factor for j in range(3)])
    return out


def leray_project(v: SpectralVectorField) -> SpectralVectorField:
    """Orthogonal projection onto divergence-free, mean-free fields."""
    return SpectralVectorField(v.grid, project_coeffs(v.coeffs, v.grid))


def stokes_apply(v: SpectralVectorField) -> SpectralVectorField:
    """Stokes operator: Leray projection followed by the negative Laplacian."""
    projected = project_coeffs(v.coeffs, v.grid)
    return SpectralVectorField(v.grid, projected * v.grid.lap)


# ---------------------------------------------------------------------------
# Alias-free products on the 3n/2 padded grid


def dealias_pad_size(n: int) -> int:
    return (3 * n) // 2


def padded_samples(coeffs: np.ndarray, grid: GridSpec, m: int | None = None) -> np.ndarray:
    """Real samples of the field on the zero-padded m^3 collocation grid.

    Accepts any (..., n, n, n) coefficient array. Conjugate symmetry is
    assumed, the imaginary part is discarded without the public-transform
    residue check since this is the hot path of the nonlinear terms.
    """
    n = grid.n
    if m is None:
        m = dealias_pad_size(n)
    ix = (grid.kvec % m).astype(np.intp)
    big = np.zeros(coeffs.shape[:-3] + (m, m, m), dtype=np.complex128)
    big[..., ix[:, None, None], ix[None, :, None], ix[None, None, :]] = coeffs
    phys = _fft.ifftn(big, axes=(-3, -2, -1), workers=_fft_workers)
    return phys.real * float(m**3)


def coeffs_from_padded(samples: np.ndarray, grid: GridSpec, m: int | None = None) -> np.ndarray:
    """Transform padded-grid samples back and restrict to retained modes."""
    n = grid.n
    if m is None:
        m = dealias_pad_size(n)
    big = _fft.fftn(samples, axes=(-3, -2, -1), workers=_fft_workers) / float(m**3)
    ix = (grid.kvec % m).astype(np.intp)
    out = big[..., ix[:, None, None], ix[None, :, None], ix[None, None, :]]
    return out * grid.dealias_mask


# ---------------------------------------------------------------------------
# Random fields (tests and seeded initial data)


def random_vector_field(grid: GridSpec, seed: int, cutoff: int | None = None,
                        amplitude: float = 1.0, solenoidal: bool = False) -> SpectralVectorField:
    """Seeded random band-limited field, normalized to the given L2 amplitude.

    Modes with any |k_j| above `cutoff` (default: the dealias cutoff) are
    removed after the transform, so the field is smooth by construction.
    """
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((3, grid.n, grid.n, grid.n))
    field = forward_transform_vector(samples, grid)
    coeffs = field.coeffs
    if cutoff is not None:
        keep = (
            (np.abs(grid.k_along(0)) <= cutoff)
            & (np.abs(grid.k_along(1)) <= cutoff)
            & (np.abs(grid.k_along(2)) <= cutoff)
        )
        coeffs = coeffs * keep
    if solenoidal:
        coeffs = project_coeffs(coeffs, grid)
    norm = np.sqrt(np.sum(np.abs(coeffs) ** 2))
    if norm > 0.0:
        coeffs = coeffs * (amplitude / norm)
    return SpectralVectorField(grid, coeffs)
