"""Independent reference computations used to freeze expected test values.

Nothing here goes through the package's padded-product or stepping code:
fields are evaluated by explicit mode summation, derivatives by finite
differences or symbolic differentiation, and trajectories by a high-order
adaptive integrator.
"""

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

from vvvflow.operators import nonlinear_terms
from vvvflow.spectral import SpectralVectorField


def evaluate_scalar_modes(coeffs: np.ndarray, kvec: np.ndarray, m: int) -> np.ndarray:
    """Brute-force collocation of one scalar field on an m^3 grid."""
    x = np.arange(m) / m
    basis = np.exp(2j * np.pi * np.outer(x, kvec))  # (m, n)
    t = np.einsum("xa,abc->xbc", basis, coeffs)
    t = np.einsum("yb,xbc->xyc", basis, t)
    t = np.einsum("zc,xyc->xyz", basis, t)
    assert np.max(np.abs(t.imag)) <= 1e-10 * max(np.max(np.abs(t.real)), 1e-300)
    return t.real


def evaluate_vector_modes(coeffs: np.ndarray, kvec: np.ndarray, m: int) -> np.ndarray:
    return np.stack([evaluate_scalar_modes(coeffs[i], kvec, m) for i in range(3)])


def taylor_green_curl_symbolic(points):
    """curl of the Taylor-Green field via symbolic differentiation."""
    x, y, z = sp.symbols("x y z")
    u = (
        sp.sin(2 * sp.pi * x) * sp.cos(2 * sp.pi * y) * sp.cos(2 * sp.pi * z),
        -sp.cos(2 * sp.pi * x) * sp.sin(2 * sp.pi * y) * sp.cos(2 * sp.pi * z),
        sp.Integer(0),
    )
    curl_expr = (
        sp.diff(u[2], y) - sp.diff(u[1], z),
        sp.diff(u[0], z) - sp.diff(u[2], x),
        sp.diff(u[1], x) - sp.diff(u[0], y),
    )
    funcs = [sp.lambdify((x, y, z), c, "numpy") for c in curl_expr]
    xs, ys, zs = points
    return np.stack([np.broadcast_to(f(xs, ys, zs), xs.shape).astype(float)
                     for f in funcs])


def finite_difference_derivative(samples: np.ndarray, axis: int, order: int = 8) -> np.ndarray:
    """Periodic central finite differences on unit-spacing-1/n samples."""
    n = samples.shape[axis]
    h = 1.0 / n
    if order == 8:
        stencil = [(1, 4 / 5), (2, -1 / 5), (3, 4 / 105), (4, -1 / 280)]
    else:
        stencil = [(1, 1 / 2)]
    out = np.zeros_like(samples)
    for shift, weight in stencil:
        out += weight * (np.roll(samples, -shift, axis=axis)
                         - np.roll(samples, shift, axis=axis))
    return out / h


def integrate_galerkin(u0, w0, params, t_end, rtol=1e-10, atol=1e-12):
    """High-order adaptive integration of the truncated mode system."""
    grid = u0.grid
    lam = grid.lap
    mass = 1.0 + params.alpha**2 * lam
    shape = u0.coeffs.shape

    def pack(uc, wc):
        return np.concatenate([uc.view(np.float64).ravel(),
                               wc.view(np.float64).ravel()])

    def unpack(y):
        half = y.size // 2
        uc = y[:half].view(np.complex128).reshape(shape)
        wc = y[half:].view(np.complex128).reshape(shape)
        return uc, wc

    def rhs(t, y):
        uc, wc = unpack(y)
        u = SpectralVectorField(grid, uc.copy())
        w = SpectralVectorField(grid, wc.copy())
        cross, wadv = nonlinear_terms(u, w)
        f_mom = f_curl = 0.0
        if params.forcing is not None:
            f_mom = params.forcing.momentum_at(t)
            f_curl = params.forcing.curl_at(t)
        dudt = (-params.nu * lam * uc - cross + f_mom) / mass
        dwdt = -params.nu * lam * wc + wadv + f_curl
        return pack(dudt, dwdt)

    sol = solve_ivp(rhs, (0.0, t_end), pack(u0.coeffs, w0.coeffs),
                    method="DOP853", rtol=rtol, atol=atol, t_eval=[t_end])
    assert sol.success
    return unpack(sol.y[:, -1])
