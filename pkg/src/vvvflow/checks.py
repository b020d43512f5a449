"""Built-in property suites behind the `check` subcommand.

Fixed seeds, fixed tolerances; any worst case above its tolerance fails
the suite. These are the same identities the test suite asserts, packaged
so a deployed build can be validated without pytest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagnostics import l2_inner, sobolev_norm
from .operators import advect, helmholtz_apply, helmholtz_invert
from .spectral import (
    SpectralScalarField,
    curl,
    divergence,
    gradient,
    leray_project,
    make_grid,
    random_vector_field,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tolerance

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] {self.name}: worst {self.worst:.3e} "
                f"(tolerance {self.tolerance:.0e})")


def _scalar_from(v, i=0) -> SpectralScalarField:
    return SpectralScalarField(v.grid, v.coeffs[i])


def builtin_checks(seeds=range(20), sizes=(16, 32)) -> list[CheckResult]:
    grids = {n: make_grid(n) for n in sizes}
    results = []

    worst = 0.0
    for n, grid in grids.items():
        for seed in seeds:
            v = random_vector_field(grid, seed)
            err = sobolev_norm(divergence(curl(v))) / max(sobolev_norm(v, 2), 1e-300)
            worst = max(worst, err)
    results.append(CheckResult("divergence of curl vanishes", worst, 1e-12))

    worst = 0.0
    for n, grid in grids.items():
        for seed in seeds:
            phi = _scalar_from(random_vector_field(grid, seed + 1000))
            err = sobolev_norm(curl(gradient(phi))) / max(sobolev_norm(phi, 2), 1e-300)
            worst = max(worst, err)
    results.append(CheckResult("curl of gradient vanishes", worst, 1e-12))

    worst = 0.0
    for n, grid in grids.items():
        for seed in seeds:
            v = random_vector_field(grid, seed + 2000)
            once = leray_project(v)
            twice = leray_project(once)
            num = np.sqrt(np.sum(np.abs(twice.coeffs - once.coeffs) ** 2))
            err = num / max(sobolev_norm(v), 1e-300)
            worst = max(worst, err)
            worst = max(worst, sobolev_norm(divergence(once))
                        / max(sobolev_norm(v, 1), 1e-300))
    results.append(CheckResult("Leray projection idempotent and solenoidal",
                               worst, 1e-12))

    worst = 0.0
    for n, grid in grids.items():
        for seed in seeds:
            v = leray_project(random_vector_field(grid, seed + 3000))
            back = helmholtz_apply(helmholtz_invert(v, alpha=0.35), alpha=0.35)
            num = np.sqrt(np.sum(np.abs(back.coeffs - v.coeffs) ** 2))
            worst = max(worst, num / max(sobolev_norm(v), 1e-300))
    results.append(CheckResult("Voigt mass operator round trip", worst, 1e-12))

    worst_cancel = 0.0
    worst_anti = 0.0
    grid = grids[min(sizes)]
    for seed in seeds:
        u = random_vector_field(grid, seed + 4000, solenoidal=True)
        v = random_vector_field(grid, seed + 5000, solenoidal=True)
        w = random_vector_field(grid, seed + 6000, solenoidal=True)
        buv = advect(u, v, project=True)
        buw = advect(u, w, project=True)
        hu, hv, hw = (sobolev_norm(f, 1) for f in (u, v, w))
        worst_cancel = max(worst_cancel,
                           abs(l2_inner(buv, v)) / max(hu * hv * hv, 1e-300))
        worst_anti = max(worst_anti,
                         abs(l2_inner(buv, w) + l2_inner(buw, v))
                         / max(hu * hv * hw, 1e-300))
    results.append(CheckResult("advection cancellation <B(u,v),v> = 0",
                               worst_cancel, 1e-12))
    results.append(CheckResult("advection antisymmetry in the last two slots",
                               worst_anti, 1e-12))
    return results
