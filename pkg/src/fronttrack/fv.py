"""First-order upwind finite volume scheme.

For strictly increasing fluxes the Godunov, Engquist-Osher and upwind
numerical fluxes coincide: the flux through a cell face is the flux of the
cell on its left.  Each cell uses the flux of the subdomain containing its
center, so the interface coupling is carried by the face flux alone.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence, Union

import numpy as np

from fronttrack.errors import ConfigurationError
from fronttrack.flux import SpatialFlux
from fronttrack.piecewise import PiecewiseConstantFn, cell_averages, cell_edges
from fronttrack.tracking import adapted_hulls

CFL_SLACK = 1e-12


@dataclass(frozen=True)
class FVGrid:
    sf: SpatialFlux
    domain: tuple[float, float]
    n_cells: int
    lam: float
    values: np.ndarray
    ghost: float
    lipschitz: float
    time: float = 0.0

    @property
    def dx(self) -> float:
        return (self.domain[1] - self.domain[0]) / self.n_cells

    @property
    def dt(self) -> float:
        return self.lam * self.dx

    @property
    def centers(self) -> np.ndarray:
        e = cell_edges(self.domain, self.n_cells)
        return 0.5 * (e[1:] + e[:-1])

    def regions(self) -> np.ndarray:
        return np.searchsorted(np.asarray(self.sf.interfaces), self.centers, side="right")

    def mass(self) -> float:
        return float(np.sum(self.values) * self.dx)

    def to_function(self) -> PiecewiseConstantFn:
        e = cell_edges(self.domain, self.n_cells)
        return PiecewiseConstantFn(e[1:-1], self.values)


def _region_fluxes(sf: SpatialFlux, regions: np.ndarray, u: np.ndarray) -> np.ndarray:
    out = np.empty_like(u)
    for i, f in enumerate(sf.fluxes):
        mask = regions == i
        if np.any(mask):
            out[mask] = f(u[mask])
    return out


def max_lipschitz(sf: SpatialFlux, lo: float, hi: float) -> float:
    """Largest flux slope over the states reachable from data in ``[lo, hi]``."""
    best = 0.0
    for f, (a, b) in zip(sf.fluxes, adapted_hulls(sf, lo, hi)):
        u = np.linspace(a, b, 2001)
        best = max(best, float(np.max(np.abs(f.deriv(u)))))
    return best


def make_grid(sf: SpatialFlux, u0: Union[Callable, PiecewiseConstantFn],
              n_cells: int, lam: float, domain: Sequence[float] = (-1.0, 1.0)) -> FVGrid:
    values = cell_averages(u0, domain, n_cells)
    lip = max_lipschitz(sf, float(values.min()), float(values.max()))
    grid = FVGrid(sf, (float(domain[0]), float(domain[1])), n_cells, float(lam),
                  values, float(values[0]), lip)
    check_cfl(grid)
    return grid


def check_cfl(grid: FVGrid, lam: float | None = None) -> None:
    lam = grid.lam if lam is None else lam
    if lam <= 0 or lam * grid.lipschitz > 1.0 + CFL_SLACK:
        raise ConfigurationError(
            f"CFL violated: lambda={lam} times max flux slope {grid.lipschitz:.6g} exceeds 1"
        )


def boundary_fluxes(grid: FVGrid) -> tuple[float, float]:
    """Inflow flux through the left boundary and outflow through the right."""
    sf = grid.sf
    x_left = grid.domain[0] - 0.5 * grid.dx
    f_in = float(sf.flux_at(x_left)(grid.ghost))
    f_out = float(sf.flux_at(grid.centers[-1])(grid.values[-1]))
    return f_in, f_out


def fv_step(grid: FVGrid, lam: float | None = None) -> FVGrid:
    """One upwind step ``u_j -= lam * (F_j - F_{j-1})``.

    The ghost cell left of the domain holds the constant left tail of the
    data; the right boundary is pure outflow.
    """
    lam = grid.lam if lam is None else lam
    check_cfl(grid, lam)
    u = grid.values
    F = _region_fluxes(grid.sf, grid.regions(), u)
    f_in, _ = boundary_fluxes(grid)
    Fm = np.empty_like(F)
    Fm[0] = f_in
    Fm[1:] = F[:-1]
    new = u - lam * (F - Fm)
    return replace(grid, values=new, time=grid.time + lam * grid.dx)


def fv_solve(sf: SpatialFlux, u0: Union[Callable, PiecewiseConstantFn], n_cells: int,
             lam: float, T: float, domain: Sequence[float] = (-1.0, 1.0)
             ) -> PiecewiseConstantFn:
    """March to ``T``; the last step is shortened to land on ``T`` exactly."""
    grid = make_grid(sf, u0, n_cells, lam, domain)
    return fv_march(grid, T).to_function()


def fv_march(grid: FVGrid, T: float) -> FVGrid:
    regions = grid.regions()
    u = grid.values.copy()
    dx = grid.dx
    f_in, _ = boundary_fluxes(grid)
    n_full = int(np.floor(T / grid.dt + 1e-12))
    lam = grid.lam
    F = np.empty_like(u)
    for _ in range(n_full):
        F = _region_fluxes(grid.sf, regions, u)
        u[1:] -= lam * (F[1:] - F[:-1])
        u[0] -= lam * (F[0] - f_in)
    t = n_full * grid.dt
    rest = T - t
    if rest > 1e-14 * max(1.0, T):
        lam_r = rest / dx
        F = _region_fluxes(grid.sf, regions, u)
        u[1:] -= lam_r * (F[1:] - F[:-1])
        u[0] -= lam_r * (F[0] - f_in)
    return replace(grid, values=u, time=float(T))
