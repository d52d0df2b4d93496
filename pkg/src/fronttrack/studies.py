"""Study runners built on top of the front tracking and FV solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from fronttrack.errors import ConfigurationError
from fronttrack.experiments import ExperimentConfig
from fronttrack.flux import MonotoneFlux, SpatialFlux, perturbed_flux
from fronttrack.fv import fv_solve
from fronttrack.piecewise import PiecewiseConstantFn, l1_distance
from fronttrack.tracking import front_tracking_solve, n_cells_for

DEFAULT_N_LIST = (16, 32, 64, 128, 256, 512, 1024)
DEFAULT_EPS_LIST = (1e-1, 1e-2, 1e-3, 1e-4)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    delta: float
    error: float
    ooc: Optional[float]


def observed_orders(errors: Sequence[float]) -> list[Optional[float]]:
    """``log2(e_n / e_2n)`` against the previous row; ``None`` for the first."""
    out: list[Optional[float]] = [None]
    for prev, cur in zip(errors, errors[1:]):
        out.append(math.log2(prev / cur) if prev > 0 and cur > 0 else math.nan)
    return out


def ft_solution(cfg: ExperimentConfig, delta: float) -> PiecewiseConstantFn:
    return front_tracking_solve(
        cfg.spatial_flux(), cfg.initial_datum(), delta, cfg.end_time, cfg.domain
    )


def reference_solution(cfg: ExperimentConfig) -> PiecewiseConstantFn:
    return ft_solution(cfg, cfg.delta_for(cfg.reference_n))


def run_convergence_study(cfg: ExperimentConfig, n_list: Sequence[int] = DEFAULT_N_LIST,
                          reference: Optional[PiecewiseConstantFn] = None
                          ) -> list[ConvergenceRow]:
    """L1 errors against a fine front tracking reference, with OOC."""
    n_list = sorted(n_list)
    if reference is None:
        if cfg.reference_n <= max(n_list):
            raise ConfigurationError(
                f"reference resolution {cfg.reference_n} must exceed max n {max(n_list)}"
            )
        reference = reference_solution(cfg)
    window = cfg.error_window
    errors = [l1_distance(ft_solution(cfg, cfg.delta_for(n)), reference, window) for n in n_list]
    return [
        ConvergenceRow(n, cfg.delta_for(n), e, o)
        for n, e, o in zip(n_list, errors, observed_orders(errors))
    ]


def fit_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def convergence_rate(rows: Sequence[ConvergenceRow]) -> float:
    return fit_slope([r.delta for r in rows], [r.error for r in rows])


# {{{ stability

def coefficient_family(fluxes: Sequence[MonotoneFlux]) -> Callable[[float], MonotoneFlux]:
    """``k -> f(k, .)`` interpolating linearly between consecutive fluxes,
    so that ``f(i, .)`` is the ``i``-th subdomain flux (linear extrapolation
    outside ``[0, N]``)."""
    fluxes = list(fluxes)
    if len(fluxes) == 1:
        return lambda k: fluxes[0]

    def family(k: float) -> MonotoneFlux:
        m = min(max(int(math.floor(k)), 0), len(fluxes) - 2)
        th = float(k - m)
        if th == 0.0:
            return fluxes[m]
        if th == 1.0:
            return fluxes[m + 1]
        a, b = fluxes[m], fluxes[m + 1]
        return MonotoneFlux(
            name=f"({1 - th:g})*{a.name}+({th:g})*{b.name}",
            fn=lambda u: (1 - th) * a.fn(u) + th * b.fn(u),
            deriv=lambda u: (1 - th) * a.deriv(u) + th * b.deriv(u),
        )
    return family


def unit_bump(center: float, width: float = 0.1) -> Callable:
    """Gaussian of unit mass."""
    sharp = 1.0 / width ** 2

    def phi(x):
        return np.sqrt(sharp / np.pi) * np.exp(-sharp * (np.asarray(x) - center) ** 2)
    return phi


def perturbed_problem(cfg: ExperimentConfig, mode: str, eps: float
                      ) -> tuple[SpatialFlux, Callable, float]:
    """The perturbed problem for one ``eps`` as ``(flux, datum, size)``.

    ``flux``: every subdomain flux ``f -> f + eps * u``;
    ``coefficient``: ``k_i -> k_i + eps`` in :func:`coefficient_family`;
    ``datum``: ``u0 -> u0 + eps * phi`` with ``phi`` a unit-mass bump.
    """
    sf = cfg.spatial_flux()
    u0 = cfg.initial_datum()
    if mode == "flux":
        return sf.with_fluxes(perturbed_flux(f, eps) for f in sf.fluxes), u0, abs(eps)
    if mode == "coefficient":
        fam = coefficient_family(sf.fluxes)
        ks = [i + eps for i in range(sf.n_subdomains)]
        pert = SpatialFlux(sf.interfaces, tuple(fam(k) for k in ks), tuple(ks))
        return pert, u0, abs(eps)
    if mode == "datum":
        a, b = cfg.domain
        phi = unit_bump(a + 0.25 * (b - a))

        def v0(x, u0=u0):
            return np.asarray(u0(x), dtype=float) + eps * phi(x)
        return sf, v0, abs(eps)
    raise ConfigurationError(f"unknown stability mode {mode!r}")


@dataclass(frozen=True)
class StabilityRow:
    eps: float
    distance: float
    perturbation: float

    @property
    def ratio(self) -> float:
        return self.distance / self.perturbation if self.perturbation > 0 else 0.0


@dataclass(frozen=True)
class StabilityResult:
    mode: str
    delta: float
    rows: list[StabilityRow]
    slope: float
    max_ratio: float


def run_stability_study(cfg: ExperimentConfig, mode: str,
                        eps_list: Sequence[float] = DEFAULT_EPS_LIST,
                        delta: Optional[float] = None) -> StabilityResult:
    """Distances between base and perturbed front tracking runs at fixed delta."""
    delta = cfg.resolution if delta is None else delta
    sf = cfg.spatial_flux()
    u0 = cfg.initial_datum()
    base = front_tracking_solve(sf, u0, delta, cfg.end_time, cfg.domain)
    rows = []
    for eps in eps_list:
        psf, pu0, size = perturbed_problem(cfg, mode, eps)
        for f in psf.fluxes:
            if isinstance(f, MonotoneFlux) and f.inverse_fn is None:
                # monotonicity on the states actually in play is checked by
                # the interpolation; this catches a sign change in the slope
                f.validate(*_state_bounds(cfg))
        v = front_tracking_solve(psf, pu0, delta, cfg.end_time, cfg.domain)
        rows.append(StabilityRow(float(eps), l1_distance(base, v, cfg.error_window), size))
    fit = [r for r in rows if r.perturbation > 0 and r.distance > 0]
    slope = fit_slope([r.eps for r in fit], [r.distance for r in fit]) if len(fit) >= 2 else math.nan
    max_ratio = max((r.ratio for r in rows), default=0.0)
    return StabilityResult(mode, delta, rows, slope, max_ratio)


def _state_bounds(cfg: ExperimentConfig) -> tuple[float, float]:
    a, b = cfg.domain
    x = np.linspace(a, b, 4001)
    u = np.asarray(cfg.initial_datum()(x), dtype=float)
    return float(u.min()), float(u.max())

# }}}


@dataclass(frozen=True)
class Comparison:
    n: int
    ft_error: float
    fv_error: float

    @property
    def ratio(self) -> float:
        return self.fv_error / self.ft_error if self.ft_error > 0 else math.inf


def fv_solution(cfg: ExperimentConfig, delta: float) -> PiecewiseConstantFn:
    n_cells = n_cells_for(cfg.domain, delta)
    return fv_solve(cfg.spatial_flux(), cfg.initial_datum(), n_cells, cfg.fv_lambda,
                    cfg.end_time, cfg.domain)


def compare_ft_fv(cfg: ExperimentConfig, n: int,
                  reference: Optional[PiecewiseConstantFn] = None) -> Comparison:
    """L1 errors of front tracking and upwind FV (``dx = delta``) against the
    same front tracking reference."""
    if reference is None:
        reference = reference_solution(cfg)
    delta = cfg.delta_for(n)
    w = cfg.error_window
    return Comparison(
        n,
        l1_distance(ft_solution(cfg, delta), reference, w),
        l1_distance(fv_solution(cfg, delta), reference, w),
    )
