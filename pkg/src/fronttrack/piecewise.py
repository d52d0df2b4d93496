"""Piecewise constant functions on the real line."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

MERGE_TOL = 1e-14
GAUSS_POINTS = 16


@dataclass(frozen=True, eq=False)
class PiecewiseConstantFn:
    """Step function with ``values[0]`` on ``(-inf, breakpoints[0])``,
    ``values[k]`` on ``(breakpoints[k-1], breakpoints[k])`` and ``values[-1]``
    on ``(breakpoints[-1], inf)``.

    Point evaluation at a breakpoint returns the right limit.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.array(self.breakpoints, dtype=float).reshape(-1)
        vals = np.array(self.values, dtype=float).reshape(-1)
        if vals.size != bp.size + 1:
            raise ValueError(
                f"{bp.size} breakpoints need {bp.size + 1} values, got {vals.size}"
            )
        if bp.size > 1 and np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        bp.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float) -> "PiecewiseConstantFn":
        return cls(np.empty(0), np.array([value]))

    @classmethod
    def step(cls, at: float, left: float, right: float) -> "PiecewiseConstantFn":
        return cls(np.array([at]), np.array([left, right]))

    @classmethod
    def from_points(
        cls, positions: Sequence[float], values: Sequence[float], tol: float = MERGE_TOL
    ) -> "PiecewiseConstantFn":
        """Build from possibly coincident, non-decreasing ``positions``.

        Intervals narrower than ``tol`` are dropped.
        """
        bps: list[float] = []
        vals: list[float] = [float(values[0])]
        for x, v in zip(positions, values[1:]):
            if bps and x - bps[-1] <= tol:
                vals[-1] = float(v)
            else:
                bps.append(float(x))
                vals.append(float(v))
        return cls(np.array(bps), np.array(vals))

    @property
    def left_tail(self) -> float:
        return float(self.values[0])

    @property
    def right_tail(self) -> float:
        return float(self.values[-1])

    def __call__(self, x):
        return self.sample(x)

    def sample(self, x):
        idx = np.searchsorted(self.breakpoints, x, side="right")
        out = self.values[idx]
        return float(out) if np.ndim(out) == 0 else out

    def normalize(self, tol: float = MERGE_TOL) -> "PiecewiseConstantFn":
        """Merge coincident breakpoints and equal neighbouring values."""
        bps: list[float] = []
        vals: list[float] = [float(self.values[0])]
        for x, v in zip(self.breakpoints, self.values[1:]):
            if bps and x - bps[-1] <= tol:
                vals[-1] = float(v)
                if len(vals) > 1 and vals[-1] == vals[-2]:
                    bps.pop()
                    vals.pop()
                continue
            if v == vals[-1]:
                continue
            bps.append(float(x))
            vals.append(float(v))
        return PiecewiseConstantFn(np.array(bps), np.array(vals))

    def total_variation(self) -> float:
        return total_variation(self)

    def restrict_breakpoints(self, lo: float, hi: float) -> np.ndarray:
        bp = self.breakpoints
        return bp[(bp > lo) & (bp < hi)]

    def integral(self, window: Sequence[float]) -> float:
        lo, hi = map(float, window)
        pts = np.concatenate(([lo], self.restrict_breakpoints(lo, hi), [hi]))
        mids = 0.5 * (pts[1:] + pts[:-1])
        return float(np.sum(self.sample(mids) * np.diff(pts)))

    def hull(self) -> tuple[float, float]:
        return float(self.values.min()), float(self.values.max())


def sample_at(a: PiecewiseConstantFn, x: float) -> float:
    """Value of the interval containing ``x`` (right limit at a breakpoint)."""
    return float(a.values[bisect_right(a.breakpoints.tolist(), x)])


def total_variation(a: PiecewiseConstantFn) -> float:
    return float(np.sum(np.abs(np.diff(a.values))))


def l1_distance(
    a: PiecewiseConstantFn, b: PiecewiseConstantFn, window: Sequence[float]
) -> float:
    """Exact integral of ``|a - b|`` over ``window``."""
    lo, hi = float(window[0]), float(window[1])
    if hi <= lo:
        return 0.0
    pts = np.unique(
        np.concatenate(([lo, hi], a.restrict_breakpoints(lo, hi), b.restrict_breakpoints(lo, hi)))
    )
    mids = 0.5 * (pts[1:] + pts[:-1])
    diff = np.abs(a.sample(mids) - b.sample(mids))
    return float(np.sum(diff * np.diff(pts)))


def _gauss_rule(npts: int = GAUSS_POINTS):
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def cell_edges(domain: Sequence[float], n_cells: int) -> np.ndarray:
    lo, hi = float(domain[0]), float(domain[1])
    dx = (hi - lo) / n_cells
    return lo + dx * np.arange(n_cells + 1)


def cell_averages(
    u0: Union[Callable, PiecewiseConstantFn], domain: Sequence[float], n_cells: int
) -> np.ndarray:
    """Cell averages of ``u0`` on a uniform grid.

    Step-function data are averaged exactly; anything else with a fixed
    16-point Gauss rule per cell.
    """
    if n_cells < 1:
        raise ValueError("need at least one cell")
    edges = cell_edges(domain, n_cells)
    if isinstance(u0, PiecewiseConstantFn):
        out = np.empty(n_cells)
        for k in range(n_cells):
            out[k] = u0.integral((edges[k], edges[k + 1])) / (edges[k + 1] - edges[k])
        return out
    nodes, weights = _gauss_rule()
    widths = np.diff(edges)
    x = edges[:-1, None] + widths[:, None] * nodes[None, :]
    fx = np.asarray(u0(x), dtype=float)
    if fx.shape != x.shape:
        fx = np.vectorize(u0, otypes=[float])(x)
    return fx @ weights


def project_cell_averages(
    u0: Union[Callable, PiecewiseConstantFn], domain: Sequence[float], n_cells: int
) -> PiecewiseConstantFn:
    """Project ``u0`` to cell averages on ``domain``, extended by the end-cell
    values outside it."""
    edges = cell_edges(domain, n_cells)
    avg = cell_averages(u0, domain, n_cells)
    return PiecewiseConstantFn(edges[1:-1], avg).normalize()
