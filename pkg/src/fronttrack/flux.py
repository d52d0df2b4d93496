"""Strictly monotone fluxes and their piecewise-linear interpolants.

A :class:`SpatialFlux` switches between them across fixed interfaces,
``x -> f(k(x), .)``.

Analytic fluxes are plain callables with an analytic derivative (and, where
available, an analytic inverse).  The front tracking solver never touches
them directly: it works with :class:`PiecewiseLinearFlux`, the interpolant on
the grid ``u_j = j * delta``.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from fronttrack.errors import InvalidFluxError, OutOfRangeError

INVERSE_TOL = 1e-13
LIPSCHITZ_SAMPLES = 100_000

# relative tolerance when deciding that two segment slopes are equal
SLOPE_RTOL = 1e-12


@dataclass(frozen=True)
class MonotoneFlux:
    """An analytic flux ``u -> fn(u)`` with ``deriv(u) >= alpha > 0``.

    ``fn`` and ``deriv`` must accept numpy arrays as well as floats.
    """

    name: str
    fn: Callable
    deriv: Callable
    inverse_fn: Optional[Callable] = None
    second_deriv: Optional[Callable] = None
    working_range: tuple[float, float] = (-math.inf, math.inf)

    def __call__(self, u):
        return self.fn(u)

    def slope(self, u):
        return self.deriv(u)

    def restrict(self, lo: float, hi: float) -> "MonotoneFlux":
        return replace(self, working_range=(float(lo), float(hi)))

    def sample_grid(self, num: int = 2001, lo=None, hi=None) -> np.ndarray:
        lo = self.working_range[0] if lo is None else lo
        hi = self.working_range[1] if hi is None else hi
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"flux {self.name!r} needs a finite working range")
        return np.linspace(lo, hi, num)

    @property
    def alpha(self) -> float:
        """Lower slope bound on the working range (dense sampling)."""
        return float(np.min(self.deriv(self.sample_grid())))

    def lipschitz_constant(self, lo=None, hi=None) -> float:
        return float(np.max(np.abs(self.deriv(self.sample_grid(lo=lo, hi=hi)))))

    def validate(self, lo=None, hi=None) -> None:
        """Raise :class:`InvalidFluxError` unless strictly increasing on the range."""
        u = self.sample_grid(lo=lo, hi=hi)
        d = np.asarray(self.deriv(u), dtype=float)
        if np.any(d <= 0.0) or np.any(np.diff(np.asarray(self.fn(u), dtype=float)) <= 0.0):
            raise InvalidFluxError(
                f"flux {self.name!r} is not strictly increasing on [{u[0]}, {u[-1]}]"
            )

    def inverse(self, p: float, hint: Optional[float] = None) -> float:
        """State with ``fn(state) == p``; ``hint`` seeds the Newton bracket."""
        if self.inverse_fn is not None:
            return float(self.inverse_fn(p))
        return _newton_inverse(self, float(p), hint)


def _bracket(f: MonotoneFlux, p: float, start: float) -> tuple[float, float]:
    # walk outward from ``start`` with doubling steps while f keeps increasing
    x, fx = start, float(f(start))
    step = max(1.0, abs(start)) * 0.125
    for _ in range(200):
        if fx == p:
            return x, x
        y = x + step if fx < p else x - step
        fy = float(f(y))
        if (fy - fx) * (y - x) <= 0.0:
            raise OutOfRangeError(
                f"flux {f.name!r} is not increasing near {y!r}; cannot invert {p!r}"
            )
        if (fy - p) * (fx - p) <= 0.0:
            return (x, y) if x < y else (y, x)
        x, fx = y, fy
        step *= 2.0
    raise OutOfRangeError(f"flux value {p!r} not attained by {f.name!r}")


def _newton_inverse(f: MonotoneFlux, p: float, hint: Optional[float] = None) -> float:
    # safeguarded Newton: keep a bracket, bisect whenever the step leaves it
    lo, hi = f.working_range
    if math.isfinite(lo) and math.isfinite(hi):
        if not float(f(lo)) <= p <= float(f(hi)):
            raise OutOfRangeError(
                f"flux value {p!r} outside the range of {f.name!r} on [{lo}, {hi}]"
            )
    else:
        start = hint if hint is not None else (p if math.isfinite(p) else 0.0)
        lo, hi = _bracket(f, p, float(start))
    if float(f(lo)) == p:
        return lo
    if float(f(hi)) == p:
        return hi
    u = 0.5 * (lo + hi)
    for _ in range(200):
        r = float(f(u)) - p
        if r == 0.0:
            return u
        if r < 0.0:
            lo = u
        else:
            hi = u
        d = float(f.deriv(u))
        step = u - r / d if d > 0.0 else None
        if step is None or not (lo < step < hi):
            step = 0.5 * (lo + hi)
        if abs(step - u) <= INVERSE_TOL * max(1.0, abs(u)) or hi - lo <= INVERSE_TOL:
            return step
        u = step
    return u


# {{{ catalog

def identity_flux() -> MonotoneFlux:
    return linear_flux(1.0, name="identity")


def linear_flux(a: float, name: Optional[str] = None) -> MonotoneFlux:
    if a <= 0:
        raise InvalidFluxError(f"linear flux needs a positive slope, got {a}")
    a = float(a)
    if a == 1.0:
        return MonotoneFlux(
            name=name or "identity",
            fn=lambda u: u * 1.0,
            deriv=lambda u: np.ones_like(u, dtype=float) if np.ndim(u) else 1.0,
            inverse_fn=lambda p: p * 1.0,
            second_deriv=lambda u: np.zeros_like(u, dtype=float) if np.ndim(u) else 0.0,
        )
    return MonotoneFlux(
        name=name or f"linear:{a:g}",
        fn=lambda u: a * u,
        deriv=lambda u: np.full_like(u, a, dtype=float) if np.ndim(u) else a,
        inverse_fn=lambda p: p / a,
        second_deriv=lambda u: np.zeros_like(u, dtype=float) if np.ndim(u) else 0.0,
    )


def burgers_flux() -> MonotoneFlux:
    """``u**2 / 2``; strictly increasing only for ``u > 0``."""
    return MonotoneFlux(
        name="burgers",
        fn=lambda u: 0.5 * u * u,
        deriv=lambda u: u * 1.0,
        inverse_fn=lambda p: math.sqrt(2.0 * p) if p >= 0 else _neg_sqrt_error(p),
        second_deriv=lambda u: np.ones_like(u, dtype=float) if np.ndim(u) else 1.0,
    )


def _neg_sqrt_error(p):
    raise OutOfRangeError(f"burgers flux has no increasing branch at value {p}")


def power_flux(p: float, scale: float = 1.0) -> MonotoneFlux:
    """``scale * u**p / p`` for ``u > 0``."""
    if p <= 0 or scale <= 0:
        raise InvalidFluxError("power flux needs p > 0 and scale > 0")
    p, scale = float(p), float(scale)
    return MonotoneFlux(
        name=f"power:{p:g}" + ("" if scale == 1.0 else f":{scale:g}"),
        fn=lambda u: scale * u ** p / p,
        deriv=lambda u: scale * u ** (p - 1.0),
        inverse_fn=lambda v: (p * v / scale) ** (1.0 / p),
        second_deriv=lambda u: scale * (p - 1.0) * u ** (p - 2.0),
    )


def perturbed_flux(f: MonotoneFlux, eps: float) -> MonotoneFlux:
    """``f(u) + eps * u``; inverse by Newton."""
    eps = float(eps)
    if eps == 0.0:
        return f
    return MonotoneFlux(
        name=f"{f.name}+{eps:g}u",
        fn=lambda u: f.fn(u) + eps * u,
        deriv=lambda u: f.deriv(u) + eps,
        second_deriv=f.second_deriv,
        working_range=f.working_range,
    )


def flux_from_name(spec: str) -> MonotoneFlux:
    """Parse ``identity``, ``linear:a``, ``burgers`` or ``power:p[:scale]``."""
    name, _, rest = spec.strip().partition(":")
    name = name.lower()
    try:
        if name == "identity":
            return identity_flux()
        if name == "linear":
            return linear_flux(float(rest))
        if name == "burgers":
            return burgers_flux()
        if name == "power":
            args = [float(v) for v in rest.split(":")]
            return power_flux(*args)
    except (TypeError, ValueError) as exc:
        raise InvalidFluxError(f"bad flux specification {spec!r}: {exc}") from exc
    raise InvalidFluxError(f"unknown flux {spec!r}")

# }}}


# {{{ piecewise linear interpolant

@dataclass(frozen=True, eq=False)
class PiecewiseLinearFlux:
    """Linear interpolant of a flux between the points ``(j delta, f(j delta))``.

    Breakpoints are stored as ``j * delta`` for consecutive integers ``j``
    starting at ``j0``.  Evaluation outside the breakpoint range raises.
    """

    delta: float
    j0: int
    u: tuple[float, ...]
    f_values: tuple[float, ...]
    name: str = ""
    slopes: tuple[float, ...] = field(init=False)
    convex: bool = field(init=False)
    concave: bool = field(init=False)

    def __post_init__(self):
        if len(self.u) != len(self.f_values) or len(self.u) < 2:
            raise ValueError("need at least two matching breakpoints and values")
        s = tuple(
            (self.f_values[k + 1] - self.f_values[k]) / (self.u[k + 1] - self.u[k])
            for k in range(len(self.u) - 1)
        )
        object.__setattr__(self, "slopes", s)
        scale = max(abs(v) for v in s)
        tol = SLOPE_RTOL * scale
        ds = [s[k + 1] - s[k] for k in range(len(s) - 1)]
        object.__setattr__(self, "convex", all(d >= -tol for d in ds))
        object.__setattr__(self, "concave", all(d <= tol for d in ds))

    @property
    def u_min(self) -> float:
        return self.u[0]

    @property
    def u_max(self) -> float:
        return self.u[-1]

    @property
    def alpha(self) -> float:
        return min(self.slopes)

    @property
    def lipschitz_constant(self) -> float:
        return max(self.slopes)

    @property
    def linear(self) -> bool:
        return self.convex and self.concave

    def _check(self, u: float) -> None:
        if not (self.u[0] <= u <= self.u[-1]):
            raise OutOfRangeError(
                f"state {u!r} outside working range [{self.u[0]}, {self.u[-1]}]"
                f" of flux {self.name!r}"
            )

    def __call__(self, u: float) -> float:
        self._check(u)
        k = bisect_left(self.u, u)
        if k < len(self.u) and self.u[k] == u:
            return self.f_values[k]
        k -= 1
        return self.f_values[k] + self.slopes[k] * (u - self.u[k])

    def evaluate(self, u) -> np.ndarray:
        """Vectorized evaluation."""
        u = np.asarray(u, dtype=float)
        if np.any(u < self.u[0]) or np.any(u > self.u[-1]):
            raise OutOfRangeError(f"states outside working range of {self.name!r}")
        uu = np.asarray(self.u)
        ff = np.asarray(self.f_values)
        return np.interp(u, uu, ff)

    def slope_at(self, u, side: str = "left") -> np.ndarray:
        """Segment slope at ``u``; at a breakpoint, the slope of the segment
        on ``side`` (clamped to the first/last segment at the ends)."""
        u = np.asarray(u, dtype=float)
        uu = np.asarray(self.u)
        k = np.searchsorted(uu, u, side="left" if side == "left" else "right") - 1
        k = np.clip(k, 0, len(self.slopes) - 1)
        return np.asarray(self.slopes)[k]

    def inverse(self, p: float, hint: Optional[float] = None) -> float:
        return invert_flux(self, p)

    def breakpoints_between(self, a: float, b: float) -> list[float]:
        """Breakpoints strictly inside ``(a, b)`` for ``a < b``."""
        lo = bisect_right(self.u, a)
        hi = bisect_left(self.u, b)
        return list(self.u[lo:hi])


def interpolate_flux(
    f: MonotoneFlux, delta: float, u_range: Sequence[float]
) -> PiecewiseLinearFlux:
    """Interpolate ``f`` on the grid ``j * delta`` covering ``u_range``.

    The range is widened outward to the nearest grid multiples.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    lo, hi = float(u_range[0]), float(u_range[1])
    if hi < lo:
        lo, hi = hi, lo
    j0 = math.floor(lo / delta)
    j1 = math.ceil(hi / delta)
    if j1 == j0:
        j1 += 1
    js = range(j0, j1 + 1)
    u = tuple(j * delta for j in js)
    vals = tuple(float(f(x)) for x in u)
    if any(vals[k + 1] <= vals[k] for k in range(len(vals) - 1)):
        raise InvalidFluxError(
            f"interpolated values of {f.name!r} are not strictly increasing on"
            f" [{u[0]}, {u[-1]}]"
        )
    return PiecewiseLinearFlux(delta=float(delta), j0=j0, u=u, f_values=vals, name=f.name)


def invert_flux(f_delta: PiecewiseLinearFlux, p: float) -> float:
    """State ``u`` with ``f_delta(u) == p``: binary search, then exact
    linear inversion on the segment."""
    fv = f_delta.f_values
    if not (fv[0] <= p <= fv[-1]):
        raise OutOfRangeError(
            f"flux value {p!r} outside [{fv[0]}, {fv[-1]}] of {f_delta.name!r};"
            " the working range is too small"
        )
    k = bisect_left(fv, p)
    if fv[k] == p:
        return f_delta.u[k]
    k -= 1
    u = f_delta.u[k] + (p - fv[k]) / f_delta.slopes[k]
    # rounding can push the result a hair past the segment end
    return min(max(u, f_delta.u[k]), f_delta.u[k + 1])

# }}}


FluxLike = Union[MonotoneFlux, PiecewiseLinearFlux]


@dataclass(frozen=True)
class SpatialFlux:
    """Interfaces ``xi_1 < ... < xi_N`` and one flux per subdomain.

    Subdomain ``i`` is ``(xi_i, xi_{i+1})`` with ``xi_0 = -inf`` and
    ``xi_{N+1} = +inf``.
    """

    interfaces: tuple[float, ...]
    fluxes: tuple
    coefficient_values: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "interfaces", tuple(float(x) for x in self.interfaces))
        object.__setattr__(self, "fluxes", tuple(self.fluxes))
        if len(self.fluxes) != len(self.interfaces) + 1:
            raise ValueError(
                f"{len(self.interfaces)} interfaces need {len(self.interfaces) + 1}"
                f" fluxes, got {len(self.fluxes)}"
            )
        if any(b <= a for a, b in zip(self.interfaces, self.interfaces[1:])):
            raise ValueError("interfaces must be strictly increasing")
        if self.coefficient_values is not None and len(self.coefficient_values) != len(
            self.fluxes
        ):
            raise ValueError("need one coefficient value per subdomain")

    @property
    def n_subdomains(self) -> int:
        return len(self.fluxes)

    def subdomain_index(self, x: float) -> int:
        """Index of the subdomain containing ``x``; an interface point counts
        as part of the subdomain to its right."""
        return bisect_right(self.interfaces, x)

    def flux_at(self, x: float):
        return self.fluxes[self.subdomain_index(x)]

    def with_fluxes(self, fluxes) -> "SpatialFlux":
        return SpatialFlux(self.interfaces, tuple(fluxes), self.coefficient_values)


def adapted_constants(sf: SpatialFlux, c: float) -> list[float]:
    """The chain ``c_0 = c``, ``c_{i+1} = f_{i+1}^{-1}(f_i(c_i))``."""
    f0 = sf.fluxes[0]
    if isinstance(f0, PiecewiseLinearFlux):
        f0._check(c)
    else:
        lo, hi = f0.working_range
        if not lo <= c <= hi:
            raise OutOfRangeError(f"{c!r} outside working range of {f0.name!r}")
    out = [float(c)]
    for fl, fr in zip(sf.fluxes, sf.fluxes[1:]):
        out.append(float(fr.inverse(float(fl(out[-1])), hint=out[-1])))
    return out


def chain_map(sf: SpatialFlux, c: float, start: int, stop: int) -> float:
    """Map a state of subdomain ``start`` to subdomain ``stop >= start`` by
    keeping the flux value fixed."""
    for i in range(start, stop):
        c = float(sf.fluxes[i + 1].inverse(float(sf.fluxes[i](c)), hint=c))
    return c


def _slopes_on(f: FluxLike, u: np.ndarray, side: str) -> np.ndarray:
    if isinstance(f, PiecewiseLinearFlux):
        return f.slope_at(u, side=side)
    return np.asarray(f.deriv(u), dtype=float) * np.ones_like(u)


def lipschitz_distance(
    f: FluxLike, g: FluxLike, u_range: Sequence[float], samples: int = LIPSCHITZ_SAMPLES
) -> float:
    """``sup |f'(u) - g'(u)|`` on a uniform grid over ``u_range``.

    Breakpoints of piecewise-linear arguments are added to the grid and
    both one-sided slopes are compared there.
    """
    lo, hi = float(u_range[0]), float(u_range[1])
    grid = [np.linspace(lo, hi, samples)]
    for h in (f, g):
        if isinstance(h, PiecewiseLinearFlux):
            bp = np.asarray(h.u)
            grid.append(bp[(bp >= lo) & (bp <= hi)])
    u = np.unique(np.concatenate(grid))
    best = 0.0
    for side in ("left", "right"):
        d = np.abs(_slopes_on(f, u, side) - _slopes_on(g, u, side))
        best = max(best, float(np.max(d)))
    return best
