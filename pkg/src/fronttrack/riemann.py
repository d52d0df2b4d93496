"""Exact Riemann solvers for piecewise linear, strictly increasing fluxes.

A single-flux Riemann problem with ``u_l < u_r`` is solved by the lower
convex envelope of the flux on ``[u_l, u_r]``; with ``u_l > u_r`` by the
upper concave envelope on ``[u_r, u_l]``.  Every envelope segment becomes
one front travelling at the chord slope.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

from fronttrack.flux import SLOPE_RTOL, PiecewiseLinearFlux, invert_flux


@dataclass(frozen=True)
class WaveFan:
    """States ``u_l = w_0, ..., w_r = u_r`` and one speed per jump."""

    states: tuple[float, ...]
    speeds: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if len(self.speeds) != max(len(self.states) - 1, 0):
            raise ValueError("a fan with m+1 states needs m speeds")

    @property
    def empty(self) -> bool:
        return not self.speeds

    def __len__(self) -> int:
        return len(self.speeds)

    def sample(self, xi: float) -> float:
        """Self-similar value at ``x / t == xi`` (right limit on a front)."""
        k = 0
        while k < len(self.speeds) and self.speeds[k] <= xi:
            k += 1
        return self.states[k]


@dataclass(frozen=True)
class InterfaceSolution:
    u_left: float
    u_star: float
    right_fan: WaveFan


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _lower_hull(points):
    # monotone chain on points sorted by u; collinear points within a relative
    # tolerance are dropped so zero-strength waves never appear
    hull: list = []
    for p in points:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            c = _cross(o, a, p)
            scale = abs((a[0] - o[0]) * (p[1] - o[1])) + abs((a[1] - o[1]) * (p[0] - o[0]))
            if c <= SLOPE_RTOL * scale:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _upper_hull(points):
    hull: list = []
    for p in points:
        while len(hull) >= 2:
            o, a = hull[-2], hull[-1]
            c = _cross(o, a, p)
            scale = abs((a[0] - o[0]) * (p[1] - o[1])) + abs((a[1] - o[1]) * (p[0] - o[0]))
            if c >= -SLOPE_RTOL * scale:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def _merge_collinear(vertices):
    out = [vertices[0]]
    for k in range(1, len(vertices) - 1):
        a, b, c = out[-1], vertices[k], vertices[k + 1]
        s1 = (b[1] - a[1]) / (b[0] - a[0])
        s2 = (c[1] - b[1]) / (c[0] - b[0])
        if abs(s2 - s1) <= SLOPE_RTOL * max(abs(s1), abs(s2)):
            continue
        out.append(b)
    out.append(vertices[-1])
    return out


def envelope_vertices(f_delta: PiecewiseLinearFlux, a: float, b: float, lower: bool):
    """Vertices ``(u, f(u))`` of the lower convex (``lower=True``) or upper
    concave envelope of ``f_delta`` on ``[a, b]``, ``a < b``."""
    fa, fb = f_delta(a), f_delta(b)
    if f_delta.linear or (lower and f_delta.concave) or (not lower and f_delta.convex):
        return [(a, fa), (b, fb)]
    inner = f_delta.breakpoints_between(a, b)
    points = [(a, fa)] + [(u, f_delta(u)) for u in inner] + [(b, fb)]
    if (lower and f_delta.convex) or (not lower and f_delta.concave):
        return _merge_collinear(points)
    return _lower_hull(points) if lower else _upper_hull(points)


def _jump_speed(f_delta: PiecewiseLinearFlux, w0: float, w1: float) -> float:
    lo, hi = min(w0, w1), max(w0, w1)
    k = max(bisect_right(f_delta.u, lo) - 1, 0)
    if k + 1 < len(f_delta.u) and hi <= f_delta.u[k + 1]:
        # both states on one segment: its slope avoids cancellation in tiny jumps
        return f_delta.slopes[k]
    return (f_delta(w1) - f_delta(w0)) / (w1 - w0)


def _fan_from_vertices(f_delta: PiecewiseLinearFlux, states) -> WaveFan:
    speeds = tuple(_jump_speed(f_delta, w0, w1) for w0, w1 in zip(states, states[1:]))
    return WaveFan(tuple(states), speeds)


def solve_riemann_single(f_delta: PiecewiseLinearFlux, u_l: float, u_r: float) -> WaveFan:
    """Entropy solution of the Riemann problem ``(u_l, u_r)`` for one flux."""
    f_delta._check(u_l)
    f_delta._check(u_r)
    if u_l == u_r:
        return WaveFan((u_l,), ())
    if u_l < u_r:
        verts = envelope_vertices(f_delta, u_l, u_r, lower=True)
        states = [v[0] for v in verts]
    else:
        verts = envelope_vertices(f_delta, u_r, u_l, lower=False)
        states = [v[0] for v in reversed(verts)]
    return _fan_from_vertices(f_delta, states)


def solve_riemann_interface(
    g_delta: PiecewiseLinearFlux, f_delta: PiecewiseLinearFlux, u_l: float, u_r: float
) -> InterfaceSolution:
    """Riemann problem with flux ``g_delta`` left of 0 and ``f_delta`` right.

    The left state is kept; the right trace is ``u* = f^{-1}(g(u_l))`` and
    the remaining jump ``(u*, u_r)`` is resolved in the right subdomain.
    """
    if g_delta is f_delta:
        u_star = u_l
    else:
        u_star = invert_flux(f_delta, g_delta(u_l))
    return InterfaceSolution(u_l, u_star, solve_riemann_single(f_delta, u_star, u_r))
