"""Event-driven front tracking for ``u_t + f(k(x), u)_x = 0`` with
piecewise linear, strictly increasing subdomain fluxes.

The solution is a finite set of fronts kept in a doubly linked list sorted by
position.  Moving fronts travel at their Rankine-Hugoniot speed; every
interface carries one stationary front whose two states satisfy flux
continuity.  Since all fluxes are increasing, every speed is positive and
waves only ever reach an interface from the left.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence, Union

import numpy as np

from fronttrack.errors import NonTerminationError, OutOfRangeError
from fronttrack.flux import (
    PiecewiseLinearFlux,
    SpatialFlux,
    chain_map,
    interpolate_flux,
)
from fronttrack.piecewise import PiecewiseConstantFn, project_cell_averages
from fronttrack.riemann import WaveFan, solve_riemann_interface, solve_riemann_single

DEFAULT_EVENT_CAP = 10_000_000
TIE_TOL = 1e-12
NUDGE = 1e-12


class Front:
    """A discontinuity ``x(t) = x0 + speed * (t - t0)``.

    ``interface`` is the interface number ``i`` (``1..N``) for stationary
    interface fronts and ``None`` for moving fronts.  ``region`` is the
    subdomain a moving front travels in.
    """

    __slots__ = (
        "id", "x0", "t0", "speed", "left", "right", "region", "interface",
        "prev", "next", "alive", "gen", "t_death",
    )

    def __init__(self, id, x0, t0, speed, left, right, region, interface=None):
        self.id = id
        self.x0 = x0
        self.t0 = t0
        self.speed = speed
        self.left = left
        self.right = right
        self.region = region
        self.interface = interface
        self.prev: Optional[Front] = None
        self.next: Optional[Front] = None
        self.alive = True
        self.gen = 0
        self.t_death: Optional[float] = None

    @property
    def is_interface(self) -> bool:
        return self.interface is not None

    def position(self, t: float) -> float:
        if self.speed == 0.0:
            return self.x0
        return self.x0 + self.speed * (t - self.t0)

    def __repr__(self):
        kind = f"interface {self.interface}" if self.is_interface else "moving"
        return (
            f"Front(#{self.id} {kind}, x0={self.x0:.6g}, t0={self.t0:.6g},"
            f" s={self.speed:.6g}, {self.left:.6g}|{self.right:.6g})"
        )


@dataclass(order=True)
class CollisionEvent:
    time: float
    position: float
    seq: int
    left: Front = field(compare=False)
    right: Front = field(compare=False)
    left_gen: int = field(compare=False)
    right_gen: int = field(compare=False)

    def is_valid(self) -> bool:
        a, b = self.left, self.right
        return (
            a.alive and b.alive and a.next is b
            and a.gen == self.left_gen and b.gen == self.right_gen
        )


@dataclass
class TrackingStats:
    events: int = 0
    collisions: int = 0
    interface_crossings: int = 0
    stale_events: int = 0
    max_fronts: int = 0
    fronts_created: int = 0


@dataclass(frozen=True)
class DeadFront:
    x0: float
    t0: float
    speed: float
    left: float
    right: float
    t_death: Optional[float]


class FrontTrackingState:
    """The live fronts at the current time, plus the pending event queue."""

    def __init__(self, sf: SpatialFlux, background: float, record_history: bool = False,
                 event_cap: int = DEFAULT_EVENT_CAP):
        self.sf = sf
        self.time = 0.0
        self.head: Optional[Front] = None
        self.tail: Optional[Front] = None
        self.background = float(background)
        self.events: list[CollisionEvent] = []
        self.stats = TrackingStats()
        self.event_cap = event_cap
        self.n_fronts = 0
        self.interface_fronts: list[Front] = []
        self.record_history = record_history
        self.history: list[DeadFront] = []
        self._ids = itertools.count()
        self._seq = itertools.count()

    # {{{ linked list

    def fronts(self) -> Iterator[Front]:
        f = self.head
        while f is not None:
            yield f
            f = f.next

    def __len__(self) -> int:
        return self.n_fronts

    def new_front(self, x0, t0, speed, left, right, region, interface=None) -> Front:
        self.stats.fronts_created += 1
        return Front(next(self._ids), x0, t0, speed, left, right, region, interface)

    def insert_after(self, anchor: Optional[Front], fronts: Sequence[Front]) -> None:
        """Insert ``fronts`` (in order) after ``anchor``; ``None`` means at the head."""
        nxt = self.head if anchor is None else anchor.next
        prev = anchor
        for f in fronts:
            f.prev = prev
            if prev is None:
                self.head = f
            else:
                prev.next = f
            prev = f
        if prev is not None:
            prev.next = nxt
            if nxt is None:
                self.tail = prev
            else:
                nxt.prev = prev
        self.n_fronts += len(fronts)
        self.stats.max_fronts = max(self.stats.max_fronts, self.n_fronts)

    def remove(self, f: Front) -> None:
        if f.prev is None:
            self.head = f.next
        else:
            f.prev.next = f.next
        if f.next is None:
            self.tail = f.prev
        else:
            f.next.prev = f.prev
        f.alive = False
        f.t_death = self.time
        f.prev = f.next = None
        self.n_fronts -= 1
        if self.record_history:
            self.history.append(DeadFront(f.x0, f.t0, f.speed, f.left, f.right, self.time))

    # }}}

    @property
    def left_tail(self) -> float:
        return self.background if self.head is None else self.head.left

    def schedule(self, a: Optional[Front], b: Optional[Front]) -> None:
        if a is None or b is None:
            return
        t = predict_collision(a, b, self.time)
        if t is not None:
            pos = b.position(t)
            heapq.heappush(
                self.events, CollisionEvent(t, pos, next(self._seq), a, b, a.gen, b.gen)
            )

    def fan_fronts(self, fan: WaveFan, x: float, t: float, region: int) -> list[Front]:
        w = fan.states
        return [
            self.new_front(x, t, s, w[k], w[k + 1], region)
            for k, s in enumerate(fan.speeds)
        ]

    def interface_position(self, i: int) -> float:
        return self.sf.interfaces[i - 1]

    def all_history(self) -> list[DeadFront]:
        """Dead moving fronts plus the fronts still alive (``t_death=None``)."""
        alive = [
            DeadFront(f.x0, f.t0, f.speed, f.left, f.right, None)
            for f in self.fronts() if not f.is_interface
        ]
        return [h for h in self.history] + alive


def predict_collision(a: Front, b: Front, now: float) -> Optional[float]:
    """Time at which ``a`` (left) catches up with ``b``, or ``None``."""
    if a.speed <= b.speed:
        return None
    gap = b.position(now) - a.position(now)
    if gap <= 0.0:
        return now
    return now + gap / (a.speed - b.speed)


# {{{ initialization

def _traces(u0: PiecewiseConstantFn, x: float) -> tuple[float, float]:
    k = int(np.searchsorted(u0.breakpoints, x, side="left"))
    left = float(u0.values[k])
    k = int(np.searchsorted(u0.breakpoints, x, side="right"))
    return left, float(u0.values[k])


def nudge_off_interfaces(u0: PiecewiseConstantFn, interfaces: Sequence[float],
                         amount: float = NUDGE) -> PiecewiseConstantFn:
    """Move datum breakpoints that sit on an interface slightly to the left."""
    if not interfaces or u0.breakpoints.size == 0:
        return u0
    bp = u0.breakpoints.copy()
    iface = np.asarray(interfaces)
    changed = False
    for k, x in enumerate(bp):
        if np.any(np.abs(iface - x) <= amount * max(1.0, abs(x))):
            bp[k] = x - amount * max(1.0, abs(x))
            changed = True
    if not changed:
        return u0
    return PiecewiseConstantFn(bp, u0.values)


def initialize(sf_delta: SpatialFlux, u0_delta: PiecewiseConstantFn,
               record_history: bool = False,
               event_cap: int = DEFAULT_EVENT_CAP) -> FrontTrackingState:
    """Solve every initial Riemann problem and schedule the first collisions."""
    u0 = nudge_off_interfaces(u0_delta, sf_delta.interfaces)
    state = FrontTrackingState(sf_delta, u0.left_tail, record_history, event_cap)
    sites = sorted(
        [(float(x), None) for x in u0.breakpoints]
        + [(xi, i + 1) for i, xi in enumerate(sf_delta.interfaces)]
    )
    fronts: list[Front] = []
    for x, iface in sites:
        ul, ur = _traces(u0, x)
        if iface is None:
            region = sf_delta.subdomain_index(x)
            fan = solve_riemann_single(sf_delta.fluxes[region], ul, ur)
            fronts.extend(state.fan_fronts(fan, x, 0.0, region))
        else:
            sol = solve_riemann_interface(
                sf_delta.fluxes[iface - 1], sf_delta.fluxes[iface], ul, ur
            )
            fi = state.new_front(x, 0.0, 0.0, ul, sol.u_star, iface, interface=iface)
            state.interface_fronts.append(fi)
            fronts.append(fi)
            fronts.extend(state.fan_fronts(sol.right_fan, x, 0.0, iface))
    state.insert_after(None, fronts)
    for a, b in zip(fronts, fronts[1:]):
        state.schedule(a, b)
    return state

# }}}


# {{{ evolution

def _resolve_crossing(state: FrontTrackingState, a: Front, b: Front, t: float) -> None:
    i = b.interface
    sf = state.sf
    sol = solve_riemann_interface(sf.fluxes[i - 1], sf.fluxes[i], a.left, b.right)
    left_neighbor = a.prev
    state.remove(a)
    b.left = sol.u_left
    b.right = sol.u_star
    b.gen += 1
    new = state.fan_fronts(sol.right_fan, b.x0, t, i)
    old_next = b.next
    state.insert_after(b, new)
    state.stats.interface_crossings += 1
    state.schedule(left_neighbor, b)
    state.schedule(new[-1] if new else b, old_next)


def _resolve_collision(state: FrontTrackingState, a: Front, b: Front, t: float) -> None:
    region = a.region
    sf = state.sf
    x = 0.5 * (a.position(t) + b.position(t))
    if region > 0:
        x = max(x, sf.interfaces[region - 1])
    if region < len(sf.interfaces):
        x = min(x, sf.interfaces[region])
    fan = solve_riemann_single(sf.fluxes[region], a.left, b.right)
    prev, nxt = a.prev, b.next
    state.remove(a)
    state.remove(b)
    new = state.fan_fronts(fan, x, t, region)
    state.insert_after(prev, new)
    state.stats.collisions += 1
    if new:
        state.schedule(prev, new[0])
        state.schedule(new[-1], nxt)
    else:
        state.schedule(prev, nxt)


def _process(state: FrontTrackingState, ev: CollisionEvent) -> None:
    state.time = max(state.time, ev.time)
    a, b = ev.left, ev.right
    if b.is_interface:
        _resolve_crossing(state, a, b, state.time)
    else:
        _resolve_collision(state, a, b, state.time)


def advance(state: FrontTrackingState, T: float,
            on_event: Optional[Callable[[FrontTrackingState, str], None]] = None
            ) -> FrontTrackingState:
    """Process all collisions up to time ``T`` and set ``state.time = T``.

    Events within ``1e-12`` of each other are handled left to right.
    ``on_event(state, kind)`` is called after every resolved event with
    ``kind`` in ``{"collision", "crossing"}``.
    """
    if T < state.time:
        raise ValueError(f"cannot advance backwards from {state.time} to {T}")
    events = state.events
    while events and events[0].time <= T:
        t_first = events[0].time
        batch = []
        while events and events[0].time <= min(t_first + TIE_TOL, T):
            batch.append(heapq.heappop(events))
        batch.sort(key=lambda e: (e.position, e.seq))
        for ev in batch:
            if not ev.is_valid():
                state.stats.stale_events += 1
                continue
            state.stats.events += 1
            if state.stats.events > state.event_cap:
                raise NonTerminationError(
                    f"more than {state.event_cap} events before t={T};"
                    " suspect a tie-handling bug or an unbounded range"
                )
            crossing = ev.right.is_interface
            _process(state, ev)
            if on_event is not None:
                on_event(state, "crossing" if crossing else "collision")
    state.time = float(T)
    return state


def sample_solution(state: FrontTrackingState) -> PiecewiseConstantFn:
    """Staircase at ``state.time``; coincident fronts and fronts without a
    jump (an interface with equal traces) are merged."""
    t = state.time
    positions = []
    values = [state.left_tail]
    for f in state.fronts():
        positions.append(f.position(t))
        values.append(f.right)
    return PiecewiseConstantFn.from_points(positions, values).normalize()

# }}}


# {{{ driver

def adapted_hulls(sf: SpatialFlux, lo: float, hi: float) -> list[tuple[float, float]]:
    """Per subdomain, the state interval reachable from data in ``[lo, hi]``
    placed in that subdomain or in any subdomain to its left."""
    hulls = []
    for i in range(sf.n_subdomains):
        vals = [lo, hi]
        for j in range(i):
            vals.append(chain_map(sf, lo, j, i))
            vals.append(chain_map(sf, hi, j, i))
        hulls.append((min(vals), max(vals)))
    return hulls


def discretize_fluxes(sf: SpatialFlux, delta: float,
                      u0_delta: PiecewiseConstantFn) -> SpatialFlux:
    """Interpolate each analytic subdomain flux on ``delta * Z`` over a range
    covering every state the run can reach, widened by ``delta``."""
    lo, hi = u0_delta.hull()
    pl = []
    for f, (a, b) in zip(sf.fluxes, adapted_hulls(sf, lo, hi)):
        if isinstance(f, PiecewiseLinearFlux):
            if a < f.u_min or b > f.u_max:
                raise OutOfRangeError(f"piecewise linear flux {f.name!r} does not cover [{a}, {b}]")
            pl.append(f)
        else:
            pl.append(interpolate_flux(f, delta, (a - delta, b + delta)))
    return SpatialFlux(sf.interfaces, tuple(pl), sf.coefficient_values)


def n_cells_for(domain: Sequence[float], delta: float) -> int:
    n = (domain[1] - domain[0]) / delta
    n_int = int(round(n))
    if n_int < 1 or abs(n - n_int) > 1e-9 * max(1.0, n):
        raise ValueError(f"delta={delta} does not divide the domain {tuple(domain)}")
    return n_int


@dataclass
class FrontTrackingRun:
    solution: PiecewiseConstantFn
    state: FrontTrackingState
    initial: PiecewiseConstantFn
    sf_delta: SpatialFlux


def front_tracking_run(sf: SpatialFlux, u0: Union[Callable, PiecewiseConstantFn],
                       delta: float, T: float, domain: Sequence[float] = (-1.0, 1.0),
                       record_history: bool = False,
                       event_cap: int = DEFAULT_EVENT_CAP,
                       on_event=None) -> FrontTrackingRun:
    """Run the whole pipeline from datum to time ``T``, keeping the intermediates."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    n = n_cells_for(domain, delta)
    u0_delta = project_cell_averages(u0, domain, n)
    sf_delta = discretize_fluxes(sf, delta, u0_delta)
    state = initialize(sf_delta, u0_delta, record_history, event_cap)
    advance(state, T, on_event=on_event)
    return FrontTrackingRun(sample_solution(state), state, u0_delta, sf_delta)


def front_tracking_solve(sf: SpatialFlux, u0: Union[Callable, PiecewiseConstantFn],
                         delta: float, T: float,
                         domain: Sequence[float] = (-1.0, 1.0)) -> PiecewiseConstantFn:
    """Front tracking approximation at time ``T`` with ``delta = dx``."""
    return front_tracking_run(sf, u0, delta, T, domain).solution

# }}}


# {{{ diagnostics

def rh_residuals(state: FrontTrackingState) -> tuple[float, float]:
    """Largest Rankine-Hugoniot residual over moving and interface fronts."""
    sf = state.sf
    moving = 0.0
    iface = 0.0
    for f in state.fronts():
        if f.is_interface:
            i = f.interface
            iface = max(iface, abs(sf.fluxes[i - 1](f.left) - sf.fluxes[i](f.right)))
        else:
            fl = sf.fluxes[f.region]
            r = abs(f.speed * (f.right - f.left) - (fl(f.right) - fl(f.left)))
            moving = max(moving, r)
    return moving, iface


def check_consistency(state: FrontTrackingState, tol: float = 1e-9) -> None:
    """Assert that fronts are sorted with matching states on each side."""
    t = state.time
    prev = None
    seen = set()
    for f in state.fronts():
        if prev is not None:
            assert prev.right == f.left, f"state jump between {prev} and {f}"
            assert prev.position(t) <= f.position(t) + tol, f"unsorted {prev} {f}"
        if f.is_interface:
            seen.add(f.interface)
            assert f.position(t) == state.interface_position(f.interface)
        else:
            assert f.speed > 0.0 and f.left != f.right, f"degenerate {f}"
        prev = f
    assert seen == set(range(1, len(state.sf.interfaces) + 1))


def state_at(history: Sequence[DeadFront], u0: PiecewiseConstantFn, x: float,
             T: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact time history of ``u(x, .)`` on ``[0, T]`` from front trajectories.

    Returns switch times ``0 = t_0 < ... < t_m = T`` and the ``m`` values.
    """
    crossings = []
    for h in history:
        tc = h.t0 + (x - h.x0) / h.speed
        end = T if h.t_death is None else h.t_death
        if h.t0 < tc < end and tc < T:
            crossings.append((tc, h.left))
    crossings.sort()
    times = [0.0] + [c[0] for c in crossings] + [float(T)]
    values = [float(u0(x))] + [c[1] for c in crossings]
    return np.array(times), np.array(values)


def flux_time_integral(state: FrontTrackingState, u0_delta: PiecewiseConstantFn,
                       x: float, y: float, T: float) -> float:
    """``int_0^T |F(x,t) - F(y,t)| dt`` with ``F(z,t) = f_delta(k(z), u(z,t))``;
    requires a run with ``record_history=True``."""
    hist = state.all_history()
    sf = state.sf
    tx, vx = state_at(hist, u0_delta, x, T)
    ty, vy = state_at(hist, u0_delta, y, T)
    fx, fy = sf.flux_at(x), sf.flux_at(y)
    pts = np.unique(np.concatenate((tx, ty)))
    mids = 0.5 * (pts[1:] + pts[:-1])
    ux = vx[np.searchsorted(tx, mids, side="right") - 1]
    uy = vy[np.searchsorted(ty, mids, side="right") - 1]
    diff = np.abs(np.array([fx(u) for u in ux]) - np.array([fy(u) for u in uy]))
    return float(np.sum(diff * np.diff(pts)))

# }}}
