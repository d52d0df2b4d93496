import numpy as np
import pytest

from fronttrack.errors import NonTerminationError
from fronttrack.flux import SpatialFlux, burgers_flux, identity_flux, interpolate_flux
from fronttrack.piecewise import PiecewiseConstantFn, l1_distance
from fronttrack.tracking import (
    Front,
    advance,
    check_consistency,
    front_tracking_run,
    initialize,
    n_cells_for,
    predict_collision,
    rh_residuals,
    sample_solution,
)


def burgers_only(delta=0.5, rng=(0.0, 2.0)):
    return SpatialFlux((), (interpolate_flux(burgers_flux(), delta, rng),))


def exp1_delta(delta):
    rng = (0.0, 2.5)
    return SpatialFlux(
        (0.0,),
        (interpolate_flux(identity_flux(), delta, rng), interpolate_flux(burgers_flux(), delta, rng)),
    )


def test_predict_collision():
    a = Front(0, 0.0, 0.0, 2.0, 2.0, 1.0, 0)
    b = Front(1, 1.0, 0.0, 1.0, 1.0, 0.5, 0)
    assert predict_collision(a, b, 0.0) == 1.0
    assert predict_collision(b, a, 0.0) is None
    iface = Front(2, 1.0, 0.0, 0.0, 1.0, 1.0, 1, interface=1)
    assert predict_collision(a, iface, 0.0) == 0.5


def test_initialize_constant_has_only_interface():
    sf = exp1_delta(0.25)
    # u = 2 is steady across the interface since 2 = identity(2) = burgers(2)
    st = initialize(sf, PiecewiseConstantFn.constant(2.0))
    fronts = list(st.fronts())
    assert len(fronts) == 1 and fronts[0].is_interface
    assert fronts[0].left == 2.0 and fronts[0].right == 2.0
    assert not st.events


def test_initialize_constant_not_steady_across_interface():
    sf = exp1_delta(0.25)
    st = initialize(sf, PiecewiseConstantFn.constant(1.0))
    iface, wave = list(st.fronts())
    assert iface.left == 1.0 and wave.right == 1.0
    assert abs(sf.fluxes[1](iface.right) - 1.0) < 1e-12


def test_initialize_experiment_1():
    sf = exp1_delta(0.25)
    st = initialize(sf, PiecewiseConstantFn.step(-0.5, 0.5, 2.0))
    fronts = list(st.fronts())
    assert [f.is_interface for f in fronts] == [False, True]
    jump, iface = fronts
    assert (jump.left, jump.right, jump.speed) == (0.5, 2.0, 1.0)
    assert (iface.left, iface.right) == (2.0, 2.0)
    assert len(st.events) == 1 and st.events[0].time == pytest.approx(0.5)


def test_no_fronts_advance():
    st = initialize(burgers_only(), PiecewiseConstantFn.constant(1.5))
    advance(st, 3.0)
    assert st.time == 3.0 and len(st) == 0
    sol = sample_solution(st)
    assert sol.breakpoints.size == 0 and sol.values[0] == 1.5


def test_merging_shocks():
    u0 = PiecewiseConstantFn(np.array([0.0, 1.0]), np.array([2.0, 1.0, 0.5]))
    st = initialize(burgers_only(), u0)
    speeds = [f.speed for f in st.fronts()]
    assert speeds == [pytest.approx(1.5), pytest.approx(0.75)]
    advance(st, 2.0)
    fronts = list(st.fronts())
    assert len(fronts) == 1
    f = fronts[0]
    assert (f.left, f.right) == (2.0, 0.5)
    assert f.speed == pytest.approx(1.25)
    assert f.t0 == pytest.approx(4 / 3) and f.x0 == pytest.approx(2.0)
    assert f.position(2.0) == pytest.approx(2.0 + 1.25 * (2 / 3))
    assert st.stats.collisions == 1


def test_event_cap():
    u0 = PiecewiseConstantFn(np.array([0.0, 1.0]), np.array([2.0, 1.0, 0.5]))
    st = initialize(burgers_only(), u0, event_cap=0)
    with pytest.raises(NonTerminationError):
        advance(st, 2.0)


def test_advance_backwards_rejected():
    st = initialize(burgers_only(), PiecewiseConstantFn.constant(1.0))
    advance(st, 1.0)
    with pytest.raises(ValueError):
        advance(st, 0.5)


def test_experiment_1_before_interface():
    sf = exp1_delta(1 / 16)
    st = initialize(sf, PiecewiseConstantFn.step(-0.5, 0.5, 2.0))
    advance(st, 0.3)
    sol = sample_solution(st)
    np.testing.assert_allclose(sol.breakpoints, [-0.2], atol=1e-12)
    assert tuple(sol.values) == (0.5, 2.0)


def exp1_exact(t):
    """Entropy solution of the first experiment for 0.5 < t < 1.5."""
    s = t - 0.5

    def u(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < 0, 0.5, np.clip(np.where(s > 0, x / s, 2.0), 1.0, 2.0))
    return u


@pytest.mark.parametrize("delta", [1 / 16, 1 / 64, 1 / 256])
def test_experiment_1_after_interface(delta):
    sf = exp1_delta(delta)
    st = initialize(sf, PiecewiseConstantFn.step(-0.5, 0.5, 2.0))
    advance(st, 0.9, on_event=lambda s, kind: check_consistency(s))
    sol = sample_solution(st)
    assert st.stats.interface_crossings == 1
    assert sol.sample(-0.1) == 0.5 and sol.sample(0.01) == 1.0 and sol.sample(0.95) == 2.0
    # fan states are the grid points between 1 and 2
    inner = sol.values[(sol.values > 1.0) & (sol.values < 2.0)]
    np.testing.assert_allclose(np.diff(inner), delta)
    exact = exp1_exact(0.9)
    x = np.linspace(-1, 1, 200_001)
    err = np.mean(np.abs(sol(x) - exact(x))) * 2.0
    assert err <= 0.4 * delta + 1e-5
    m, i = rh_residuals(st)
    assert m < 1e-12 and i < 1e-12


def test_pure_transport_is_exact_shift():
    sf = SpatialFlux((), (identity_flux(),))
    u0 = PiecewiseConstantFn(np.array([-0.75, -0.25, 0.125]), np.array([1.0, 3.0, 1.5, 2.0]))
    run = front_tracking_run(sf, u0, 1 / 8, 0.5, domain=(-1, 1))
    shifted = PiecewiseConstantFn(u0.breakpoints + 0.5, u0.values)
    assert l1_distance(run.solution, shifted, (-1, 2)) < 1e-12


def test_mass_conserved_in_interior():
    sf = SpatialFlux((0.0,), (burgers_flux(), identity_flux()))
    u0 = PiecewiseConstantFn(np.array([-0.8, -0.6, -0.4]), np.array([2.0, 2.5, 2.2, 2.0]))
    run = front_tracking_run(sf, u0, 1 / 64, 0.2, domain=(-1, 1))
    # inflow at the left equals outflow at the right while the boundary states
    # stay at the background value 2 (f = 2 on the left, 2 on the right)
    before = run.initial.integral((-1, 1))
    after = run.solution.integral((-1, 1))
    assert after == pytest.approx(before, abs=1e-12)


def test_n_cells_for():
    assert n_cells_for((-1, 1), 1 / 64) == 128
    with pytest.raises(ValueError):
        n_cells_for((-1, 1), 0.3)
