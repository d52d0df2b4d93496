import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fronttrack.errors import ConfigurationError
from fronttrack.flux import SpatialFlux, burgers_flux, identity_flux, linear_flux
from fronttrack.fv import boundary_fluxes, fv_march, fv_solve, fv_step, make_grid
from fronttrack.piecewise import PiecewiseConstantFn, l1_distance


def test_constant_datum_unchanged():
    sf = SpatialFlux((0.0,), (burgers_flux(), identity_flux()))
    grid = make_grid(sf, PiecewiseConstantFn.constant(2.0), 64, 0.2)
    out = fv_march(grid, 0.5)
    np.testing.assert_array_equal(out.values, 2.0)


def test_unit_cfl_transport_is_exact_shift():
    sf = SpatialFlux((), (identity_flux(),))
    u0 = PiecewiseConstantFn(np.array([-0.5, 0.25]), np.array([1.0, 3.0, 2.0]))
    sol = fv_solve(sf, u0, 32, 1.0, 0.25)
    shifted = PiecewiseConstantFn(u0.breakpoints + 0.25, u0.values)
    assert l1_distance(sol, shifted, (-1, 1)) < 1e-12


def test_single_burgers_step():
    sf = SpatialFlux((), (burgers_flux(),))
    grid = make_grid(sf, PiecewiseConstantFn.step(1.0, 1.0, 2.0), 2, 0.2, domain=(0, 2))
    new = fv_step(grid)
    np.testing.assert_allclose(new.values, [1.0, 2.0 - 0.2 * (2.0 - 0.5)])
    assert new.time == pytest.approx(0.2)


def test_interface_uses_flux_of_upwind_cell():
    sf = SpatialFlux((0.0,), (identity_flux(), burgers_flux()))
    grid = make_grid(sf, PiecewiseConstantFn.constant(1.0), 2, 0.25)
    new = fv_step(grid)
    # left cell: identity, in = out; right cell gets 1 and emits 0.5
    np.testing.assert_allclose(new.values, [1.0, 1.0 - 0.25 * (0.5 - 1.0)])


def test_cfl_violation_raises():
    sf = SpatialFlux((), (linear_flux(2.0),))
    with pytest.raises(ConfigurationError, match="CFL"):
        make_grid(sf, PiecewiseConstantFn.constant(1.0), 16, 0.6)
    grid = make_grid(sf, PiecewiseConstantFn.constant(1.0), 16, 0.5)
    with pytest.raises(ConfigurationError):
        fv_step(grid, lam=0.75)


def test_last_step_lands_on_end_time():
    sf = SpatialFlux((), (burgers_flux(),))
    grid = make_grid(sf, PiecewiseConstantFn.step(0.0, 2.0, 1.0), 50, 0.3)
    out = fv_march(grid, 0.1234)
    assert out.time == 0.1234


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(0.5, 2.5), min_size=2, max_size=6),
    st.floats(0.05, 0.3),
)
def test_conservation_and_maximum_principle(vals, T):
    sf = SpatialFlux((0.0,), (burgers_flux(), identity_flux()))
    bps = np.linspace(-0.8, -0.2, len(vals) - 1)
    u0 = PiecewiseConstantFn(bps, np.array(vals))
    grid = make_grid(sf, u0, 80, 0.2)
    n = int(round(T / grid.dt))
    g = grid
    f_in, _ = boundary_fluxes(grid)
    outflow = 0.0
    for _ in range(n):
        _, f_out = boundary_fluxes(g)
        outflow += g.dt * f_out
        g = fv_step(g)
    inflow = n * grid.dt * f_in
    assert g.mass() == pytest.approx(grid.mass() + inflow - outflow, abs=1e-10)
    # values stay inside the adapted hull: a Burgers state u maps to u^2/2
    lo, hi = min(vals), max(vals)
    assert g.values.min() >= min(lo, lo * lo / 2) - 1e-12
    assert g.values.max() <= max(hi, hi * hi / 2) + 1e-12
