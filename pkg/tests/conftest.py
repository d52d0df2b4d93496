import numpy as np
import pytest

from fronttrack.experiments import experiment_1, experiment_2
from fronttrack.flux import SpatialFlux, burgers_flux, identity_flux, interpolate_flux
from fronttrack.piecewise import PiecewiseConstantFn


@pytest.fixture
def burgers_half():
    """Burgers interpolant with delta = 0.5 on [0, 2]."""
    return interpolate_flux(burgers_flux(), 0.5, (0.0, 2.0))


@pytest.fixture
def exp1():
    return experiment_1()


@pytest.fixture
def exp2():
    return experiment_2()


@pytest.fixture
def exp1_problem():
    sf = SpatialFlux((0.0,), (identity_flux(), burgers_flux()))
    return sf, PiecewiseConstantFn.step(-0.5, 0.5, 2.0)


@pytest.fixture
def exp2_problem():
    sf = SpatialFlux((0.0,), (burgers_flux(), identity_flux()))
    return sf, (lambda x: 2.0 + np.exp(-100.0 * (np.asarray(x) + 0.75) ** 2))
