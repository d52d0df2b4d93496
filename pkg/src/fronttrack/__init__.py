"""Front tracking for scalar conservation laws with a discontinuous,
strictly increasing flux."""

from fronttrack.errors import (
    ConfigurationError,
    FrontTrackError,
    InvalidFluxError,
    NonTerminationError,
    OutOfRangeError,
)
from fronttrack.flux import (
    MonotoneFlux,
    PiecewiseLinearFlux,
    SpatialFlux,
    adapted_constants,
    burgers_flux,
    flux_from_name,
    identity_flux,
    interpolate_flux,
    invert_flux,
    linear_flux,
    lipschitz_distance,
)
from fronttrack.piecewise import (
    PiecewiseConstantFn,
    l1_distance,
    project_cell_averages,
    sample_at,
    total_variation,
)
from fronttrack.riemann import (
    InterfaceSolution,
    WaveFan,
    solve_riemann_interface,
    solve_riemann_single,
)
from fronttrack.tracking import (
    Front,
    FrontTrackingState,
    advance,
    front_tracking_solve,
    initialize,
    predict_collision,
    sample_solution,
)
from fronttrack.fv import FVGrid, fv_solve, fv_step
from fronttrack.output import emit_plot_data, read_plot_data

__all__ = [
    "ConfigurationError", "FrontTrackError", "InvalidFluxError", "NonTerminationError",
    "OutOfRangeError",
    "MonotoneFlux", "PiecewiseLinearFlux", "SpatialFlux", "adapted_constants",
    "burgers_flux", "flux_from_name", "identity_flux", "interpolate_flux", "invert_flux",
    "linear_flux", "lipschitz_distance",
    "PiecewiseConstantFn", "l1_distance", "project_cell_averages", "sample_at",
    "total_variation",
    "InterfaceSolution", "WaveFan", "solve_riemann_interface", "solve_riemann_single",
    "Front", "FrontTrackingState", "advance", "front_tracking_solve", "initialize",
    "predict_collision", "sample_solution",
    "FVGrid", "fv_solve", "fv_step",
    "emit_plot_data", "read_plot_data",
]
