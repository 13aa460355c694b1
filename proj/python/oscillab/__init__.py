"""Python access to the oscillab core."""

from ._core import (
    ConfigError,
    Law,
    __version__,
    amplitude_roots,
    column_distance,
    column_moment,
    column_spread,
    cubic,
    frozen_kinetics,
    linear,
    matched_gas,
    matched_pressure,
    matched_shear,
    matching_residual,
    run,
    slow_root_series,
    step_column,
    tabulated,
    thermo_roots,
    two_point_column,
    validate,
)
