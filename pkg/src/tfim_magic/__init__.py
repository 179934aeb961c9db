"""Momentum-space magic of the transverse-field Ising chain."""

from .entropy import (
    FERRO_M2_DENSITY,
    derivative_scan,
    magic_m2,
    stabilizer_renyi,
    thermo_density,
)
from .model import ModelParams, bogoliubov_angle, channel_amplitudes, dispersion, momentum_grid
from .spectrum import (
    PauliHistogram,
    histogram_convolution,
    histogram_exact,
    histogram_sampled,
    magic_gap,
    string_counts,
)

__all__ = [
    "FERRO_M2_DENSITY",
    "ModelParams",
    "PauliHistogram",
    "bogoliubov_angle",
    "channel_amplitudes",
    "derivative_scan",
    "dispersion",
    "histogram_convolution",
    "histogram_exact",
    "histogram_sampled",
    "magic_gap",
    "magic_m2",
    "momentum_grid",
    "stabilizer_renyi",
    "string_counts",
    "thermo_density",
]
