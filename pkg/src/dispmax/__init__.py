"""Numerical lab for directional maximal estimates of dispersive propagators."""

from .config import ExperimentConfig, ResultTable, parse_config, read_csv, write_csv
from .directions import (
    CoverResult,
    DirectionSet,
    box_count,
    cover_set,
    estimate_minkowski_dim,
    make_cantor,
    make_intervals,
    make_points,
    parse_direction_spec,
)
from .filters import DyadicFilterBank, build_filter_bank, project, project_wide
from .kernel import (
    KernelQuery,
    RegionLabel,
    SpaceTimePoint,
    classify_region,
    decay_bound_scan,
    hls_bilinear_check,
    kernel_value,
    phase_value,
    split_u1_u2,
    standard_phases,
    van_der_corput_check,
)
from .maximal import (
    MaximalGridSpec,
    NormEstimate,
    convergence_scan,
    estimate_operator_norm,
    fit_scaling_exponent,
    grid_for_band,
    lq_norm,
    low_frequency_check,
    maximal_function,
)
from .spectral import (
    DispersionProfile,
    SampledSignal,
    SpectralCoefficients,
    check_dispersion_conditions,
    evolve,
    forward_transform,
    inverse_transform,
    make_sobolev_data,
    sobolev_norm,
)

__version__ = "0.1.0"
