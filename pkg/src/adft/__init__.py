"""Multiplierless 32-point approximate DFT for multi-beam array processing."""

__version__ = "0.1.0"

from .approx_search import (
    BetaRoundingSearch,
    evaluate_metrics,
    pareto_search,
    total_error_energy,
)
from .array_sim import ChainConfig, bin_energy_sweep, load_config
from .beampattern import (
    ArrayGeometry,
    BeamGrid,
    filter_bank_response,
    near_field_pattern,
    side_lobe_levels,
    ula_array_factor,
    ura_beams_2d,
)
from .estimators import ChannelCalibrator, HilbertIQ, SpatialBeamformer
from .fastalg import (
    FactorizedTransform,
    apply_fast,
    builtin_adft32_factorization,
    count_operations,
    stage_product,
)
from .transforms import GaussianMatrix, adft32_matrix, apply_dense, dft_matrix, round_scaled_dft

__all__ = [
    "ArrayGeometry",
    "BeamGrid",
    "BetaRoundingSearch",
    "ChainConfig",
    "ChannelCalibrator",
    "FactorizedTransform",
    "GaussianMatrix",
    "HilbertIQ",
    "SpatialBeamformer",
    "adft32_matrix",
    "apply_dense",
    "apply_fast",
    "bin_energy_sweep",
    "builtin_adft32_factorization",
    "count_operations",
    "dft_matrix",
    "evaluate_metrics",
    "filter_bank_response",
    "load_config",
    "near_field_pattern",
    "pareto_search",
    "round_scaled_dft",
    "side_lobe_levels",
    "stage_product",
    "total_error_energy",
    "ula_array_factor",
    "ura_beams_2d",
]
