from .scan import (
    ZeroModeReport,
    PowerIterationResult,
    SpectrumRow,
    circulant_gap,
    spectrum_row,
    zero_mode_scan,
    site_profile,
    power_iteration_mode,
    inverse_coefficient_decay,
    root_analysis,
    spectral_hausdorff_distance,
    det_ratio_bound,
)

__all__ = [
    "ZeroModeReport", "PowerIterationResult", "SpectrumRow",
    "circulant_gap", "spectrum_row", "zero_mode_scan", "site_profile",
    "power_iteration_mode", "inverse_coefficient_decay", "root_analysis",
    "spectral_hausdorff_distance", "det_ratio_bound",
]
