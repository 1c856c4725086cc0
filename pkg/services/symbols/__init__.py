from .symbol import (
    Symbol,
    SampledSymbol,
    symbol_from_coefficients,
    scalar_symbol,
    identity_symbol,
    evaluate,
    evaluate_many,
    sample,
    sample_at,
    sample_to_series,
    inverse_symbol,
    det_on_grid,
    shift_symbol,
    reflect_symbol,
    scalar_coefficients,
    symbol_to_dict,
    symbol_from_dict,
    decay_ratio,
    grid_angles,
)

__all__ = [
    "Symbol", "SampledSymbol",
    "symbol_from_coefficients", "scalar_symbol", "identity_symbol",
    "evaluate", "evaluate_many", "sample", "sample_at", "sample_to_series",
    "inverse_symbol", "det_on_grid", "shift_symbol", "reflect_symbol",
    "scalar_coefficients", "symbol_to_dict", "symbol_from_dict",
    "decay_ratio", "grid_angles",
]
