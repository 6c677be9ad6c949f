from .harness import (
    DataRecipe,
    PairResult,
    SweepReport,
    PredictedExponents,
    Horizons,
    make_initial_data,
    run_pair,
    run_sweep,
    sweep_rate,
    check_resolution,
    predicted_exponents,
    suggested_horizons,
    check_dt_robustness,
    box_doubling_check,
    confirm_3d,
)
from .resonance import (
    ResonantDatum,
    SlabReport,
    LowerBoundReport,
    resonant_grid,
    build_resonant_datum,
    duhamel_forcing,
    support_violation,
    slab_report,
    forcing_norms,
    verify_lower_bound,
    ablation_check,
    quadrature_robustness_check,
    witness_box_doubling_check,
)
from .boardgame import (
    AdmissibleMap,
    BoardGameRow,
    BoardGameVerification,
    enumerate_admissible,
    admissible_count,
    count_reduced,
    map_to_sequence,
    sequence_to_map,
    catalan_bound,
    power_bound,
    boardgame_table,
    verify_counts,
)
from .hierarchy import (
    FactorizedHierarchy,
    MixedHierarchy,
    HierarchyDifference,
    HierarchySeries,
    tensor_level_norm,
    tensor_difference_norm,
    binomial_bound_check,
    master_norm_factorized,
    hierarchy_difference_master_norm,
    hierarchy_difference_report,
    hierarchy_difference_series,
    kernel_level_norm,
    kernel_difference_norm,
)


__all__ = [
    "DataRecipe",
    "PairResult",
    "SweepReport",
    "PredictedExponents",
    "Horizons",
    "make_initial_data",
    "run_pair",
    "run_sweep",
    "sweep_rate",
    "check_resolution",
    "predicted_exponents",
    "suggested_horizons",
    "check_dt_robustness",
    "box_doubling_check",
    "confirm_3d",
    "ResonantDatum",
    "SlabReport",
    "LowerBoundReport",
    "resonant_grid",
    "build_resonant_datum",
    "duhamel_forcing",
    "support_violation",
    "slab_report",
    "forcing_norms",
    "verify_lower_bound",
    "ablation_check",
    "quadrature_robustness_check",
    "witness_box_doubling_check",
    "AdmissibleMap",
    "BoardGameRow",
    "BoardGameVerification",
    "enumerate_admissible",
    "admissible_count",
    "count_reduced",
    "map_to_sequence",
    "sequence_to_map",
    "catalan_bound",
    "power_bound",
    "boardgame_table",
    "verify_counts",
    "FactorizedHierarchy",
    "MixedHierarchy",
    "HierarchyDifference",
    "HierarchySeries",
    "tensor_level_norm",
    "tensor_difference_norm",
    "binomial_bound_check",
    "master_norm_factorized",
    "hierarchy_difference_master_norm",
    "hierarchy_difference_report",
    "hierarchy_difference_series",
    "kernel_level_norm",
    "kernel_difference_norm",
]
