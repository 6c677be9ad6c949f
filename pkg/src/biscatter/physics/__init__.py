from .norms import (
    NormReport,
    sobolev_norm,
    homogeneous_norm,
    sobolev_inner,
    lp_norm,
    h1_difference,
    trajectory_sup_h1_diff,
    strichartz_diagnostic,
    norm_report,
)
from .potential import (
    PotentialProfile,
    ScaledDeviationMultiplier,
    profile_from_name,
    convolve_scaled,
    convolve_deviation,
    measure_convolution_rate,
    bilinear_pairing_bound_check,
    multiplier_bound_check,
)
from .evolution import (
    EvolutionSpec,
    EvolutionRun,
    SplitStepIntegrator,
    step_cubic,
    step_hartree,
    solve,
    energy,
    free_pullback,
    scattering_defect,
    write_snapshots,
)


__all__ = [
    "NormReport",
    "sobolev_norm",
    "homogeneous_norm",
    "sobolev_inner",
    "lp_norm",
    "h1_difference",
    "trajectory_sup_h1_diff",
    "strichartz_diagnostic",
    "norm_report",
    "PotentialProfile",
    "ScaledDeviationMultiplier",
    "profile_from_name",
    "convolve_scaled",
    "convolve_deviation",
    "measure_convolution_rate",
    "bilinear_pairing_bound_check",
    "multiplier_bound_check",
    "EvolutionSpec",
    "EvolutionRun",
    "SplitStepIntegrator",
    "step_cubic",
    "step_hartree",
    "solve",
    "energy",
    "free_pullback",
    "scattering_defect",
    "write_snapshots",
]
