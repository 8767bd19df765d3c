"""Gaussian-state toolkit for two-mode squeezed thermal and vacuum states.

Computes measurement-induced extracted work, quantum-illumination SNR and
QKD correlation coefficients after a lossy thermal channel, with a Monte
Carlo oracle that checks the analytic moments independently.
"""

from cvwork.conditioning import (
    HET,
    HOMP,
    HOMX,
    MeasurementSpec,
    WorkResult,
    conditional_cov,
    extracted_work_general,
    feedback_displacement,
    work_after_channel,
    work_heterodyne_closed,
    work_homodyne_closed,
    x_thermal_asymptote,
    x_thermal_limit,
    x_vacuum_limit,
)
from cvwork.errors import (
    DimensionError,
    DomainError,
    NumericError,
    UnphysicalStateError,
    ValidationError,
)
from cvwork.protocols import (
    CorrelationResult,
    SnrResult,
    qi_hypotheses,
    qi_intensity_moments,
    qi_snr_closed_thermal,
    qi_snr_closed_vacuum,
    qkd_rho_closed_thermal,
    qkd_rho_closed_vacuum,
    qkd_rho_from_cm,
)
from cvwork.states import (
    ChannelParams,
    TmsParams,
    TwoModeState,
    apply_channel,
    make_thermal,
    make_tmsts,
    occupation_from_temperature,
    two_mode_squeeze_symplectic,
)
from cvwork.symplectic import (
    CovarianceMatrix,
    GaussianState,
    SymplecticSpectrum,
    ppt_smallest_eigenvalue,
    symplectic_eigenvalues,
    validate,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "HET",
    "HOMP",
    "HOMX",
    "ChannelParams",
    "CorrelationResult",
    "CovarianceMatrix",
    "DimensionError",
    "DomainError",
    "GaussianState",
    "MeasurementSpec",
    "NumericError",
    "SnrResult",
    "SymplecticSpectrum",
    "TmsParams",
    "TwoModeState",
    "UnphysicalStateError",
    "ValidationError",
    "WorkResult",
    "apply_channel",
    "conditional_cov",
    "extracted_work_general",
    "feedback_displacement",
    "make_thermal",
    "make_tmsts",
    "occupation_from_temperature",
    "ppt_smallest_eigenvalue",
    "qi_hypotheses",
    "qi_intensity_moments",
    "qi_snr_closed_thermal",
    "qi_snr_closed_vacuum",
    "qkd_rho_closed_thermal",
    "qkd_rho_closed_vacuum",
    "qkd_rho_from_cm",
    "symplectic_eigenvalues",
    "two_mode_squeeze_symplectic",
    "validate",
    "von_neumann_entropy",
    "work_after_channel",
    "work_heterodyne_closed",
    "work_homodyne_closed",
    "x_thermal_asymptote",
    "x_thermal_limit",
    "x_vacuum_limit",
]
