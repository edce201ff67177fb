"""Tight asymptotic key rates for hybrid BB84 with heterodyne detection.

The receiver decodes polarisation qubits by mode-wise heterodyne and a
threshold test.  Symmetry reduces the eavesdropper's states to a
one-parameter family per photon-number sector, which makes the key-rate
minimisation exact and cheap.  See the README for the module map.
"""

__version__ = "0.1.0"

from .numerics import (
    DomainError,
    NotPSDError,
    SymMatrix,
    ThresholdCoeffs,
    binary_entropy,
    gaussian_g,
    lambda_coeffs,
    sym_eigvals,
    vn_entropy,
)
from .fock import (
    InsufficientCoefficientsError,
    SectorOperator,
    op_M,
    op_R,
    schwinger_total,
    sector_basis,
)
from .invariant import (
    SectorState,
    SectorSummary,
    cg_basis,
    invariant_state,
    recover_f,
    sector_c,
    sector_summary,
    sector_yield,
)
from .keymap import (
    KeyMapOutput,
    UnsupportedSectorError,
    gain_and_c_numeric,
    gmap,
    rel_entropy_closed,
    rel_entropy_numeric,
    zmap,
)
from .rates import (
    BoundInvalidError,
    EstimateSet,
    FeasibilityError,
    RateBreakdown,
    constrained_min_rate,
    optimize_tau,
    tail_bounds,
)
from .channels import (
    ChannelSpec,
    PhotonStats,
    cv_upper_bound,
    eta_from_loss_db,
    feasible_region,
    gaussian_rate,
    gaussian_sector_matrices,
    gaussian_stats,
    loss_db_from_eta,
    passive_attack_params,
    passive_rate,
    plob_bound,
    pure_loss_asymptote,
    pure_loss_rate,
    qi_rate,
)

__all__ = [
    "__version__",
    "DomainError", "NotPSDError", "SymMatrix", "ThresholdCoeffs",
    "binary_entropy", "gaussian_g", "lambda_coeffs", "sym_eigvals", "vn_entropy",
    "InsufficientCoefficientsError", "SectorOperator", "op_M", "op_R",
    "schwinger_total", "sector_basis",
    "SectorState", "SectorSummary", "cg_basis", "invariant_state", "recover_f",
    "sector_c", "sector_summary", "sector_yield",
    "KeyMapOutput", "UnsupportedSectorError", "gain_and_c_numeric", "gmap",
    "rel_entropy_closed", "rel_entropy_numeric", "zmap",
    "BoundInvalidError", "EstimateSet", "FeasibilityError", "RateBreakdown",
    "constrained_min_rate", "optimize_tau", "tail_bounds",
    "ChannelSpec", "PhotonStats", "cv_upper_bound", "eta_from_loss_db",
    "feasible_region", "gaussian_rate", "gaussian_sector_matrices",
    "gaussian_stats", "loss_db_from_eta", "passive_attack_params",
    "passive_rate", "plob_bound", "pure_loss_asymptote", "pure_loss_rate",
    "qi_rate",
]
