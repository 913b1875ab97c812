"""Star-graph Ising (Dandelion) credit-risk model.

Exact loss distributions, risk metrics, and correlation scans for a portfolio
of N credits coupled to one central node, valid over the full admissible
correlation range including negative central correlations.
"""

__version__ = "0.1.0"

from .core_model import (
    EPS_BOUND,
    AdmissibilityError,
    CalibratedParams,
    ModelConfig,
    RhoInterval,
    calibrate,
    conditional_probs,
    q_to_rho,
    rho_bounds,
    rho_to_q,
)
from .distribution import (
    LossPmf,
    MixtureForm,
    joint_log_prob,
    loss_moments,
    loss_pmf,
    marginal_noncentral_log_prob,
    mixture_form,
    pair_moment,
    peak_indices,
    rho_noncentral,
)
from .metrics import (
    GridSpec,
    RiskReport,
    ScanResult,
    mode_of,
    risk_report,
    scan_rho,
    value_at_risk,
)
from .oracle import (
    GENERATOR_NAME,
    MAX_ENUM_N,
    MAX_FIT_N,
    EnumerationReport,
    MaxEntConvergenceError,
    MaxEntFit,
    enumerate_model,
    maxent_fit_small,
    maxent_log_partition,
    maxent_moments,
    sample,
)

__all__ = [
    "EPS_BOUND",
    "AdmissibilityError",
    "CalibratedParams",
    "ModelConfig",
    "RhoInterval",
    "calibrate",
    "conditional_probs",
    "q_to_rho",
    "rho_bounds",
    "rho_to_q",
    "LossPmf",
    "MixtureForm",
    "joint_log_prob",
    "loss_moments",
    "loss_pmf",
    "marginal_noncentral_log_prob",
    "mixture_form",
    "pair_moment",
    "peak_indices",
    "rho_noncentral",
    "GridSpec",
    "RiskReport",
    "ScanResult",
    "mode_of",
    "risk_report",
    "scan_rho",
    "value_at_risk",
    "GENERATOR_NAME",
    "MAX_ENUM_N",
    "MAX_FIT_N",
    "EnumerationReport",
    "MaxEntConvergenceError",
    "MaxEntFit",
    "enumerate_model",
    "maxent_fit_small",
    "maxent_log_partition",
    "maxent_moments",
    "sample",
]
