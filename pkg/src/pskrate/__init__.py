"""Achievable-rate bounds for entanglement-assisted communication with
phase-modulated two-mode squeezed vacuum over lossy thermal-noise bosonic
channels: closed forms, exact truncated-Fock-space numerics, and a dense
channel simulation that cross-verifies them.
"""

from .bounds import (AdvantageRatio, BoundReport, FidelityGapBound,
                     achievable_rate_closed_form, advantage_ratio, bound_report,
                     continuity_penalty, continuity_penalty_proof_form,
                     fidelity_gap_bound, mixed_entropy_lower_bound,
                     modulation_base, psk_achievable_rate, trace_distance_bound)
from .channel import (ChannelParams, CovarianceData, ReducedParams, ValidityReport,
                      conditional_entropy, covariance, make_params, reduced,
                      reference_capacities, symplectic_mu, validity_check)
from .fockstate import (EntropyResult, TruncatedState, build_dephased_state,
                        build_psk_state, holevo_continuous, holevo_psk,
                        hs_perturbation_norm_sq, lambda_element, p_diag,
                        rotated_element, truncation_cutoff, von_neumann_entropy)
from .special import g_entropy, hyp2f1_nonterminating, hyp2f1_regularized, hyp2f1_terminating

__version__ = "0.1.0"

__all__ = [
    "AdvantageRatio", "BoundReport", "ChannelParams", "CovarianceData",
    "EntropyResult", "FidelityGapBound", "ReducedParams", "TruncatedState",
    "ValidityReport", "achievable_rate_closed_form", "advantage_ratio",
    "bound_report", "build_dephased_state", "build_psk_state",
    "conditional_entropy", "continuity_penalty", "continuity_penalty_proof_form",
    "covariance", "fidelity_gap_bound", "g_entropy", "holevo_continuous",
    "holevo_psk", "hs_perturbation_norm_sq", "hyp2f1_nonterminating",
    "hyp2f1_regularized", "hyp2f1_terminating", "lambda_element",
    "make_params", "mixed_entropy_lower_bound", "modulation_base", "p_diag",
    "psk_achievable_rate", "reduced", "reference_capacities", "rotated_element",
    "symplectic_mu", "trace_distance_bound", "truncation_cutoff",
    "validity_check", "von_neumann_entropy",
]
