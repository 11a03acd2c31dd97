"""Numerical laboratory for zero counts of {0,1}-cosine polynomials f = D_n - g."""

from .envelope import (
    IntervalSet,
    envelope_plus_set,
    envelope_prime_set,
    envelope_set,
)
from .ensemble import (
    ConstructionResult,
    ExperimentRecord,
    ScalingFit,
    construct_few_zeros,
    fit_scaling,
    mask_bits,
    mc_envelope_measure,
    mc_expected_zeros,
    mc_sign_change_prob,
    mc_small_ball,
    optimal_m,
    sample_mask,
)
from .errors import (
    CoslabError,
    DomainError,
    InconsistencyError,
    IntervalCountExceeded,
    ParameterError,
    PoleProximityError,
    RankError,
)
from .kernel import b_deriv, dirichlet_deriv, dirichlet_eval, envelope_s, slow_curve_phi
from .poly import (
    CoeffMask,
    DiffPoly,
    IndexSet,
    eval_f,
    eval_f_deriv,
    eval_g,
    eval_g_deriv,
    to_index_set,
)
from .zeros import ZeroReport, count_fast_slow, count_grid, count_total, oracle_count

__version__ = "0.1.0"

__all__ = [
    "CoeffMask",
    "ConstructionResult",
    "CoslabError",
    "DiffPoly",
    "DomainError",
    "ExperimentRecord",
    "InconsistencyError",
    "IndexSet",
    "IntervalCountExceeded",
    "IntervalSet",
    "ParameterError",
    "PoleProximityError",
    "RankError",
    "ScalingFit",
    "ZeroReport",
    "b_deriv",
    "construct_few_zeros",
    "count_fast_slow",
    "count_grid",
    "count_total",
    "dirichlet_deriv",
    "dirichlet_eval",
    "envelope_plus_set",
    "envelope_prime_set",
    "envelope_s",
    "envelope_set",
    "eval_f",
    "eval_f_deriv",
    "eval_g",
    "eval_g_deriv",
    "fit_scaling",
    "mask_bits",
    "mc_envelope_measure",
    "mc_expected_zeros",
    "mc_sign_change_prob",
    "mc_small_ball",
    "optimal_m",
    "oracle_count",
    "sample_mask",
    "slow_curve_phi",
    "to_index_set",
]
