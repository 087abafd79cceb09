"""Computable moment-problem criteria on polynomial algebras R[x1, ..., xs]."""

from .certify import (Certificate, GeneratorBasis, InfeasibleReport, counterexample_search,
                      enumerate_basis, find_certificate, search_certificate, verify_certificate)
from .errors import (DegreeOverflowError, MomentKitError, NormalizationError, NotAMomentSequenceError,
                     RankDetectionError, RecoveryError)
from .hausdorff import (Recovered1D, Sequence1D, interval_bound, is_psd_on_N0, marginal,
                        recover_atoms, verify_recovery)
from .moments import (AtomicMeasure, MomentMatrix, MomentSequence, check_ball_criterion,
                      check_binomial_cone, eval_functional, is_psd, moment_matrix, moments_from_measure,
                      uniform_interval_moments)
from .poly import Polynomial, binomial_product, evaluate, format_polynomial, parse_polynomial
from .vnorm import (VnormEstimate, atomic_vnorm, check_ratio_root_agreement, check_seminorm_laws,
                    support_radius, vnorm_ratio, vnorm_root)

__version__ = "0.1.0"

__all__ = [
    "AtomicMeasure", "Certificate", "DegreeOverflowError", "GeneratorBasis", "InfeasibleReport",
    "MomentKitError", "MomentMatrix", "MomentSequence", "NormalizationError", "NotAMomentSequenceError",
    "Polynomial", "RankDetectionError", "Recovered1D", "RecoveryError", "Sequence1D", "VnormEstimate",
    "atomic_vnorm", "binomial_product", "check_ball_criterion", "check_binomial_cone",
    "check_ratio_root_agreement", "check_seminorm_laws", "counterexample_search", "enumerate_basis",
    "eval_functional", "evaluate", "find_certificate", "format_polynomial", "interval_bound",
    "is_psd", "is_psd_on_N0", "marginal", "moment_matrix", "moments_from_measure", "parse_polynomial",
    "recover_atoms", "search_certificate", "support_radius", "uniform_interval_moments",
    "verify_certificate", "verify_recovery", "vnorm_ratio", "vnorm_root",
]
