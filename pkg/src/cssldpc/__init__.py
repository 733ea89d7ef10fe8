"""Construction-to-decoding toolkit for regular CSS quantum LDPC codes.

Pipeline: build two-branch multiplicative-coset base pairs over small
finite fields (gf, base), certify their structure exactly (base, binmat),
lift them with circulant permutation matrices under congruence constraints
(lift, zmod), certify distance bounds (certify), and measure frame error
rates under joint belief-propagation decoding with deterministic
post-processing (decode, harness).  Failure replay analysis (replay) stays
outside the measurement path.
"""

from .gf import Field, Subgroup, make_field, subgroup_of_order
from .base import (
    BasePair,
    TwoBranchCoefficients,
    build_base,
    census,
    check_4cycle_certificate,
    check_orthogonality_certificate,
    search_coefficients,
    verify_4cycles_directly,
)
from .binmat import SparseBinMatrix, RowSpaceBasis, kernel_basis, product_is_zero, rank_gf2
from .certify import CssCode, certify_lower_bound, code_params, min_kernel_weight_below, verify_witness
from .lift import (
    CongruenceSystem,
    LiftLabels,
    SupportOrbit,
    build_congruence_system,
    build_lift,
    liftability_report,
    orbit_from_seeds,
    solve_labels,
    support_quotient_forms,
    verify_lift,
    zero_constraints,
)
from .decode import DecoderConfig, DepolarizingPrior, JointBPDecoder, classify_outcome, sample_error, syndromes
from .harness import FerRecord, ReferenceLines, emit_plot_data, hashing_threshold, run_fer

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
