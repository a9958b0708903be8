"""Tensor-network states on rings: exact weights, canonical forms,
negativity scans and purification searches.

The package works with translationally invariant matrix-product data:
a site tensor A assigns each ring of L sites the weights
tr(A[i_1] .. A[i_L]).  On top of that sit four tool sets: an integer
matrix family that compiles five 3x3 matrices into a d=7 site tensor
with closed-form weights, exhaustive and randomized scans for negative
weights in exact arithmetic, canonical block decompositions with gauge
and proportionality certificates, and a restarted numerical search for
local purifications at fixed bond dimension.
"""

from .canonical import (
    CanonicalBlock,
    CanonicalForm,
    GaugeWitness,
    ProportionalityVerdict,
    block_sites,
    blocks_linearly_independent,
    canonicalize,
    gauge_equivalent,
    injectivity_length,
    proportional_all_lengths,
    proportionality_length_bound,
    proportionality_step,
)
from .errors import (
    DegenerateInputError,
    ModeError,
    NumericError,
    ResourceCapError,
    SchemaError,
    TnpurError,
)
from .positivity import (
    PositivityReport,
    extend_witness,
    heuristic_negative_search,
    necklace_count,
    necklace_words,
    scan_classical,
    scan_general,
)
from .powersum import (
    PowerSumFamily,
    charpoly_from_power_sums,
    elementary_from_power,
    first_nonzero_power,
    multiset_from_power_sums,
    power_sums,
    proportional_powersum_families,
)
from .purifier import (
    STATUS_FOUND,
    STATUS_NOT_FOUND,
    LoopResult,
    PurifyResult,
    PurifySearchConfig,
    VerificationReport,
    fit_purification,
    semi_decision_loop,
    step_bound,
    theoretical_length_bound,
    verify_purification,
)
from .reduction import (
    ZulcInstance,
    build_reduction,
    check_promise,
    joint_triangularizer,
    oracle_trace,
    random_instance,
    scale_to_integers,
    sym_basis_isometry,
    sym_pair_maps,
)
from .scalars import FLOAT, MODES, RATIONAL, RationalComplex, qc, to_rational_complex
from .serialize import (
    canonical_from_json,
    canonical_to_json,
    jsonable,
    load_canonical,
    load_tensor,
    load_zulc,
    save_canonical,
    save_tensor,
    tensor_from_json,
    tensor_to_json,
    zulc_from_json,
    zulc_to_json,
)
from .tensors import (
    MpsTensor,
    PurificationTensor,
    StateVector,
    build_classical_mpdo,
    build_state_vector,
    double_layer,
    flip_operator,
    min_eig_hermitian,
    overlap,
    proportional_at,
    purified_diagonal,
    sym_projector,
    transfer_matrix,
    word_trace,
)

__version__ = "0.1.0"

__all__ = [
    "CanonicalBlock",
    "CanonicalForm",
    "DegenerateInputError",
    "FLOAT",
    "GaugeWitness",
    "LoopResult",
    "MODES",
    "ModeError",
    "MpsTensor",
    "NumericError",
    "PositivityReport",
    "PowerSumFamily",
    "ProportionalityVerdict",
    "PurificationTensor",
    "PurifyResult",
    "PurifySearchConfig",
    "RATIONAL",
    "RationalComplex",
    "ResourceCapError",
    "STATUS_FOUND",
    "STATUS_NOT_FOUND",
    "SchemaError",
    "StateVector",
    "TnpurError",
    "VerificationReport",
    "ZulcInstance",
    "block_sites",
    "blocks_linearly_independent",
    "build_classical_mpdo",
    "build_reduction",
    "build_state_vector",
    "canonical_from_json",
    "canonical_to_json",
    "canonicalize",
    "charpoly_from_power_sums",
    "check_promise",
    "double_layer",
    "elementary_from_power",
    "extend_witness",
    "first_nonzero_power",
    "fit_purification",
    "flip_operator",
    "gauge_equivalent",
    "heuristic_negative_search",
    "injectivity_length",
    "jsonable",
    "joint_triangularizer",
    "load_canonical",
    "load_tensor",
    "load_zulc",
    "min_eig_hermitian",
    "multiset_from_power_sums",
    "necklace_count",
    "necklace_words",
    "oracle_trace",
    "overlap",
    "power_sums",
    "proportional_all_lengths",
    "proportional_at",
    "proportional_powersum_families",
    "proportionality_length_bound",
    "proportionality_step",
    "purified_diagonal",
    "qc",
    "random_instance",
    "save_canonical",
    "save_tensor",
    "scale_to_integers",
    "scan_classical",
    "scan_general",
    "semi_decision_loop",
    "step_bound",
    "sym_basis_isometry",
    "sym_pair_maps",
    "theoretical_length_bound",
    "to_rational_complex",
    "transfer_matrix",
    "verify_purification",
    "word_trace",
    "zulc_from_json",
    "zulc_to_json",
]
