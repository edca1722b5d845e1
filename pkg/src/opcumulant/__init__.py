"""Operator-valued moment and cumulant expansions under ordering maps."""
from .combinatorics import (
    IntervalComposition,
    SetPartition,
    SizeProfile,
    bell_number,
    block_permutations_first_fixed,
    enumerate_interval_compositions,
    enumerate_set_partitions,
    partitions_with_profile_count,
    permutation_parity,
    size_profiles,
)
from .errors import EnumerationLimitError, InadmissibleTermError, ParseError, ValidationError
from .expr import Bracket, Expression, Term, canonicalize, cumulant, equal, moment, parse, render, substitute
from .fermi import (
    AntisymmetricTensor,
    FockVector,
    compute_rdm,
    rdm_cumulants,
    reconstruct_rdm,
    wedge,
)
from .models import OperatorModel, SplitModel, build_random_model, build_split_model, pauli_model
from .numeric import (
    VerificationReport,
    appendix_a_demo,
    evaluate,
    verify_cluster_property,
    verify_identity,
    verify_unconnected_factorization,
)
from .ordering import OrderingMapKind, admissible_partitions, canonical_factor_order, check_mo_constraint
from .transforms import (
    GeneratingComponent,
    cumulants_from_moments_pto_direct,
    cumulants_from_moments_recursive,
    cumulants_from_moments_roerdnik,
    cumulants_from_moments_tto_direct,
    expand_cumulants,
    expand_exp_mo,
    expand_moments,
    meeron_component,
    moments_from_cumulants,
    vanishing_mean_simplification,
)

__version__ = "0.1.0"
