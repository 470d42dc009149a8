"""Exact lattice machinery for Mukai lattices of K3[n]-type varieties."""

from .lattice import (
    IntegralLattice,
    LatticeVector,
    RationalVector,
    FiniteAbelianGroup,
    LatticeError,
    build_standard,
    direct_sum,
    rescale,
    inner,
    divisibility,
    is_primitive,
    smith_normal_form,
    discriminant_group,
    saturate,
    is_primitive_sublattice,
    signature,
)
from .isometry import (
    Isometry,
    IsometryError,
    OrientationDatum,
    make_isometry,
    identity,
    minus_identity,
    verify,
    compose,
    compose_all,
    inverse,
    reflection,
    eichler_transvection_in,
    exp_map_in,
    swap_pair,
    replay_word,
    standard_orientation,
    orientation_sign,
    discriminant_action,
    is_discriminant_trivial,
)
from .transport import (
    Reduction,
    ReductionError,
    TransportError,
    reduce_vector,
    eichler_reduce,
    transport_pair,
    bfs_reduce,
)
from .extended import (
    ExtendedError,
    ExtendedLattice,
    BField,
    PsiProfile,
    ExceptionalData,
    HyperbolicQuotient,
    extend,
    exp_B,
    eichler_transvection,
    swap_ef,
    profile,
    diagonalize,
    hyperbolic_quotient,
    exceptional_case,
    direct_sum_map,
)
from .model import (
    ModelError,
    PeriodSurrogate,
    MukaiModel,
    DeltaClass,
    DeltaConstraint,
    TorsionClass,
    BrauerRep,
    TransportCheck,
    make_model,
    is_delta_class,
    check_delta,
    delta_class,
    find_delta,
    theta,
    torsion_neg,
    torsion_order,
    brauer_class,
    brauer_trivial,
    brauer_eq,
    theta_brauer,
    extended_model,
    build_psi_tilde,
    perp_extension,
    restrict_to_vperp,
    parallel_transport_check,
)
from .pipeline import (
    PipelineError,
    K3Input,
    DecideConfig,
    EquivalenceCertificate,
    gcd_criterion,
    transformed_triple,
    find_t,
    mukai_ambient,
    polarization_vector,
    embed_triple,
    exp_tH,
    select_gamma,
    select_k,
    decide,
    verify_certificate,
    verify_certificate_report,
)
from .serialize import (
    lattice_to_json,
    lattice_from_json,
    vector_to_json,
    vector_from_json,
    isometry_to_json,
    isometry_from_json,
    brauer_to_json,
    brauer_from_json,
    certificate_to_json,
    certificate_from_json,
    dumps_certificate,
    loads_certificate,
)

__all__ = [
    # lattice
    "IntegralLattice", "LatticeVector", "RationalVector", "FiniteAbelianGroup",
    "LatticeError", "build_standard", "direct_sum", "rescale", "inner",
    "divisibility", "is_primitive", "smith_normal_form", "discriminant_group",
    "saturate", "is_primitive_sublattice", "signature",
    # isometry
    "Isometry", "IsometryError", "OrientationDatum", "make_isometry",
    "identity", "minus_identity", "verify", "compose", "compose_all",
    "inverse", "reflection", "eichler_transvection_in", "exp_map_in",
    "swap_pair", "replay_word", "standard_orientation", "orientation_sign",
    "discriminant_action", "is_discriminant_trivial",
    # transport
    "Reduction", "ReductionError", "TransportError", "reduce_vector",
    "eichler_reduce", "transport_pair", "bfs_reduce",
    # extended
    "ExtendedError", "ExtendedLattice", "BField", "PsiProfile",
    "ExceptionalData", "HyperbolicQuotient", "extend", "exp_B",
    "eichler_transvection", "swap_ef", "profile", "diagonalize",
    "hyperbolic_quotient", "exceptional_case", "direct_sum_map",
    # model
    "ModelError", "PeriodSurrogate", "MukaiModel", "DeltaClass",
    "DeltaConstraint", "TorsionClass", "BrauerRep", "TransportCheck",
    "make_model", "is_delta_class", "check_delta", "delta_class", "find_delta",
    "theta", "torsion_neg", "torsion_order", "brauer_class", "brauer_trivial",
    "brauer_eq", "theta_brauer", "extended_model", "build_psi_tilde",
    "perp_extension", "restrict_to_vperp", "parallel_transport_check",
    # pipeline
    "PipelineError", "K3Input", "DecideConfig", "EquivalenceCertificate",
    "gcd_criterion", "transformed_triple", "find_t", "mukai_ambient",
    "polarization_vector", "embed_triple", "exp_tH", "select_gamma",
    "select_k", "decide", "verify_certificate", "verify_certificate_report",
    # serialize
    "lattice_to_json", "lattice_from_json", "vector_to_json",
    "vector_from_json", "isometry_to_json", "isometry_from_json",
    "brauer_to_json", "brauer_from_json", "certificate_to_json",
    "certificate_from_json", "dumps_certificate", "loads_certificate",
]
