"""Desk-scale computations for symmetric tensor categories of group
intertwiners, their twisted gluings over finite simplicial bases, and
the truncated graded algebras they generate."""

from .errors import (
    CapExceeded,
    ConsistencyError,
    InputParse,
    IrrationalPhase,
    MissingValue,
    NotACocycle,
    NotACocycleModG,
    NotInNormalizer,
    NotUnitary,
    RankDeficientVModule,
    SearchCapExceeded,
    SizeCapExceeded,
    ToolkitError,
    TruncationOverflow,
    WrongKind,
)
from .linalg import (
    ComplexMatrix,
    Tolerance,
    adjoint,
    canonical_basis,
    hs_inner,
    hs_norm,
    identity,
    kron,
    nullspace,
    opnorm,
    projection_residual,
    tensor_power,
)
from .groups import (
    KIND_FINITE,
    KIND_SU,
    KIND_U,
    GroupSpec,
    LieBasis,
    NormalizerElement,
    cyclic_diagonal_group,
    enumerate_finite,
    full_unitary,
    lie_basis,
    quaternion_group,
    special_unitary,
    trivial_group,
    verify_normalizer,
)
from .repcat import (
    ConjugatePair,
    IntertwinerSpace,
    SpecialObjectData,
    antisym_projector,
    averaged_fixed_space,
    conjugate_pair,
    group_average,
    hat_action,
    intertwiners,
    permutation_unitary,
    special_isometry,
    symmetry_unitary,
)
from .basecech import (
    COEFF_FINITE,
    COEFF_INT,
    COEFF_PHASE,
    CechCocycle,
    CocycleCheck,
    CohomologySummary,
    Cover,
    IntegralCohomClass,
    SimplicialComplex,
    circle_class,
    det_pushforward,
    equivalent,
    h2_integral,
    is_cocycle,
    normalized_lift,
    octahedron,
    smith_normal_form,
    snap_phase,
    trivial_cocycle,
)
from .glue import (
    GluedArrow,
    GluedCategory,
    GluedSpace,
    GluingDatum,
    IsomorphismReport,
    TwistedSpecialExtraction,
    build_glued,
    extract_twisted_special,
    fibre_eval,
    glued_identity,
    glued_space,
    glued_symmetry,
    isomorphic,
    norm_function,
    scalar_datum,
    tensor_glued,
)
from .dralg import (
    DRElement,
    DRTruncation,
    StabilizerVerdict,
    canonical_endo,
    circle_action,
    dr_add,
    dr_adjoint,
    dr_close,
    dr_element,
    dr_mul,
    dr_norm,
    dr_one,
    eq_rhoeps,
    fixed_points,
    gauge_action,
    inner_endo_nu,
    special_element,
    stabilizer_test,
)
from .verify import Check, builtin_checks

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
