"""nchardy: noncommutative Hardy-space computation on the free unit ball."""

from .classical import (
    DiskFactorization,
    atomic_singular,
    blaschke_product,
    compare_with_nc,
    jordan_pair,
    poly_factor_classical,
)
from .errors import (
    AdmissibilityWarning,
    AlphabetMismatchError,
    BoundaryRootError,
    DiagnosticError,
    InadmissiblePointError,
    NcError,
    NotIdempotentError,
    NotInnerError,
    NotInvertibleError,
    SchemaError,
    ShapeMismatchError,
    ValidityWindowError,
)
from .evaluate import (
    MatrixPoint,
    direct_sum_points,
    evaluate,
    random_point,
    tail_bound,
)
from .factorization import (
    BsoResult,
    FactorizationResult,
    SplitResult,
    Subspace,
    autocorrelation,
    blaschke_defect,
    blaschke_singular_split,
    bso_factor,
    crofoot_kernel_frame,
    inner_outer,
    outer_defect,
    range_closure,
    shift_adjoint_apply,
    singular_test,
    solve_vacuum,
    spectral_outer,
    wandering_subspace,
)
from .fockspace import (
    FockBasis,
    OperatorMatrix,
    isometry_defect,
    left_shift_matrix,
    mult_operator,
    right_shift_matrix,
    series_to_vec,
    smallest_singular_value,
    vec_to_series,
    wandering_dimension,
    wandering_dimension_profile,
)
from .kernels import (
    KernelVector,
    SingularityPair,
    check_inner,
    inner_defect,
    kernel_direct_sum,
    kernel_inner,
    model_gram,
    model_kernel,
    search_singularities,
    sing_closure_direct_sum,
    sing_closure_similarity,
    sing_membership,
    sing_space_complement,
    szego_gram,
    szego_kernel,
)
from .ncseries import (
    NcSeries,
    Word,
    commutator_inner,
    from_json_dict,
    h2_norm,
    load_series,
    max_coeff_diff,
    phase_normalize,
    rescale,
    save_series,
    series_add,
    series_inner,
    series_invert,
    series_mul,
    to_json_dict,
    word_concat,
    word_key,
    word_reverse,
)
from .transforms import (
    IdempotentSplit,
    cayley_herglotz,
    crofoot,
    eigenvector_shift,
    frostman,
    herglotz_min_real,
    idempotent_split,
    semigroup_inner,
)

__version__ = "0.1.0"
