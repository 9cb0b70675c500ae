"""Randomized solver for simultaneous unitary equivalence of matrix sets,
with reductions for local-unitary equivalence of bipartite quantum states."""

from .algebra import (
    MatrixAlgebra,
    factor_algebra,
    full_algebra,
    matrix_algebra,
    membership_constraints,
    verify_algebra,
)
from .errors import (
    DegenerateCandidateError,
    InputError,
    InvalidAlgebraError,
    MalformedInstanceError,
    NotGenericError,
    NotPositiveDefiniteError,
    PhaseResolutionError,
    UniequivError,
)
from .linalg import (
    MatrixPolynomial,
    Tolerances,
    determinant_magnitude_sq,
    evaluate_matrix_polynomial,
    hermitian_eigendecomposition,
    inverse_sqrt_psd,
    nullspace_basis,
    polynomial_at_matrix,
    singular_value_ratio,
    singular_values,
    vandermonde_inverse_sqrt_coeffs,
)
from .oracle import (
    GaussianRational,
    exact_nullspace_dimension,
    haar_unitary_in_algebra,
    random_no_instance,
    random_yes_instance,
)
from .solver import (
    SamplerConfig,
    SolutionSpace,
    UepInstance,
    UepVerdict,
    build_linear_system,
    decide_invertible_equivalence,
    decide_uep,
    extract_unitaries,
    per_trial_failure_bound,
    sample_invertible,
    singular_value_prefilter,
    solve_solution_space,
    uep_instance_full,
)
from .states import (
    DensityOperator,
    PureState,
    density_operator,
    generic_mixed_lu,
    matrix_to_state,
    pure_state,
    resolve_eigenvector_phases,
    simultaneous_lu_pure,
    state_to_matrix,
    unilocal_mixed_equivalence,
)

__version__ = "0.1.0"
