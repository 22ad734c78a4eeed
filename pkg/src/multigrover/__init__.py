"""Multiobject Grover search with a general unitary ``V``.

Full-space simulation of ``U = -I_gamma V^{-1} I_L V`` together with its
exact two-dimensional reduction and the iteration-count rule.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateSubspaceError,
    DimensionError,
    GroverError,
    InvalidTargetError,
    InvalidUnitaryError,
    NormalizationError,
    NumericalConsistencyError,
    OrthogonalStartError,
    PrecheckError,
    ResourceLimitError,
)
from .hilbert import (  # noqa: E402
    ComposedOperator,
    DenseOperator,
    IdentityOperator,
    LinearOperator,
    StateVector,
    WalshHadamardOperator,
    apply,
    fwht,
    inner_product,
    unitarity_residual,
)
from .operators import (  # noqa: E402
    SearchProblem,
    TargetSet,
    diffusion_reflection,
    oracle_reflection,
    search_step,
)
from .reduced import (  # noqa: E402
    CoefficientPair,
    OverlapData,
    ReducedModel,
    big_m_matrix,
    build_reduced_model,
    compute_overlaps,
    iterate_reduced,
    mu_state,
    optimal_iteration_count,
    success_probability,
)
from .generators import (  # noqa: E402
    StateSpec,
    TargetSpec,
    UnitarySpec,
    make_state,
    make_targets,
    make_unitary,
)
from .simulate import (  # noqa: E402
    IterationTrace,
    Verdict,
    compare_full_reduced,
    invariance_residual,
    measure,
    precheck_start,
    run_search,
)
