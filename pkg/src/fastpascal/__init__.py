"""Fast, stable products with triangular Pascal matrices and Bezier evaluation."""

from .autotune import (
    CostModel,
    TuneResult,
    default_plan,
    fit_cost_model,
    load_plan,
    measure_costs,
    save_plan,
    solve_dynprog_fixed,
    solve_dynprog_free,
)
from .bezier import (
    BernsteinMatrixSpec,
    BezierCurve,
    batch_eval,
    bernstein_matrix_apply,
    bernstein_poly,
    de_casteljau,
    fast_eval,
)
from .conv import (
    ConvKernel,
    FftSymbol,
    conv_full_transpose,
    conv_valid,
    fft_symbol,
    make_kernel,
)
from .fastmul import (
    FlopCounter,
    Partition,
    RecursionPlan,
    kway_apply,
    partition_uniform,
    recursive_apply,
)
from .oracle import PrecisionConfig, oracle_apply, uniform_relative_error
from .pascal import (
    MatrixSpec,
    apply_diagonal,
    apply_quadratic,
    apply_sign,
    dense_materialize,
    pascal_entry,
)
from .toeplitz import ToeplitzPlan, make_toeplitz_plan, optimal_alpha, toeplitz_apply

__all__ = [
    "BernsteinMatrixSpec", "BezierCurve", "ConvKernel", "CostModel", "FftSymbol", "FlopCounter",
    "MatrixSpec", "Partition", "PrecisionConfig", "RecursionPlan", "ToeplitzPlan", "TuneResult",
    "apply_diagonal", "apply_quadratic", "apply_sign", "batch_eval", "bernstein_matrix_apply",
    "bernstein_poly", "conv_full_transpose", "conv_valid", "de_casteljau", "default_plan",
    "dense_materialize", "fast_eval", "fft_symbol", "fit_cost_model", "kway_apply", "load_plan",
    "make_kernel", "make_toeplitz_plan", "measure_costs", "optimal_alpha", "oracle_apply",
    "partition_uniform", "pascal_entry", "recursive_apply", "save_plan", "solve_dynprog_fixed",
    "solve_dynprog_free", "toeplitz_apply", "uniform_relative_error",
]
