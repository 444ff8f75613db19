"""Approximate solver for positive (packing and covering) linear programs.

Packing LPs ``max 1'x : Ax <= 1, x >= 0`` are solved by minimizing an
exponentially smoothed objective with selective multiplicative updates of
one randomly chosen gradient-magnitude bucket per iteration; covering LPs
are solved through the packing dual by averaging the exponential penalties.
An exact dense simplex oracle and a benchmark harness verify approximation
quality at desk scale.
"""

from .covering import (
    CoveringReport,
    DualAverage,
    average,
    covering_iterations,
    fix_dual,
    solve_covering,
)
from .dbscd import (
    IterationTrace,
    LipschitzCheckReport,
    PackingReport,
    SolveTrace,
    TruncatedGradient,
    bucket_index,
    sample_lipschitz_check,
    solve_packing,
    step,
    truncate,
)
from .errors import (
    CycleLimit,
    DuplicateEntry,
    EmptyAccumulator,
    EpsilonOutOfRange,
    GradientBelowMinusOne,
    MonotonicityViolation,
    NegativeEntry,
    NonFinite,
    NumericalOverflow,
    OutOfDomain,
    ParseError,
    PositiveLPError,
    SizeLimit,
    ZeroColumn,
)
from .instance import (
    CoveringInstance,
    PackingInstance,
    SparseNonnegMatrix,
    dualize,
    generate_random,
    normalize,
    normalize_covering,
    parse_matrix_market,
    unscale_packing_solution,
    write_matrix_market,
)
from .oracle import (
    OracleSolution,
    SolveStatus,
    check_feasible,
    enumerate_vertices,
    simplex_covering,
    simplex_packing,
)
from .smoothing import (
    SolverParams,
    derive_params,
    gradient,
    initial_point,
    objective,
    penalties,
)

__version__ = "0.1.0"

__all__ = [
    "CoveringInstance",
    "CoveringReport",
    "CycleLimit",
    "DualAverage",
    "DuplicateEntry",
    "EmptyAccumulator",
    "EpsilonOutOfRange",
    "GradientBelowMinusOne",
    "IterationTrace",
    "LipschitzCheckReport",
    "MonotonicityViolation",
    "NegativeEntry",
    "NonFinite",
    "NumericalOverflow",
    "OracleSolution",
    "OutOfDomain",
    "PackingInstance",
    "PackingReport",
    "ParseError",
    "PositiveLPError",
    "SizeLimit",
    "SolveStatus",
    "SolveTrace",
    "SolverParams",
    "SparseNonnegMatrix",
    "TruncatedGradient",
    "ZeroColumn",
    "average",
    "bucket_index",
    "check_feasible",
    "covering_iterations",
    "derive_params",
    "dualize",
    "enumerate_vertices",
    "fix_dual",
    "generate_random",
    "gradient",
    "initial_point",
    "normalize",
    "normalize_covering",
    "objective",
    "parse_matrix_market",
    "penalties",
    "sample_lipschitz_check",
    "simplex_covering",
    "simplex_packing",
    "solve_covering",
    "solve_packing",
    "step",
    "truncate",
    "unscale_packing_solution",
    "write_matrix_market",
]
