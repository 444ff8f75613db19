"""Smoothed packing objective, its gradient, and solver constants.

The hard constraints Ax <= 1 are replaced by exponential penalties

    f(x) = -sum_i x_i + mu * sum_j exp(((Ax)_j - 1) / mu),

minimized over x >= 0.  With mu = eps / (4 ln(nm/eps)) the minimizer of f
is an eps-accurate stand-in for the packing optimum, every gradient entry
lies in [-1, inf), and any point with f(x) <= 0 is (1+eps)-feasible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EpsilonOutOfRange, GradientBelowMinusOne, NumericalOverflow
from .instance import PackingInstance

# exp() overflows double precision just above 709; beyond 700 the trajectory
# invariant Ax <= (1+eps)1 is long gone, so fail loudly instead of returning inf
MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class SolverParams:
    """Derived constants driving the bucketed descent loop.

    epsilon      -- target approximation parameter, in (0, 1/2]
    mu           -- smoothing parameter, eps / (4 ln(nm/eps))
    alpha        -- multiplicative step size, mu / 20
    num_buckets  -- dyadic gradient-magnitude classes, ceil(log2(1/eps))
    iterations   -- iteration budget, ceil(10 * num_buckets * ln(2n) / (alpha * eps))
    n, m         -- variable and constraint counts of the instance
    """

    epsilon: float
    mu: float
    alpha: float
    num_buckets: int
    iterations: int
    n: int
    m: int


def derive_params(n: int, m: int, epsilon: float) -> SolverParams:
    """Compute all solver constants from the instance shape and epsilon.

    mu and the iteration budget use natural logarithms; the bucket count
    uses base 2 because buckets are dyadic intervals.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if not (0.0 < epsilon <= 0.5):
        raise EpsilonOutOfRange(f"epsilon must be in (0, 1/2], got {epsilon}")
    mu = epsilon / (4.0 * math.log(n * m / epsilon))
    alpha = mu / 20.0
    w = math.ceil(math.log2(1.0 / epsilon))
    iterations = math.ceil(10.0 * w * math.log(2.0 * n) / (alpha * epsilon))
    return SolverParams(
        epsilon=float(epsilon),
        mu=mu,
        alpha=alpha,
        num_buckets=w,
        iterations=iterations,
        n=int(n),
        m=int(m),
    )


def penalties(inst: PackingInstance, x: np.ndarray, mu: float) -> np.ndarray:
    """Exponential penalty per constraint: p_j = exp(((Ax)_j - 1) / mu)."""
    exponents = (inst.matrix.row_activity(x) - 1.0) / mu
    if exponents.size:
        worst = int(np.argmax(exponents))
        if exponents[worst] > MAX_EXPONENT:
            raise NumericalOverflow(worst)
    return np.exp(exponents)


def objective(inst: PackingInstance, x: np.ndarray, mu: float) -> float:
    """Smoothed objective -1'x + mu * sum_j p_j(x)."""
    x = np.asarray(x, dtype=np.float64)
    return float(-x.sum() + mu * penalties(inst, x, mu).sum())


def gradient(inst: PackingInstance, x: np.ndarray, mu: float) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of the smoothed objective and the penalties it was built from.

    grad_i = -1 + sum_j A_ji p_j(x), accumulated through the column view.
    The penalties are returned as well so the covering pipeline can reuse
    them for the dual average without a second exponential pass.
    """
    p = penalties(inst, x, mu)
    grad = inst.matrix.col_activity(p) - 1.0
    if __debug__ and grad.size:
        k = int(np.argmin(grad))
        if grad[k] < -1.0:
            raise GradientBelowMinusOne(k, float(grad[k]))
    return grad, p


def initial_point(inst: PackingInstance, epsilon: float) -> np.ndarray:
    """Starting point x0_i = (1 - eps/2) / (n * ||A_:i||_inf).

    On a normalized instance this is strictly feasible with slack eps/2 in
    every constraint, which keeps all initial penalties tiny.
    """
    norms = inst.matrix.column_inf_norms()
    return (1.0 - epsilon / 2.0) / (inst.n * norms)
