"""Dynamically-bucketed selective coordinate descent for packing LPs.

Each iteration computes the full smoothed gradient, splits every entry into
a small part (|g| <= eps), a capped part in [-1, -eps) u (eps, 1], and the
excess above 1, then sorts the capped parts into dyadic magnitude buckets
(eps*2^t, eps*2^(t+1)].  One bucket t is drawn uniformly at random and only
its coordinates move, multiplicatively: x_i <- x_i * exp(-alpha * capped_i).
Restricting the move to one magnitude class keeps the gradients of the
updated coordinates within a constant factor over the step, which is what
allows the comparatively large step size alpha.

The smoothed objective value never increases along the trajectory; the
solver checks this every iteration (warning by default, fatal in strict
mode) and records a full per-iteration trace.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernel
from .errors import (
    EpsilonOutOfRange,
    GradientBelowMinusOne,
    MonotonicityViolation,
    NumericalOverflow,
    OutOfDomain,
)
from .instance import PackingInstance, unscale_packing_solution
from .smoothing import SolverParams, derive_params, gradient, initial_point


def bucket_boundaries(epsilon: float, num_buckets: int) -> np.ndarray:
    """Dyadic bucket edges eps*2^0 .. eps*2^w; bucket t is (edge[t], edge[t+1]].

    Scaling by powers of two is exact in binary floating point, so interval
    membership tests against these edges have exact boundary semantics.
    """
    return epsilon * np.exp2(np.arange(num_buckets + 1))


def bucket_index(xi: float, epsilon: float, num_buckets: int) -> Optional[int]:
    """Bucket of one capped gradient value; None for xi == 0.

    Computed as min(w-1, ceil(log2(|xi|/eps)) - 1), then nudged so that the
    half-open convention is exact: |xi| equal to eps*2^(t+1) belongs to
    bucket t.
    """
    if xi == 0.0:
        return None
    a = abs(xi)
    if a <= epsilon or a > 1.0:
        raise OutOfDomain(f"|xi| = {a!r} outside (epsilon, 1]")
    t = min(num_buckets - 1, math.ceil(math.log2(a / epsilon)) - 1)
    t = max(t, 0)
    while t > 0 and a <= epsilon * 2.0**t:
        t -= 1
    while t < num_buckets - 1 and a > epsilon * 2.0 ** (t + 1):
        t += 1
    return t


@dataclass(frozen=True)
class TruncatedGradient:
    """Per-coordinate gradient decomposition plus bucket assignment.

    small + medium + excess reconstructs the gradient bitwise.  ``bucket``
    holds -1 where medium is zero; a capped value of exactly 1 always lands
    in the top bucket.
    """

    small: np.ndarray  # gradient where |g| <= eps, else 0
    medium: np.ndarray  # gradient where eps < |g| <= 1; 1 where g > 1; else 0
    excess: np.ndarray  # g - 1 where g > 1, else 0
    bucket: np.ndarray  # bucket of |medium|, -1 where medium == 0
    epsilon: float
    num_buckets: int


def truncate(grad: np.ndarray, epsilon: float) -> TruncatedGradient:
    """Split a gradient into small, capped, and excess components with buckets."""
    if not (0.0 < epsilon <= 0.5):
        raise EpsilonOutOfRange(f"epsilon must be in (0, 1/2], got {epsilon}")
    grad = np.asarray(grad, dtype=np.float64)
    if grad.size:
        k = int(np.argmin(grad))
        if grad[k] < -1.0:
            raise GradientBelowMinusOne(k, float(grad[k]))
    w = math.ceil(math.log2(1.0 / epsilon))
    absg = np.abs(grad)
    small = np.where(absg <= epsilon, grad, 0.0)
    medium = np.where((absg > epsilon) & (grad <= 1.0), grad, 0.0)
    medium = np.where(grad > 1.0, 1.0, medium)
    excess = np.where(grad > 1.0, grad - 1.0, 0.0)

    bounds = bucket_boundaries(epsilon, w)
    bucket = np.searchsorted(bounds, np.abs(medium), side="left").astype(np.int64) - 1
    bucket[medium == 0.0] = -1
    return TruncatedGradient(small, medium, excess, bucket, float(epsilon), w)


def step(x: np.ndarray, trunc: TruncatedGradient, t: int, alpha: float) -> np.ndarray:
    """Multiplicative update of bucket t: x_i * exp(-alpha * medium_i)."""
    if not 0 <= t < trunc.num_buckets:
        raise OutOfDomain(f"bucket {t} outside [0, {trunc.num_buckets - 1}]")
    x = np.asarray(x, dtype=np.float64)
    out = x.copy()
    sel = trunc.bucket == t
    out[sel] = x[sel] * np.exp(-alpha * trunc.medium[sel])
    return out


@dataclass(frozen=True)
class IterationTrace:
    """One iteration of the solve loop, at the pre-update point x_k."""

    k: int
    chosen_bucket: int
    f_value: float
    max_row_activity: float
    updated_count: int
    work: int


class SolveTrace(Sequence):
    """Per-iteration trace stored as column arrays, viewed as IterationTrace items."""

    def __init__(self, chosen_buckets, f_values, max_row_activities, updated_counts, work_per_iteration):
        self.chosen_buckets = chosen_buckets
        self.f_values = f_values
        self.max_row_activities = max_row_activities
        self.updated_counts = updated_counts
        self.work_per_iteration = int(work_per_iteration)

    def __len__(self) -> int:
        return int(self.f_values.shape[0])

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        if k < 0:
            k += len(self)
        if not 0 <= k < len(self):
            raise IndexError(k)
        return IterationTrace(
            k=k,
            chosen_bucket=int(self.chosen_buckets[k]),
            f_value=float(self.f_values[k]),
            max_row_activity=float(self.max_row_activities[k]),
            updated_count=int(self.updated_counts[k]),
            work=self.work_per_iteration,
        )

    def __repr__(self) -> str:
        return f"SolveTrace({len(self)} iterations)"


@dataclass(frozen=True)
class PackingReport:
    """Result of one packing solve.

    x_final is x_T/(1+eps) mapped back to the units of the matrix that was
    normalized, so it is feasible for the original constraints; x_raw is the
    last iterate in normalized units.  penalty_average is the running mean
    of the exponential penalties over iterations 0..T-1 (normalized units),
    which the covering pipeline consumes; None when collection was disabled.
    """

    x_final: np.ndarray
    x_raw: np.ndarray
    objective: float
    f_mu_final: float
    trace: SolveTrace
    params: SolverParams
    penalty_average: Optional[np.ndarray]
    seed: int
    monotonicity_violations: int = 0

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _run_kernel(threads: int, args):
    if threads is None or threads <= 1:
        return _kernel.iterate_seq(*args)
    import numba

    numba.set_num_threads(min(int(threads), numba.config.NUMBA_NUM_THREADS))
    return _kernel.iterate_par(*args)


def solve_packing(
    inst: PackingInstance,
    epsilon: float,
    seed: int,
    iteration_override: Optional[int] = None,
    *,
    collect_penalties: bool = True,
    strict: bool = False,
    threads: int = 1,
) -> PackingReport:
    """Run the bucketed descent loop and return the scaled solution.

    One bucket index is drawn per iteration from a counter-based generator
    seeded with ``seed``, so runs are reproducible bit for bit regardless of
    the worker count.  ``iteration_override`` replaces the derived budget
    (the covering pipeline passes its own, benchmarks probe smaller ones).
    In strict mode an increase of the smoothed objective beyond 1e-9 aborts;
    otherwise it is reported as a warning.
    """
    params = derive_params(inst.n, inst.m, epsilon)
    total = params.iterations if iteration_override is None else int(iteration_override)
    if total < 0:
        raise ValueError("iteration_override must be >= 0")

    rng = np.random.Generator(np.random.Philox(seed))
    draws = rng.integers(0, params.num_buckets, size=total, dtype=np.uint8)
    bounds = bucket_boundaries(epsilon, params.num_buckets)

    x = np.ascontiguousarray(initial_point(inst, epsilon))
    sum_p = np.zeros(inst.m)
    f_trace = np.empty(total)
    act_trace = np.empty(total)
    upd_trace = np.empty(total, dtype=np.int64)

    status, bad_row, bad_iter, mono_count, first_mono, f_final, act_final = _run_kernel(
        threads,
        (
            *inst.matrix.kernel_arrays(),
            x,
            draws,
            params.mu,
            params.alpha,
            params.epsilon,
            bounds,
            bool(strict),
            bool(collect_penalties),
            sum_p,
            f_trace,
            act_trace,
            upd_trace,
        ),
    )
    if status == _kernel.STATUS_OVERFLOW:
        raise NumericalOverflow(bad_row, bad_iter)
    if status == _kernel.STATUS_NONMONOTONE:
        raise MonotonicityViolation(bad_iter, float("nan"))
    if mono_count:
        warnings.warn(
            f"smoothed objective increased beyond 1e-9 in {mono_count} iteration(s), "
            f"first at k={first_mono}",
            RuntimeWarning,
            stacklevel=2,
        )

    x_scaled = x / (1.0 + epsilon)
    x_final = unscale_packing_solution(x_scaled, inst.column_scale)
    trace = SolveTrace(draws, f_trace, act_trace, upd_trace, inst.matrix.nnz)
    penalty_average = sum_p / total if (collect_penalties and total > 0) else None
    return PackingReport(
        x_final=x_final,
        x_raw=x,
        objective=float(x_final.sum()),
        f_mu_final=float(f_final),
        trace=trace,
        params=params,
        penalty_average=penalty_average,
        seed=int(seed),
        monotonicity_violations=int(mono_count),
    )


@dataclass(frozen=True)
class LipschitzSample:
    coordinate: int
    tau: float
    reference: float  # gradient at x_k
    observed: float  # gradient at tau*x_k + (1-tau)*x_next
    ratio: float
    ok: bool


@dataclass(frozen=True)
class LipschitzCheckReport:
    checked: int
    samples: list
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


RATIO_SLACK = 1e-9


def sample_lipschitz_check(
    inst: PackingInstance,
    state_x: np.ndarray,
    trunc: TruncatedGradient,
    t: int,
    params: SolverParams,
    taus: Sequence[float],
) -> LipschitzCheckReport:
    """Probe gradient stability along one update segment.

    For every coordinate in bucket t and every tau, evaluates the gradient
    at tau*x_k + (1-tau)*x', where x' is the bucket-t update of x_k, and
    reports whether it stays within [1/2, 3/2] of its value at x_k (1e-9
    slack).  Updated coordinates have |gradient| > eps, so the ratio is well
    defined.  Diagnostic only: violations are collected, never raised.
    """
    state_x = np.asarray(state_x, dtype=np.float64)
    g0, _ = gradient(inst, state_x, params.mu)
    x_next = step(state_x, trunc, t, params.alpha)
    selected = np.flatnonzero(trunc.bucket == t)
    samples: list[LipschitzSample] = []
    violations: list[LipschitzSample] = []
    for tau in taus:
        xt = tau * state_x + (1.0 - tau) * x_next
        g, _ = gradient(inst, xt, params.mu)
        for i in selected:
            ratio = float(g[i] / g0[i])
            ok = (0.5 - RATIO_SLACK) <= ratio <= (1.5 + RATIO_SLACK)
            sample = LipschitzSample(
                coordinate=int(i),
                tau=float(tau),
                reference=float(g0[i]),
                observed=float(g[i]),
                ratio=ratio,
                ok=ok,
            )
            samples.append(sample)
            if not ok:
                violations.append(sample)
    return LipschitzCheckReport(checked=len(samples), samples=samples, violations=violations)
