"""Covering solver built on the packing solver's dual structure.

Pipeline: transpose the covering instance into its packing dual, run the
packing solver for the covering iteration budget, average the exponential
penalties over all iterations (the average constraint slack equals the
average packing gradient, so the mean penalty vector is an approximately
feasible covering solution), repair the few constraints the average leaves
short, and rescale.  The repaired output is feasible by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dbscd import PackingReport, solve_packing
from .errors import EmptyAccumulator, EpsilonOutOfRange
from .instance import CoveringInstance, PackingInstance, dualize
from .smoothing import SolverParams, derive_params

COVERING_EPSILON_MAX = 0.1


@dataclass
class DualAverage:
    """Running sum of penalty vectors; average() divides by the count."""

    sum_p: np.ndarray
    count: int

    def add(self, p: np.ndarray) -> None:
        self.sum_p = self.sum_p + p
        self.count += 1


def average(acc: DualAverage) -> np.ndarray:
    """Mean penalty vector (1/T) * sum_k p(x_k)."""
    if acc.count == 0:
        raise EmptyAccumulator("no penalty vectors accumulated")
    return acc.sum_p / acc.count


def covering_iterations(params: SolverParams, n: int) -> int:
    """Iteration budget for the covering pipeline.

    The larger of the two requirements wins: one makes the mean penalty
    vector nearly feasible deterministically, the other controls the
    per-constraint failure probability of the random bucket choices.
    """
    w = params.num_buckets
    first = math.ceil(6.0 * w * math.log(2.0 * n) / (params.alpha * params.epsilon))
    second = math.ceil(2.0 * w * w * math.log(n / params.epsilon) / params.epsilon**2)
    return max(first, second)


def repair_mask(y_bar: np.ndarray, inst: PackingInstance, epsilon: float) -> np.ndarray:
    """Constraints the averaged penalties leave short by more than 3*eps."""
    lam = inst.matrix.col_activity(y_bar) - 1.0 + epsilon
    return lam <= -2.0 * epsilon


def fix_dual(y_bar: np.ndarray, inst: PackingInstance, epsilon: float) -> np.ndarray:
    """Repair near-feasible dual averages into an exactly feasible covering point.

    For every packing variable i whose constraint is short (slack + eps at
    or below -2*eps), mass is added to the covering variable with the
    largest coefficient in column i (ties: lowest row index), exactly enough
    to lift that constraint to 1 - eps.  Dividing the result by (1 - 3*eps)
    makes every constraint reach 1, including the unrepaired ones, which sit
    above 1 - 3*eps by construction.
    """
    if not (0.0 < epsilon <= COVERING_EPSILON_MAX):
        raise EpsilonOutOfRange(f"epsilon must be in (0, 1/10] for covering, got {epsilon}")
    y_bar = np.asarray(y_bar, dtype=np.float64)
    if np.any(y_bar < 0.0):
        raise ValueError("y_bar must be non-negative")
    lam = inst.matrix.col_activity(y_bar) - 1.0 + epsilon
    y_fix = y_bar.copy()
    for i in np.flatnonzero(lam <= -2.0 * epsilon):
        rows, vals = inst.matrix.column_entries(int(i))
        k = int(np.argmax(vals))  # first max = lowest row index on ties
        y_fix[rows[k]] += -lam[i] / vals[k]
    return y_fix / (1.0 - 3.0 * epsilon)


@dataclass(frozen=True)
class CoveringReport:
    """Result of one covering solve.

    y_final is in the units of the matrix the covering instance was built
    from; slack_min is the worst constraint slack of the raw penalty average
    before any repair or rescaling (normalized units).
    """

    y_final: np.ndarray
    objective: float
    num_fixed: int
    slack_min: float
    packing_report: PackingReport
    T_cov: int


def solve_covering(
    cov: CoveringInstance,
    epsilon: float,
    seed: int,
    iteration_override: Optional[int] = None,
    *,
    strict: bool = False,
    threads: int = 1,
) -> CoveringReport:
    """Dualize, solve the packing dual, average penalties, repair, rescale."""
    if not (0.0 < epsilon <= COVERING_EPSILON_MAX):
        raise EpsilonOutOfRange(f"epsilon must be in (0, 1/10] for covering, got {epsilon}")
    pack = dualize(cov)
    params = derive_params(pack.n, pack.m, epsilon)
    t_cov = covering_iterations(params, pack.n) if iteration_override is None else int(iteration_override)
    report = solve_packing(
        pack,
        epsilon,
        seed,
        iteration_override=t_cov,
        collect_penalties=True,
        strict=strict,
        threads=threads,
    )
    if report.penalty_average is None:
        raise EmptyAccumulator("packing solve returned no penalty average")
    y_bar = report.penalty_average
    slack_min = float((pack.matrix.col_activity(y_bar) - 1.0).min())
    num_fixed = int(np.count_nonzero(repair_mask(y_bar, pack, epsilon)))
    y_norm = fix_dual(y_bar, pack, epsilon)
    # stored covering matrix = raw / cov.column_scale; packing dual divides by
    # pack.column_scale again, so original units divide by the product
    y_final = y_norm / (cov.column_scale * pack.column_scale)
    return CoveringReport(
        y_final=y_final,
        objective=float(y_final.sum()),
        num_fixed=num_fixed,
        slack_min=slack_min,
        packing_report=report,
        T_cov=t_cov,
    )
