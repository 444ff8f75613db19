"""Exact ground truth for desk-scale instances.

A dense tableau simplex with Bland's anti-cycling rule solves the packing LP
(slack basis is immediately feasible) and the covering LP (two-phase, with
artificial variables).  Brute-force vertex enumeration cross-checks the
simplex on tiny instances.  Not a production LP solver: no sparsity, no
presolve; a hard size cap keeps the dense tableau affordable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import CycleLimit, SizeLimit
from .instance import CoveringInstance, PackingInstance

SIZE_CAP = 500  # max m + n for the dense tableau
ENUM_VAR_CAP = 5  # max LP variables for vertex enumeration
PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class OracleSolution:
    opt_value: float
    x_opt: np.ndarray
    status: SolveStatus
    pivots: int


def _pivot_budget(m: int, n: int) -> int:
    return 10 * math.comb(m + n, min(m, n))


def _bland_min(tableau: np.ndarray, basis: np.ndarray, cost: np.ndarray, allowed: int, budget: int):
    """Minimize cost over the tableau in place; Bland's rule both ways.

    ``allowed`` restricts entering variables to the first columns (used to
    lock out artificials in phase 2).  Returns (pivots, status); cost row is
    reduced in place, objective value is -cost[-1].
    """
    m = tableau.shape[0]
    pivots = 0
    while True:
        enter = -1
        for j in range(allowed):
            if cost[j] < -PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return pivots, SolveStatus.OPTIMAL
        ratio_best = math.inf
        leave = -1
        for i in range(m):
            a = tableau[i, enter]
            if a > PIVOT_TOL:
                r = tableau[i, -1] / a
                if r < ratio_best - PIVOT_TOL or (
                    abs(r - ratio_best) <= PIVOT_TOL and (leave < 0 or basis[i] < basis[leave])
                ):
                    if r < ratio_best:
                        ratio_best = r
                    leave = i
        if leave < 0:
            return pivots, SolveStatus.UNBOUNDED
        piv = tableau[leave, enter]
        tableau[leave, :] /= piv
        for i in range(m):
            if i != leave and tableau[i, enter] != 0.0:
                tableau[i, :] -= tableau[i, enter] * tableau[leave, :]
        cost -= cost[enter] * tableau[leave, :]
        basis[leave] = enter
        pivots += 1
        if pivots > budget:
            raise CycleLimit(f"exceeded {budget} pivots")


def _basic_solution(tableau: np.ndarray, basis: np.ndarray, n_vars: int) -> np.ndarray:
    x = np.zeros(n_vars)
    for i, b in enumerate(basis):
        if b < n_vars:
            x[b] = tableau[i, -1]
    return x


def simplex_packing(inst: PackingInstance) -> OracleSolution:
    """Exact optimum of the stored packing LP (normalized units).

    The all-slack basis at b = 1 is feasible, so a single phase suffices;
    a packing instance without zero columns is always bounded.
    """
    m, n = inst.matrix.shape
    if m + n > SIZE_CAP:
        raise SizeLimit(f"m + n = {m + n} exceeds {SIZE_CAP}")
    A = inst.matrix.to_dense()
    budget = _pivot_budget(m, n)

    tableau = np.hstack([A, np.eye(m), np.ones((m, 1))])
    basis = np.arange(n, n + m)
    cost = np.concatenate([-np.ones(n), np.zeros(m + 1)])  # minimize -1'x
    pivots, status = _bland_min(tableau, basis, cost, n + m, budget)
    if status is not SolveStatus.OPTIMAL:
        return OracleSolution(math.inf, np.zeros(n), status, pivots)
    x = _basic_solution(tableau, basis, n)
    return OracleSolution(float(x.sum()), x, SolveStatus.OPTIMAL, pivots)


def simplex_covering(inst: CoveringInstance) -> OracleSolution:
    """Exact optimum of the stored covering LP via two-phase simplex.

    Solved directly in surplus/artificial form rather than through the
    packing dual, so duality comparisons against :func:`simplex_packing`
    are an independent cross-check.
    """
    p, q = inst.matrix.shape  # p constraints, q variables
    if p + q > SIZE_CAP:
        raise SizeLimit(f"constraints + variables = {p + q} exceeds {SIZE_CAP}")
    M = inst.matrix.to_dense()
    budget = _pivot_budget(p, q)

    # phase 1: M y - s + a = 1, minimize sum(a); artificial basis
    n_all = q + p + p  # y, surplus, artificial
    tableau = np.hstack([M, -np.eye(p), np.eye(p), np.ones((p, 1))])
    basis = np.arange(q + p, q + 2 * p)
    cost = np.zeros(n_all + 1)
    cost[q + p : q + 2 * p] = 1.0
    for i in range(p):  # reduce cost row against the artificial basis
        cost -= tableau[i, :]
    pivots, status = _bland_min(tableau, basis, cost, n_all, budget)
    phase1 = -cost[-1]
    if phase1 > 1e-8:
        return OracleSolution(math.inf, np.zeros(q), SolveStatus.INFEASIBLE, pivots)

    # drive any artificial still basic (at zero) out of the basis
    drop_rows = []
    for i in range(p):
        if basis[i] >= q + p:
            row = tableau[i, : q + p]
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) <= PIVOT_TOL:
                drop_rows.append(i)  # redundant constraint
                continue
            piv = tableau[i, j]
            tableau[i, :] /= piv
            for r in range(p):
                if r != i and tableau[r, j] != 0.0:
                    tableau[r, :] -= tableau[r, j] * tableau[i, :]
            basis[i] = j
            pivots += 1
    if drop_rows:
        keep = [i for i in range(p) if i not in drop_rows]
        tableau = tableau[keep, :]
        basis = basis[keep]

    # phase 2: minimize 1'y over [y, s], artificials locked out
    tableau = np.hstack([tableau[:, : q + p], tableau[:, -1:]])
    cost = np.zeros(q + p + 1)
    cost[:q] = 1.0
    for i, b in enumerate(basis):
        if cost[b] != 0.0:
            cost -= cost[b] * tableau[i, :]
    more, status = _bland_min(tableau, basis, cost, q + p, budget)
    pivots += more
    if status is not SolveStatus.OPTIMAL:
        return OracleSolution(math.inf, np.zeros(q), status, pivots)
    y = _basic_solution(tableau, basis, q)
    return OracleSolution(float(y.sum()), y, SolveStatus.OPTIMAL, pivots)


def enumerate_vertices(
    inst: Union[PackingInstance, CoveringInstance], limit: int = 200_000
) -> OracleSolution:
    """Brute-force optimum over all basic points; oracle for the oracle.

    Intersects every size-d subset of {constraint rows, coordinate planes}
    (d = number of LP variables, capped at 5), keeps the feasible ones, and
    returns the best.  Exponential; only for tiny instances.
    """
    if isinstance(inst, PackingInstance):
        A = inst.matrix.to_dense()
        sense_max = True
    else:
        A = inst.matrix.to_dense()
        sense_max = False
    n_cons, n_vars = A.shape
    if n_vars > ENUM_VAR_CAP:
        raise SizeLimit(f"{n_vars} variables exceeds enumeration cap {ENUM_VAR_CAP}")
    if math.comb(n_cons + n_vars, n_vars) > limit:
        raise SizeLimit("too many constraint subsets to enumerate")

    rows = [(A[j], 1.0) for j in range(n_cons)]
    for i in range(n_vars):
        e = np.zeros(n_vars)
        e[i] = 1.0
        rows.append((e, 0.0))

    best_val = -math.inf if sense_max else math.inf
    best_x = None
    checked = 0
    for subset in itertools.combinations(range(len(rows)), n_vars):
        G = np.array([rows[k][0] for k in subset])
        h = np.array([rows[k][1] for k in subset])
        try:
            x = np.linalg.solve(G, h)
        except np.linalg.LinAlgError:
            continue
        checked += 1
        if np.any(x < -FEAS_TOL):
            continue
        act = A @ x
        if sense_max:
            if np.any(act > 1.0 + FEAS_TOL):
                continue
            val = float(x.sum())
            if val > best_val:
                best_val, best_x = val, x
        else:
            if np.any(act < 1.0 - FEAS_TOL):
                continue
            val = float(x.sum())
            if val < best_val:
                best_val, best_x = val, x
    if best_x is None:
        # packing always admits x = 0, so this can only happen for covering
        return OracleSolution(math.inf, np.zeros(n_vars), SolveStatus.INFEASIBLE, checked)
    return OracleSolution(best_val, best_x, SolveStatus.OPTIMAL, checked)


def check_feasible(
    x: np.ndarray, inst: Union[PackingInstance, CoveringInstance], tol: float = FEAS_TOL
) -> tuple[bool, float]:
    """(feasible, max violation) of a point against the stored constraints.

    Packing: worst of (Ax)_j - 1.  Covering: worst of 1 - (My)_i.  Feasible
    when that is at most tol and no coordinate is below -tol.
    """
    x = np.asarray(x, dtype=np.float64)
    if isinstance(inst, PackingInstance):
        violation = float((inst.matrix.row_activity(x) - 1.0).max())
    else:
        violation = float((1.0 - inst.matrix.row_activity(x)).max())
    feasible = violation <= tol and (x.size == 0 or float(x.min()) >= -tol)
    return feasible, violation
