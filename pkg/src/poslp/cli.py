"""Command-line front end: solve, generate, verify, benchmark.

``solve`` emits one JSON report on stdout with a stable key set; ``gen``
writes Matrix Market instances; ``bench`` sweeps epsilon and instance size
and prints CSV with formula and measured iteration counts.  Exit codes:
0 success, 2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
import warnings

import numpy as np

from .covering import COVERING_EPSILON_MAX, solve_covering
from .dbscd import solve_packing
from .errors import (
    CycleLimit,
    MonotonicityViolation,
    NumericalOverflow,
    PositiveLPError,
    SizeLimit,
)
from .instance import (
    CoveringInstance,
    PackingInstance,
    SparseNonnegMatrix,
    generate_random,
    normalize,
    normalize_covering,
    parse_matrix_market,
    write_matrix_market,
)
from .oracle import SIZE_CAP, SolveStatus, check_feasible, simplex_covering, simplex_packing
from .smoothing import derive_params

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

BENCH_GEN_SEED_BASE = 9000  # instance seed for size s is BENCH_GEN_SEED_BASE + s


def _write_solution(path: str, vec: np.ndarray) -> None:
    with open(path, "w") as fh:
        for v in vec:
            fh.write(f"{v:.17g}\n")


def _verify_fields(mode, raw, pack_inst, cov_inst, objective):
    """oracle_opt and approx_ratio in original units, or None above the cap."""
    if raw.n_rows + raw.n_cols > SIZE_CAP:
        return None
    if mode == "pack":
        sol = simplex_packing(pack_inst)
        scale = pack_inst.column_scale
    else:
        sol = simplex_covering(cov_inst)
        scale = cov_inst.column_scale
    if sol.status is not SolveStatus.OPTIMAL:
        return None
    opt = sol.opt_value / scale
    return {"oracle_opt": opt, "approx_ratio": objective / opt}


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    with open(args.input) as fh:
        raw = parse_matrix_market(fh)
    override = args.iterations if args.iterations is not None else None

    if args.mode == "pack":
        inst = normalize(raw)
        report = solve_packing(
            inst,
            args.epsilon,
            args.seed,
            iteration_override=override,
            strict=args.strict,
            threads=args.threads,
        )
        solution = report.x_final
        objective = report.objective
        feasible, violation = check_feasible(solution, PackingInstance(raw, 1.0), 1e-9)
        extra = {"f_mu_final": report.f_mu_final}
        iterations = report.iterations
        verify_src = (inst, None)
    else:
        cov = normalize_covering(raw)
        creport = solve_covering(
            cov,
            args.epsilon,
            args.seed,
            iteration_override=override,
            strict=args.strict,
            threads=args.threads,
        )
        solution = creport.y_final
        objective = creport.objective
        feasible, violation = check_feasible(solution, CoveringInstance(raw, 1.0), 1e-9)
        extra = {"num_fixed": creport.num_fixed}
        iterations = creport.packing_report.iterations
        verify_src = (None, cov)

    doc = {
        "mode": args.mode,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "n": raw.n_cols,
        "m": raw.n_rows,
        "nnz": raw.nnz,
        "iterations": iterations,
        "work": iterations * raw.nnz,
        "objective": objective,
    }
    doc.update(extra)
    doc["feasible"] = bool(feasible)
    doc["max_violation"] = violation
    if args.verify:
        fields = _verify_fields(args.mode, raw, verify_src[0], verify_src[1], objective)
        if fields is not None:
            doc.update(fields)
    doc["wall_time_ms"] = (time.perf_counter() - t0) * 1000.0
    doc["threads"] = args.threads
    if args.solution:
        _write_solution(args.solution, solution)
        doc["solution_path"] = args.solution
    else:
        doc["solution_path"] = None

    out = json.dumps(doc)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    print(out)
    return EXIT_OK


def cmd_gen(args) -> int:
    mat = generate_random(args.rows, args.cols, args.density, args.seed)
    with open(args.output, "w") as fh:
        write_matrix_market(mat, fh)
    return EXIT_OK


def cmd_bench(args) -> int:
    epsilons = [float(s) for s in args.epsilons.split(",") if s]
    sizes = [int(s) for s in args.sizes.split(",") if s]
    writer = csv.writer(sys.stdout)
    writer.writerow(
        ["epsilon", "n", "m", "nnz", "T_formula", "iterations_to_target", "work", "wall_time_ms", "success"]
    )
    for size in sizes:
        raw = generate_random(size, size, args.density, BENCH_GEN_SEED_BASE + size)
        inst = normalize(raw)
        try:
            opt_norm = simplex_packing(inst).opt_value
        except SizeLimit:
            opt_norm = None
        for eps in epsilons:
            params = derive_params(inst.n, inst.m, eps)
            budget = args.iterations if args.iterations is not None else params.iterations
            for seed in range(args.seeds):
                t0 = time.perf_counter()
                report = solve_packing(inst, eps, seed, iteration_override=budget, threads=args.threads)
                wall = (time.perf_counter() - t0) * 1000.0
                if opt_norm is None:
                    target_k, success = "NA", "NA"
                else:
                    target = -(1.0 - 5.0 * eps) * opt_norm
                    hits = np.flatnonzero(report.trace.f_values <= target)
                    if hits.size:
                        target_k, success = int(hits[0]), "true"
                    else:
                        target_k, success = "", "false"
                writer.writerow(
                    [
                        eps,
                        inst.n,
                        inst.m,
                        inst.matrix.nnz,
                        params.iterations,
                        target_k,
                        report.iterations * inst.matrix.nnz,
                        f"{wall:.3f}",
                        success,
                    ]
                )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="poslp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a packing or covering LP from a Matrix Market file")
    p_solve.add_argument("--mode", choices=["pack", "cover"], required=True)
    p_solve.add_argument("--input", required=True, help="Matrix Market coordinate file")
    p_solve.add_argument("--epsilon", type=float, required=True)
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--threads", type=int, default=0, help="worker threads (0 = all)")
    p_solve.add_argument("--verify", action="store_true", help="compare against the exact oracle (size-capped)")
    p_solve.add_argument("--strict", action="store_true", help="abort on monotonicity violations")
    p_solve.add_argument("--iterations", type=int, default=None, help="override the derived iteration budget")
    p_solve.add_argument("--output", default=None, help="also write the JSON report to this path")
    p_solve.add_argument("--solution", default=None, help="write the solution vector to this path")
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--rows", type=int, required=True)
    p_gen.add_argument("--cols", type=int, required=True)
    p_gen.add_argument("--density", type=float, required=True)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--output", required=True)
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="epsilon/size sweep, CSV on stdout")
    p_bench.add_argument("--epsilons", required=True, help="comma-separated list")
    p_bench.add_argument("--sizes", required=True, help="comma-separated list of n (= m)")
    p_bench.add_argument("--seeds", type=int, required=True, help="number of solver seeds per cell")
    p_bench.add_argument("--density", type=float, default=0.3)
    p_bench.add_argument("--threads", type=int, default=0)
    p_bench.add_argument(
        "--iterations",
        type=int,
        default=None,
        help="iteration budget per run (default: the derived formula value; can be large)",
    )
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None) == 0:
        import os

        args.threads = os.cpu_count() or 1
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except (NumericalOverflow, MonotonicityViolation, CycleLimit) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        return EXIT_NUMERICAL
    except (PositiveLPError, OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
