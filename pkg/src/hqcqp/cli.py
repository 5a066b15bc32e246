"""Command-line front end: solve, generate, bench and range subcommands.

Exit codes: 0 success, 2 infeasible instance, 1 any parse or solver error.
Standard output carries only the requested artifact (solution JSON, trace
CSV, report CSV); diagnostics go to standard error.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import driver, generator, oracle
from . import io as pio
from .problem import InfeasibleError, reduce_problem
from .search import SearchConfig, SearchError


def default_seed() -> int:
    env = os.environ.get("HQCQP_SEED")
    if env:
        try:
            return int(env, 0)
        except ValueError:
            print(f"warning: ignoring non-integer HQCQP_SEED={env!r}", file=sys.stderr)
    return oracle.DEFAULT_SEED


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; exit code 2 is reserved for infeasibility
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def cmd_solve(args) -> int:
    try:
        prob = pio.load_problem(args.input)
    except (pio.ProblemFormatError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    cfg = SearchConfig(
        interval_threshold=args.threshold, max_iterations=args.max_iter
    )
    try:
        sol = driver.solve(prob, cfg)
    except InfeasibleError as err:
        print("infeasible: c* >= 0", file=sys.stderr)
        print(f"  min-max value {err.c_star:.6g}", file=sys.stderr)
        return 2
    except SearchError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if args.csv_trace:
        sys.stdout.write("iteration,incumbent_c\n")
        for it, val in sol.trace:
            sys.stdout.write(f"{it},{val!r}\n")
    else:
        sys.stdout.write(pio.solution_to_json(sol))
        sys.stdout.write("\n")
    return 0


def cmd_generate(args) -> int:
    out_dir = args.out_dir
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as err:
        print(f"error: cannot create {out_dir}: {err}", file=sys.stderr)
        return 1
    try:
        specs = [
            generator.GeneratorSpec(
                args.dim, args.constraints, args.margin, args.seed + k
            )
            for k in range(args.count)
        ]
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    for k, spec in enumerate(specs):
        path = os.path.join(out_dir, f"problem_{k}.json")
        try:
            prob = generator.random_feasible_problem(spec)
            pio.save_problem(prob, path)
        except (generator.GenerationError, OSError) as err:
            print(f"error: {path}: {err}", file=sys.stderr)
            return 1
    return 0


def _bench_one(dim: int, m: int, seed: int, cfg: SearchConfig):
    prob = generator.random_feasible_problem(
        generator.GeneratorSpec(dim, m, seed=seed)
    )
    red = reduce_problem(prob)
    t0 = time.perf_counter()
    sol = driver.solve(prob, cfg)
    t_solve = time.perf_counter() - t0
    t0 = time.perf_counter()
    est = oracle.oracle_cstar(red.C, cfg, seed=seed + 1)
    t_oracle = time.perf_counter() - t0
    p_oracle = -1.0 / est.c_hat
    return sol, p_oracle, t_solve, t_oracle


def _eps_at(trace, iteration: int, p_oracle: float) -> float:
    # incumbent at the latest trace entry not beyond this iteration
    incumbent = trace[0][1]
    for it, val in trace:
        if it > iteration:
            break
        incumbent = val
    p_hat = -1.0 / incumbent
    return abs((p_oracle - p_hat) / p_oracle)


def run_bench(dims, constraint_counts, count: int, seed: int, cfg: SearchConfig,
              jobs: int = 1):
    """Average per-iteration relative error against the oracle per group.

    Returns (rows, summaries): rows have columns (dim, m, iteration,
    avg_rel_err, n_instances, skipped), summaries are human-readable timing
    lines. Failed instances are skipped and counted.
    """
    rows = []
    summaries = []
    group_index = 0
    for m in sorted(constraint_counts):
        for dim in sorted(dims):
            group_seed = seed + 1_000_000 * group_index
            group_index += 1
            results = []
            skipped = 0
            t_solve_total = 0.0
            t_oracle_total = 0.0
            wall0 = time.perf_counter()

            def one(k: int, _dim=dim, _m=m, _gs=group_seed):
                return _bench_one(_dim, _m, _gs + 7 * k, cfg)

            outcomes = []
            if jobs > 1 and count > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    futures = [pool.submit(one, k) for k in range(count)]
                    for fut in futures:
                        try:
                            outcomes.append(fut.result())
                        except Exception:
                            outcomes.append(None)
            else:
                for k in range(count):
                    try:
                        outcomes.append(one(k))
                    except Exception:
                        outcomes.append(None)
            for outcome in outcomes:
                if outcome is None:
                    skipped += 1
                    continue
                sol, p_oracle, t_solve, t_oracle = outcome
                t_solve_total += t_solve
                t_oracle_total += t_oracle
                results.append((sol.trace, p_oracle))
            wall = time.perf_counter() - wall0
            if results:
                last_iter = max(trace[-1][0] for trace, _ in results)
                for it in range(last_iter + 1):
                    errs = [_eps_at(trace, it, p) for trace, p in results]
                    rows.append(
                        (dim, m, it, sum(errs) / len(errs), len(results), skipped)
                    )
            summaries.append(
                f"bench dim={dim} m={m}: {len(results)} instances "
                f"({skipped} skipped), wall {wall:.2f}s, "
                f"solve {t_solve_total:.2f}s, oracle {t_oracle_total:.2f}s"
            )
    return rows, summaries


def cmd_bench(args) -> int:
    try:
        dims = [int(tok) for tok in args.dims.split(",") if tok]
        ms = [int(tok) for tok in args.constraints.split(",") if tok]
    except ValueError:
        print("error: --dims and --constraints must be comma-separated integers",
              file=sys.stderr)
        return 1
    cfg = SearchConfig(
        oracle_samples=args.oracle_samples,
        interval_threshold=args.threshold,
    )
    try:
        rows, summaries = run_bench(dims, ms, args.count, args.seed, cfg, args.jobs)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    lines = ["dim,m,iteration,avg_rel_err,n_instances,skipped"]
    lines += [
        f"{dim},{m},{it},{err!r},{n},{sk}" for dim, m, it, err, n, sk in rows
    ]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for line in summaries:
        print(line, file=sys.stderr)
    return 0


def cmd_range(args) -> int:
    try:
        prob = pio.load_problem(args.input)
    except (pio.ProblemFormatError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if prob.num_constraints < 2:
        print("error: range export requires m >= 2", file=sys.stderr)
        return 1
    red = reduce_problem(prob)
    sample = oracle.sample_numerical_range(red.C, args.count, args.seed)
    text = oracle.range_to_csv(sample)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hqcqp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem JSON file")
    p_solve.add_argument("input", help="path to a version-1 problem file")
    p_solve.add_argument("--threshold", type=float, default=1e-4,
                         help="final search interval size (default 1e-4)")
    p_solve.add_argument("--max-iter", type=int, default=200)
    mode = p_solve.add_mutually_exclusive_group()
    mode.add_argument("--json", action="store_true",
                      help="write the solution as JSON to stdout (default)")
    mode.add_argument("--csv-trace", action="store_true",
                      help="write the per-iteration incumbent trace as CSV instead")
    p_solve.set_defaults(func=cmd_solve)

    p_gen = sub.add_parser("generate", help="write random feasible problem files")
    p_gen.add_argument("--dim", type=int, required=True)
    p_gen.add_argument("--constraints", type=int, required=True)
    p_gen.add_argument("--count", type=int, default=1)
    p_gen.add_argument("--margin", type=float, default=0.5)
    p_gen.add_argument("--seed", type=int, default=default_seed())
    p_gen.add_argument("--out-dir", default=".")
    p_gen.set_defaults(func=cmd_generate)

    p_bench = sub.add_parser(
        "bench", help="convergence report: relative error vs the sampling oracle"
    )
    p_bench.add_argument("--dims", default="9,16,25",
                         help="comma-separated dimensions (default 9,16,25)")
    p_bench.add_argument("--constraints", default="2,3",
                         help="comma-separated constraint counts (default 2,3)")
    p_bench.add_argument("--count", type=int, default=100,
                         help="instances per (dim, m) group (default 100)")
    p_bench.add_argument("--seed", type=int, default=default_seed())
    p_bench.add_argument("--oracle-samples", type=int, default=100_000)
    p_bench.add_argument("--threshold", type=float, default=1e-4)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--out", help="CSV output path (default stdout)")
    p_bench.set_defaults(func=cmd_bench)

    p_range = sub.add_parser(
        "range", help="sample the joint numerical range of the whitened constraints"
    )
    p_range.add_argument("input")
    p_range.add_argument("--count", type=int, default=4096)
    p_range.add_argument("--seed", type=int, default=default_seed())
    p_range.add_argument("--out", help="CSV output path (default stdout)")
    p_range.set_defaults(func=cmd_range)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
