"""Seeded benchmark harness: ``solve``, ``validate``, ``generate`` and ``oracle``.

Every flag can also be set through an environment variable named
``CTT_ACO_<FLAG>`` (upper case, dashes as underscores), e.g.
``CTT_ACO_TIME_BUDGET_S=60``. Command-line values win over the environment.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path

from .aco import AcoParams, REWARD_VARIANTS
from .construction import InfeasibleInstanceError, construct_feasible
from .evaluation import evaluate
from .improvement import improve
from .io import GenerationError, GenSpec, ParseError, generate_instance, parse_instance, parse_solution, \
    write_instance, write_solution
from .oracle import BudgetExceededError, EnumerationBudget, exhaustive_optimum, oracle_hard_counts, \
    oracle_soft_counts

EXIT_OK, EXIT_PARSE, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 2, 3, 4
ENV_PREFIX = "CTT_ACO_"
TRACE_HEADER = ["phase", "cycle", "best_in_cycle", "global_best", "elapsed_ms"]
REPORT_HEADER = ["seed", "feasible", "construction_cycles", "construction_s", "initial_quality",
                 "final_quality", "sc1", "sc2", "sc3", "sc4", "improvement_runs", "total_s"]


class InvariantBreach(RuntimeError):
    pass


def _env(flag: str, default, kind=str):
    raw = os.environ.get(ENV_PREFIX + flag.lstrip("-").replace("-", "_").upper())
    if raw is None:
        return default
    return kind(raw)


def _opt_float(text: str) -> float | None:
    return None if text.lower() in ("none", "inf", "") else float(text)


def _add(p: argparse.ArgumentParser, flag: str, default, kind=str, **kw) -> None:
    p.add_argument(flag, type=kind, default=_env(flag, default, kind), **kw)


def _fail(code: int, kind: str, **detail) -> int:
    print(json.dumps({"error": kind, **detail}), file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ctt-aco", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="construct and improve timetables for an instance")
    _add(solve, "--instance", None, required=_env("--instance", None) is None)
    _add(solve, "--seed", 0, int)
    _add(solve, "--repeat", 1, int)
    _add(solve, "--ants", 8, int)
    _add(solve, "--alpha", 2.0, float)
    _add(solve, "--beta", 8.0, float)
    _add(solve, "--rho", 0.05, float)
    _add(solve, "--tmin", 0.01, float)
    _add(solve, "--tmax", 10.0, float)
    _add(solve, "--time-budget-s", 350.0, _opt_float)
    _add(solve, "--max-cycles", None, int)
    _add(solve, "--stall", 10, int)
    _add(solve, "--improve-cycles", 5, int)
    _add(solve, "--reward-variant", "paper_eq2", str, choices=REWARD_VARIANTS)
    _add(solve, "--workers", None, int, help="worker threads per cycle (default: number of ants)")
    _add(solve, "--csv", None, Path, help="trace path; one file per run, suffixed by seed")
    _add(solve, "--out", None, Path, help="where to write the best solution")

    validate = sub.add_parser("validate", help="report constraint violations of a solution")
    _add(validate, "--instance", None, required=_env("--instance", None) is None)
    _add(validate, "--solution", None, required=_env("--solution", None) is None)

    gen = sub.add_parser("generate", help="write a seeded synthetic instance")
    defaults = GenSpec()
    _add(gen, "--courses", defaults.courses, int)
    _add(gen, "--rooms", defaults.rooms, int)
    _add(gen, "--days", defaults.days, int)
    _add(gen, "--periods-per-day", defaults.periods_per_day, int)
    _add(gen, "--curricula", defaults.curricula, int)
    _add(gen, "--max-lectures", defaults.max_lectures_per_course, int)
    _add(gen, "--unavailability-density", defaults.unavailability_density, float)
    _add(gen, "--seed", defaults.seed, int)
    _add(gen, "--out", None, Path)

    orc = sub.add_parser("oracle", help="exhaustive optimum of a tiny instance")
    _add(orc, "--instance", None, required=_env("--instance", None) is None)
    _add(orc, "--max-states", 1_000_000, int)
    return parser


def _load_instance(path):
    return parse_instance(Path(path).read_bytes())


def params_from_args(args: argparse.Namespace, seed: int) -> AcoParams:
    return AcoParams(alpha=args.alpha, beta=args.beta, rho=args.rho, t_min=args.tmin, t_max=args.tmax,
                     ants=args.ants, max_cycles=args.max_cycles, time_budget=args.time_budget_s,
                     reward_variant=args.reward_variant, seed=seed, stall_limit=args.stall,
                     improve_cycles=args.improve_cycles, workers=args.workers or args.ants)


def _csv_path(base: Path, seed: int) -> Path:
    return base.with_name(f"{base.stem}_{seed}{base.suffix or '.csv'}")


def run_solve(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    rows, best = [], None
    all_feasible = True
    for i in range(args.repeat):
        seed = (args.seed + i) % 2**64
        params = params_from_args(args, seed)
        t0 = time.perf_counter()
        built = construct_feasible(instance, params)
        trace = list(built.trace)
        row = {"seed": seed, "feasible": built.feasible, "construction_cycles": built.cycles,
               "construction_s": round(built.wall_time, 3)}
        if built.feasible:
            result = improve(instance, built.timetable, params)
            trace += result.trace
            report = evaluate(instance, result.timetable)
            if not report.feasible or report.quality != result.quality:
                raise InvariantBreach(f"seed {seed}: improved timetable re-evaluates to {report.as_dict()}")
            row.update(initial_quality=result.initial_quality, final_quality=result.quality,
                       sc1=report.sc[0], sc2=report.sc[1], sc3=report.sc[2], sc4=report.sc[3],
                       improvement_runs=result.runs)
            if best is None or result.quality < best[0]:
                best = (result.quality, result.timetable)
        else:
            all_feasible = False
            row.update(final_quality="", improvement_runs=0)
            print(json.dumps({"seed": seed, "error": "construction_timeout", "reason": built.reason,
                              "hard_violations": built.hard_violations}), file=sys.stderr)
        row["total_s"] = round(time.perf_counter() - t0, 3)
        rows.append(row)
        if args.csv is not None:
            with open(_csv_path(args.csv, seed), "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(TRACE_HEADER)
                for r in trace:
                    w.writerow([r.phase, r.cycle, r.best_in_cycle, r.global_best, f"{r.elapsed_ms:.1f}"])

    if best is not None and args.out is not None:
        text = write_solution(instance, best[1])
        reread = parse_solution(instance, text)
        if any(oracle_hard_counts(instance, reread)):
            raise InvariantBreach("written solution is not feasible on independent re-validation")
        sc = oracle_soft_counts(instance, reread)
        if sc[0] + 5 * sc[1] + 2 * sc[2] + sc[3] != best[0]:
            raise InvariantBreach("written solution quality differs on independent re-validation")
        Path(args.out).write_text(text)

    w = csv.DictWriter(sys.stdout, REPORT_HEADER, restval="")
    w.writeheader()
    w.writerows(rows)
    return EXIT_OK if all_feasible else EXIT_INFEASIBLE


def run_validate(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    timetable = parse_solution(instance, Path(args.solution).read_bytes())
    report = evaluate(instance, timetable)
    for key, value in report.as_dict().items():
        print(f"{key} {value}")
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def run_generate(args: argparse.Namespace) -> int:
    spec = GenSpec(args.courses, args.rooms, args.days, args.periods_per_day, args.curricula,
                   args.max_lectures, args.unavailability_density, args.seed)
    text = write_instance(generate_instance(spec))
    if args.out is None:
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)
    return EXIT_OK


def run_oracle(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    result = exhaustive_optimum(instance, EnumerationBudget(args.max_states))
    if not result.feasible:
        return _fail(EXIT_INFEASIBLE, "no_feasible_timetable", enumerated=0)
    print(f"optimum {result.quality}")
    print(f"feasible_timetables {result.n_feasible}")
    sys.stdout.write(write_solution(instance, result.witness))
    return EXIT_OK


COMMANDS = {"solve": run_solve, "validate": run_validate, "generate": run_generate, "oracle": run_oracle}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ParseError as exc:
        return _fail(EXIT_PARSE, "parse", line=exc.line, reason=exc.reason)
    except (OSError, UnicodeDecodeError) as exc:
        return _fail(EXIT_PARSE, "io", reason=str(exc))
    except (GenerationError, InfeasibleInstanceError) as exc:
        return _fail(EXIT_INFEASIBLE, "infeasible", reason=str(exc))
    except BudgetExceededError as exc:
        return _fail(EXIT_INFEASIBLE, "budget", reason=str(exc))
    except (InvariantBreach, AssertionError) as exc:
        return _fail(EXIT_INVARIANT, "invariant", reason=str(exc))


if __name__ == "__main__":
    sys.exit(main())
