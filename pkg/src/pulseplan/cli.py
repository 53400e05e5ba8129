"""Command line entry point.

Exit codes: 0 success, 1 usage error, 2 infeasible or unschedulable input
(or an exact-solver limit), 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from . import io as pio
from .edbf import PRF_RULES, TASK_RULES, EdbfRun, HeuristicConfig
from .errors import (
    InfeasibleError,
    InternalInvariantError,
    ResourceLimitError,
    ScenarioError,
)
from .geometry import GridSpec, dedup_disks, enumerate_disks
from .ip import build_instance, check_feasible, exact_objective, export_lp, solve_exact
from .radar import build_availability_table
from .scenario import ScenarioSpec, run_scaling
from .sdbf import DISK_RULES, SUB_RULES, DiskHeuristicConfig, SdbfRun
from .structures import BACKEND_KINDS, OpCounters

BENCH_WORKERS_ENV = "PULSEPLAN_BENCH_WORKERS"


class UsageError(Exception):
    def __init__(self, message, usage=""):
        super().__init__(message)
        self.usage = usage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _build_parser() -> _Parser:
    parser = _Parser(prog="pulseplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_grid(p):
        p.add_argument("--grid-eps", type=float, default=0.02,
                       help="scan-plane grid spacing (direction cosines)")
        p.add_argument("--disk-radius", type=float, default=0.05,
                       help="re-steering disk radius (direction cosines)")

    p = sub.add_parser("schedule", help="run a heuristic scheduler on a scenario")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=("edbf", "sdbf"), default="edbf")
    p.add_argument("--prf-rule", choices=PRF_RULES, default="G")
    p.add_argument("--task-rule", choices=TASK_RULES, default="SAR")
    p.add_argument("--disk-rule", choices=DISK_RULES, default="GD")
    p.add_argument("--sub-rule", choices=SUB_RULES, default="R")
    p.add_argument("--backend", choices=BACKEND_KINDS, default="rangetree")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="schedule file path (default: stdout)")
    p.add_argument("--allow-unschedulable", action="store_true",
                   help="schedule the trackable tasks even if some are not")
    p.add_argument("--dump-structures", action="store_true",
                   help="print the initial selection structures to stderr")
    add_grid(p)

    p = sub.add_parser("availability", help="dump the task-PRF availability table")
    p.add_argument("scenario")
    p.add_argument("--out")

    p = sub.add_parser("disks", help="dump the re-steering disk catalog")
    p.add_argument("scenario")
    p.add_argument("--out")
    add_grid(p)

    p = sub.add_parser("export-lp", help="export the integer program in LP format")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=("edbf", "sdbf"), default="edbf")
    p.add_argument("--sscfl", action="store_true",
                   help="export the facility-location relaxation instead")
    p.add_argument("--copies", type=int,
                   help="candidate looks per PRF or disk (defaults: task count / 1)")
    p.add_argument("--out")
    add_grid(p)

    p = sub.add_parser("oracle-compare",
                       help="compare heuristic objectives against the exact optimum")
    p.add_argument("scenario")
    p.add_argument("--mode", choices=("edbf", "sdbf", "both"), default="edbf")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--heuristic-only", action="store_true",
                   help="skip the exact solve (for instances beyond desk scale)")
    p.add_argument("--out")
    add_grid(p)

    p = sub.add_parser("bench", help="measure runtime scaling across task counts")
    p.add_argument("--mode", choices=("edbf", "sdbf"), default="edbf")
    p.add_argument("--backend", choices=BACKEND_KINDS, default="rangetree")
    p.add_argument("--sizes", default="1000,2000,4000,8000",
                   help="comma-separated strictly increasing task counts")
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    add_grid(p)
    return parser


def _read_scenario(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read scenario file: {exc}")
    return pio.parse_scenario(text)


def _write_out(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_schedule(args) -> int:
    cfg, prfs, tasks = _read_scenario(args.scenario)
    table = build_availability_table(tasks, prfs, cfg)
    if table.unschedulable and not args.allow_unschedulable:
        print("unschedulable tasks (no available PRF):", file=sys.stderr)
        for tid in table.unschedulable:
            print(f"  task {tid}", file=sys.stderr)
        raise InfeasibleError(
            f"{len(table.unschedulable)} unschedulable task(s); "
            "rerun with --allow-unschedulable to schedule the rest",
            task_ids=table.unschedulable,
        )
    counters = OpCounters()
    t0 = time.perf_counter()
    if args.mode == "edbf":
        run = EdbfRun(
            table,
            HeuristicConfig(
                prf_rule=args.prf_rule, task_rule=args.task_rule,
                backend=args.backend, seed=args.seed,
            ),
            counters,
        )
    else:
        grid = GridSpec(spacing=args.grid_eps, disk_radius=args.disk_radius)
        catalog = enumerate_disks(table, grid)
        run = SdbfRun(
            catalog,
            DiskHeuristicConfig(
                disk_rule=args.disk_rule, sub_rule=args.sub_rule,
                task_rule=args.task_rule, backend=args.backend, seed=args.seed,
            ),
            counters,
        )
    if args.dump_structures:
        print(run.dump_structures(), file=sys.stderr)
    schedule = run.run()
    elapsed = time.perf_counter() - t0
    text = pio.schedule_to_text(schedule)
    summary = (
        f"looks={schedule.n_looks_used()} objective={schedule.objective():.6f}s "
        f"runtime={elapsed * 1e3:.2f}ms tasks={len(schedule.assignments)}"
    )
    if args.out:
        _write_out(text, args.out)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
    return 0


def _cmd_availability(args) -> int:
    cfg, prfs, tasks = _read_scenario(args.scenario)
    table = build_availability_table(tasks, prfs, cfg)
    _write_out(pio.availability_text(table), args.out)
    return 0


def _cmd_disks(args) -> int:
    cfg, prfs, tasks = _read_scenario(args.scenario)
    table = build_availability_table(tasks, prfs, cfg)
    grid = GridSpec(spacing=args.grid_eps, disk_radius=args.disk_radius)
    catalog = enumerate_disks(table, grid)
    _write_out(pio.disks_text(catalog), args.out)
    return 0


def _cmd_export_lp(args) -> int:
    cfg, prfs, tasks = _read_scenario(args.scenario)
    table = build_availability_table(tasks, prfs, cfg)
    if args.mode == "sdbf":
        grid = GridSpec(spacing=args.grid_eps, disk_radius=args.disk_radius)
        catalog = dedup_disks(enumerate_disks(table, grid))
        inst = build_instance(catalog, copies=args.copies)
    else:
        inst = build_instance(table, copies=args.copies)
    _write_out(export_lp(inst, sscfl=args.sscfl), args.out)
    return 0


def _heuristic_grid(mode):
    if mode == "edbf":
        for prf_rule in PRF_RULES:
            for task_rule in TASK_RULES:
                yield {"prf_rule": prf_rule, "task_rule": task_rule}
    else:
        for disk_rule in DISK_RULES:
            for sub_rule in SUB_RULES:
                for task_rule in TASK_RULES:
                    yield {
                        "disk_rule": disk_rule,
                        "sub_rule": sub_rule,
                        "task_rule": task_rule,
                    }


def _cmd_oracle_compare(args) -> int:
    cfg, prfs, tasks = _read_scenario(args.scenario)
    table = build_availability_table(tasks, prfs, cfg)
    if table.unschedulable:
        raise InfeasibleError(
            f"{len(table.unschedulable)} unschedulable task(s)",
            task_ids=table.unschedulable,
        )
    modes = ("edbf", "sdbf") if args.mode == "both" else (args.mode,)
    lines = ["pulseplan-oracle-compare v1",
             f"seed={args.seed} tasks={len(tasks)}"]
    grid = GridSpec(spacing=args.grid_eps, disk_radius=args.disk_radius)
    for mode in modes:
        if mode == "sdbf":
            catalog = enumerate_disks(table, grid)
            source = catalog
        else:
            catalog = None
            source = table

        results = []
        best = None
        for rules in _heuristic_grid(mode):
            if mode == "edbf":
                schedule = EdbfRun(
                    table, HeuristicConfig(backend="rangetree", seed=args.seed, **rules)
                ).run()
            else:
                schedule = SdbfRun(
                    catalog,
                    DiskHeuristicConfig(backend="rangetree", seed=args.seed, **rules),
                ).run()
            results.append((rules, schedule))
            obj = schedule.objective_fraction(cfg.pulses_per_look)
            if best is None or obj < best[0]:
                best = (obj, schedule)

        optimal = None
        if not args.heuristic_only:
            inst_source = dedup_disks(source) if mode == "sdbf" else source
            inst = build_instance(inst_source, copies=len(tasks))
            check_inst = build_instance(source, copies=len(tasks)) if mode == "sdbf" else inst
            exact = solve_exact(inst, warm=None)
            if exact is None:
                raise InfeasibleError("instance admits no feasible schedule")
            optimal = exact_objective(exact, inst)
            lines.append(
                f"{mode} exact objective={float(optimal):.9f} "
                f"looks={exact.n_looks_used()}"
            )
        else:
            check_inst = build_instance(source, copies=len(tasks))

        for rules, schedule in results:
            combo = "+".join(rules[k] for k in sorted(rules))
            violations = check_feasible(schedule, check_inst)
            obj = schedule.objective_fraction(cfg.pulses_per_look)
            ratio = "" if optimal is None else f" ratio={float(obj / optimal):.4f}"
            verdict = "feasible" if not violations else f"INFEASIBLE({len(violations)})"
            lines.append(
                f"{mode} {combo} objective={float(obj):.9f} "
                f"looks={schedule.n_looks_used()}{ratio} {verdict}"
            )
    _write_out("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    workers = int(os.environ.get(BENCH_WORKERS_ENV, "1"))
    if workers > 1:
        print(f"note: {BENCH_WORKERS_ENV}={workers}; timings of co-scheduled "
              "repetitions are not exclusive", file=sys.stderr)
    report = run_scaling(
        mode=args.mode,
        backend=args.backend,
        sizes=sizes,
        reps=args.reps,
        template=ScenarioSpec(n_tasks=0, seed=args.seed),
        grid=GridSpec(spacing=args.grid_eps, disk_radius=args.disk_radius),
        workers=max(1, workers),
    )
    _write_out(report.to_text(), args.out)
    return 0


_COMMANDS = {
    "schedule": _cmd_schedule,
    "availability": _cmd_availability,
    "disks": _cmd_disks,
    "export-lp": _cmd_export_lp,
    "oracle-compare": _cmd_oracle_compare,
    "bench": _cmd_bench,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.usage:
            print(exc.usage, file=sys.stderr, end="")
        else:
            print(parser.format_usage(), file=sys.stderr, end="")
        return 1
    except (ScenarioError, InfeasibleError, ResourceLimitError) as exc:
        if isinstance(exc, ResourceLimitError):
            print(f"error: {exc}", file=sys.stderr)
            print("hint: rerun oracle-compare with --heuristic-only",
                  file=sys.stderr)
        else:
            print(f"error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
