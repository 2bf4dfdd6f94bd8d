"""Command-line surface: gen, construct, solve, exact, export-model, check, bench.

Exit codes: 0 success, 1 infeasible schedule / violated model check,
2 usage error. All randomness flows from --seed; benchmark repetition r
runs with seed + r so result tables are reproducible.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from . import dw, exact, instgen, milp, vns
from .construct import METHODS, MIN_ARRIVAL_VERTICAL, construct
from .core import (InfeasibleScheduleError, check_schedule, format_schedule,
                   parse_schedule)

BENCH_HEADER = "instance,method,seed,rep,cost,served,total,ratio,iters,ms"


@dataclass(frozen=True)
class RunRecord:
    """One benchmark row: a solver run on one instance with one seed."""
    instance: str
    method: str
    seed: int
    rep: int
    cost: int
    served: int
    total: int
    iterations: int
    wall_ms: int

    @property
    def ratio(self) -> float:
        return self.served / self.total

    def csv_row(self) -> str:
        return (f"{self.instance},{self.method},{self.seed},{self.rep},{self.cost},"
                f"{self.served},{self.total},{self.ratio:.6f},{self.iterations},{self.wall_ms}")


def _load_instance(path: str):
    return instgen.read_instance(Path(path).read_text(encoding="utf-8"))


def _write_text(path: str, text: str):
    Path(path).write_text(text, encoding="utf-8", newline="")


def _cmd_gen(args) -> int:
    cfg = instgen.GenConfig(seed=args.seed, docks=args.docks, trailers=args.trailers,
                            tf=args.tf, relaxed=args.relaxed)
    inst = instgen.generate(cfg)
    _write_text(args.output, instgen.write_instance(inst))
    print(f"wrote {inst.name} ({inst.docks} docks, {inst.n} trailers, horizon {inst.horizon}) to {args.output}")
    return 0


def _cmd_construct(args) -> int:
    inst = _load_instance(args.instance)
    s = construct(args.method, inst)
    text = format_schedule(s)
    if args.output:
        _write_text(args.output, text)
    else:
        sys.stdout.write(text)
    served = inst.n - len(s.unserved)
    print(f"cost {s.cost} served {served}/{inst.n}")
    return 0


def _vns_config(args, seed: int) -> vns.VnsConfig:
    return vns.VnsConfig(alpha=args.alpha, beta=args.beta, gamma=args.gamma,
                         epsilon=args.epsilon, n_max_noimp=args.nmax,
                         metric=args.metric, seed=seed, max_iters=args.max_iters)


def _cmd_solve(args) -> int:
    inst = _load_instance(args.instance)
    initial = construct(args.method, inst)
    best, stats = vns.vns_solve(inst, initial, _vns_config(args, args.seed))
    if args.stats:
        _write_text(args.stats, vns.stats_to_csv(stats))
    if args.output:
        _write_text(args.output, format_schedule(best))
    if args.plot:
        from . import report
        report.save_convergence_figure(stats, f"{args.plot}_convergence.png")
        report.save_schedule_figure(inst, best, f"{args.plot}_schedule.png")
    served = inst.n - len(best.unserved)
    ratio = served / inst.n
    print(f"instance {inst.name}")
    print(f"cost {best.cost}")
    print(f"served {served}/{inst.n} ratio {ratio:.6f}")
    print(f"iterations {stats.iterations} wall_ms {stats.wall_ms:.1f}")
    return 0


def _cmd_exact(args) -> int:
    inst = _load_instance(args.instance)
    lim = exact.ExactLimits(max_trailers=args.max_trailers, max_docks=args.max_docks,
                            timeout=args.timeout)
    schedule, cost = exact.brute_force_optimum(inst, lim)
    sys.stdout.write(format_schedule(schedule))
    print(f"optimum {cost}")
    if args.output:
        _write_text(args.output, format_schedule(schedule))
    return 0


def _cmd_export_model(args) -> int:
    inst = _load_instance(args.instance)
    cuts = [c.strip() for c in args.cuts.split(",") if c.strip()] if args.cuts else []
    if args.formulation == "bigm":
        model = milp.build_bigm(inst, due_dates=not args.no_due_dates)
    elif args.formulation == "arctime":
        model = milp.build_arc_time(inst, preprocess=args.preprocess,
                                    symmetry=args.symmetry, cuts=cuts)
    elif args.formulation == "rmp":
        model = dw.build_rmp(inst, [dw.warm_start_column(inst)])
    elif args.formulation == "pricing":
        duals = dw.ZERO_DUALS
        if args.duals:
            duals = dw.parse_duals(Path(args.duals).read_text(encoding="utf-8"))
        model = dw.build_pricing(inst, duals, tight_dummy_degree=args.tight_dummy_degree)
    else:  # argparse choices guard this
        raise AssertionError(args.formulation)
    _write_text(args.output, milp.write_lp(model))
    print(f"wrote {model.name}: {len(model.variables)} variables, "
          f"{len(model.constraints)} constraints to {args.output}")
    return 0


def _cmd_check(args) -> int:
    inst = _load_instance(args.instance)
    s = parse_schedule(inst, Path(args.schedule).read_text(encoding="utf-8"))
    violations = check_schedule(inst, s)
    for v in violations:
        print(f"schedule {v}")
    if violations:
        return 1
    print(f"schedule feasible, cost {s.cost}")
    if args.against:
        if args.against == "bigm":
            model = milp.build_bigm(inst)
        else:
            model = milp.build_arc_time(inst, preprocess=True, symmetry=True,
                                        cuts=["three_cycle", "one_per_dock_time", "opposite_arcs"])
        assignment = milp.schedule_to_assignment(inst, s, args.against)
        model_violations = milp.check_solution(model, assignment)
        for v in model_violations:
            print(f"model {v}")
        if model_violations:
            return 1
        print(f"assignment satisfies {model.name}")
    return 0


def _cmd_bench(args) -> int:
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    instances = config["instances"]
    seed = int(config.get("seed", 0))
    reps = int(config.get("reps", 5))
    record_ms = bool(config.get("record_ms", False))
    method = config.get("method", MIN_ARRIVAL_VERTICAL)
    base = Path(args.config).parent
    records: list[RunRecord] = []
    for path in instances:
        inst_path = Path(path)
        if not inst_path.is_absolute():
            inst_path = base / inst_path
        inst = instgen.read_instance(inst_path.read_text(encoding="utf-8"))
        for rep in range(reps):
            rep_seed = seed + rep
            cfg = vns.VnsConfig(seed=rep_seed, **{k: config[k] for k in
                                                  ("alpha", "beta", "gamma", "epsilon", "metric")
                                                  if k in config})
            t0 = time.perf_counter()
            best, stats = vns.vns_solve(inst, construct(method, inst), cfg)
            ms = int((time.perf_counter() - t0) * 1000) if record_ms else 0
            records.append(RunRecord(instance=inst.name, method="vns", seed=rep_seed,
                                     rep=rep, cost=best.cost,
                                     served=inst.n - len(best.unserved), total=inst.n,
                                     iterations=stats.iterations, wall_ms=ms))
    lines = [BENCH_HEADER] + [r.csv_row() for r in records]
    _write_text(args.output, "\n".join(lines) + "\n")
    if args.plot:
        from . import report
        report.save_service_ratio_figure(
            [{"instance": r.instance, "ratio": r.ratio} for r in records],
            f"{args.plot}_service_ratio.png")
    print(f"wrote {len(records)} rows to {args.output}")
    return 0


def _add_vns_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.2)
    p.add_argument("--beta", type=float, default=0.3)
    p.add_argument("--gamma", type=float, default=0.3)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--nmax", type=int, default=None,
                   help="no-improvement cap (default: trailers * docks + 1)")
    p.add_argument("--metric", choices=vns.METRICS, default="d1")
    p.add_argument("--max-iters", type=int, default=10 ** 6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsts",
                                     description="Dock scheduling and truck sequencing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--docks", type=int, required=True)
    p.add_argument("--trailers", type=int, required=True)
    p.add_argument("--tf", type=int, default=16, help="shift length in periods")
    p.add_argument("--relaxed", action="store_true", help="allow desk-scale sizes")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("construct", help="run a construction heuristic")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("solve", help="run the adaptive destroy/repair search")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--method", choices=METHODS,
                   default=MIN_ARRIVAL_VERTICAL,
                   help="construction heuristic for the initial solution")
    _add_vns_flags(p)
    p.add_argument("--stats", help="write per-iteration CSV here")
    p.add_argument("--plot", metavar="PREFIX",
                   help="write convergence and schedule figures with this prefix")
    p.add_argument("-o", "--output", help="write the best schedule here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("exact", help="exhaustive optimum for desk-scale instances")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--max-trailers", type=int, default=7)
    p.add_argument("--max-docks", type=int, default=3)
    p.add_argument("--timeout", type=float, default=60.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_exact)

    p = sub.add_parser("export-model", help="build a formulation and write LP text")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--formulation", choices=("bigm", "arctime", "rmp", "pricing"),
                   required=True)
    p.add_argument("--no-due-dates", action="store_true",
                   help="bigm only: drop per-trailer deadline rows")
    p.add_argument("--preprocess", action="store_true",
                   help="arctime only: eliminate dominated arc variables")
    p.add_argument("--symmetry", action="store_true",
                   help="arctime only: pin return arcs to last completions")
    p.add_argument("--cuts", help="comma-separated inequality families "
                                  f"({', '.join(milp.CUT_FAMILIES)})")
    p.add_argument("--duals", help="pricing only: duals file")
    p.add_argument("--tight-dummy-degree", action="store_true",
                   help="pricing only: cap dummy degrees at 1 per dock")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_export_model)

    p = sub.add_parser("check", help="check a schedule file, optionally against a model")
    p.add_argument("-i", "--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--against", choices=("bigm", "arctime"))
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("bench", help="run the solver over an instance corpus")
    p.add_argument("--config", required=True, help="JSON: instances, seed, reps, ...")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--plot", metavar="PREFIX",
                   help="write a service-ratio figure with this prefix")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleScheduleError as exc:
        for v in exc.violations:
            print(f"infeasible: {v}", file=sys.stderr)
        return 1
    except (ValueError, OSError, exact.ExactSearchTimeout) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
