"""Command-line interface: profile generation, delay curves, bound verification,
stream planning/simulation, and reproduction of the built-in reference tables.

Exit codes: 0 success, 2 bad input, 3 infeasible system or unmet precondition,
4 failed internal assertion (a proven bound did not hold).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from . import scenarios
from .checks import oracle_table_from_instances, run_bound_battery, run_oracle_battery
from .model import (
    BandwidthProfile,
    DiffusionModel,
    DomainError,
    InfeasibleError,
    ManyToOne,
    OneToOne,
    OneToSome,
    RANDOM_FAMILIES,
    StreamConfig,
    expand_classes,
    generate_adversarial,
    load_profile,
    profile_from_dict,
    random_profile,
    save_profile,
)
from .single_chunk import delay_curve, evaluate_bounds
from .stream import (
    evaluate_group_period,
    feasibility_check,
    find_group_period,
    measured_stream_delay,
    plan_intra_then_inter,
    responsibility_delay_bound,
    save_schedule,
    stream_delay_floor,
    verify_schedule,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_ASSERTION = 4


def _parse_model(name: str, c: int) -> DiffusionModel:
    if name == "m":
        return ManyToOne()
    if name == "1":
        return OneToOne()
    if name == "c":
        return OneToSome(c)
    raise DomainError(f"unknown model {name!r}; expected m, 1 or c")


def _write_json(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_gen(args: argparse.Namespace) -> int:
    selected = [
        name
        for name, flag in (
            ("homogeneous", args.homogeneous is not None),
            ("classes", args.classes is not None),
            ("adversarial", args.adversarial),
            ("random", args.random is not None),
        )
        if flag
    ]
    if len(selected) != 1:
        print("gen: choose exactly one of --homogeneous/--classes/--adversarial/--random", file=sys.stderr)
        return EXIT_INPUT
    kind = selected[0]
    if kind == "homogeneous":
        profile = BandwidthProfile((args.homogeneous,) * args.N)
    elif kind == "classes":
        with open(args.classes, encoding="utf-8") as fh:
            data = json.load(fh)
        if "classes" not in data:
            raise DomainError("class file needs a 'classes' key")
        profile = profile_from_dict({"classes": data["classes"], "N": args.N or data.get("N")})
    elif kind == "adversarial":
        profile = generate_adversarial(args.N, args.n0, args.V, args.s)
    else:
        import random as _random

        profile = random_profile(args.random, args.N, _random.Random(args.seed))
    save_profile(profile, args.out)
    print(f"wrote {profile.size}-peer profile to {args.out}")
    return EXIT_OK


def _cmd_delay(args: argparse.Namespace) -> int:
    profile = load_profile(args.profile)
    model = _parse_model(args.model, args.c)
    n_max = args.nmax or profile.size
    curve = delay_curve(profile, model, args.n0, n_max)
    rows = [(n, float(curve.values[n - 1])) for n in range(1, n_max + 1)]
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "delay_seconds"])
            writer.writerows(rows)
    else:
        print("n,delay_seconds")
        for n, d in rows:
            print(f"{n},{d}")
    if args.bounds:
        report = evaluate_bounds(profile, args.n0, args.c, n_max)
        _write_json(report.to_json_dict(), args.bounds)
    return EXIT_OK


MODEL_LABELS = {"m": "pooled (m)", "1": "single (1)", "c": f"parallel (c={scenarios.REFERENCE_C})"}


def _cmd_reproduce(args: argparse.Namespace) -> int:
    n = args.N
    n0 = scenarios.REFERENCE_N0
    print(f"Single-chunk delay D(N) at N={n}, n0={n0} (computed vs reference)")
    header = f"{'dist':<6}{'model':<16}{'computed':>12}{'reference':>12}{'rel err':>10}"
    print(header)
    print("-" * len(header))
    results: dict[tuple[str, str], float] = {}
    for name, spec in scenarios.DISTRIBUTIONS.items():
        profile = expand_classes(spec, n)
        for key in ("m", "1", "c"):
            model = _parse_model(key, scenarios.REFERENCE_C)
            value = float(delay_curve(profile, model, n0, n).final)
            results[(name, key)] = value
            ref = scenarios.SINGLE_CHUNK_REFERENCE[name][key]
            rel = abs(value - ref) / ref
            print(f"{name:<6}{MODEL_LABELS[key]:<16}{value:>12.4f}{ref:>12.2f}{rel:>9.2%}")
    print()
    print("Stream-delay bounds per qualifying period E (informational; not asserted)")
    header = (
        f"{'dist':<6}{'model':<16}{'s':>5}{'E':>5}{'2E/s':>10}{'D+E/s':>10}{'reference':>11}"
    )
    print(header)
    print("-" * len(header))
    for name, spec in scenarios.DISTRIBUTIONS.items():
        profile = expand_classes(spec, n)
        for key in ("m", "1", "c"):
            model = _parse_model(key, scenarios.REFERENCE_C)
            for rate in scenarios.STREAM_RATES:
                plan = find_group_period(profile, StreamConfig(rate, n0), model)
                ref = scenarios.STREAM_REFERENCE.get((name, key, rate))
                ref_text = f"{ref:.2f}" if ref is not None else "-"
                if plan is None:
                    print(f"{name:<6}{MODEL_LABELS[key]:<16}{rate:>5}{'-':>5}{'-':>10}{'-':>10}{ref_text:>11}")
                    continue
                alt = results[(name, key)] + plan.period / rate
                print(
                    f"{name:<6}{MODEL_LABELS[key]:<16}{rate:>5}{plan.period:>5}"
                    f"{plan.delay_bound:>10.2f}{alt:>10.2f}{ref_text:>11}"
                )
    return EXIT_OK


def _cmd_stream(args: argparse.Namespace) -> int:
    profile = load_profile(args.profile)
    stream = StreamConfig(args.s, args.n0)
    model = _parse_model(args.model, args.c)
    feas = feasibility_check(profile, stream)
    report: dict = {
        "peers": profile.size,
        "rate": args.s,
        "n0": args.n0,
        "model": args.model if args.model != "c" else f"c{args.c}",
        "feasible": feas.feasible,
        "slack": feas.slack,
        "forced_delay_floor": stream_delay_floor(profile, stream),
    }
    if feas.feasible:
        report["responsibility_bound"] = responsibility_delay_bound(profile, stream)
    plan = find_group_period(profile, stream, model) if feas.feasible else None
    if plan is not None:
        report["group_plan"] = {
            "period": plan.period,
            "delay_bound": plan.delay_bound,
            "intra_delay": plan.intra_delay,
            "intra_limit": plan.intra_limit,
            "provision_lhs": plan.provision_lhs,
            "provision_rhs": plan.provision_rhs,
            "alt_delay_estimate": float(delay_curve(profile, model, args.n0, profile.size).final)
            + plan.period / args.s,
        }
    else:
        report["group_plan"] = None
    if args.simulate:
        if not feas.feasible:
            report["error"] = "cannot simulate an infeasible stream"
            _write_json(report, args.out)
            return EXIT_INFEASIBLE
        if plan is None:
            report["error"] = "no qualifying group period; nothing to simulate"
            _write_json(report, args.out)
            return EXIT_INFEASIBLE
        horizon = args.horizon or 3 * plan.period
        schedule = plan_intra_then_inter(profile, stream, model, plan, horizon)
        result = verify_schedule(profile, stream, model, schedule)
        report["simulation"] = {
            "horizon": horizon,
            "max_delay": result.max_delay,
            "valid": result.valid,
            "violations": list(result.violations[:20]),
            "within_bound": result.max_delay <= plan.delay_bound + 1e-9,
        }
        if args.schedule:
            save_schedule(schedule, args.schedule)
            report["simulation"]["schedule_file"] = args.schedule
    _write_json(report, args.out)
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    report: dict = {"seed": args.seed}
    if args.instances:
        with open(args.instances, encoding="utf-8") as fh:
            table = oracle_table_from_instances(json.load(fh))
        report["instance_table"] = [
            {
                "uploads": list(cmp.uploads),
                "n0": cmp.n0,
                "n": cmp.n,
                "c": cmp.connections,
                "algorithm": cmp.algorithm,
                "oracle": cmp.oracle,
                "match": cmp.match,
            }
            for cmp in table.comparisons
        ]
        oracle_ok = table.passed
    else:
        oracle = run_oracle_battery(args.seed, args.oracle_instances)
        report["oracle"] = oracle.to_json_dict()
        oracle_ok = oracle.passed
    bounds = run_bound_battery(args.seed, args.profiles)
    report["bounds"] = bounds.to_json_dict()
    report["passed"] = bool(oracle_ok and bounds.passed)
    _write_json(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_ASSERTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chunkcast",
        description="Delay bounds and schedulers for chunk-based live streaming",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="Generate a bandwidth profile JSON")
    p_gen.add_argument("--homogeneous", type=float, default=None, metavar="U")
    p_gen.add_argument("--classes", type=str, default=None, metavar="FILE")
    p_gen.add_argument("--adversarial", action="store_true")
    p_gen.add_argument("--random", type=str, default=None, choices=RANDOM_FAMILIES)
    p_gen.add_argument("--N", type=int, default=None)
    p_gen.add_argument("--n0", type=int, default=1)
    p_gen.add_argument("--V", type=float, default=0.0, help="excess capacity of the adversarial build")
    p_gen.add_argument("--s", type=float, default=1.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("-o", "--out", type=str, required=True)
    p_gen.set_defaults(func=_cmd_gen)

    p_delay = sub.add_parser("delay", help="Emit a delay curve as CSV")
    p_delay.add_argument("--profile", type=str, required=True)
    p_delay.add_argument("--model", type=str, required=True, choices=("m", "1", "c"))
    p_delay.add_argument("--c", type=int, default=2)
    p_delay.add_argument("--n0", type=int, default=1)
    p_delay.add_argument("--nmax", type=int, default=None)
    p_delay.add_argument("--bounds", type=str, default=None, help="also write a bound report JSON")
    p_delay.add_argument("-o", "--out", type=str, default=None)
    p_delay.set_defaults(func=_cmd_delay)

    p_rep = sub.add_parser("reproduce", help="Compare computed delays with the reference tables")
    p_rep.add_argument("--N", type=int, default=scenarios.REFERENCE_N)
    p_rep.set_defaults(func=_cmd_reproduce)

    p_stream = sub.add_parser("stream", help="Feasibility, bounds and optional simulation")
    p_stream.add_argument("--profile", type=str, required=True)
    p_stream.add_argument("--s", type=float, required=True)
    p_stream.add_argument("--n0", type=int, required=True)
    p_stream.add_argument("--model", type=str, default="m", choices=("m", "1", "c"))
    p_stream.add_argument("--c", type=int, default=2)
    p_stream.add_argument("--simulate", action="store_true")
    p_stream.add_argument("--horizon", type=int, default=None)
    p_stream.add_argument("--schedule", type=str, default=None, help="write the schedule as JSON lines")
    p_stream.add_argument("-o", "--out", type=str, default=None)
    p_stream.set_defaults(func=_cmd_stream)

    p_verify = sub.add_parser("verify", help="Oracle equivalence and bound batteries")
    p_verify.add_argument("--seed", type=int, default=20240)
    p_verify.add_argument("--profiles", type=int, default=1000)
    p_verify.add_argument("--oracle-instances", type=int, default=200)
    p_verify.add_argument("--instances", type=str, default=None, help="JSON file of tiny instances")
    p_verify.add_argument("-o", "--out", type=str, default=None)
    p_verify.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_ASSERTION


if __name__ == "__main__":
    raise SystemExit(main())
