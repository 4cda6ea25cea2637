"""Command-line interface: generate / solve / attack / calibrate / serve / report."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import solvers
from .harness import bridge, calibrate, datasets, experiment


def _cmd_generate(args) -> int:
    if args.preset:
        spec = datasets.preset_spec(args.preset, seed=args.seed)
    elif args.spec:
        with open(args.spec) as f:
            obj = json.load(f)
        if args.seed is not None:
            obj["seed"] = args.seed
        spec = datasets.spec_from_obj(obj)
    else:
        print("error: need --spec FILE or --preset NAME", file=sys.stderr)
        return 2
    manifest = datasets.generate_dataset(spec, args.out)
    print(f"wrote {manifest['n_train']} train + {manifest['n_test']} test "
          f"{spec.problem} instances to {args.out}")
    return 0


def _cmd_solve(args) -> int:
    inst = datasets.load_instance_file(args.instance)
    handle = solvers.resolve_handle(args.solver, time_limit=args.time_limit)
    sol, wall = solvers.solve_timed(handle, inst)
    print(json.dumps({
        "solver": args.solver,
        "problem": inst.problem,
        "cost": sol.cost,
        "status": sol.status,
        "payload": list(sol.payload),
        "wall_time": wall,
    }, sort_keys=True))
    return 0


def _cmd_attack(args) -> int:
    result = experiment.attack_dataset(
        args.solver, args.attacker, args.dataset, split=args.split,
        budget=args.budget, seed=args.seed, trials=args.trials,
        time_limit=args.time_limit)
    text = json.dumps(result, sort_keys=True, indent=1) + "\n"
    if args.out:
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    rows = experiment.aggregate([result])
    for row in rows:
        print(f"{row['solver']} vs {row['attacker']} on {row['dataset']}: "
              f"clean {row['clean_mean']:.4f} -> attacked {row['attacked_mean']:.4f} "
              f"(success rate {row['success_rate']:.2f})", file=sys.stderr)
    return 0


def _cmd_calibrate(args) -> int:
    base = None
    if os.path.exists(args.profile):
        base = calibrate.load_profile(args.profile).speed_base
    profile = calibrate.calibrate(speed_base=base, samples=args.samples)
    calibrate.save_profile(profile, args.profile)
    print(json.dumps({
        "profile": args.profile,
        "speed_base": profile.speed_base,
        "speed_now": profile.speed_now,
        "scale": profile.speed_base / profile.speed_now,
    }, sort_keys=True))
    if args.uniform_limit is not None:
        print(f"scaled limit: {calibrate.scaled_limit(profile, args.uniform_limit)!r} s")
    return 0


def _cmd_serve(args) -> int:
    def factory():
        return bridge.make_session(args.solver, args.dataset, split=args.split,
                                   budget=args.budget, time_limit=args.time_limit)

    if args.stdio:
        bridge.serve_stdio(factory())
        return 0
    if args.port is None:
        print("error: need --port P or --stdio", file=sys.stderr)
        return 2
    server = bridge.serve_tcp(factory, args.port)
    print(f"serving on 127.0.0.1:{server.server_address[1]}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _cmd_report(args) -> int:
    cell_dir = os.path.join(args.indir, "cells")
    source = cell_dir if os.path.isdir(cell_dir) else args.indir
    results = []
    for fname in sorted(os.listdir(source)):
        if fname.endswith(".json") and fname != "timings.json":
            with open(os.path.join(source, fname)) as f:
                obj = json.load(f)
            if "instances" in obj:
                results.append(obj)
    rows = experiment.aggregate(results)
    if args.format == "csv":
        text = experiment.report_csv(rows)
    elif args.format == "json":
        text = experiment.report_json(rows)
    else:
        text = experiment.report_markdown(rows)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="solverstress",
        description="Perturb CO problem instances (never worsening the true "
                    "optimum) and search for solver-quality regressions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a seeded dataset directory")
    p.add_argument("--spec", help="JSON file with dataset spec fields")
    p.add_argument("--preset", choices=sorted(datasets.PRESETS),
                   help="named dataset shape")
    p.add_argument("--out", required=True, help="output dataset directory")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("solve", help="run one solver on one instance file")
    p.add_argument("--solver", required=True,
                   help="builtin name or ext:<problem>:<name>")
    p.add_argument("--instance", required=True)
    p.add_argument("--time-limit", type=float, default=None)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("attack", help="attack a solver across a dataset split")
    p.add_argument("--solver", required=True)
    p.add_argument("--attacker", required=True,
                   choices=["baseline", "ra", "og", "sa", "beam"])
    p.add_argument("--dataset", required=True, help="dataset directory")
    p.add_argument("--split", default="test", choices=["train", "test"])
    p.add_argument("--budget", type=int, default=None, help="max actions K")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=None,
                   help="outer repetitions (defaults per attacker)")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--out", help="write the raw cell report JSON here")
    p.set_defaults(fn=_cmd_attack)

    p = sub.add_parser("calibrate", help="measure machine speed for time limits")
    p.add_argument("--profile", default="calibration.json")
    p.add_argument("--samples", type=int, default=calibrate.CALIBRATION_SAMPLES)
    p.add_argument("--uniform-limit", type=float, default=None)
    p.set_defaults(fn=_cmd_calibrate)

    p = sub.add_parser("serve", help="serve the attack MDP bridge (JSON lines)")
    p.add_argument("--solver", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--split", default="train", choices=["train", "test"])
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--stdio", action="store_true")
    p.set_defaults(fn=_cmd_serve)

    p = sub.add_parser("report", help="aggregate cell reports to csv/json/md")
    p.add_argument("--in", dest="indir", required=True)
    p.add_argument("--format", default="csv", choices=["csv", "json", "md"])
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
