"""Command-line entry point: generate, run, evaluate, list-instances."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError
from .harness import ExperimentConfig, aggregate, load_instance, run_experiment
from .synthesis import BaseSpec, builtin_instances, sample_instance

EXIT_OK, EXIT_CONFIG, EXIT_ALL_FAILED = 0, 1, 2


def _load_config(args) -> ExperimentConfig:
    data = {}
    if args.config:
        data = ExperimentConfig.from_yaml(args.config).to_dict()
    if getattr(args, "seed", None) is not None:
        data["seeds"] = list(args.seed)
    if getattr(args, "out", None):
        data["output"] = args.out
    return ExperimentConfig.from_mapping(data)


def cmd_generate(args) -> int:
    conf = _load_config(args) if args.config else None
    name = args.instance or (conf.instance if conf else None)
    if name is None:
        raise ConfigError("field 'instance': give --instance or a config")
    n = args.n if args.n is not None else (conf.n_per_row if conf else None)
    seed = args.seed[0] if args.seed else (conf.seeds[0] if conf else 0)
    if not args.out:
        raise ConfigError("field 'output': --out is required")
    inst = load_instance(name)
    kind = conf.base_kind if conf else "gaussian-bump"
    bump = conf.bump if conf else 0.05
    inst = inst.with_bases(BaseSpec(kind, bump=bump), 0)
    inst.seed = seed
    if n is not None:
        inst = sample_instance(inst, n, seed)
    path = inst.save(args.out, fmt=args.format)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_run(args) -> int:
    conf = _load_config(args)
    report = run_experiment(conf, jobs=args.jobs)
    for t in report.trials:
        worst = "" if t["errors"] is None else f"{max(t['errors']):.3g}"
        print(f"seed {t['seed']:>4}  {t['status']:<18} max_error {worst:<10} success {t['success']}")
    agg = report.aggregate
    print(json.dumps(agg, sort_keys=True))
    if conf.output:
        print(f"wrote {conf.output}/report.json and report.csv")
    return EXIT_ALL_FAILED if agg["n_completed"] == 0 else EXIT_OK


def cmd_evaluate(args) -> int:
    path = Path(args.report)
    if path.is_dir():
        path = path / "report.json"
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError) as e:
        raise ConfigError(f"cannot read report {path}: {e}") from e
    trials = data["trials"]
    print("seed,class,estimate,error")
    for t in trials:
        if t["status"] == "ok":
            for l, (j, e) in enumerate(zip(t["permutation"], t["errors"])):
                print(f"{t['seed']},{l},{j},{e:.6g}")
    agg = aggregate(trials)
    if agg != data["aggregate"]:
        print("warning: stored aggregate differs from recomputation", file=sys.stderr)
    print(json.dumps(agg, sort_keys=True))
    return EXIT_ALL_FAILED if agg["n_completed"] == 0 else EXIT_OK


def cmd_list(args) -> int:
    for name, inst in sorted(builtin_instances().items()):
        rows = "; ".join(" ".join(f"{v:.3g}" for v in r) for r in inst.mixing.array)
        print(f"{name:<14} L={inst.L} M={inst.M}  [{rows}]")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="decontam", description="Mixture decontamination experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a problem instance (and samples) to a directory")
    g.add_argument("--config")
    g.add_argument("--instance", help="template name")
    g.add_argument("--n", type=int, nargs="+", help="sample size per row (omit for no samples)")
    g.add_argument("--seed", type=int, nargs="+")
    g.add_argument("--out")
    g.add_argument("--format", choices=("csv", "binary"), default="csv")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="run an experiment from a config file")
    r.add_argument("--config", required=True)
    r.add_argument("--seed", type=int, nargs="+", help="override the config seeds")
    r.add_argument("--out", help="override the output directory")
    r.add_argument("--jobs", type=int, default=1)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("evaluate", help="print the per-class table and aggregates of a report")
    e.add_argument("report", help="report.json or the directory holding it")
    e.set_defaults(func=cmd_evaluate)

    ls = sub.add_parser("list-instances", help="list built-in instance templates")
    ls.set_defaults(func=cmd_list)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
