"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error (bad manifest/config/
validation findings), 3 runtime error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import runner
from .dataset import dataset_summary, load_manifest, validate_manifest
from .errors import ConfigError, EegEvalError, ManifestError, RunError, SignalReadError
from .synthetic import generate_synthetic, synthetic_spec_from_dict

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="eegeval", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment from a TOML config")
    p_run.add_argument("config", type=Path)

    p_gen = sub.add_parser("generate-synthetic", help="generate a synthetic dataset")
    p_gen.add_argument("spec", type=Path, help="TOML file with the synthetic spec fields")
    p_gen.add_argument("out", type=Path)

    p_val = sub.add_parser("validate", help="validate a dataset against its manifest")
    p_val.add_argument("manifest", type=Path)

    p_ins = sub.add_parser("inspect", help="print dataset summary statistics")
    p_ins.add_argument("manifest", type=Path)

    p_rep = sub.add_parser("report", help="render a run summary")
    p_rep.add_argument("summary", type=Path)
    p_rep.add_argument("--format", choices=("table", "csv"), default="table")
    return parser


def _cmd_run(args) -> int:
    config = runner.load_config(args.config)
    artifacts = runner.execute_run(config)
    print(f"run {artifacts.run_id} finished; artifacts in {artifacts.output_dir}")
    for name in sorted(artifacts.aggregate.mean):
        mean = artifacts.aggregate.mean[name]
        std = artifacts.aggregate.std[name]
        print(f"  {name:12s} {mean:.4f} +/- {std:.4f}")
    return EXIT_OK


def _cmd_generate(args) -> int:
    with open(args.spec, "rb") as fh:
        doc = tomllib.load(fh)
    spec = synthetic_spec_from_dict(doc)
    manifest = generate_synthetic(spec, args.out)
    n_trials = sum(len(s.trials) for subj in manifest.subjects for s in subj.sessions)
    print(f"wrote {len(manifest.subjects)} subjects, {n_trials} trials to {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    manifest = load_manifest(args.manifest)
    report = validate_manifest(manifest)
    if report.ok:
        print(f"{manifest.dataset_name}: ok ({sum(1 for _ in manifest.iter_trials())} trials)")
        return EXIT_OK
    for f in report.findings:
        print(f"{f.subject_id}/{f.session_id}/{f.trial_id}: {f.problem}")
    print(f"{len(report.findings)} finding(s)")
    return EXIT_DATA


def _cmd_inspect(args) -> int:
    manifest = load_manifest(args.manifest)
    stats = dataset_summary(manifest)
    trial_counts = sorted(set(stats.trials_per_subject.values()))
    print(f"dataset:          {stats.dataset_name}")
    print(f"subjects:         {stats.n_subjects}")
    print(f"trials/subject:   {trial_counts[0]}" + (f"-{trial_counts[-1]}" if len(trial_counts) > 1 else ""))
    print(f"channels:         {stats.n_channels}")
    print(f"sampling rate:    {stats.sampling_rate_hz:g} Hz")
    print(f"total signal:     {stats.total_trial_seconds:.1f} s")
    return EXIT_OK


def _cmd_report(args) -> int:
    doc = runner.load_summary(args.summary)
    agg = doc["aggregate"]
    names = sorted(agg["mean"])
    if args.format == "csv":
        print("metric,mean,std")
        for name in names:
            print(f"{name},{agg['mean'][name]:.6f},{agg['std'][name]:.6f}")
        return EXIT_OK
    width = max(len(n) for n in names)
    print(f"run {doc['run_id']}  ({agg['n_folds']} folds)")
    print(f"{'metric':<{width}}  {'mean':>8}  {'std':>8}")
    for name in names:
        print(f"{name:<{width}}  {agg['mean'][name]:8.4f}  {agg['std'][name]:8.4f}")
    scheme = doc["config"]["ground_truth"]
    if scheme.get("threshold") is not None:
        print(f"ground truth: {scheme['kind']} on {scheme['dimension']}, "
              f"threshold {scheme['threshold']}")
    else:
        print(f"ground truth: {scheme['kind']} over {scheme['class_names']}")
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "generate-synthetic": _cmd_generate,
    "validate": _cmd_validate,
    "inspect": _cmd_inspect,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (ManifestError, SignalReadError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (RunError, EegEvalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except tomllib.TOMLDecodeError as exc:
        print(f"error: invalid TOML: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
