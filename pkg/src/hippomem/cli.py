"""Command-line entry point.

Verbs:
  run           execute an experiment (preset and/or config file) and write a
                report tree (manifest, forgetting-curve CSVs, image grids)
  pretrain      build and cache the frozen scaffolding for a config without
                running the experiment
  list-presets  show the built-in experiment presets
  report        print the summary table from an existing run's manifest

Exit codes: 0 success, 2 configuration error, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, DataError
from .experiments import (
    CACHE_ENV_VAR,
    PRESETS,
    ExperimentSpec,
    build_scaffolding,
    default_cache_dir,
    load_config,
    load_dataset,
    preset_spec,
    run_repeats,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hippomem",
        description="Sequence memory experiments: one-shot storage and cued recall.",
    )
    parser.add_argument("--version", action="version", version=f"hippomem {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_spec_args(p):
        p.add_argument("--preset", help="start from a named preset (see list-presets)")
        p.add_argument("--config", help="INI config file, applied on top of the preset")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument(
            "--no-cache",
            action="store_true",
            help="always pre-train from scratch, bypassing the scaffolding cache",
        )
        p.add_argument(
            "--cache-dir",
            help=f"scaffolding cache directory (default ${CACHE_ENV_VAR} or ~/.cache/hippomem)",
        )

    p_run = sub.add_parser("run", help="run an experiment and write its report")
    add_spec_args(p_run)
    p_run.add_argument("--out", required=True, help="output directory for the report tree")
    p_run.add_argument(
        "--repeats", type=int, default=1, help="independent seeded repetitions (default 1)"
    )
    p_run.add_argument(
        "--dry-run",
        action="store_true",
        help="resolve and print the effective config, then exit without running",
    )

    p_pre = sub.add_parser("pretrain", help="build and cache scaffolding only")
    add_spec_args(p_pre)

    sub.add_parser("list-presets", help="list built-in experiment presets")

    p_rep = sub.add_parser("report", help="summarize an existing run directory")
    p_rep.add_argument("run_dir", help="directory previously written by `hippomem run`")
    return parser


def _resolve_spec(args) -> ExperimentSpec:
    if not args.preset and not args.config:
        raise ConfigError("nothing to run: provide --preset and/or --config")
    spec = preset_spec(args.preset) if args.preset else ExperimentSpec()
    if args.config:
        spec = load_config(args.config, base=spec)
        if spec.name == "custom" and not args.preset:
            spec.name = Path(args.config).stem
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("experiment.master_seed: must be non-negative")
        spec.master_seed = args.seed
    return spec.resolved()


def _resolve_cache(args):
    if args.no_cache:
        return None
    if args.cache_dir:
        return Path(args.cache_dir)
    return default_cache_dir()


def _print_config(spec: ExperimentSpec, stream=None) -> None:
    # resolve the stream at call time so redirection keeps working
    stream = stream if stream is not None else sys.stdout
    for section, keys in spec.sections().items():
        print(f"[{section}]", file=stream)
        for key, value in keys.items():
            print(f"{key} = {value}", file=stream)
        print(file=stream)


def _cmd_run(args) -> int:
    spec = _resolve_spec(args)
    if args.dry_run:
        _print_config(spec)
        return EXIT_OK
    run_repeats(spec, Path(args.out), args.repeats, cache_dir=_resolve_cache(args))
    return EXIT_OK


def _cmd_pretrain(args) -> int:
    spec = _resolve_spec(args)
    cache_dir = _resolve_cache(args)
    if cache_dir is None:
        raise ConfigError("pretrain with --no-cache would discard its own output")
    dataset = load_dataset(spec)
    build_scaffolding(spec, dataset=dataset, cache_dir=cache_dir)
    return EXIT_OK


def _cmd_list_presets(_args) -> int:
    width = max(len(name) for name in PRESETS)
    for name in sorted(PRESETS):
        description, _ = PRESETS[name]
        print(f"{name:<{width}}  {description}")
    return EXIT_OK


def _cmd_report(args) -> int:
    manifest_path = Path(args.run_dir) / "manifest.json"
    if not manifest_path.is_file():
        raise DataError(f"no manifest found at {manifest_path}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed manifest {manifest_path}: {exc}") from exc
    print(f"run: {manifest.get('name', '?')}")
    experiment = manifest.get("config", {}).get("experiment", {})
    print(
        "variant={variant} n={n} seed={master_seed} stored={stored}".format(
            stored=manifest.get("stored_count", "?"), **experiment
        )
    )
    curves = manifest.get("curves", {})
    if curves:
        width = max(len(name) for name in curves)
        print(f"{'curve':<{width}}  {'mean':>8}  {'newest50%':>9}  {'newest':>8}  {'slope':>10}")
        for name in sorted(curves):
            s = curves[name]
            print(
                f"{name:<{width}}  {s['mean']:8.4f}  {s['mean_newest_half']:9.4f}"
                f"  {s['newest']:8.4f}  {s['slope']:10.6f}"
            )
    for table, counts in manifest.get("classification", {}).items():
        print(f"{table}: " + ", ".join(f"{k}={v}" for k, v in counts.items()))
    return EXIT_OK


_COMMANDS = {
    "run": _cmd_run,
    "pretrain": _cmd_pretrain,
    "list-presets": _cmd_list_presets,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.verb](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # surface unexpected failures as a distinct code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
