"""Command-line interface: run a pipeline, benchmark both, generate scenes.

Exit codes: 0 success, 2 configuration or script error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import pipeline, synth
from .config import ConfigError, RunConfig, load_config
from .scenarios import scenario_names, scenario_path
from .synth import ScriptError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stillscan",
        description="Detect temporarily stationary objects in grayscale "
                    "frame sequences and monitor them by NCC.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one pipeline over an input")
    run_p.add_argument("--config", type=Path, default=None,
                       help="JSON configuration file")
    run_p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE",
                       help="override a config key by dotted path")
    run_p.add_argument("--input", type=Path, default=None,
                       help="shorthand for --set input.path=...")

    bench_p = sub.add_parser("bench", help="measure both pipelines' throughput")
    bench_p.add_argument("--config", type=Path, default=None)
    bench_p.add_argument("--set", dest="overrides", action="append", default=[],
                         metavar="KEY=VALUE")
    bench_p.add_argument("--input", type=Path, default=None)
    bench_p.add_argument("--repetitions", type=int, default=5)
    bench_p.add_argument("--csv", type=Path, default=None,
                         help="also write the report to this CSV file")

    synth_p = sub.add_parser("synth", help="render a synthetic scene")
    group = synth_p.add_mutually_exclusive_group(required=True)
    group.add_argument("--script", type=Path, help="scene script JSON")
    group.add_argument("--bundled", choices=scenario_names(),
                       help="use a bundled scenario script")
    synth_p.add_argument("out_dir", type=Path)
    synth_p.add_argument("--force", action="store_true",
                         help="overwrite a non-empty output directory")
    return parser


def _load(args) -> RunConfig:
    overrides = list(args.overrides)
    if args.input is not None:
        overrides.append(f"input.path={args.input}")
    return load_config(args.config, overrides)


def _cmd_run(args) -> int:
    config = _load(args)
    result = pipeline.run(config)
    pipeline.write_event_log(result.events, config.events_path)
    summary = result.summary
    print(summary.to_text())
    if config.summary_csv:
        Path(config.summary_csv).write_text(summary.to_csv())
    print(f"{result.frames_processed} frames -> {len(result.events)} events "
          f"({config.events_path})")
    return EXIT_OK


def _cmd_bench(args) -> int:
    config = _load(args)
    rows = pipeline.bench(config, args.repetitions)
    csv_text = pipeline.bench_csv(rows)
    print(csv_text, end="")
    if args.csv is not None:
        args.csv.write_text(csv_text)
    return EXIT_OK


def _cmd_synth(args) -> int:
    script_path = args.script if args.script is not None else scenario_path(args.bundled)
    script = synth.load_script(script_path)
    out = synth.render(script, args.out_dir, overwrite=args.force)
    print(f"rendered {script.frame_count} frames to {out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "bench":
            return _cmd_bench(args)
        return _cmd_synth(args)
    except (ConfigError, ScriptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileExistsError as exc:
        print(f"error: {exc} (use --force to overwrite)", file=sys.stderr)
        return EXIT_IO
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
