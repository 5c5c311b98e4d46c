"""Command-line entry points: run, summarize, export-channels, validate-config."""

from __future__ import annotations

import argparse
import sys

import yaml

from . import channel as ch
from .errors import ChannelFileError, ConfigurationError
from .harness import ExperimentConfig, generate_channel_pool, run_experiment, summarize


def _parse_override(text: str) -> tuple[str, object]:
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"override must look like key=value, got {text!r}")
    key, raw = text.split("=", 1)
    return key, yaml.safe_load(raw)


def _load_config(path: str | None, overrides: list) -> ExperimentConfig:
    data = {}
    if path:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    for key, value in overrides or []:
        data[key] = value
    return ExperimentConfig.from_dict(data)


def main(argv: list | None = None) -> int:
    parser = argparse.ArgumentParser(prog="dmasim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a Monte Carlo experiment and write CSV results")
    p_run.add_argument("-c", "--config", help="YAML config file")
    p_run.add_argument("-o", "--output", default="results.csv", help="output CSV path")
    p_run.add_argument(
        "--set", dest="overrides", action="append", type=_parse_override, default=[],
        metavar="KEY=VALUE", help="override a config key (repeatable)",
    )

    p_sum = sub.add_parser("summarize", help="print grouped mean/std of a results CSV")
    p_sum.add_argument("csv", help="results CSV produced by 'run'")
    p_sum.add_argument("-o", "--output", help="also write the summary table as CSV")

    p_exp = sub.add_parser("export-channels", help="generate a channel file for later import")
    p_exp.add_argument("-c", "--config", help="YAML config file")
    p_exp.add_argument("-o", "--output", required=True, help="channel file path")
    p_exp.add_argument("--kind", default="DMA", choices=["DMA", "PCHP", "DPA"])
    p_exp.add_argument("--count", type=int, default=100)
    p_exp.add_argument(
        "--set", dest="overrides", action="append", type=_parse_override, default=[],
        metavar="KEY=VALUE",
    )

    p_val = sub.add_parser("validate-config", help="check a config file and exit")
    p_val.add_argument("config", help="YAML config file")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = _load_config(args.config, args.overrides)
            result = run_experiment(cfg, out_csv=args.output)
            print(f"wrote {len(result.rows)} rows to {args.output}"
                  + (f" ({len(result.aborts)} aborted trials)" if result.aborts else ""))
        elif args.command == "summarize":
            table = summarize(args.csv)
            print(table.to_string(index=False))
            if args.output:
                table.to_csv(args.output, index=False)
        elif args.command == "export-channels":
            cfg = _load_config(args.config, args.overrides)
            pool = generate_channel_pool(cfg, args.kind, args.count)
            ch.export_channels(args.output, pool)
            print(f"wrote {len(pool)} realizations ({pool[0].shape[0]}x{pool[0].shape[1]}) "
                  f"to {args.output}")
        elif args.command == "validate-config":
            _load_config(args.config, [])
            print("config ok")
    except (ConfigurationError, ChannelFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
