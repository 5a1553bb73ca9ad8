"""Command line front end.

Three subcommands: ``run`` executes the configured campaign, ``sweep``
crosses one or more axes against the base config, and ``plot`` renders
figures from a previously written CSV.  Exit code 0 means success, 2 a
configuration or input validation problem, and 3 a runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import engine, plots
from .config import RunConfig, parse_config, serialize_config
from .engine import SWEEP_AXES, CampaignStats, TrialResult
from .errors import ConfigError, SchemaError
from .strategies import strategy_names

log = logging.getLogger(__name__)

TRIALS_CSV_COLUMNS = [
    "seed",
    "environment",
    "alpha",
    "beta",
    "gamma",
    "gbs_density",
    "strategy",
    "delta_hsm",
    "handover_count",
    "outage_steps",
    "total_steps",
    "handover_frequency",
    "outage_probability",
]

SWEEP_CSV_COLUMNS = [
    "environment",
    "alpha",
    "beta",
    "gamma",
    "gbs_density",
    "strategy",
    "delta_hsm",
    "n_trials",
    "handover_frequency_mean",
    "handover_frequency_std",
    "outage_probability_mean",
    "outage_probability_std",
]


def _format(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _write_csv(path: Path, columns: list[str], records: Sequence) -> Path:
    # plain RFC-4180 rows; values never need quoting
    lines = [",".join(columns)]
    for rec in records:
        lines.append(",".join(_format(getattr(rec, c)) for c in columns))
    path.write_text("\r\n".join(lines) + "\r\n")
    return path


def write_trials_csv(path: str | Path, trials: Sequence[TrialResult]) -> Path:
    return _write_csv(Path(path), TRIALS_CSV_COLUMNS, trials)


def write_sweep_csv(path: str | Path, stats: Sequence[CampaignStats]) -> Path:
    return _write_csv(Path(path), SWEEP_CSV_COLUMNS, stats)


def write_summary_json(path: str | Path, cfg, stats: Sequence[CampaignStats]) -> Path:
    path = Path(path)
    payload = {
        "config": serialize_config(cfg),
        "n_trials": cfg.n_trials,
        "cells": [dataclasses.asdict(s) for s in stats],
    }
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _parse_sets(pairs: list[str]) -> dict[str, str]:
    overrides = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    return overrides


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config, _parse_sets(args.set))
    env_seed = os.environ.get("SIM_SEED")
    if env_seed is not None:
        try:
            seed = int(env_seed)
        except ValueError:
            raise ConfigError(f"SIM_SEED must be an integer, got {env_seed!r}") from None
        if seed < 0:
            raise ConfigError("SIM_SEED must be non-negative")
        cfg = dataclasses.replace(cfg, base_seed=seed)
    return cfg


def _parse_axes(pairs: list[str]) -> dict[str, list]:
    axes: dict[str, list] = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"--axis expects NAME=V1,V2,..., got {item!r}")
        name, raw = item.split("=", 1)
        name = name.strip()
        if name not in SWEEP_AXES:
            raise ConfigError(f"--axis {name!r} is not one of {', '.join(SWEEP_AXES)}")
        values = [v.strip() for v in raw.split(",") if v.strip()]
        if not values:
            raise ConfigError(f"--axis {name} has no values")
        if name in ("density", "delta"):
            try:
                axes[name] = [float(v) for v in values]
            except ValueError:
                raise ConfigError(f"--axis {name} expects numbers, got {raw!r}") from None
        elif name == "strategy":
            known = set(strategy_names())
            for v in values:
                if v not in known:
                    raise ConfigError(f"--axis strategy: unknown strategy {v!r}")
            axes[name] = values
        else:
            axes[name] = values
    return axes


def cmd_run(args) -> int:
    cfg = _load_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials = engine.run_campaign(cfg, jobs=args.jobs)
    stats = engine.aggregate_stats(trials)
    written = [
        write_trials_csv(out_dir / "trials.csv", trials),
        write_summary_json(out_dir / "summary.json", cfg, stats),
    ]
    for path in written:
        print(path)
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    axes = _parse_axes(args.axis)
    if not axes:
        raise ConfigError("sweep requires at least one --axis")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    trials, stats = engine.sweep(cfg, axes, jobs=args.jobs)
    written = [
        write_trials_csv(out_dir / "trials.csv", trials),
        write_sweep_csv(out_dir / "sweep.csv", stats),
        write_summary_json(out_dir / "summary.json", cfg, stats),
    ]
    for path in written:
        print(path)
    return 0


def cmd_plot(args) -> int:
    for path in plots.render(args.kind, args.input, args.out):
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Monte Carlo simulator of UAV handover strategies on urban corridors",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run the configured campaign")
    run_p.add_argument("--config", required=True, help="JSON config file")
    run_p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    run_p.add_argument("--out", default="results", help="output directory")
    run_p.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a config field (repeatable)",
    )
    run_p.set_defaults(handler=cmd_run)

    sweep_p = sub.add_parser("sweep", help="cross parameter axes against the config")
    sweep_p.add_argument("--config", required=True, help="JSON config file")
    sweep_p.add_argument(
        "--axis", action="append", default=[], metavar="NAME=V1,V2,...",
        help=f"sweep axis, one of: {', '.join(SWEEP_AXES)} (repeatable)",
    )
    sweep_p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    sweep_p.add_argument("--out", default="results", help="output directory")
    sweep_p.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="override a config field (repeatable)",
    )
    sweep_p.set_defaults(handler=cmd_sweep)

    plot_p = sub.add_parser("plot", help="render figures from a trials or sweep CSV")
    plot_p.add_argument("--input", required=True, help="trials.csv or sweep.csv")
    plot_p.add_argument("--kind", required=True, choices=sorted(plots.PLOTTERS))
    plot_p.add_argument(
        "--out", default=None, help="output directory (default: next to the input file)"
    )
    plot_p.set_defaults(handler=cmd_plot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001  (CLI boundary)
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
