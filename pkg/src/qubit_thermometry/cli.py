"""Command-line runner: ``qubit-thermometry run|list-presets``.

Exit codes: 0 success (NA cells allowed), 1 config error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .experiment import (
    PRESETS,
    ConfigError,
    OutputError,
    emit_csv,
    max_covariance_residual,
    parse_config,
    preset_config,
    preset_names,
    run_experiment,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubit-thermometry",
        description="Direct temperature readout for a dissipative qubit thermometer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a config file or a built-in preset")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--config", type=Path, help="path to a key=value config file")
    source.add_argument("--preset", help="name of a built-in figure preset")
    run.add_argument("--out", type=Path, required=True, help="CSV destination")
    run.add_argument("--quadrature-points", type=int, default=256,
                     help="Simpson points for the covariance-identity check (default 256)")
    run.add_argument("--interval", nargs=2, type=float, metavar=("T_MIN", "T_MAX"),
                     help="evaluate error functions as worst case over [T_MIN, T_MAX]")

    sub.add_parser("list-presets", help="list the built-in presets")
    return parser


def _variant_path(out: Path, label: str) -> Path:
    if not label:
        return out
    return out.with_name(f"{out.stem}_{label}{out.suffix or '.csv'}")


def _run(args) -> int:
    try:
        if args.config is not None:
            try:
                text = args.config.read_text(encoding="utf-8")
            except OSError as exc:
                print(f"error: cannot read {args.config}: {exc.strerror or exc}", file=sys.stderr)
                return 2
            config = parse_config(text, name=args.config.stem)
        else:
            config = preset_config(args.preset)
        if args.interval is not None:
            t_min, t_max = args.interval
            if not 0 < t_min <= t_max:
                raise ConfigError([(0, f"--interval needs 0 < T_MIN <= T_MAX, got {t_min} {t_max}")])
            config = dataclasses.replace(config, interval=(t_min, t_max))
        if args.quadrature_points < 16:
            raise ConfigError([(0, "--quadrature-points must be >= 16")])
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    for label, variant in config.variants():
        rows = run_experiment(variant)
        path = _variant_path(args.out, label)
        try:
            emit_csv(rows, path, variant.columns)
        except OutputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        residual = max_covariance_residual(variant, rows, args.quadrature_points)
        summary = "n/a" if residual is None else f"{residual:.3e}"
        print(f"{path}\t{len(rows)} rows\tmax covariance residual {summary}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "list-presets":
        for name in preset_names():
            print(f"{name}\t{PRESETS[name][1]}")
        return 0
    return _run(args)


if __name__ == "__main__":
    sys.exit(main())
