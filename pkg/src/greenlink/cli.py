"""Command-line entry point: ``greenlink <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys

from greenlink import __version__
from greenlink.config import ConfigError, load_config, parse_targets
from greenlink.csvio import write_csv
from greenlink.experiments import (
    ENERGY_FIELDS,
    NONUNIFORM_FIELDS,
    SURFACE_FIELDS,
    SweepSpec,
    metadata,
    run_nonuniform_table,
    surface_exact_vs_approx,
    sweep_distance_to_bs,
    sweep_inter_user_distance,
    sweep_random_distance,
    validate,
)
from greenlink.scenario import ALL_SCHEMES, Scheme

# subcommand -> (shipped config, sweep variable, start, stop, steps)
_SWEEPS = {
    "sweep-bs-distance": ("default", "d_to_bs", 100.0, 5000.0, 50),
    "sweep-interuser": ("interuser", "d_inter_user", 1.0, 2000.0, 50),
    "sweep-random": ("random_distance", "D_random_bound", 10.0, 5000.0, 50),
}


def _schemes(text):
    if text in (None, "all"):
        return ALL_SCHEMES
    try:
        return tuple(Scheme(s.strip()) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown scheme in {text!r}; use no_coop, intra, inter or all") from None


def _common(p, default_config):
    p.add_argument("--config", default=default_config, help=f"config file or shipped name (default: {default_config})")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key (repeatable)")
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")
    p.add_argument("--n-ebits", type=int, help="effective bits per packet N")
    p.add_argument("--delta", type=float, help="high-SNR approximation accuracy")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenlink",
        description="Outage and battery-energy analysis of cooperative two-user cellular uplinks.",
    )
    parser.add_argument("--version", action="version", version=f"greenlink {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, (cfg, _, start, stop, steps) in _SWEEPS.items():
        p = sub.add_parser(name, help=f"energy per scheme over a distance sweep (config {cfg})")
        _common(p, cfg)
        p.add_argument("--start", type=float, default=start)
        p.add_argument("--stop", type=float, default=stop)
        p.add_argument("--steps", type=int, default=steps)
        p.add_argument("--linear", action="store_true", help="linear instead of log spacing")
        p.add_argument("--scheme", type=_schemes, default=ALL_SCHEMES, help="comma list or 'all'")

    p = sub.add_parser("approx-surface", help="exact vs high-SNR outage over cellular power pairs")
    _common(p, "approx_surface")
    p.add_argument("--start", type=float, help="lowest power (dBm)")
    p.add_argument("--stop", type=float, help="highest power (dBm)")
    p.add_argument("--steps", type=int, default=26)
    p.add_argument("--diagonal", action="store_true", help="only P1 = P2")

    p = sub.add_parser("nonuniform", help="non-uniform QoS optimisation table")
    _common(p, "nonuniform")
    p.add_argument("--targets", help="pout1:pout2 pairs, comma separated")
    p.add_argument("--grid-resolution", type=int, default=400)

    p = sub.add_parser("validate", help="closed form vs Monte Carlo and numerical self-checks")
    _common(p, "default")
    p.add_argument("--trials", type=int, default=1_000_000, help="Monte Carlo trials per grid point")
    return parser


def _load(args):
    overrides = list(args.set)
    if args.n_ebits is not None:
        overrides.append(f"n_ebits={args.n_ebits}")
    if args.delta is not None:
        overrides.append(f"delta={args.delta}")
    return load_config(args.config, overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load(args)
    except ConfigError as exc:
        print(f"greenlink: {exc}", file=sys.stderr)
        return 2
    print(f"battery profile: {config.battery.describe()}", file=sys.stderr)

    try:
        if args.command in _SWEEPS:
            variable = _SWEEPS[args.command][1]
            spec = SweepSpec(variable, args.start, args.stop, args.steps, args.scheme, log=not args.linear)
            run = {
                "sweep-bs-distance": sweep_distance_to_bs,
                "sweep-interuser": sweep_inter_user_distance,
                "sweep-random": sweep_random_distance,
            }[args.command]
            rows = run(config, spec, workers=args.workers)
            write_csv(args.out, ENERGY_FIELDS, rows, metadata(config, sweep=variable))
        elif args.command == "approx-surface":
            rows = surface_exact_vs_approx(config, args.start, args.stop, args.steps, args.diagonal)
            write_csv(args.out, SURFACE_FIELDS, rows, metadata(config))
        elif args.command == "nonuniform":
            targets = parse_targets(args.targets) if args.targets else None
            rows = run_nonuniform_table(config, targets, args.grid_resolution)
            write_csv(args.out, NONUNIFORM_FIELDS, rows, metadata(config, delta=config.delta))
        elif args.command == "validate":
            ok, report = validate(config, seed=args.seed, trials=args.trials, workers=args.workers)
            if args.out in (None, "-"):
                sys.stdout.write(report)
            else:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(report)
            return 0 if ok else 1
    except ConfigError as exc:
        print(f"greenlink: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"greenlink: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
