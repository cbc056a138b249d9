"""Command-line sweep tool.

Settings are layered: a ``--figure`` preset, then a ``--config`` file, then
individual flags, each overriding the previous. Example::

    lora-ser --figure fig1 --trials 1000000 --out fig1.csv --plot fig1.svg
    lora-ser --sf 7 --k-factor 0.1,1,10 --ebn0 0:40:1 --methods integral,upper,lower
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .sweep import (
    FIGURES,
    METHODS,
    ChannelPreset,
    ConfigError,
    GridSpec,
    SweepConfig,
    emit_plot,
    load_config,
    parse_float_list,
    parse_int_list,
    run_sweep,
    write_csv,
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lora-ser",
        description="LoRa symbol/bit error probability sweeps on Rician/Rayleigh block fading.",
    )
    p.add_argument("--config", help="INI sweep file ([sweep], [mc], [preset NAME] sections)")
    p.add_argument("--figure", choices=sorted(FIGURES), help="start from a named sweep preset")
    p.add_argument("--sf", help="spreading factors, e.g. 5,7,12")
    p.add_argument("--k-factor", help="Rician K-factors, e.g. 0.1,1,10 (one preset each)")
    p.add_argument("--mu-re", type=float, help="real part of the channel mean")
    p.add_argument("--mu-im", type=float, help="imaginary part of the channel mean")
    p.add_argument("--sigma2", type=float, help="scatter variance of the channel tap")
    p.add_argument("--ebn0", help="Eb/N0 grid in dB as start:stop:step")
    p.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--trials", type=int, help="Monte Carlo symbols per grid point")
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--batch-size", type=int, help="Monte Carlo batch size")
    p.add_argument("--target-errors", type=int, help="stop a Monte Carlo point after this many errors")
    p.add_argument("--workers", type=int, help="Monte Carlo worker processes")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--plot", help="SVG plot output path")
    return p


def config_from_args(args: argparse.Namespace) -> SweepConfig:
    cfg = FIGURES[args.figure]() if args.figure else SweepConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)
    if args.sf is not None:
        cfg.sf_list = parse_int_list(args.sf, "sf_list")

    presets = []
    if args.k_factor is not None:
        presets += [ChannelPreset(f"k{k:g}", k_factor=k) for k in parse_float_list(args.k_factor, "k_factor")]
    if args.mu_re is not None or args.mu_im is not None or args.sigma2 is not None:
        if args.sigma2 is None:
            raise ConfigError("sigma_h2", "--sigma2 is required with --mu-re/--mu-im")
        mu = complex(args.mu_re or 0.0, args.mu_im or 0.0)
        presets.append(ChannelPreset("custom", mu_h=mu, sigma_h2=args.sigma2))
    if presets:
        cfg.presets = presets

    if args.ebn0 is not None:
        cfg.ebn0_db = GridSpec.parse(args.ebn0)
    if args.methods is not None:
        cfg.methods = [m.strip() for m in args.methods.split(",") if m.strip()]

    mc_updates = {
        "trials": args.trials,
        "seed": args.seed,
        "batch_size": args.batch_size,
        "target_errors": args.target_errors,
        "parallel_workers": args.workers,
    }
    mc_updates = {k: v for k, v in mc_updates.items() if v is not None}
    if mc_updates:
        try:
            cfg.mc = replace(cfg.mc, **mc_updates)
        except ValueError as exc:
            raise ConfigError("mc", str(exc)) from None

    if args.out is not None:
        cfg.output_path = args.out
    if args.plot is not None:
        cfg.plot_path = args.plot
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"lora-ser: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"lora-ser: cannot read config: {exc}", file=sys.stderr)
        return 1

    curve = run_sweep(cfg)
    try:
        write_csv(curve, cfg.output_path)
        if cfg.plot_path:
            emit_plot(curve, cfg.plot_path, title=args.figure)
    except OSError as exc:
        print(f"lora-ser: cannot write output: {exc}", file=sys.stderr)
        return 1

    skipped = sum(1 for r in curve.rows if r.status != "ok")
    print(f"wrote {len(curve)} rows to {cfg.output_path}" + (f" ({skipped} skipped)" if skipped else ""))
    return 0


if __name__ == "__main__":
    sys.exit(main())
