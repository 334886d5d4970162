"""Command-line interface.

Subcommands::

    airvote run          --config cfg.json [--seed S] [--out DIR] [--threads T]
    airvote verify-perr  --config cfg.json [--seed S] [--out DIR] [--threads T]
    airvote sweep-bounds --config cfg.json [--seed S] [--out DIR]
    airvote emit-plots   [--config cfg.json] [--out DIR]

Exit codes: 0 success, 2 configuration error, 3 vacuous bound,
4 verification failure.
"""

from __future__ import annotations

import dataclasses
import logging
import os
import sys

import click

from .errors import ConfigError, VacuousBoundError
from .harness import (
    RunConfig,
    emit_plots,
    load_config,
    run_feel,
    sweep_bounds,
    verify_perr,
    write_run_info,
    write_rounds_csv,
    write_sweep_csv,
    write_verify_csv,
)

EXIT_CONFIG = 2
EXIT_VACUOUS = 3
EXIT_VERIFY = 4


def _load(config_path, seed, out) -> RunConfig:
    cfg = load_config(config_path)
    updates = {}
    if seed is not None:
        updates["seed"] = seed
    if out is not None:
        updates["output_dir"] = out
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _prepare_out(cfg: RunConfig) -> str:
    os.makedirs(cfg.output_dir, exist_ok=True)
    return cfg.output_dir


_common = [
    click.option("--config", "config_path", required=True, help="JSON run config"),
    click.option("--seed", type=int, default=None, help="override the config seed"),
    click.option("--out", default=None, help="override the config output directory"),
]


def _with_common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Simulate one-bit over-the-air gradient aggregation and verify its bounds."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command("run")
@_with_common
@click.option("--threads", type=int, default=1, show_default=True)
def run_cmd(config_path, seed, out, threads):
    """Run the federated training loop and record per-round metrics."""
    try:
        cfg = _load(config_path, seed, out)
        records, report, info = run_feel(cfg, threads=threads)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except VacuousBoundError as exc:
        click.echo(f"vacuous bound: {exc}", err=True)
        sys.exit(EXIT_VACUOUS)
    out_dir = _prepare_out(cfg)
    csv_path = os.path.join(out_dir, f"rounds_{cfg.mode}.csv")
    write_rounds_csv(csv_path, records)
    write_run_info(os.path.join(out_dir, f"run_info_{cfg.mode}.json"), info)
    final = records[-1]
    click.echo(
        f"{cfg.mode}: {cfg.n} rounds, time-avg |g|_1 = {final.g_l1_timeavg:.6g}, "
        f"bound rhs = {report.rhs:.6g} -> {csv_path}"
    )


@main.command("verify-perr")
@_with_common
@click.option("--threads", type=int, default=1, show_default=True)
def verify_cmd(config_path, seed, out, threads):
    """Monte Carlo check of the bit-error bounds over the configured grid."""
    try:
        cfg = _load(config_path, seed, out)
        points = verify_perr(cfg, threads=threads)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    out_dir = _prepare_out(cfg)
    csv_path = os.path.join(out_dir, "verify_perr.csv")
    write_verify_csv(csv_path, points)
    failed = [p for p in points if not p.passed]
    click.echo(f"{len(points)} grid points -> {csv_path}; {len(failed)} failed")
    if failed:
        worst = min(failed, key=lambda p: p.margin)
        click.echo(
            f"worst violation: {worst.scenario} K={worst.k} S={worst.s} "
            f"rho_db={worst.rho_db} alpha={worst.alpha} "
            f"sigma_delta={worst.sigma_delta}: "
            f"p_emp={worst.p_emp:.5f} > bound={worst.p_bound:.5f}",
            err=True,
        )
        sys.exit(EXIT_VERIFY)


@main.command("sweep-bounds")
@_with_common
def sweep_cmd(config_path, seed, out):
    """Tabulate the convergence bounds over the configured parameter grid."""
    try:
        cfg = _load(config_path, seed, out)
        rows = sweep_bounds(cfg)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    out_dir = _prepare_out(cfg)
    csv_path = os.path.join(out_dir, "sweep_bounds.csv")
    write_sweep_csv(csv_path, rows)
    vacuous = sum(1 for r in rows if r.a != r.a)  # NaN check
    click.echo(f"{len(rows)} rows -> {csv_path} ({vacuous} vacuous, flagged as nan)")


@main.command("emit-plots")
@click.option("--config", "config_path", default=None, help="optional; sets --out")
@click.option("--seed", type=int, default=None, help="unused; accepted for symmetry")
@click.option("--out", default=None, help="results directory holding the CSVs")
def plots_cmd(config_path, seed, out):
    """Write gnuplot scripts that render the recorded CSVs."""
    try:
        if out is None:
            if config_path is None:
                raise ConfigError("emit-plots needs --out or a --config with output_dir")
            out = load_config(config_path).output_dir
        written, missing = emit_plots(out)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    for path in written:
        click.echo(f"wrote {path}")
    for name in missing:
        click.echo(f"skipped plots needing missing input: {name}", err=True)


if __name__ == "__main__":
    main()
