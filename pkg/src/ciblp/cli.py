"""Command-line entry point for batch experiments.

Subcommands: ``ser`` (SER vs SNR sweep), ``blocklen`` (SER vs block length
at fixed SNR), ``timing`` (QP execution time vs block length), ``validate``
(the built-in verification battery).  Each run writes a CSV, a gnuplot
script referencing it, and a YAML manifest; CSV bodies are byte-identical
across reruns with the same config and seed.

Exit codes: 0 success, 2 config error, 3 solver failure, 4 validation
failure.
"""

import sys
from dataclasses import replace
from pathlib import Path

import click

from . import reporting
from .checks import run_validation_suite
from .config import parse_config
from .exceptions import CiblpError, ConfigError
from .simulate import run_blocklen, run_ser, run_timing

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VALIDATION = 4


def _load_config(config_path, seed):
    config = parse_config(config_path)
    if seed is not None:
        config = replace(config, seed=seed)
    return config


def _run_command(command, config_path, out_dir, seed, threads, runner):
    """Shared run/report/manifest skeleton of the experiment subcommands."""
    started = reporting.utc_now()
    try:
        config = _load_config(config_path, seed)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest_path = out / f"{command}_manifest.yaml"
    try:
        csv_body, plot_body, failures = runner(config, threads)
    except CiblpError as exc:
        reporting.write_manifest(
            manifest_path, command=command, config=config,
            config_path=config_path, seed=config.seed, threads=threads,
            started=started, finished=reporting.utc_now(), outputs=[],
            status="error", error=exc,
        )
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_SOLVER)

    csv_path = out / f"{command}.csv"
    plot_path = out / f"{command}_plot.gp"
    csv_path.write_text(csv_body, encoding="utf-8", newline="\n")
    plot_path.write_text(plot_body, encoding="utf-8", newline="\n")
    reporting.write_manifest(
        manifest_path, command=command, config=config, config_path=config_path,
        seed=config.seed, threads=threads, started=started,
        finished=reporting.utc_now(), outputs=[csv_path, plot_path],
        solver_failures=failures,
    )
    click.echo(f"wrote {csv_path}, {plot_path}, {manifest_path}")
    sys.exit(EXIT_OK)


@click.group()
def main():
    """Constructive-interference block-level precoding experiments."""


_config_opt = click.option(
    "--config", "config_path", required=True,
    type=click.Path(dir_okay=False), help="Experiment config file (YAML)."
)
_out_opt = click.option(
    "--out-dir", default="results", show_default=True,
    type=click.Path(file_okay=False), help="Output directory."
)
_seed_opt = click.option(
    "--seed", type=int, default=None, help="Override the config seed."
)
_threads_opt = click.option(
    "--threads", type=int, default=1, show_default=True,
    help="Monte Carlo worker processes."
)


@main.command()
@_config_opt
@_out_opt
@_seed_opt
@_threads_opt
def ser(config_path, out_dir, seed, threads):
    """SER versus SNR for every configured scheme."""

    def runner(config, n_threads):
        result = run_ser(config, threads=n_threads)
        csv_body = reporting.ser_csv_body([result])
        plot = reporting.ser_plot_script("ser.csv", config.schemes,
                                         x_column=7, x_label="SNR [dB]")
        return csv_body, plot, result.solver_failures

    _run_command("ser", config_path, out_dir, seed, threads, runner)


@main.command()
@_config_opt
@_out_opt
@_seed_opt
@_threads_opt
def blocklen(config_path, out_dir, seed, threads):
    """SER versus block length at the first configured SNR."""

    def runner(config, n_threads):
        results = run_blocklen(config, threads=n_threads)
        csv_body = reporting.ser_csv_body(results)
        plot = reporting.ser_plot_script("blocklen.csv", config.schemes,
                                         x_column=5, x_label="block length N")
        failures = {
            f"N={res.config.N}": res.solver_failures for res in results
        }
        return csv_body, plot, failures

    _run_command("blocklen", config_path, out_dir, seed, threads, runner)


@main.command()
@_config_opt
@_out_opt
@_seed_opt
@_threads_opt
def timing(config_path, out_dir, seed, threads):
    """QP solve time versus block length for the CI schemes."""

    def runner(config, n_threads):
        results = [
            run_timing(replace(config, N=int(n))) for n in config.n_sweep
        ]
        csv_body = reporting.timing_csv_body(results)
        timed = [s for s in config.schemes if s in ("CI_BLP", "CI_SLP")]
        plot = reporting.timing_plot_script("timing.csv", timed)
        return csv_body, plot, None

    _run_command("timing", config_path, out_dir, seed, threads, runner)


@main.command()
@click.option("--seed", type=int, default=None,
              help="Seed of the randomized checks.")
@click.option("--out-dir", default=None, type=click.Path(file_okay=False),
              help="Optionally write the pass/fail table to a report file.")
def validate(seed, out_dir):
    """Run the verification battery and print one pass/fail line per check."""
    kwargs = {} if seed is None else {"seed": seed}
    results = run_validation_suite(**kwargs)
    lines = [
        f"{'PASS' if r.passed else 'FAIL'}  {r.name:<28s} "
        f"[{r.elapsed:7.2f}s]  {r.detail}"
        for r in results
    ]
    table = "\n".join(lines)
    click.echo(table)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "validate_report.txt").write_text(table + "\n", encoding="utf-8")
    if not all(r.passed for r in results):
        sys.exit(EXIT_VALIDATION)
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
