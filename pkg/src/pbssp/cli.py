"""Command line entry point: ``pbssp run``, ``pbssp list-presets``, ``pbssp validate-config``."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .bench import emit_results, list_presets, load_config, load_preset, run_experiment
from .errors import PbsspError


def _resolve(config: str):
    """A path to a config file, or the name of a shipped preset."""
    path = Path(config)
    if path.is_file():
        return load_config(path)
    if config in list_presets():
        return load_preset(config)
    raise click.BadParameter(f"{config!r} is neither a file nor a preset", param_hint="--config")


@click.group()
def main():
    """High-probability stochastic saddle-point experiments."""


@main.command()
@click.option("--config", "config", required=True, help="Config file path or preset name.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None, help="Master seed.")
@click.option("--reps", type=click.IntRange(min=1), default=None, help="Replications.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file.")
@click.option("--format", "fmt", type=click.Choice(["csv", "table"]), default="csv")
@click.option("--parallel", type=click.IntRange(min=1), default=None, help="Worker processes.")
@click.option("--procedure", type=click.Choice(["plain", "rde", "pbssp"]), default=None)
@click.option("--epsilon", type=float, default=None)
@click.option("--p", "p", type=float, default=None)
@click.option("--nu", type=float, default=None)
@click.option("--T", "T", type=click.IntRange(min=0), default=None)
@click.option("--m", "m", type=click.IntRange(min=1), default=None)
def run(config, seed, reps, out, fmt, parallel, procedure, epsilon, p, nu, T, m):
    """Run a replicated experiment and print one summary row."""
    try:
        cfg = _resolve(config).replace(master_seed=seed, reps=reps, parallel=parallel,
                                       procedure=procedure, epsilon=epsilon, p=p, nu=nu,
                                       T=T, m=m)
        _, summary = run_experiment(cfg)
        text = emit_results([summary], fmt, out or cfg.out)
    except PbsspError as exc:
        raise click.ClickException(str(exc)) from exc
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    if out is None and cfg.out is None:
        click.echo(text, nl=False)


@main.command("list-presets")
def list_presets_cmd():
    """Print the names of the shipped presets."""
    for name in list_presets():
        cfg = load_preset(name)
        click.echo(f"{name}\t{cfg.description}")


@main.command("validate-config")
@click.argument("config")
def validate_config(config):
    """Check a config file (or preset) and report problems."""
    try:
        cfg = _resolve(config)
    except (PbsspError, ValueError) as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    click.echo(f"ok: {cfg.name} ({cfg.procedure}, {cfg.problem.get('kind')}, reps={cfg.reps})")


if __name__ == "__main__":
    main()
