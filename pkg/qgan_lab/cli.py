"""qgan-lab command line interface."""

from __future__ import annotations

import logging
import sys
import typing as t
from dataclasses import replace
from pathlib import Path

import click

from qgan_lab.config import parse_config
from qgan_lab.exceptions import EXIT_NUMERIC, QganLabError
from qgan_lab.runner import EXIT_OK, ExperimentRunner, exit_code_for, run
from qgan_lab.validation import validate as run_validation

if t.TYPE_CHECKING:
    from qgan_lab.config import ExperimentConfig

logger = logging.getLogger("qgan_lab")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _load(config_path: Path, output_dir: Path | None) -> ExperimentConfig:
    config = parse_config(config_path)
    if output_dir is not None:
        config = replace(config, output_dir=output_dir)
    return config


def _fail(exc: QganLabError) -> t.NoReturn:
    logger.error("%s", exc)
    sys.exit(exc.exit_code)


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    show_default=True,
    help="Logging verbosity.",
)
@click.version_option(package_name="qgan-lab")
def cli(log_level: str) -> None:
    """Train quantum and classical GANs on small discrete distributions."""
    logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT, force=True)


config_argument = click.argument(
    "config_path",
    metavar="CONFIG",
    type=click.Path(dir_okay=False, path_type=Path),
)
output_dir_option = click.option(
    "--output-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    help="Override the config's output_dir.",
)


@cli.command()
@config_argument
@output_dir_option
@click.option(
    "--method",
    type=click.Choice(["classical", "qgan"]),
    default=None,
    help="Model family to train; defaults to the first configured method.",
)
def train(config_path: Path, output_dir: Path | None, method: str | None) -> None:
    """Train one model family on the first lambda and seed of CONFIG."""
    try:
        config = _load(config_path, output_dir)
        run_spec, result = ExperimentRunner(config).run_one(method or config.methods[0])
    except QganLabError as exc:
        _fail(exc)
    click.echo(
        f"{run_spec.history_filename}: converged={result.converged} "
        f"iterations={result.iterations_to_convergence} final_tv={result.final_tv:.6g}",
    )
    sys.exit(exit_code_for([result]))


@cli.command()
@config_argument
@output_dir_option
def compare(config_path: Path, output_dir: Path | None) -> None:
    """Run every method, lambda and seed of CONFIG and write report.json."""
    try:
        config = _load(config_path, output_dir)
    except QganLabError as exc:
        _fail(exc)
    try:
        code = run(config)
    except QganLabError as exc:
        _fail(exc)
    sys.exit(code)


@cli.command()
@click.option("--inject-non-hermitian", is_flag=True, hidden=True)
def validate(inject_non_hermitian: bool) -> None:  # noqa: FBT001
    """Run the invariant suite and the numerical oracles."""
    code = run_validation(click.echo, inject_non_hermitian=inject_non_hermitian)
    sys.exit(EXIT_OK if code == EXIT_OK else EXIT_NUMERIC)


if __name__ == "__main__":
    cli()
