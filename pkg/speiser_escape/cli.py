"""
Command-Line Interface
======================
Subcommands counting, dim-bound, render and selftest.

Every command prints the effective configuration block followed by its report.
Exit codes: 0 on success, 1 when a computation or check fails, 2 for usage and
configuration errors. Logs go to stderr.
"""

import logging
import sys
from pathlib import Path
from typing import Callable, Optional

import typer
from pydantic import BaseModel, ValidationError

from speiser_escape.commands import run_counting, run_dim_bound, run_render, run_selftest
from speiser_escape.config import settings
from speiser_escape.covering import DEFAULT_C1
from speiser_escape.schemas import RunConfig

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="speiser-escape",
    help="Speiser-class model maps: Nevanlinna counting, dimension bounds and escape fields.",
    add_completion=False,
    no_args_is_help=True,
)

USAGE_ERROR = 2
FAILURE = 1

ConfigOption = typer.Option(..., "--config", "-c", help="Run configuration (key = value lines)")
OutOption = typer.Option(None, "--out", "-o", help="Output file")


@app.callback()
def main() -> None:
    """Configure logging before any subcommand runs."""
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _load(path: Path) -> RunConfig:
    try:
        return RunConfig.from_file(path)
    except ValidationError as e:
        typer.echo(f"Invalid configuration {path}:\n{e}", err=True)
        raise typer.Exit(USAGE_ERROR)
    except (FileNotFoundError, IsADirectoryError) as e:
        typer.echo(str(e), err=True)
        raise typer.Exit(USAGE_ERROR)


def _run(config: RunConfig, command: Callable[[], BaseModel]) -> None:
    """Print the effective config, run the command and print its report."""
    typer.echo("# effective config")
    typer.echo(config.to_config_text(), nl=False)
    try:
        report = command()
    except (ValueError, OSError) as e:
        logger.error(f"Command failed: {e}")
        typer.echo(f"error: {e}", err=True)
        raise typer.Exit(FAILURE)
    typer.echo("# report")
    typer.echo(report.model_dump_json(indent=2))


@app.command()
def counting(config: Path = ConfigOption, out: Optional[Path] = OutOption) -> None:
    """Sample n, N, m, T and estimate the order of growth."""
    run_config = _load(config)
    _run(run_config, lambda: run_counting(run_config, out))


@app.command("dim-bound")
def dim_bound(config: Path = ConfigOption, out: Optional[Path] = OutOption) -> None:
    """Evaluate the nested-cover dimension lower bound."""
    run_config = _load(config)
    _run(run_config, lambda: run_dim_bound(run_config, out))


@app.command()
def render(config: Path = ConfigOption, out: Optional[Path] = OutOption) -> None:
    """Render an escape field as a pixmap plus a CSV of escaping points."""
    run_config = _load(config)
    _run(run_config, lambda: run_render(run_config, out))


@app.command()
def selftest(
    suite: Optional[str] = typer.Option(None, "--suite", "-s", help="Run a single suite"),
    c1: float = typer.Option(DEFAULT_C1, "--c1", help="Inverse-branch constant C1"),
) -> None:
    """Run the property and oracle battery."""
    try:
        results = run_selftest(suite, c1)
    except ValueError as e:
        typer.echo(str(e), err=True)
        raise typer.Exit(USAGE_ERROR)

    for result in results:
        status = "PASS" if result.passed else "FAIL"
        typer.echo(f"{result.name:<16} {status}  {result.seconds:8.2f}s")
        for failure in result.failures:
            typer.echo(f"    {failure}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        typer.echo(f"{len(failed)} of {len(results)} suites failed: {', '.join(failed)}")
        raise typer.Exit(FAILURE)
    typer.echo(f"All {len(results)} suites passed")
