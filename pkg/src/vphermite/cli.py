"""Command-line interface for vphermite."""

from __future__ import annotations

import logging
import math
import sys
from collections.abc import Callable
from typing import Any, NoReturn

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.table import Table

from . import __version__
from .core import (
    ConfigurationError,
    DivergenceError,
    OutputError,
    RunOutcome,
    SolvabilityError,
    SolverError,
    list_presets,
    load_config,
)
from .core.config import preset_description
from .core.experiment import ConvergenceResult, Experiment

# Setup rich console
console = Console()

EXIT_FAILURE = 1
EXIT_CONFIGURATION = 2
EXIT_SOLVER = 3
EXIT_OUTPUT = 4


def setup_logging(verbose: bool = False) -> None:
    """Setup logging with rich handler."""
    level = logging.INFO if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True)],
    )


def exit_code_for(error: Exception) -> int:
    if isinstance(error, ConfigurationError | SolvabilityError):
        return EXIT_CONFIGURATION
    if isinstance(error, SolverError | DivergenceError):
        return EXIT_SOLVER
    if isinstance(error, OutputError):
        return EXIT_OUTPUT
    return EXIT_FAILURE


def fail(error: Exception) -> NoReturn:
    console.print(f"❌ Error: {escape(str(error))}", style="red")
    if logging.getLogger().isEnabledFor(logging.DEBUG):
        console.print_exception()
    sys.exit(exit_code_for(error))


def config_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by every command that runs simulations."""
    func = click.option(
        "--override",
        "overrides",
        multiple=True,
        metavar="KEY=VALUE",
        help="Override a configuration value, e.g. scheme.dt=0.01. Can be specified multiple times.",
    )(func)
    func = click.option(
        "--out",
        "out",
        type=click.Path(file_okay=False),
        help="Output directory (default: output.directory from the configuration)",
    )(func)
    func = click.option("--preset", "-p", help="Name of a shipped preset (see list-presets)")(func)
    func = click.option(
        "--config",
        "-c",
        "config_path",
        type=click.Path(exists=True, dir_okay=False),
        help="Path to a TOML experiment configuration",
    )(func)
    return func


def _fmt(value: float | None) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "-"
    return f"{value:.4e}"


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.version_option(version=__version__, prog_name="vphermite")
@click.pass_context
def cli(ctx: click.Context, verbose: bool) -> None:
    """vphermite - Hermite-moment Vlasov-Poisson simulator.

    Runs asymptotic-preserving implicit splitting schemes near the
    quasineutral limit and writes plot-ready diagnostics.

    \b
    Examples:
      vphermite list-presets
      vphermite run --preset fig10 --out runs/demo
      vphermite run -c my_case.toml --override scheme.lambda=0.05
      vphermite convergence --preset fig10
      vphermite ap-sweep --preset ap_sweep --override scheme.order=2
    """
    setup_logging(verbose)

    # Store global options in context for commands to use
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose


@cli.command()
@config_options
def run(config_path: str | None, preset: str | None, out: str | None, overrides: tuple[str, ...]) -> None:
    """Run a single simulation and write diagnostics, snapshots and metadata."""
    try:
        config = load_config(config_path, preset, overrides)
        experiment = Experiment(config)
        console.print(f"🚀 Running [bold]{config.name}[/bold] ({config.case.id.value})")
        summary = experiment.run_single(out)

        table = Table(title="Run summary")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("Outcome", summary.outcome.value)
        table.add_row("Steps", str(summary.steps))
        table.add_row("Final time", f"{summary.t_end:.6g}")
        table.add_row("lambda / dt", f"{summary.lam:g} / {summary.dt:g}")
        table.add_row("max E0 (continuous)", _fmt(summary.max_err0_cont))
        table.add_row("max E1 (continuous)", _fmt(summary.max_err1_cont))
        table.add_row("sup E0 (discrete, n>=1)", _fmt(summary.sup_err0_disc))
        table.add_row("sup E1 (discrete, n>=2)", _fmt(summary.sup_err1_disc))
        table.add_row("max reformulated residual", _fmt(summary.max_reformulated_residual))
        table.add_row("mass drift", _fmt(summary.mass_drift))
        table.add_row("max |flux|", _fmt(summary.max_abs_flux))
        table.add_row("oscillation period", _fmt(summary.oscillation_period))
        if summary.growth_rate is not None:
            table.add_row("growth rate of ||E||", _fmt(summary.growth_rate))
        if summary.energy_anomaly:
            table.add_row("energy", "[yellow]anomalous growth[/yellow]")
        console.print(table)

        if summary.outcome is RunOutcome.DIVERGED:
            console.print(f"⚠️  {escape(summary.failure or '')}", style="yellow")
        console.print(f"✅ Output written to: {summary.output_dir}", style="green")
    except Exception as e:
        fail(e)


@cli.command()
@config_options
@click.option("--alpha", type=click.FloatRange(0, 1), help="Override the case alpha for this sweep")
def convergence(
    config_path: str | None,
    preset: str | None,
    out: str | None,
    overrides: tuple[str, ...],
    alpha: float | None,
) -> None:
    """Lambda sweep of the continuous error functionals, or a dt study when output.reference is set."""
    try:
        config = load_config(config_path, preset, overrides)
        experiment = Experiment(config)
        target = out or config.output.directory

        if config.output.reference:
            console.print(f"⏱️  Temporal convergence study for [bold]{config.name}[/bold]")
            study = experiment.run_temporal_study(target)
            table = Table(title=f"Self-convergence against dt = {study.reference_dt:g}")
            table.add_column("dt", style="cyan")
            table.add_column("error", style="green")
            table.add_column("observed order", style="magenta")
            for i, (dt, err) in enumerate(zip(study.dts, study.errors, strict=True)):
                order = study.orders[i - 1] if i > 0 else math.nan
                table.add_row(f"{dt:g}", _fmt(err), "-" if math.isnan(order) else f"{order:.3f}")
            console.print(table)
            console.print(f"✅ Output written to: {target}", style="green")
            return

        console.print(f"📉 Convergence sweep for [bold]{config.name}[/bold]")
        if alpha is not None:
            results = [experiment.run_convergence_sweep(target, alpha)]
        else:
            results = experiment.run_convergence_sweeps(target)
        for result in results:
            _print_convergence(result)
        console.print(f"✅ Output written to: {target}", style="green")
    except Exception as e:
        fail(e)


def _print_convergence(result: ConvergenceResult) -> None:
    table = Table(title=f"Quasineutral convergence (alpha = {result.alpha:g})")
    table.add_column("lambda", style="cyan")
    table.add_column("dt", style="white")
    table.add_column("max E0", style="green")
    table.add_column("max E1", style="green")
    table.add_column("outcome", style="magenta")
    for row in result.rows:
        table.add_row(f"{row.lam:g}", f"{row.dt:g}", _fmt(row.max_err0), _fmt(row.max_err1), row.outcome.value)
    console.print(table)
    for label, fit in (("E0", result.slope_err0), ("E1", result.slope_err1)):
        if fit is not None:
            console.print(f"   {label} ~ lambda^{fit.slope:.3f} (R² = {fit.r_squared:.4f})")


@cli.command("ap-sweep")
@config_options
@click.option("--alpha", type=click.FloatRange(0, 1), help="Override the case alpha for this sweep")
def ap_sweep(
    config_path: str | None,
    preset: str | None,
    out: str | None,
    overrides: tuple[str, ...],
    alpha: float | None,
) -> None:
    """Fixed-dt lambda sweep of the discrete error functionals."""
    try:
        config = load_config(config_path, preset, overrides)
        experiment = Experiment(config)
        target = out or config.output.directory
        console.print(f"🧪 Asymptotic-preserving sweep for [bold]{config.name}[/bold] (dt = {config.scheme.dt:g})")
        result = experiment.run_ap_sweep(target, alpha)

        table = Table(title=f"Discrete error functionals (alpha = {result.alpha:g})")
        table.add_column("lambda", style="cyan")
        table.add_column("sup E0", style="green")
        table.add_column("sup E1", style="green")
        table.add_column("E0 / lambda", style="yellow")
        table.add_column("E1 / lambda", style="yellow")
        table.add_column("outcome", style="magenta")
        for row in result.rows:
            completed = row.outcome is RunOutcome.COMPLETED
            table.add_row(
                f"{row.lam:g}",
                _fmt(row.sup_err0),
                _fmt(row.sup_err1),
                _fmt(row.ratio0) if completed else "-",
                _fmt(row.ratio1) if completed else "-",
                row.outcome.value if completed else f"[red]{row.outcome.value}[/red]",
            )
        console.print(table)
        console.print(f"✅ Output written to: {target}", style="green")
    except Exception as e:
        fail(e)


@cli.command("list-presets")
def list_presets_command() -> None:
    """List the experiment presets shipped with the package."""
    try:
        table = Table(title="Available presets")
        table.add_column("Name", style="cyan")
        table.add_column("Description", style="white")
        for name in list_presets():
            table.add_row(name, preset_description(name))
        console.print(table)
    except Exception as e:
        fail(e)


def main() -> None:
    """Main entry point for CLI."""
    cli()


if __name__ == "__main__":
    main()
