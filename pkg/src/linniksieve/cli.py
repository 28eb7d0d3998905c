from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import typer
from rich.console import Console

from .cli_utils import (
    CommandTimer,
    ErrorHandler,
    validate_config_exists,
    validate_output_path,
)
from .config import RunConfig
from .core import PLOT_KINDS, PSI_METHODS, CommandResult, Workbench
from .exceptions import ConfigError, VerificationFailure
from .reporting import ReportWriter

EXIT_PASSED = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2

app = typer.Typer(
    help="""
    linniksieve - exact finite checks of an elementary proof of Linnik's theorem

    Least quadratic non-residues, smooth-number counts, prime reciprocal sums
    and the combinatorial sieve inequality, each reported as exact inequalities.
    Exit status: 0 all checks passed, 1 an inequality was violated, 2 usage or
    budget error.
    """,
    context_settings={"help_option_names": ["-h", "--help"]},
    add_completion=False,
)

console = Console()
err_console = Console(stderr=True)


@dataclass
class GlobalOptions:
    output: Optional[str] = None
    threads: Optional[int] = None
    config: Optional[str] = None
    verbose: bool = False
    log_dir: Optional[str] = None

    def run_config(self) -> RunConfig:
        """Config file values first, then explicit flags, then LINNIK_SIEVE_BUDGET."""
        if self.config:
            config = RunConfig.from_yaml(str(validate_config_exists(self.config)))
        else:
            config = RunConfig.from_env()
        overrides = {
            "output_format": self.output,
            "thread_count": self.threads,
            "log_dir": self.log_dir,
            "verbose": self.verbose or None,
        }
        data = config.model_dump()
        data.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return RunConfig(**data)
        except ValueError as e:
            raise ConfigError(str(e)) from e


@app.callback()
def main_options(
    ctx: typer.Context,
    output: Optional[str] = typer.Option(
        None, "--output", help="Report format: csv, json or human (default human)"
    ),
    threads: Optional[int] = typer.Option(None, "--threads", help="Worker threads"),
    config: Optional[str] = typer.Option(None, "--config", help="YAML run configuration"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable verbose output"),
    log_dir: Optional[str] = typer.Option(None, "--log-dir", help="Directory for log files"),
):
    ctx.obj = GlobalOptions(output, threads, config, verbose, log_dir)


def _run(ctx: typer.Context, name: str, action: Callable[[Workbench], CommandResult], out: Optional[str]):
    options: GlobalOptions = ctx.obj or GlobalOptions()
    try:
        if out:
            validate_output_path(out)
        bench = Workbench(options.run_config())
        with CommandTimer(name, enabled=bench.config.verbose):
            result = action(bench)
        writer = ReportWriter(bench.config.output_format, console)
        writer.emit(result.command, result.rows, result.passed, out)
        if out:
            _report_written(out, result)
        if not result.passed:
            raise VerificationFailure(
                f"{result.command}: {max(result.failed, 1)} check(s) violated", result.failed
            )
    except VerificationFailure as e:
        err_console.print(ErrorHandler.format_error(e, options.verbose))
        raise typer.Exit(code=EXIT_VIOLATED)
    except Exception as e:
        err_console.print(ErrorHandler.format_error(e, options.verbose))
        raise typer.Exit(code=EXIT_USAGE)


def _report_written(out: str, result: CommandResult) -> None:
    details = f"{result.command}: {len(result.rows)} row(s)"
    if result.passed:
        console.print(ErrorHandler.show_success(f"Report written to: {out}", details))
    else:
        console.print(
            ErrorHandler.show_warning(
                f"Report written to: {out}", f"{details}, {max(result.failed, 1)} check(s) violated"
            )
        )


def _parse_grid(grid: Optional[str]) -> Optional[List[str]]:
    if not grid:
        return None
    values = [value.strip() for value in grid.split(",") if value.strip()]
    if not values:
        raise ConfigError("--grid needs at least one value")
    return values


@app.command(help="List the primes up to a limit.", short_help="List primes")
def primes(
    ctx: typer.Context,
    limit: int = typer.Option(..., "--limit", help="Largest number to sieve"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "primes", lambda bench: bench.primes(limit), out)


@app.command(help="Least quadratic non-residue of an odd prime.", short_help="Least non-residue")
def nqr(
    ctx: typer.Context,
    p: int = typer.Option(..., "--p", help="Odd prime modulus"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "nqr", lambda bench: bench.nqr(p), out)


@app.command(
    help="Primes p <= N whose least non-residue exceeds B, with each n_p.",
    short_help="Non-residue census",
)
def census(
    ctx: typer.Context,
    N: int = typer.Option(..., "--N", help="Upper bound on the primes"),
    B: int = typer.Option(..., "--B", help="Non-residue threshold, 2 <= B < N"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "census", lambda bench: bench.census(N, B), out)


@app.command(
    help="Sum of 1/p over primes in (n^(1-eps), n] and its defect against eps.",
    short_help="Prime reciprocal sums",
)
def mertens(
    ctx: typer.Context,
    n: str = typer.Option("100", "--n", help="Window top (integer or rational)"),
    eps: str = typer.Option(..., "--eps", help="Window exponent in (0, 1)"),
    grid: Optional[str] = typer.Option(
        None, "--grid", help="Comma-separated n values scanned instead of --n"
    ),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "mertens", lambda bench: bench.mertens(n, eps, _parse_grid(grid)), out)


@app.command(help="Count y-smooth integers up to n.", short_help="Smooth counts")
def psi(
    ctx: typer.Context,
    n: str = typer.Option(..., "--n", help="Upper end of the range"),
    y: str = typer.Option(..., "--y", help="Smoothness bound"),
    method: str = typer.Option(
        "recursive", "--method", help=f"One of {', '.join(PSI_METHODS)}"
    ),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "psi", lambda bench: bench.psi(n, y, method), out)


@app.command(
    "c-const",
    help="Empirical min of Psi(n, n^(1/u))/n over 1 <= n <= nmax.",
    short_help="Smooth-number constant",
)
def c_const(
    ctx: typer.Context,
    u: str = typer.Option(..., "--u", help="Exponent u > 0"),
    nmax: int = typer.Option(..., "--nmax", help="Largest n scanned"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "c-const", lambda bench: bench.c_const(u, nmax), out)


@app.command(
    "sieve-check",
    help="Verify the combinatorial sieve inequality exhaustively or on random families.",
    short_help="Sieve inequality checks",
)
def sieve_check(
    ctx: typer.Context,
    exhaustive: Optional[Tuple[int, int]] = typer.Option(
        None, "--exhaustive", help="Every family with n <= N_MAX, d <= D_MAX"
    ),
    random_trials: Optional[int] = typer.Option(None, "--random", help="Number of random families"),
    seed: int = typer.Option(0, "--seed", help="Seed for --random"),
    n_max: int = typer.Option(512, "--n-max", help="Largest ground set for --random"),
    d_max: int = typer.Option(32, "--d-max", help="Most sets per family for --random"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(
        ctx,
        "sieve-check",
        lambda bench: bench.sieve_check(exhaustive, random_trials, seed, n_max, d_max),
        out,
    )


@app.command(
    help="Check (d+1) Psi(N^3, B) <= (5 + d/B^2) N^3 and the steps of its proof.",
    short_help="Linnik theorem check",
)
def linnik(
    ctx: typer.Context,
    N: int = typer.Option(..., "--N", help="Upper bound on the primes"),
    B: Optional[int] = typer.Option(None, "--B", help="Non-residue threshold, 2 <= B < N"),
    sweep: bool = typer.Option(False, "--sweep", help="Every 2 <= B < N' for 3 <= N' <= N"),
    steps: bool = typer.Option(False, "--steps", help="One row per proof step"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "linnik", lambda bench: bench.linnik(N, B, sweep, steps), out)


@app.command(
    help="Certified and heuristic bounds on #{p <= N : n_p > N^eps}.",
    short_help="Corollary bounds",
)
def corollary(
    ctx: typer.Context,
    N: int = typer.Option(..., "--N", help="Upper bound on the primes"),
    eps: str = typer.Option(..., "--eps", help="Exponent in (0, 1)"),
    nmax_c: int = typer.Option(10_000, "--nmax-c", help="Range for the empirical constant"),
    out: Optional[str] = typer.Option(None, "--out", help="Write the report to a file"),
):
    _run(ctx, "corollary", lambda bench: bench.corollary(N, eps, nmax_c), out)


@app.command(
    "plot-data",
    help="Write a two-column x,y CSV series for plotting.",
    short_help="Plot series",
)
def plot_data(
    ctx: typer.Context,
    what: str = typer.Option(..., "--what", help=f"One of {', '.join(PLOT_KINDS)}"),
    out: str = typer.Option(..., "--out", help="CSV file to write"),
    eps: str = typer.Option("1/2", "--eps", help="Exponent for the defect series"),
    n_max: int = typer.Option(10**6, "--n-max", help="Range for defect and nqr-max"),
    points: int = typer.Option(50, "--points", help="Grid points"),
    u_max: str = typer.Option("6", "--u-max", help="Largest u for the c-const series"),
    nmax_c: int = typer.Option(10**5, "--nmax-c", help="Range for the c-const series"),
):
    def action(bench: Workbench) -> CommandResult:
        # plot files are always csv
        bench.config = bench.config.model_copy(update={"output_format": "csv"})
        return bench.plot_data(what, eps, n_max, points, u_max, nmax_c)

    _run(ctx, "plot-data", action, out)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point returning the exit code instead of exiting."""
    try:
        code = app(args=argv, prog_name="linniksieve", standalone_mode=False)
    except typer.Exit as e:
        return e.exit_code
    except Exception as e:
        # usage errors are raised rather than printed outside standalone mode
        err_console.print(ErrorHandler.format_error(e))
        return EXIT_USAGE
    return code if isinstance(code, int) else EXIT_PASSED


if __name__ == "__main__":
    app()
