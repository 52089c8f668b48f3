"""Command-line interface for tensor-ustat."""

import json
import logging
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .engine.analyzer import chain_signature, create_analyzer
from .engine.applications import builtin_kernels, dcov_squared, motif_counts
from .engine.ustat_engine import create_engine
from .errors import DataParseError, UStatError
from .models import DcovReport, EngineConfig, MotifReport, OrderStrategy, StatisticReport
from .utils.brute_force import dcov_oracle
from .utils.data_io import (
    adjacency_matrix,
    parse_kernel_spec,
    parse_signature,
    read_edge_list,
    read_sample_csv,
)

app = typer.Typer(
    name="ustat",
    help="Exact U- and V-statistics through Einstein summation",
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)

ORACLE_MAX_N = 60


@app.callback()
def configure(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log debug details to stderr"),
) -> None:
    """Exact U- and V-statistics through Einstein summation."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_path=False)],
        force=True,
    )


@contextmanager
def handled() -> Iterator[None]:
    """Turn library errors into a one-line message and the error's exit code."""
    try:
        yield
    except UStatError as exc:
        err_console.print(f"[red]error:[/red] {exc}", highlight=False)
        raise typer.Exit(code=exc.exit_code) from exc


def build_config(
    order_strategy: OrderStrategy, threads: Optional[int], mem_cap: Optional[int]
) -> EngineConfig:
    """Map CLI flags onto an engine configuration."""
    settings: dict = {"order_strategy": order_strategy, "threads": threads}
    if mem_cap is not None:
        settings["memory_cap"] = mem_cap
    return EngineConfig(**settings)


def display_statistic(report: StatisticReport) -> None:
    """Print the value line followed by the timing breakdown."""
    typer.echo(f"{report.value:.15g}")
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Label", style="cyan")
    table.add_column("Value")
    table.add_row("statistic", f"{report.kind.upper()} ({report.kernel})")
    table.add_row("n / order", f"{report.n} / {report.order}")
    table.add_row("einsum terms", str(report.terms))
    table.add_row("tensorization", f"{report.tensorization_seconds:.4f}s")
    table.add_row("contraction", f"{report.contraction_seconds:.4f}s")
    table.add_row("executed flops", report.executed_flops)
    console.print(table)


def run_statistic(
    kind: str,
    kernel: str,
    data: Path,
    order_strategy: OrderStrategy,
    threads: Optional[int],
    mem_cap: Optional[int],
    output_json: bool,
) -> None:
    with handled():
        spec = parse_kernel_spec(kernel)
        if spec.family == "motif":
            matrix = adjacency_matrix(read_edge_list(data))
        else:
            matrix = read_sample_csv(data)
        engine = create_engine(build_config(order_strategy, threads, mem_cap))
        kernels, sample = builtin_kernels(spec, matrix)
        parts = [(engine.evaluate(k, sample, kind), sign) for k, sign in kernels]
        first = parts[0][0]
        report = StatisticReport(
            kind=kind,
            kernel=str(spec),
            value=sum(sign * r.value for r, sign in parts),
            n=first.n,
            order=first.order,
            terms=sum(r.terms for r, _ in parts),
            tensorization_seconds=sum(r.tensorization_seconds for r, _ in parts),
            contraction_seconds=sum(r.contraction_seconds for r, _ in parts),
            executed_flops=str(sum(int(r.executed_flops) for r, _ in parts)),
        )
    if output_json:
        typer.echo(report.model_dump_json(indent=2))
    else:
        display_statistic(report)


_KERNEL_HELP = "Built-in kernel: prod2, hoif:<j>[:<k>], motif:<id>, dcov[:<p>]"
_DATA_HELP = "Headerless numeric CSV (an edge list for motif kernels)"


@app.command()
def u(
    kernel: str = typer.Option(..., "--kernel", "-k", help=_KERNEL_HELP),
    data: Path = typer.Option(..., "--data", "-d", help=_DATA_HELP),
    order_strategy: OrderStrategy = typer.Option(
        OrderStrategy.GREEDY_MIN_FILL, "--order-strategy", help="Elimination order strategy"
    ),
    threads: Optional[int] = typer.Option(None, "--threads", min=1, help="Worker threads"),
    mem_cap: Optional[int] = typer.Option(None, "--mem-cap", min=1, help="Max tensor entries"),
    output_json: bool = typer.Option(False, "--json", "-j", help="Output as JSON"),
) -> None:
    """Compute a U-statistic (a sum over distinct index tuples).

    Example:
        ustat u --kernel prod2 --data three.csv
    """
    run_statistic("u", kernel, data, order_strategy, threads, mem_cap, output_json)


@app.command()
def v(
    kernel: str = typer.Option(..., "--kernel", "-k", help=_KERNEL_HELP),
    data: Path = typer.Option(..., "--data", "-d", help=_DATA_HELP),
    order_strategy: OrderStrategy = typer.Option(
        OrderStrategy.GREEDY_MIN_FILL, "--order-strategy", help="Elimination order strategy"
    ),
    threads: Optional[int] = typer.Option(None, "--threads", min=1, help="Worker threads"),
    mem_cap: Optional[int] = typer.Option(None, "--mem-cap", min=1, help="Max tensor entries"),
    output_json: bool = typer.Option(False, "--json", "-j", help="Output as JSON"),
) -> None:
    """Compute a V-statistic (a sum over all index tuples)."""
    run_statistic("v", kernel, data, order_strategy, threads, mem_cap, output_json)


@app.command()
def analyze(
    signature: Optional[str] = typer.Option(
        None, "--signature", "-s", help='Signature such as "1 2, 2 3, 3 4"'
    ),
    builtin: Optional[str] = typer.Option(None, "--builtin", "-b", help="Built-in: hoif:<m>"),
    n: int = typer.Option(1, "--n", min=1, help="Extent for the flop estimate"),
    planned: bool = typer.Option(
        False, "--planned", help="Also count flops of the planned elimination paths"
    ),
) -> None:
    """Print the complexity report of a signature as JSON.

    Example:
        ustat analyze --builtin hoif:4 --n 10000
    """
    with handled():
        if (signature is None) == (builtin is None):
            raise DataParseError("give exactly one of --signature and --builtin")
        if signature is not None:
            parsed = parse_signature(signature)
        else:
            spec = parse_kernel_spec(builtin)
            if spec.family != "hoif":
                raise DataParseError(f"--builtin supports hoif:<m>, got {builtin!r}")
            parsed = chain_signature(spec.order)
        report = create_analyzer().complexity_report(parsed, n=n, planned=planned)
    typer.echo(report.model_dump_json(by_alias=True, indent=2))


@app.command()
def motifs(
    graph: Path = typer.Option(..., "--graph", "-g", help="Edge list: 0-based vertex pairs"),
    order: int = typer.Option(3, "--order", "-o", min=3, max=4, help="Motif size: 3 or 4"),
    output_json: bool = typer.Option(False, "--json", "-j", help="Output as JSON"),
) -> None:
    """Count induced 3- or 4-vertex motifs of a graph."""
    with handled():
        parsed = read_edge_list(graph)
        report = MotifReport(
            vertices=parsed.vertex_count,
            edges=parsed.edge_count,
            order=order,
            counts=motif_counts(parsed, order),
        )
    if output_json:
        typer.echo(report.model_dump_json(indent=2))
        return
    table = Table(title=f"Motifs of order {order}")
    table.add_column("Motif", style="cyan")
    table.add_column("Count", justify="right")
    for rid, count in report.counts.items():
        table.add_row(rid, str(count))
    console.print(table)


@app.command()
def dcov(
    x: Path = typer.Option(..., "--x", help="CSV of X observations"),
    y: Path = typer.Option(..., "--y", help="CSV of Y observations"),
    kind: str = typer.Option("u", "--kind", help="u (unbiased) or v (classical biased form)"),
    oracle: bool = typer.Option(
        False, "--oracle", help=f"Cross-check against the direct sum (n <= {ORACLE_MAX_N})"
    ),
    output_json: bool = typer.Option(False, "--json", "-j", help="Output as JSON"),
) -> None:
    """Compute the squared distance covariance of paired samples."""
    with handled():
        if kind not in ("u", "v"):
            raise DataParseError(f"--kind must be u or v, got {kind!r}")
        xs, ys = read_sample_csv(x), read_sample_csv(y)
        value = dcov_squared(xs, ys, kind)
        report = DcovReport(n=xs.shape[0], value=value)
        if oracle and kind == "u":
            if report.n > ORACLE_MAX_N:
                err_console.print(f"[yellow]oracle skipped: n > {ORACLE_MAX_N}[/yellow]")
            else:
                check = dcov_oracle(xs, ys)
                report.oracle = check
                report.relative_error = abs(value - check) / max(abs(check), 1e-300)
        elif oracle:
            err_console.print("[yellow]oracle skipped: only the u form has an oracle[/yellow]")
    if output_json:
        typer.echo(report.model_dump_json(indent=2))
        return
    typer.echo(f"{report.value:.15g}")
    if report.oracle is not None:
        console.print(f"[dim]oracle {report.oracle:.15g}, relative error {report.relative_error:.3e}[/dim]")


@app.command()
def treewidth(
    graph: Path = typer.Option(..., "--graph", "-g", help="Edge list: 0-based vertex pairs"),
    exact: bool = typer.Option(False, "--exact", "-e", help="Run the exact branch and bound"),
    output_json: bool = typer.Option(False, "--json", "-j", help="Output as JSON"),
) -> None:
    """Treewidth bounds of a graph, with a witness elimination order."""
    with handled():
        report = create_analyzer().treewidth_report(read_edge_list(graph), exact=exact)
    if output_json:
        typer.echo(report.model_dump_json(indent=2))
        return
    if report.exact is not None:
        typer.echo(f"treewidth {report.exact}")
    table = Table(show_header=False, box=None, padding=(0, 2))
    table.add_column("Label", style="cyan")
    table.add_column("Value")
    table.add_row("vertices / edges", f"{report.vertices} / {report.edges}")
    table.add_row("degeneracy (lower)", str(report.degeneracy))
    table.add_row("min-degree (upper)", str(report.min_degree))
    table.add_row("min-fill (upper)", str(report.min_fill))
    table.add_row("witness order", json.dumps(report.order))
    console.print(table)


def main() -> None:
    """Entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
