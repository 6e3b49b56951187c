from logging import getLogger

from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .fuzz import FuzzReport
from .singularity import SingularityVerdict
from .splice import SpliceDiagram, edge_determinant

logger = getLogger(__name__)


def format_splice(diagram: SpliceDiagram, console: Console | None = None) -> None:
    """Display node signs and end weights of a splice diagram.

    Args:
        diagram: Normalized splice diagram
        console: Target console (default: stderr)
    """
    console = console or Console(stderr=True)
    if diagram.atomic:
        console.print(Panel("[yellow]Lens space: the splice diagram has no nodes.[/yellow]", title="Atomic"))
        return

    table = Table(title="Splice diagram", show_header=True, header_style="bold magenta")
    table.add_column("Node", style="cyan", no_wrap=True)
    table.add_column("Sign", no_wrap=True)
    table.add_column("End weights", style="white")
    for v in diagram.nodes:
        sign = "[green]+[/green]" if diagram.sign(v) > 0 else "[red]-[/red]"
        weights = ", ".join(f"{x}: {diagram.weight(v, x)}" for x in diagram.neighbors(v))
        table.add_row(v, sign, weights)
    console.print(table)

    node_edges = diagram.node_edges()
    if node_edges:
        edges = Table(title="Edge determinants", show_header=True, header_style="bold magenta", min_width=30)
        edges.add_column("Edge", style="cyan", no_wrap=True)
        edges.add_column("D", justify="right")
        for a, b in node_edges:
            determinant = edge_determinant(diagram, a, b)
            style = "green" if determinant > 0 else "red"
            edges.add_row(f"{a}-{b}", f"[{style}]{determinant}[/{style}]")
        console.print(edges)


def format_verdict(verdict: SingularityVerdict, console: Console | None = None) -> None:
    console = console or Console(stderr=True)
    table = Table(title="Singularity link", show_header=True, header_style="bold magenta")
    table.add_column("Route", style="white")
    table.add_column("Verdict", no_wrap=True)
    for route, value in sorted(verdict.routes.items()):
        table.add_row(route, "[green]yes[/green]" if value else "[yellow]no[/yellow]")
    console.print(table)
    if not verdict.route_agreement:
        console.print("[red]Routes disagree;[/red] exit code 2")


def format_fuzz_report(report: FuzzReport, console: Console | None = None) -> None:
    """Display per-suite counts and the first failing seeds.

    Args:
        report: Merged fuzz results
        console: Target console (default: stderr)
    """
    console = console or Console(stderr=True)
    table = Table(title="Fuzz suites", show_header=True, header_style="bold magenta")
    table.add_column("Suite", style="cyan")
    table.add_column("Checked", justify="right")
    table.add_column("Skipped", justify="right", style="dim")
    table.add_column("Failed", justify="right")
    for summary in report.suites:
        failed = f"[red]{summary.failed}[/red]" if summary.failed else "[green]0[/green]"
        table.add_row(summary.suite, str(summary.checked), str(summary.skipped), failed)
    console.print(table)

    for failure in report.failures[:5]:
        body = "\n".join(failure.messages) + "\n\n" + failure.reproduction
        console.print(Panel(body, title=f"{failure.suite} seed {failure.seed}", border_style="red"))
    if len(report.failures) > 5:
        console.print(f"[bold]{len(report.failures) - 5}[/bold] more failing seeds in the JSON summary")


def show_progress(message: str, console: Console | None = None) -> Progress:
    """Create and return a progress spinner.

    Args:
        message: Message to display with spinner
        console: Target console (default: stderr)

    Returns:
        Progress context manager
    """
    progress = Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console or Console(stderr=True),
        transient=True,
    )
    progress.add_task(description=message, total=None)
    return progress
