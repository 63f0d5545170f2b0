"""
Approximate At-Most-k Toolkit - UI Module
=========================================

Terminal rendering using the Rich library.

Human-facing output (panels, tables, progress, messages) goes to stderr;
stdout only receives plain payload lines (DIMACS, CSV, key=value reports).
"""

from typing import Dict, Optional, Sequence

from rich import box
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .metrics import EfficiencyReport
from .reports import format_percent


class TerminalUI:
    """
    Terminal user interface for the toolkit.
    """

    def __init__(self, quiet: bool = False):
        self.console = Console(stderr=True, highlight=False)
        self.out = Console(highlight=False, soft_wrap=True)
        self.quiet = quiet

    # -- payload -------------------------------------------------------------

    def print_line(self, text: str):
        """Plain line on stdout."""
        self.out.print(text, markup=False, emoji=False)

    def write_payload(self, text: str):
        """Raw DIMACS/CSV text on stdout, byte-for-byte."""
        self.out.file.write(text)
        self.out.file.flush()

    def print_stats_line(self, text: str):
        """Plain line on stderr (encode summary)."""
        self.console.print(text, markup=False, emoji=False, soft_wrap=True)

    # -- reports -------------------------------------------------------------

    def show_report(self, report: EfficiencyReport, extras: Optional[Dict[str, str]] = None):
        """Display one shape's analysis in a panel."""
        if self.quiet:
            return

        content = f"""[bold]Shape:[/bold] {report.shape}
[bold]Model:[/bold] {report.shape.describe()}

[bold]Approximate literals:[/bold] {report.approx_literals}
[bold]Counter literals:[/bold]     {report.counter_literals}
[bold]Literal rate:[/bold]         {format_percent(report.literal_rate)}

[bold]Overall coverage:[/bold]     {format_percent(report.overall_coverage)}
[bold]Max-count coverage:[/bold]   {format_percent(report.maxcount_coverage)}
[bold]Efficiency:[/bold]           {float(report.efficiency):.2f}"""

        for label, value in (extras or {}).items():
            content += f"\n[bold]{label}:[/bold] {value}"

        panel = Panel(
            content,
            title="Approximate At-Most-k Analysis",
            border_style="cyan",
            box=box.ROUNDED
        )
        self.console.print(panel)

    def show_ranking(self, reports: Sequence[EfficiencyReport], limit: int = 10):
        """Display the best shapes of a search."""
        if self.quiet or not reports:
            return

        table = Table(
            title=f"Best models for k={reports[0].derived_k}, n={reports[0].derived_n}",
            box=box.ROUNDED,
            show_header=True,
            header_style="bold cyan"
        )

        table.add_column("#", style="dim")
        table.add_column("Shape", no_wrap=True)
        table.add_column("Literals", justify="right")
        table.add_column("Rate", justify="right")
        table.add_column("Coverage", justify="right")
        table.add_column("Efficiency", justify="right")

        for i, report in enumerate(reports[:limit], 1):
            eff = float(report.efficiency)
            style = "green" if eff >= 1 else "yellow" if eff >= 0.5 else "red"
            table.add_row(
                str(i),
                str(report.shape),
                f"{report.approx_literals}/{report.counter_literals}",
                format_percent(report.literal_rate),
                format_percent(report.overall_coverage),
                f"[{style}]{eff:.2f}[/{style}]"
            )

        self.console.print(table)
        if len(reports) > limit:
            self.console.print(f"[dim]... {len(reports) - limit} more in the CSV output[/dim]")

    def show_summary(self, stats: Dict):
        """Display operation summary."""
        if self.quiet:
            return

        content = ""
        for key, value in stats.items():
            label = key.replace('_', ' ').title()
            content += f"[bold]{label}:[/bold] {value}\n"

        panel = Panel(
            content.rstrip(),
            title="Summary",
            border_style="green",
            box=box.ROUNDED
        )
        self.console.print(panel)

    def progress(self) -> Progress:
        """
        Progress display for long searches.

        Returns:
            Progress context manager (transient, on stderr)
        """
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            TextColumn("({task.completed}/{task.total})"),
            console=self.console,
            transient=True,
            disable=self.quiet
        )

    # -- messages ------------------------------------------------------------

    def show_error(self, message: str):
        """Display error message."""
        self.console.print(f"[bold red]Error:[/bold red] {escape(message)}")

    def show_success(self, message: str):
        """Display success message."""
        if not self.quiet:
            self.console.print(f"[bold green]✓[/bold green] {message}")

    def show_warning(self, message: str):
        """Display warning message."""
        self.console.print(f"[bold yellow]Warning:[/bold yellow] {escape(message)}")

    def show_info(self, message: str):
        """Display info message."""
        if not self.quiet:
            self.console.print(f"[bold blue]ℹ[/bold blue] {message}")
