"""
Shared utilities for the gogsep CLI with Rich formatting
"""

import contextlib
import json
import logging
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import dotenv
import yaml
from rich.console import Console
from rich.json import JSON
from rich.logging import RichHandler
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from gogsep.errors import ValidationReport
from gogsep.problem import Problem, load_problem, write_json
from gogsep.settings import Settings, load_settings

# Load environment variables
dotenv.load_dotenv()

# Create global console instances
console = Console()
err_console = Console(stderr=True)

REPORT_FORMAT = 1


def setup_logging(level: str = "WARNING"):
    """Route library logging through a RichHandler on stderr"""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, show_path=False, rich_tracebacks=True)],
        force=True,
    )


def format_verdict(verdict: bool, yes: str = "pass", no: str = "fail") -> str:
    """Format a verdict with Rich color"""
    return f"[green]{yes}[/green]" if verdict else f"[red]{no}[/red]"


def print_json(data: Any, title: str = None):
    """Pretty print JSON data with Rich"""
    if title:
        console.print(Panel(JSON(json.dumps(data)), title=title, expand=False))
    else:
        console.print(JSON(json.dumps(data)))


def load_yaml_config(file_path: str) -> Optional[Dict[str, Any]]:
    """Load YAML configuration file"""
    config_file = Path(file_path)
    if not config_file.exists():
        print_error(f"Configuration file '{file_path}' not found")
        return None

    try:
        with open(config_file, 'r') as f:
            return yaml.safe_load(f)
    except yaml.YAMLError as e:
        print_error(f"Error reading configuration file: {e}")
        return None


def create_table(title: str, headers: List[str], rows: List[List[Any]],
                 show_header: bool = True, show_lines: bool = False) -> Table:
    """Create a Rich table with consistent styling"""
    table = Table(title=title, show_header=show_header, show_lines=show_lines)

    # Add columns with styling
    for header in headers:
        if header.lower() in ['vertex', 'edge', 'step', 'level']:
            table.add_column(header, style="cyan", no_wrap=True)
        elif header.lower() in ['verdict', 'outcome', 'status']:
            table.add_column(header, no_wrap=True)
        else:
            table.add_column(header)

    for row in rows:
        str_row = [str(val) if val is not None else "-" for val in row]
        table.add_row(*str_row)

    return table


def print_panel(content: str, title: str = None, style: str = None):
    """Print content in a styled panel"""
    console.print(Panel(content, title=title, style=style or "none", expand=False))


def print_success(message: str):
    """Print success message"""
    console.print(f"[green]{message}[/green]")


def print_error(message: str):
    """Print error message"""
    err_console.print(f"[red]Error: {message}[/red]")


def print_warning(message: str):
    """Print warning message"""
    err_console.print(f"[yellow]Warning: {message}[/yellow]")


def print_info(message: str):
    """Print info message"""
    console.print(f"[cyan]{message}[/cyan]")


def create_progress_bar() -> Progress:
    """Create a progress bar for batch runs"""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
        console=console
    )


def print_report_violations(report: ValidationReport):
    """Print the violations of a validation report as a table"""
    rows = [[v.code, v.message, json.dumps(v.witness) if v.witness else ""] for v in report.violations]
    console.print(create_table(f"{report.subject}: {len(rows)} problem(s)", ["Code", "Message", "Witness"], rows))


def print_command_help(command: str, summary: str, title: str, usage: str,
                       options: List[List[str]], examples: Optional[List[str]] = None):
    """Print command help using Rich"""
    console.print(Panel.fit(
        f"[bold magenta]{command.title()} Command[/bold magenta] - {summary}",
        title=title,
        border_style="magenta"
    ))

    console.print("\n[bold]Usage:[/bold]")
    console.print(f"  gogsep {command} {usage}\n")

    table = Table(title="Options", show_header=True, header_style="bold magenta")
    table.add_column("Option", style="magenta", no_wrap=True)
    table.add_column("Description", style="white")
    for row in options + COMMON_OPTIONS:
        table.add_row(*row)
    console.print(table)

    if examples:
        console.print("\n[bold]Examples:[/bold]")
        for example in examples:
            console.print(f"  {example}")
    console.print()


COMMON_OPTIONS = [
    ["--json / --text", "Report as JSON or as tables (default)"],
    ["--output, -o FILE", "Also write the JSON report to FILE"],
    ["--config FILE", "Settings file (default configs/settings.yaml)"],
    ["--verbose, -v", "Log progress; -vv for debug output"],
]


# Shared command plumbing

def add_common_arguments(parser, needs_input: bool = True):
    """Flags shared by every problem-file command"""
    if needs_input:
        parser.add_argument('--input', '-i', required=True, help='Problem file (JSON)')
    output = parser.add_mutually_exclusive_group()
    output.add_argument('--json', action='store_true', help='Print the report as JSON')
    output.add_argument('--text', action='store_true', help='Print the report as tables (default)')
    parser.add_argument('--output', '-o', help='Write the JSON report to a file')
    parser.add_argument('--config', help='Settings file (YAML)')
    parser.add_argument('--verbose', '-v', action='count', default=0, help='Log progress (-vv for debug)')


def resolve_settings(args, **overrides: Any) -> Settings:
    """Settings from --config and the environment, with CLI flags on top"""
    settings = load_settings(getattr(args, 'config', None)).override(**overrides)
    verbose = getattr(args, 'verbose', 0) or 0
    level = "DEBUG" if verbose >= 2 else "INFO" if verbose == 1 else settings.log_level
    setup_logging(level)
    return settings


def working(args, message: str):
    """Status spinner, or nothing when a batch run owns the live display"""
    if getattr(args, 'quiet', False):
        return contextlib.nullcontext()
    return console.status(message)


def load_problem_arg(args, validate: bool = True) -> Problem:
    with working(args, f"[cyan]Loading {args.input}...[/cyan]"):
        return load_problem(args.input, validate=validate)


def start_report(command: str, args) -> Dict[str, Any]:
    return {
        "format_version": REPORT_FORMAT,
        "command": command,
        "input": getattr(args, 'input', None),
        "_started": time.perf_counter(),
    }


def emit_report(report: Dict[str, Any], args, render_text: Callable[[Dict[str, Any]], None]) -> Dict[str, Any]:
    """Finish the report, then print it as JSON or text and write --output"""
    started = report.pop("_started", None)
    if started is not None:
        report["elapsed_seconds"] = round(time.perf_counter() - started, 4)
    if getattr(args, 'output', None):
        write_json(report, args.output)
    if getattr(args, 'quiet', False):
        return report
    if getattr(args, 'json', False):
        print_json(report)
    else:
        render_text(report)
    if getattr(args, 'output', None):
        print_success(f"Report written to: {Path(args.output).absolute()}")
    return report


def write_text_file(text: str, path: str, what: str = "File"):
    output_file = Path(path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    output_file.write_text(text)
    print_success(f"{what} written to: {output_file.absolute()}")
