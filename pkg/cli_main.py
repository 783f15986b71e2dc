#!/usr/bin/env python3
"""
gogsep CLI - Residual p-separation for graphs of finite p-groups
Main entry point for the gogsep command
"""

import sys
import argparse
from pathlib import Path
from rich.console import Console
from rich.table import Table
from rich.panel import Panel

# Add the CLI directory to Python path for imports
cli_dir = Path(__file__).parent
sys.path.insert(0, str(cli_dir))

# Import commands
import commands.validate as validate
import commands.check as check
import commands.search as search
import commands.separate as separate
import commands.cover as cover
import commands.tree as tree
import commands.freesep as freesep
import commands.run as run
from gogsep.errors import GogSepError, InvariantBreach, ValidationError
from utils import print_error

console = Console()

COMMANDS = {
    'validate': validate,
    'check': check,
    'search': search,
    'separate': separate,
    'cover': cover,
    'tree': tree,
    'freesep': freesep,
    'run': run,
}


EXIT_CODES = {
    0: "verdict reached",
    1: "batch run finished with failing steps (run)",
    2: "invalid input",
    3: "budget exceeded",
    4: "internal invariant breach",
}


def print_main_help():
    """Print main help using Rich formatting"""
    console.print(Panel.fit(
        "[bold magenta]gogsep[/bold magenta] - Residual p-separation for graphs of finite p-groups",
        title="gogsep Command Line Interface",
        border_style="magenta"
    ))

    console.print("\n[bold]Usage:[/bold]")
    console.print("  gogsep [magenta]<command>[/magenta] [dim][options][/dim]")
    console.print("  gogsep --help\n")

    # Create commands table
    table = Table(title="Available Commands", show_header=True, header_style="bold magenta")
    table.add_column("Command", style="magenta", no_wrap=True)
    table.add_column("Description", style="white")

    table.add_row("validate", "Check groups, graph, monomorphisms and series of a problem file")
    table.add_row("check", "Decide conditions I and II (solving level maps when absent)")
    table.add_row("search", "Search for chief series satisfying both conditions")
    table.add_row("separate", "Separate a word into a finite p-quotient with a certificate")
    table.add_row("cover", "Build the index-p kernel cover (problem file + DOT)")
    table.add_row("tree", "Enumerate a ball of the Bass-Serre tree (DOT)")
    table.add_row("freesep", "Magnus witness for a free-group word")
    table.add_row("run", "Execute a YAML job of the commands above")

    console.print(table)

    console.print("\n[bold]Common Workflows:[/bold]")
    console.print("  [magenta]1.[/magenta] Validate a problem:    gogsep validate --input fixtures/fix_a.json")
    console.print("  [magenta]2.[/magenta] Check conditions:      gogsep check --input fixtures/fix_a.json")
    console.print("  [magenta]3.[/magenta] Find series:           gogsep search --input fixtures/fix_d.json")
    console.print("  [magenta]4.[/magenta] Separate a word:       gogsep separate --input fixtures/fix_e.json --word abab")
    console.print("  [magenta]5.[/magenta] Golden batch run:      gogsep run configs/fixtures_job.yaml")

    console.print("\n[bold]Exit Codes:[/bold]")
    for code, meaning in EXIT_CODES.items():
        console.print(f"  [magenta]{code}[/magenta]  {meaning}")
    console.print("\n[dim]For help on a specific command:[/dim]")
    console.print("  gogsep [magenta]<command>[/magenta] --help")
    console.print()


def main(argv=None) -> int:
    """Main CLI entry point"""
    argv = sys.argv[1:] if argv is None else list(argv)
    # Check if asking for help
    if not argv or (len(argv) == 1 and argv[0] in ['--help', '-h']):
        print_main_help()
        return 0

    parser = argparse.ArgumentParser(
        prog='gogsep',
        description='Residual p-separation for graphs of finite p-groups',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        add_help=False  # We'll handle help ourselves
    )

    # Create subparsers for different commands
    subparsers = parser.add_subparsers(
        title='Commands',
        description='Available commands',
        dest='command',
        help='Command to execute'
    )

    for module in COMMANDS.values():
        module.add_parser(subparsers)

    args = parser.parse_args(argv)

    # If no command specified, show help
    if not args.command:
        print_main_help()
        return 0

    try:
        COMMANDS[args.command].execute(args)
    except ValidationError as e:
        print_error(str(e))
        return e.exit_code
    except GogSepError as e:
        print_error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except Exception as e:
        print_error(f"Internal error: {type(e).__name__}: {e}")
        return InvariantBreach.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
