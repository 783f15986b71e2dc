"""
Validate command - Structural checks of a problem file
"""

import argparse
import sys

from gogsep.errors import ValidationError
from utils import (
    add_common_arguments, console, create_table, emit_report, load_problem_arg,
    print_command_help, print_report_violations, print_success, resolve_settings, start_report,
)


def print_validate_help():
    print_command_help(
        "validate", "Check groups, graph, monomorphisms and series of a problem file",
        "Validate Problem", "--input [magenta]FILE[/magenta] [dim][options][/dim]",
        [["--input, -i FILE", "Problem file (JSON)"]],
        ["gogsep validate --input fixtures/fix_a.json"],
    )


def add_parser(subparsers):
    """Add validate command parser"""
    parser = subparsers.add_parser(
        'validate',
        help='Validate a problem file',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Run every structural validator on a problem file',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == 'validate' and sys.argv[2] in ['--help', '-h']:
        print_validate_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    add_common_arguments(parser)


def execute(args):
    """Execute validate command"""
    if getattr(args, 'help', False):
        print_validate_help()
        return None

    resolve_settings(args)
    report = start_report('validate', args)
    problem = load_problem_arg(args, validate=False)
    validation = problem.validate()
    report.update({
        "verdict": "valid" if validation.ok else "invalid",
        "validation": validation.to_dict(),
    })
    emit_report(report, args, lambda r: _render(validation))
    if not validation.ok:
        raise ValidationError(validation.violations[0].message, validation)
    return report


def _render(validation):
    if not validation.ok:
        print_report_violations(validation)
        return
    rows = [[key, value] for key, value in validation.facts.items()]
    console.print(create_table("Problem facts", ["Fact", "Value"], rows))
    print_success("Problem file is valid")
