"""
Run command - Execute a YAML job of gogsep commands
"""

import argparse
import sys

from run_job import run_job
from utils import print_command_help, print_json, resolve_settings


def print_run_help():
    print_command_help(
        "run", "Execute a batch of commands from a YAML job file (exit code 1 when a step fails)",
        "Run Job", "[magenta]<job_file>[/magenta] [dim][options][/dim]",
        [
            ["job_file", "YAML job with 'description', 'input' and 'steps'"],
            ["--fail-fast", "Stop at the first failing step"],
        ],
        ["gogsep run configs/fixtures_job.yaml --output golden.json"],
    )


def add_parser(subparsers):
    """Add run command parser"""
    parser = subparsers.add_parser(
        'run',
        help='Run a YAML job file',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Execute a batch of gogsep commands',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == "run" and sys.argv[2] in ["--help", "-h"]:
        print_run_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    parser.add_argument('job_file', nargs='?', help='Path to YAML job file')
    parser.add_argument('--output', '-o', help='Write the combined JSON report')
    parser.add_argument('--fail-fast', action='store_true', help='Stop at the first failing step')
    parser.add_argument('--json', action='store_true', help='Print the combined report as JSON')
    parser.add_argument('--config', help='Settings file (YAML)')
    parser.add_argument('--verbose', '-v', action='count', default=0, help='Log progress (-vv for debug)')


def execute(args):
    """Execute run command"""
    if getattr(args, 'help', False) or not getattr(args, 'job_file', None):
        print_run_help()
        return None

    resolve_settings(args)
    summary = run_job(args.job_file, output=args.output, fail_fast=args.fail_fast)
    if args.json:
        print_json(summary)
    if summary["failed"]:
        sys.exit(1)
    return summary
