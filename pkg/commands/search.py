"""
Search command - Look for a compliant series assignment
"""

import argparse
import sys
from dataclasses import replace

from gogsep.compat import search_series_assignment
from gogsep.problem import dump_problem, write_json
from utils import (
    add_common_arguments, console, create_table, emit_report, load_problem_arg, print_command_help,
    print_success, print_warning, resolve_settings, start_report, working,
)


def print_search_help():
    print_command_help(
        "search", "Search chief series satisfying conditions I and II",
        "Series Search", "--input [magenta]FILE[/magenta] [dim][options][/dim]",
        [
            ["--input, -i FILE", "Problem file (JSON); any series in it is ignored"],
            ["--search-bound N", "Largest number of series steps to try"],
            ["--save FILE", "Write the problem with the found series and level maps"],
        ],
        ["gogsep search --input fixtures/fix_b.json --search-bound 3"],
    )


def add_parser(subparsers):
    """Add search command parser"""
    parser = subparsers.add_parser(
        'search',
        help='Search for a compliant series assignment',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Exhaustive search over chief series within a length bound',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == 'search' and sys.argv[2] in ['--help', '-h']:
        print_search_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    add_common_arguments(parser)
    parser.add_argument('--search-bound', type=int, help='Largest number of series steps to try')
    parser.add_argument('--save', help='Write the problem with the found series')


def execute(args):
    """Execute search command"""
    if getattr(args, 'help', False):
        print_search_help()
        return None

    settings = resolve_settings(args, search_bound=getattr(args, 'search_bound', None))
    report = start_report('search', args)
    problem = load_problem_arg(args)
    with working(args, f"[magenta]Searching up to {settings.search_bound} steps...[/magenta]"):
        result = search_series_assignment(
            problem.gg, problem.sd,
            bound=settings.search_bound,
            max_exponent=settings.search_max_exponent,
            max_candidates=settings.search_max_candidates,
        )
    report.update({"verdict": "found" if result.found else "exhausted", "search": result.to_dict()})
    if result.found and getattr(args, 'save', None):
        write_json(dump_problem(replace(problem, series=result.assignment, level_maps=result.level_maps)), args.save)
        report["saved"] = args.save
    return emit_report(report, args, _render)


def _render(report):
    search = report["search"]
    if not search["found"]:
        print_warning(
            f"No compliant series up to {search['searched_bound']} steps "
            f"({search['candidates']} candidate(s) tried)"
        )
        return
    rows = [[x, " > ".join(str(len(term)) for term in terms)] for x, terms in search["series"]["vertices"].items()]
    console.print(create_table(
        f"Series found at {search['searched_bound']} steps after {search['candidates']} candidate(s)",
        ["Vertex", "Term orders"], rows,
    ))
    if report.get("saved"):
        print_success(f"Problem with series written to: {report['saved']}")
