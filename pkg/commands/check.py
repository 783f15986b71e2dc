"""
Check command - Conditions I and II for the series of a problem file
"""

import argparse
import sys

from gogsep.compat import check_compliance
from gogsep.errors import ConditionError
from utils import (
    add_common_arguments, console, create_table, emit_report, format_verdict, load_problem_arg,
    print_command_help, print_panel, resolve_settings, start_report, working,
)


def print_check_help():
    print_command_help(
        "check", "Decide the chief-series compatibility conditions",
        "Check Conditions", "--input [magenta]FILE[/magenta] [dim][options][/dim]",
        [["--input, -i FILE", "Problem file with a series section (JSON)"]],
        ["gogsep check --input fixtures/fix_a.json", "gogsep check --input fixtures/fix_b.json --json"],
    )


def add_parser(subparsers):
    """Add check command parser"""
    parser = subparsers.add_parser(
        'check',
        help='Check conditions I and II',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Check conditions I and II, solving for level maps when none are given',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == 'check' and sys.argv[2] in ['--help', '-h']:
        print_check_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    add_common_arguments(parser)


def execute(args):
    """Execute check command"""
    if getattr(args, 'help', False):
        print_check_help()
        return None

    resolve_settings(args)
    report = start_report('check', args)
    problem = load_problem_arg(args)
    if problem.series is None:
        raise ConditionError("problem has no series section to check")
    with working(args, "[magenta]Checking conditions...[/magenta]"):
        compliance = check_compliance(problem.gg, problem.sd, problem.series, problem.level_maps)
    report.update({
        "verdict": "pass" if compliance.ok else "fail",
        "level_maps_given": problem.level_maps is not None,
        "tree": not problem.sd.non_tree_generators(),
        "compliance": compliance.to_dict(),
    })
    return emit_report(report, args, _render)


def _render(report):
    compliance = report["compliance"]
    print_panel(
        f"Condition I: {format_verdict(compliance['condition_I'])}\n"
        f"Condition II: {format_verdict(compliance['condition_II'])}",
        title=f"Check {report['input']}",
    )
    if compliance["condition_I_failures"]:
        rows = [[f["edge"], f["level"], f["image"], f["intersection"]] for f in compliance["condition_I_failures"]]
        console.print(create_table("Condition I failures", ["Edge", "Level", "Image", "Intersection"], rows))
    failure = compliance["condition_II_failure"]
    if failure:
        console.print(create_table(
            "Condition II holonomy", ["Level", "Cycle", "Holonomy"],
            [[failure["level"], " ".join(failure["cycle"]), failure["holonomy"]]],
        ))
    if compliance["condition_II_violations"]:
        rows = [[v["edge"], v["level"], v["message"]] for v in compliance["condition_II_violations"]]
        console.print(create_table("Level map violations", ["Edge", "Level", "Message"], rows))
    maps = compliance["level_maps"]
    if maps and report["verdict"] == "pass":
        rows = [[name, level, value] for kind in ("vertices", "edges")
                for name, levels in maps[kind].items() for level, value in levels.items()]
        console.print(create_table("Level maps", ["Vertex", "Level", "Scalar"], rows))
