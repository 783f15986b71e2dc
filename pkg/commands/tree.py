"""
Tree command - A finite ball of the Bass-Serre tree
"""

import argparse
import sys

from gogsep.gog import (
    GWord, VertexLetter, ball_to_dot, expected_degree, format_word, invert_word, reduce_word, tree_ball,
)
from gogsep.pgroups import subgroup_closure, trivial_subgroup
from utils import (
    add_common_arguments, console, create_table, emit_report, load_problem_arg, print_command_help,
    print_warning, resolve_settings, start_report, working, write_text_file,
)


def print_tree_help():
    print_command_help(
        "tree", "Enumerate a ball of the Bass-Serre tree around the base vertex",
        "Tree Ball", "--input [magenta]FILE[/magenta] [dim][options][/dim]",
        [
            ["--input, -i FILE", "Problem file (JSON)"],
            ["--radius, -r N", "Ball radius (default: 2)"],
            ["--dot FILE", "Write the ball as DOT"],
        ],
        ["gogsep tree --input fixtures/fix_a.json --radius 2 --dot ball.dot"],
    )


def add_parser(subparsers):
    """Add tree command parser"""
    parser = subparsers.add_parser(
        'tree',
        help='Enumerate a Bass-Serre tree ball',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Enumerate the cosets within a radius of the base vertex of the Bass-Serre tree',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == 'tree' and sys.argv[2] in ['--help', '-h']:
        print_tree_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    add_common_arguments(parser)
    parser.add_argument('--radius', '-r', type=int, default=2, help='Ball radius (default: 2)')
    parser.add_argument('--dot', help='Write the ball as DOT')


def execute(args):
    """Execute tree command"""
    if getattr(args, 'help', False):
        print_tree_help()
        return None

    settings = resolve_settings(args)
    report = start_report('tree', args)
    problem = load_problem_arg(args)
    gg, sd = problem.gg, problem.sd
    radius = getattr(args, 'radius', 2)
    with working(args, f"[magenta]Enumerating the ball of radius {radius}...[/magenta]"):
        ball = tree_ball(gg, sd, radius, budget=settings.tree_budget)

    nodes = []
    for node in ball.nodes:
        entry = {
            "id": node.id,
            "vertex": node.vertex,
            "depth": node.depth,
            "coset": f"{format_word(gg, node.label)} G_{node.vertex}",
            "stabilizer": node.stabilizer,
            "degree": ball.degree(node.id),
        }
        if problem.series is not None:
            series = problem.series.vertices[node.vertex]
            entry["series_orders"] = [term.order for term in series.terms]
            entry["series"] = _conjugated_series(gg, sd, node, series)
        nodes.append(entry)
    interior = [n for n in nodes if n["depth"] < radius]
    report.update({
        "verdict": "ball",
        "radius": radius,
        "nodes": nodes,
        "edges": [[a, b, y] for a, b, y in ball.edges],
        "degrees_match": all(n["degree"] == expected_degree(gg, n["vertex"]) for n in interior),
    })
    if getattr(args, 'dot', None):
        write_text_file(ball_to_dot(gg, ball), args.dot, "DOT ball")
        report["dot"] = args.dot
    return emit_report(report, args, _render)


def _conjugated_series(gg, sd, node, series):
    """Generators of g G_x^(k) g^-1 at the ball vertex g G_x, one entry per term"""
    group = gg.vertex_group(node.vertex)
    inverse = invert_word(gg, node.label)
    terms = []
    for term in series.terms:
        generators, span = [], trivial_subgroup(group)
        for h in term.elements:
            if h not in span:
                generators.append(h)
                span = subgroup_closure(group, generators)
        words = [
            reduce_word(gg, sd, node.label + GWord(sd.base, (VertexLetter(node.vertex, h),)) + inverse)
            for h in generators
        ]
        terms.append({"order": term.order, "generators": [format_word(gg, w) for w in words]})
    return terms


def _render(report):
    rows = [[n["id"], n["depth"], n["vertex"], n["coset"], n["degree"]] for n in report["nodes"]]
    console.print(create_table(
        f"Ball of radius {report['radius']}: {len(rows)} vertices, {len(report['edges'])} edges",
        ["Vertex", "Depth", "Over", "Coset", "Degree"], rows,
    ))
    if not report["degrees_match"]:
        print_warning("some interior vertices do not have the expected degree")
