"""
Cover command - The index-p kernel cover of the level homomorphism
"""

import argparse
import sys

from gogsep.cover import build_kernel_cover, build_level_hom, cover_rank, generator_images, shift_series, verify_embedding
from gogsep.errors import ConditionError, InvariantBreach
from gogsep.gog import format_word, graph_to_dot
from gogsep.problem import Problem, dump_problem, write_json
from utils import (
    add_common_arguments, console, create_table, emit_report, load_problem_arg, print_command_help,
    print_success, resolve_settings, start_report, working, write_text_file,
)


def print_cover_help():
    print_command_help(
        "cover", "Build the graph of groups of the kernel of Phi",
        "Kernel Cover", "--input [magenta]FILE[/magenta] [dim][options][/dim]",
        [
            ["--input, -i FILE", "Problem file (JSON)"],
            ["--save FILE", "Write the cover as a problem file"],
            ["--dot FILE", "Write the cover graph as DOT"],
        ],
        ["gogsep cover --input fixtures/fix_e.json --save cover.json --dot cover.dot"],
    )


def add_parser(subparsers):
    """Add cover command parser"""
    parser = subparsers.add_parser(
        'cover',
        help='Build the kernel cover',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Build the index-p kernel cover with its shifted series',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == 'cover' and sys.argv[2] in ['--help', '-h']:
        print_cover_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    add_common_arguments(parser)
    parser.add_argument('--save', help='Write the cover problem file')
    parser.add_argument('--dot', help='Write the cover graph as DOT')


def execute(args):
    """Execute cover command"""
    if getattr(args, 'help', False):
        print_cover_help()
        return None

    resolve_settings(args)
    report = start_report('cover', args)
    problem = load_problem_arg(args)
    gg, sd = problem.gg, problem.sd
    sa, lm = problem.compliant_data()

    shifts = 0
    ph = build_level_hom(gg, sd, sa, lm, force_surjective=True)
    while not ph.is_surjective:
        if sa.length_bound == 0:
            raise ConditionError("the level homomorphism vanishes at every level; the fundamental group is trivial")
        sa, lm = shift_series(sa, lm)
        shifts += 1
        ph = build_level_hom(gg, sd, sa, lm, force_surjective=True)

    with working(args, "[magenta]Building the kernel cover...[/magenta]"):
        kc = build_kernel_cover(gg, sd, sa, lm, ph)
        failures = verify_embedding(kc)
    if failures:
        raise InvariantBreach(f"{len(failures)} cover relation(s) do not embed trivially")

    cover_graph = kc.cover_gg.graph
    report.update({
        "verdict": "cover",
        "shifted_levels": shifts,
        "level_hom": ph.to_dict(),
        "basepoint": kc.basepoint,
        "vertices": {name: kc.cover_gg.vertex_group(name).order for name in cover_graph.vertices},
        "edge_pairs": cover_graph.edge_pairs(),
        "free_rank": cover_rank(kc) if kc.cover_gg.is_free() else None,
        "generator_images": {name: format_word(gg, w) for name, w in generator_images(kc).items()},
        "embedding_verified": True,
    })

    cover_problem = Problem(gg.prime, kc.cover_gg, kc.cover_sd, kc.shifted_series, kc.level_maps)
    if getattr(args, 'save', None):
        write_json(dump_problem(cover_problem), args.save)
        report["saved"] = args.save
    if getattr(args, 'dot', None):
        labels = {name: f"{name} |G|={order}" for name, order in report["vertices"].items()}
        write_text_file(graph_to_dot(cover_graph, name="cover", vertex_labels=labels), args.dot, "DOT graph")
        report["dot"] = args.dot
    return emit_report(report, args, _render)


def _render(report):
    rows = [[name, order] for name, order in report["vertices"].items()]
    console.print(create_table(
        f"Kernel cover: {len(rows)} vertices, {len(report['edge_pairs'])} edge pairs", ["Vertex", "Group order"], rows,
    ))
    if report["free_rank"] is not None:
        print_success(f"Cover is a graph of trivial groups; its fundamental group is free of rank {report['free_rank']}")
    rows = [[name, word] for name, word in report["generator_images"].items()]
    if rows:
        console.print(create_table("Embedding of the cover generators", ["Generator", "Image"], rows))
    if report.get("saved"):
        print_success(f"Cover problem written to: {report['saved']}")
