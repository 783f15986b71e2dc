"""
Freesep command - Magnus separation of a free-group word
"""

import argparse
import sys

from gogsep.freep import format_free_word, free_reduce, magnus_image, parse_free_word, separate_free
from utils import (
    add_common_arguments, emit_report, print_command_help, print_panel, resolve_settings, start_report,
)


def print_freesep_help():
    print_command_help(
        "freesep", "Separate a free-group word with the truncated Magnus map",
        "Free Separation", "--prime [magenta]P[/magenta] --rank [magenta]R[/magenta] --word [magenta]WORD[/magenta]",
        [
            ["--prime, -p P", "The prime"],
            ["--rank, -r R", "Rank of the free group"],
            ["--word, -w WORD", "Word like 'x1 x2^-1 x1'"],
        ],
        ["gogsep freesep -p 2 -r 1 -w 'x1 x1'"],
    )


def add_parser(subparsers):
    """Add freesep command parser"""
    parser = subparsers.add_parser(
        'freesep',
        help='Magnus witness for a free-group word',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Find the least truncation degree separating a free-group word',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == 'freesep' and sys.argv[2] in ['--help', '-h']:
        print_freesep_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    add_common_arguments(parser, needs_input=False)
    parser.add_argument('--prime', '-p', type=int, required=True, help='The prime')
    parser.add_argument('--rank', '-r', type=int, required=True, help='Rank of the free group')
    parser.add_argument('--word', '-w', required=True, help="Word like 'x1 x2^-1 x1'")


def execute(args):
    """Execute freesep command"""
    if getattr(args, 'help', False):
        print_freesep_help()
        return None

    settings = resolve_settings(args)
    report = start_report('freesep', args)
    word = parse_free_word(args.word, args.rank)
    witness = separate_free(word, args.rank, args.prime, cap=settings.magnus_cap)
    image = magnus_image(free_reduce(word), args.rank, witness.degree, args.prime)
    report.update({
        "verdict": "separated",
        "word": format_free_word(free_reduce(word)),
        "witness": witness.to_dict(),
        "image": image.format(),
    })
    return emit_report(report, args, _render)


def _render(report):
    witness = report["witness"]
    monomial = "".join(f"X{i}" for i in witness["monomial"])
    print_panel(
        f"Word: {report['word']}\n"
        f"Degree: {witness['degree']}\n"
        f"Coefficient of {monomial}: {witness['coefficient']}\n"
        f"Image: {report['image']}",
        title=f"Magnus witness over F_{witness['prime']}",
    )
