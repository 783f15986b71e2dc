"""
Separate command - Certify that a word survives in a finite p-quotient
"""

import argparse
import sys

from gogsep.errors import InvariantBreach
from gogsep.gog import format_word
from gogsep.separate import (
    build_explicit_quotient,
    certificate_from_dict,
    certificate_to_dict,
    separate,
    verify_certificate,
)
from utils import (
    add_common_arguments, console, create_table, emit_report, format_verdict, load_problem_arg,
    print_command_help, print_panel, resolve_settings, start_report, working,
)


def print_separate_help():
    print_command_help(
        "separate", "Separate a nontrivial element into a finite p-quotient",
        "Separate Word", "--input [magenta]FILE[/magenta] --word [magenta]NAME|WORD[/magenta] [dim][options][/dim]",
        [
            ["--input, -i FILE", "Problem file (JSON)"],
            ["--word, -w NAME|WORD", "A word named in the file, or inline text like 'u:a v:b y^-1'"],
            ["--quotient", "Also build the finite p-group by coset action"],
            ["--max-cosets N", "Coset budget for --quotient"],
        ],
        [
            "gogsep separate --input fixtures/fix_e.json --word abab",
            "gogsep separate --input fixtures/fix_e.json --word 'u:a v:b' --quotient --json",
        ],
    )


def add_parser(subparsers):
    """Add separate command parser"""
    parser = subparsers.add_parser(
        'separate',
        help='Separate a word and emit a certificate',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        description='Run the descent on a word and emit a re-verified certificate',
        add_help=False
    )

    if len(sys.argv) >= 3 and sys.argv[1] == 'separate' and sys.argv[2] in ['--help', '-h']:
        print_separate_help()
        sys.exit(0)

    parser.add_argument('--help', '-h', action='store_true', help='Show help message')
    add_common_arguments(parser)
    parser.add_argument('--word', '-w', required=True, help='Word name from the file or inline word')
    parser.add_argument('--quotient', action='store_true', help='Build the explicit finite quotient')
    parser.add_argument('--max-cosets', type=int, help='Coset budget for --quotient')


def execute(args):
    """Execute separate command"""
    if getattr(args, 'help', False):
        print_separate_help()
        return None

    settings = resolve_settings(args, max_cosets=getattr(args, 'max_cosets', None))
    report = start_report('separate', args)
    problem = load_problem_arg(args)
    word = problem.word(args.word)
    sa, lm = problem.compliant_data()
    gg, sd = problem.gg, problem.sd

    with working(args, "[magenta]Descending...[/magenta]"):
        certificate = separate(gg, sd, sa, lm, word, magnus_cap=settings.magnus_cap)
    data = certificate_to_dict(certificate)
    verification = verify_certificate(gg, sd, sa, lm, word, certificate_from_dict(data))
    if not verification:
        raise InvariantBreach(f"certificate does not re-verify at step {verification.step}: {verification.reason}")

    report.update({
        "verdict": "separated",
        "word": format_word(gg, word),
        "depth": certificate.depth,
        "certificate": data,
        "verification": verification.to_dict(),
    })
    if getattr(args, 'quotient', False):
        with working(args, "[magenta]Enumerating cosets...[/magenta]"):
            quotient = build_explicit_quotient(
                gg, sd, sa, lm, word, certificate,
                max_cosets=settings.max_cosets, max_order=settings.max_quotient_order,
            )
        report["quotient"] = quotient.to_dict()
    return emit_report(report, args, _render)


def _render(report):
    certificate = report["certificate"]
    terminal = certificate["terminal"]
    if terminal["kind"] == "free":
        magnus = terminal["magnus"]
        witness = f"Magnus coefficient {magnus['coefficient']} on {magnus['monomial']} at degree {magnus['degree']}"
    else:
        witness = f"level value {terminal['scalar']}"
    print_panel(
        f"Word: {report['word']}\n"
        f"Depth: {report['depth']}\n"
        f"Witness: {witness}\n"
        f"Re-verified: {format_verdict(report['verification']['valid'], 'yes', 'no')}",
        title=f"Separated in a finite {certificate['prime']}-group",
    )
    rows = [
        [step["level"], step["outcome"], step["value"], len(step["word"]),
         len(step["rewritten"]["word"]) if "rewritten" in step else None]
        for step in certificate["steps"]
    ]
    if rows:
        console.print(create_table("Descent", ["Step", "Outcome", "Phi", "Word length", "Rewritten length"], rows))
    quotient = report.get("quotient")
    if quotient:
        print_panel(
            f"Order: {quotient['order']}\n"
            f"Cosets: {quotient['cosets']}\n"
            f"Relations checked: {quotient['relations_checked']}\n"
            f"Image of the word: {quotient['word_image']}",
            title="Explicit quotient",
        )
