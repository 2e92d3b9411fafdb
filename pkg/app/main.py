# app/main.py
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from app.command_runner import CommandRunner
from bundles.bundle_store import dump_bundle
from bundles.library import builtin_bundle, builtin_names
from core import __version__
from core.errors import ConstructionError, DegreeError, DimensionError, ExprSyntaxError, SchemaError
from core.report import Report
from utils.logger import logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2

# Bad input: the command never got as far as checking anything
INPUT_ERRORS = (SchemaError, ExprSyntaxError, DimensionError, DegreeError, OSError, json.JSONDecodeError)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", "-i", help="bundle JSON file")
    common.add_argument("--json", dest="json_path", help="also write the report as JSON to this path")
    common.add_argument("--quiet", "-q", action="store_true", help="no summary on stdout")

    parser = argparse.ArgumentParser(prog="lca", description="Exact checks for averaging Lie conformal algebras")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="skew-symmetry and Jacobi (or associativity)")
    p.add_argument("--algebra", default="default")

    p = sub.add_parser("avg-check", parents=[common], help="averaging identity of an operator")
    p.add_argument("--algebra", default="default")
    p.add_argument("--op", help="map name; defaults to the algebra's operator")
    p.add_argument("--two-sided", action="store_true")
    p.add_argument("--induced", action="store_true", help="also check the induced bracket")

    p = sub.add_parser("rep-check", parents=[common], help="module and averaging module axioms")
    p.add_argument("--rep", default="default")
    p.add_argument("--semidirect", action="store_true", help="check the three semidirect-sum operators")
    p.add_argument("--tensor", help="map name of an embedding tensor to check and lift")

    p = sub.add_parser("cohom", parents=[common], help="coboundaries, brackets and Maurer-Cartan checks")
    p.add_argument("action", choices=["delta", "delta-ao", "xi", "dal", "nr", "mc"])
    p.add_argument("--cochain")
    p.add_argument("--cochain2")
    p.add_argument("--cochain3")
    p.add_argument("--pair")
    p.add_argument("--rep", default="default")

    p = sub.add_parser("twoterm", parents=[common], help="two-term structures with homotopy operators")
    p.add_argument("action", choices=["check", "classify", "to-crossed", "to-cocycle", "direct-sum"])
    p.add_argument("--two-term", default="default")
    p.add_argument("--morphism")
    p.add_argument("--literal", action="store_true", help="also report the literal variants of the l3 identities")

    p = sub.add_parser("crossed", parents=[common], help="crossed modules of averaging algebras")
    p.add_argument("action", choices=["check", "direct-sum", "to-strict"])
    p.add_argument("--crossed", default="default")

    p = sub.add_parser("ext", parents=[common], help="non-abelian extensions")
    p.add_argument("action", choices=["check-cocycle", "build", "extract", "equiv"])
    p.add_argument("--cocycle", default="default")
    p.add_argument("--cocycle2")
    p.add_argument("--extension")
    p.add_argument("--extension2")
    p.add_argument("--tau", help="map name of the equivalence witness")
    p.add_argument("--map", help="map name of an extension equivalence")
    p.add_argument("--section")

    p = sub.add_parser("wells", parents=[common], help="extendability of an automorphism pair")
    p.add_argument("--aut-pair")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--tau")
    p.add_argument("--gamma", help="automorphism of the extension; its restriction is checked")
    p.add_argument("--extension")
    p.add_argument("--cocycle", default="default")

    p = sub.add_parser("solve-tau", parents=[common], help="search an equivalence witness (abelian fiber)")
    p.add_argument("--cocycle", default="default")
    p.add_argument("--cocycle2", required=True)
    p.add_argument("--cap", type=int, help="maximal D-degree of the entries")

    p = sub.add_parser("builtin", help="print a builtin bundle")
    p.add_argument("name", choices=builtin_names())
    p.add_argument("--output", "-o", help="write to this path instead of stdout")
    return parser


class LcaApp:
    """One invocation of the command line."""

    def __init__(self, args: argparse.Namespace):
        self.args = args

    def builtin(self) -> int:
        text = dump_bundle(builtin_bundle(self.args.name))
        if self.args.output:
            Path(self.args.output).write_text(text, encoding="utf-8")
            logger.info(f"✅ Wrote builtin {self.args.name} to {self.args.output}")
        else:
            sys.stdout.write(text)
        return EXIT_OK

    def emit(self, report: Report) -> None:
        if not self.args.quiet:
            print("\n".join(report.summary_lines()))
        if self.args.json_path:
            Path(self.args.json_path).write_text(report.to_json() + "\n", encoding="utf-8")
            logger.info(f"📋 Report written to {self.args.json_path}")

    def run(self) -> Tuple[int, Optional[Report]]:
        if self.args.command == "builtin":
            return self.builtin(), None
        report = CommandRunner(self.args).run()
        self.emit(report)
        return (EXIT_OK if report.passed else EXIT_FAILED), report


def run_command(argv: Sequence[str]) -> Tuple[int, Optional[Report]]:
    """Parse ``argv`` and run it; returns the exit code and the report, if any."""
    args = build_parser().parse_args(list(argv))
    try:
        return LcaApp(args).run()
    except INPUT_ERRORS as e:
        logger.error(f"❌ {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT, None
    except ConstructionError as e:
        logger.error(f"❌ {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED, None


def main(argv: Optional[List[str]] = None) -> None:
    """Entry point for the ``lca`` command."""
    code, _ = run_command(sys.argv[1:] if argv is None else argv)
    sys.exit(code)


if __name__ == "__main__":
    main()
