"""Command line entry for the built-in analyzer.

Exit code 0 means the analysis completed, regardless of findings;
nonzero means the analysis itself failed (missing file, syntax error).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from asefkit.asef.documents import Endianness, HardwareTarget
from asefkit.errors import AsefkitError
from asefkit.minicheck.analyzer import AnalysisSettings, analyze_program
from asefkit.minicheck.lang import parse_program
from asefkit.minicheck.report import NativeFinding, emit_native_report, sort_findings


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minicheck",
        description="Interval analysis for MiniC source files.",
    )
    parser.add_argument("sources", nargs="+", help="MiniC source files (.mc)")
    parser.add_argument("--int-bits", type=int, default=32, choices=(8, 16, 32, 64))
    parser.add_argument("--short-bits", type=int, default=16, choices=(8, 16, 32, 64))
    parser.add_argument("--pointer-bits", type=int, default=32, choices=(8, 16, 32, 64))
    parser.add_argument("--endianness", default="little", choices=("little", "big"))
    parser.add_argument("--out", help="native report output path (default: stdout)")
    parser.add_argument(
        "--emit-safe",
        action="store_true",
        help="include proven-safe findings in the report",
    )
    parser.add_argument(
        "--witness-budget",
        type=int,
        default=200_000,
        help="total concrete steps for the witness search (0 disables it)",
    )
    return parser


def run(args: argparse.Namespace) -> list[NativeFinding]:
    hw = HardwareTarget(
        id="cli",
        pointer_size_bits=args.pointer_bits,
        endianness=Endianness(args.endianness),
        int_size_bits=args.int_bits,
        short_size_bits=args.short_bits,
    )
    settings = AnalysisSettings(
        hardware=hw,
        emit_safe=args.emit_safe,
        search_witnesses=args.witness_budget > 0,
        witness_budget=args.witness_budget,
    )
    findings: list[NativeFinding] = []
    for source in args.sources:
        path = Path(source)
        text = path.read_text(encoding="utf-8")
        program = parse_program(text, path=source)
        findings.extend(analyze_program(program, settings))
    return sort_findings(findings)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        findings = run(args)
    except (OSError, AsefkitError) as exc:
        print(f"minicheck: {exc}", file=sys.stderr)
        return 1
    text = emit_native_report(findings)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
