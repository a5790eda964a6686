"""minicheck: the built-in demonstration static analyzer.

Analyzes MiniC, a small C-like language (signed int8/int16/int32
variables, assignments, if/while, asserts, and reads from external
functions), with a forward interval analysis.  It detects signed
overflow, narrowing-conversion overflow, division by zero, bad shift
amounts, uninitialized reads and assertion violations, and searches for
concrete witness inputs by bounded execution.

MiniC semantics in brief: arithmetic is evaluated in the promoted width
(the hardware int width, or the widest operand type if larger) and a
result outside that width's range is undefined behavior; assigning a
value outside the target type's range wraps (implementation-defined,
two's complement); division truncates toward zero like C; ``>>`` is an
arithmetic (floor) shift; shifts by negative amounts or by at least the
promoted width are undefined behavior; ``&&``/``||`` short-circuit and
yield 0/1.  Reads from undeclared external functions produce any value
of the target variable's type; declared externs can constrain the range
and may be marked ``monotone`` (successive reads never decrease).
"""

from asefkit.minicheck.analyzer import AnalysisSettings, analyze, analyze_program, eval_expr
from asefkit.minicheck.intervals import Interval
from asefkit.minicheck.lang import Program, parse_program, unparse_program
from asefkit.minicheck.report import (
    MC_CATEGORIES,
    NativeFinding,
    emit_native_report,
    parse_native_report,
)
from asefkit.minicheck.witness import Witness, find_witness

__all__ = [
    "AnalysisSettings",
    "Interval",
    "MC_CATEGORIES",
    "NativeFinding",
    "Program",
    "Witness",
    "analyze",
    "analyze_program",
    "emit_native_report",
    "eval_expr",
    "find_witness",
    "parse_native_report",
    "parse_program",
    "unparse_program",
]
