"""Concrete MiniC execution with wrapping semantics and event recording.

Used by the witness search: extern reads are driven from a per-site
value assignment, every runtime bad event is recorded, and execution
halts at undefined behavior (overflow, bad shift, division by zero),
uninitialized reads and failed assertions; narrowing-conversion
overflow wraps two's-complement style and continues, like real
hardware.  Reads from a monotone extern never decrease: the delivered
value is the maximum of the site's assigned value and the last value
the extern returned.
"""

from __future__ import annotations

from dataclasses import dataclass

from asefkit.asef.documents import HardwareTarget
from asefkit.minicheck.intervals import c_div, c_mod
from asefkit.minicheck.lang import (
    Assert,
    Assign,
    Binary,
    Decl,
    Expr,
    ExternAssign,
    If,
    IntLit,
    Program,
    Stmt,
    Unary,
    Var,
    While,
)


@dataclass(frozen=True)
class Event:
    category: str
    line: int
    column: int


class _Halt(Exception):
    pass


class _OutOfSteps(Exception):
    pass


_UNINIT = object()


def wrap(value: int, bits: int) -> int:
    half = 1 << (bits - 1)
    return (value + half) % (1 << bits) - half


class ConcreteRunner:
    def __init__(
        self,
        program: Program,
        hw: HardwareTarget,
        site_values: dict[tuple[int, int], int],
        max_steps: int = 2000,
    ):
        self.program = program
        self.hw = hw
        self.site_values = site_values
        self.max_steps = max_steps
        self.steps = 0
        self.events: list[Event] = []

    def run(self) -> tuple[list[Event], int]:
        """Execute every function; returns (events, steps used)."""
        for fn in self.program.functions:
            self.vars: dict[str, tuple[object, int]] = {}  # name -> (value, bits)
            self.extern_last: dict[str, int] = {}
            try:
                self._block(fn.body)
            except (_Halt, _OutOfSteps):
                continue
        return self.events, self.steps

    # -- helpers

    def _event(self, kind: str, line: int, column: int, halt: bool) -> None:
        self.events.append(Event(f"MC:{kind}", line, column))
        if halt:
            raise _Halt()

    def _width_of(self, bits: int) -> int:
        return max(self.hw.int_size_bits, bits)

    def _in_width(self, value: int, width: int) -> bool:
        half = 1 << (width - 1)
        return -half <= value < half

    # -- statements

    def _block(self, stmts: tuple[Stmt, ...]) -> None:
        for stmt in stmts:
            self._stmt(stmt)

    def _stmt(self, stmt: Stmt) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise _OutOfSteps()
        if isinstance(stmt, Decl):
            if stmt.init is None:
                self.vars[stmt.name] = (_UNINIT, stmt.type.bits)
            else:
                value, _w = self._expr(stmt.init)
                self._store(stmt.name, stmt.type.bits, value, stmt.pos)
        elif isinstance(stmt, Assign):
            bits = self._target_bits(stmt.name)
            value, _w = self._expr(stmt.value)
            self._store(stmt.name, bits, value, stmt.pos)
        elif isinstance(stmt, ExternAssign):
            bits = self._target_bits(stmt.name)
            value = self._extern_value(stmt)
            self._store(stmt.name, bits, value, stmt.pos)
        elif isinstance(stmt, Assert):
            value, _w = self._expr(stmt.cond)
            if value == 0:
                self._event("assert", stmt.pos.line, stmt.pos.column, halt=True)
        elif isinstance(stmt, If):
            value, _w = self._expr(stmt.cond)
            self._block(stmt.then_body if value != 0 else stmt.else_body)
        elif isinstance(stmt, While):
            while True:
                value, _w = self._expr(stmt.cond)
                if value == 0:
                    break
                self._block(stmt.body)
                self.steps += 1
                if self.steps > self.max_steps:
                    raise _OutOfSteps()
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {stmt!r}")

    def _target_bits(self, name: str) -> int:
        entry = self.vars.get(name)
        return entry[1] if entry is not None else 32  # implicit int32 on misuse

    def _store(self, name: str, bits: int, value: int, pos) -> None:
        wrapped = wrap(value, bits)
        if wrapped != value:
            self._event("conv-overflow", pos.line, pos.column, halt=False)
        self.vars[name] = (wrapped, bits)

    def _extern_value(self, stmt: ExternAssign) -> int:
        site = (stmt.pos.line, stmt.pos.column)
        value = self.site_values.get(site, 0)
        decl = self.program.extern(stmt.extern_name)
        if decl is not None and decl.monotone:
            last = self.extern_last.get(stmt.extern_name)
            if last is not None:
                value = max(value, last)
            self.extern_last[stmt.extern_name] = value
        return value

    # -- expressions: returns (value, promoted width)

    def _expr(self, e: Expr) -> tuple[int, int]:
        if isinstance(e, IntLit):
            return e.value, self.hw.int_size_bits
        if isinstance(e, Var):
            entry = self.vars.get(e.name)
            if entry is None or entry[0] is _UNINIT:
                self._event("uninit-read", e.pos.line, e.pos.column, halt=True)
            value, bits = entry  # type: ignore[misc]
            return value, self._width_of(bits)
        if isinstance(e, Unary):
            value, width = self._expr(e.operand)
            result = -value
            if not self._in_width(result, width):
                self._event("signed-overflow", e.pos.line, e.pos.column, halt=True)
            return result, width
        if isinstance(e, Binary):
            return self._binary(e)
        raise TypeError(f"unknown expression {e!r}")  # pragma: no cover

    def _binary(self, e: Binary) -> tuple[int, int]:
        if e.op == "&&":
            lv, _ = self._expr(e.left)
            if lv == 0:
                return 0, self.hw.int_size_bits
            rv, _ = self._expr(e.right)
            return (1 if rv != 0 else 0), self.hw.int_size_bits
        if e.op == "||":
            lv, _ = self._expr(e.left)
            if lv != 0:
                return 1, self.hw.int_size_bits
            rv, _ = self._expr(e.right)
            return (1 if rv != 0 else 0), self.hw.int_size_bits

        lv, lw = self._expr(e.left)
        rv, rw = self._expr(e.right)
        width = max(lw, rw)
        line, col = e.pos.line, e.pos.column

        if e.op in ("<", "<=", ">", ">=", "==", "!="):
            ok = {
                "<": lv < rv, "<=": lv <= rv, ">": lv > rv,
                ">=": lv >= rv, "==": lv == rv, "!=": lv != rv,
            }[e.op]
            return (1 if ok else 0), self.hw.int_size_bits

        if e.op in ("+", "-", "*"):
            result = {"+": lv + rv, "-": lv - rv, "*": lv * rv}[e.op]
        elif e.op in ("/", "%"):
            if rv == 0:
                self._event("div-zero", line, col, halt=True)
            quotient = c_div(lv, rv)
            if not self._in_width(quotient, width):
                self._event("signed-overflow", line, col, halt=True)
            result = quotient if e.op == "/" else c_mod(lv, rv)
            return result, width
        elif e.op in ("<<", ">>"):
            if rv < 0:
                self._event("shift-negative", line, col, halt=True)
            if rv >= width:
                self._event("shift-amount", line, col, halt=True)
            result = lv << rv if e.op == "<<" else lv >> rv
            if e.op == ">>":
                return result, width
        else:  # pragma: no cover
            raise ValueError(f"unknown operator {e.op!r}")

        if not self._in_width(result, width):
            self._event("signed-overflow", line, col, halt=True)
        return result, width
