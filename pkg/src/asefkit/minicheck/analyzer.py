"""Forward interval analysis over MiniC programs.

Each function is analyzed separately: states are joined at control-flow
merges, loop heads iterate to a fixpoint with widening to type bounds
after WIDEN_AFTER unstable iterations (no narrowing pass), and branch
conditions refine variable intervals on both sides.  Arithmetic is
evaluated at the promoted width (hardware int width or the widest
operand type) and checked there.

Findings are collected in a dedicated reporting pass that traverses
loop bodies once with their stabilized head states, so each program
point yields at most one finding per check kind and verdicts reflect
the fixpoint, not a transient iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

from asefkit.asef.documents import HardwareTarget
from asefkit.minicheck import intervals as ivl
from asefkit.minicheck.domain import (
    AbstractState,
    VarState,
    join_states,
    state_leq,
    widen_states,
)
from asefkit.minicheck.intervals import Interval
from asefkit.minicheck.lang import (
    ARITH_OPS,
    COMPARE_OPS,
    Assert,
    Assign,
    Binary,
    Decl,
    Expr,
    ExternAssign,
    If,
    IntLit,
    IntType,
    Pos,
    Program,
    Stmt,
    Unary,
    Var,
    While,
)
from asefkit.minicheck.report import NativeFinding, sort_findings

WIDEN_AFTER = 3

_NEGATED = {"<": ">=", "<=": ">", ">": "<=", ">=": "<", "==": "!=", "!=": "=="}


@dataclass
class AnalysisSettings:
    hardware: HardwareTarget
    emit_safe: bool = False
    search_witnesses: bool = True
    witness_budget: int = 200_000


@dataclass
class _Value:
    interval: Interval | None  # None: unreachable (empty) result
    width: int


def _width_range(width: int) -> Interval:
    return Interval(-(1 << (width - 1)), (1 << (width - 1)) - 1)


class _Sink:
    def __init__(self, collect: bool):
        self.collect = collect
        self.findings: list[NativeFinding] = []

    def add(self, finding: NativeFinding) -> None:
        if self.collect:
            self.findings.append(finding)


class Analyzer:
    def __init__(self, program: Program, hw: HardwareTarget, emit_safe: bool = False):
        self.program = program
        self.hw = hw
        self.emit_safe = emit_safe
        self.int_width = hw.int_size_bits
        self.state_updates = 0

    # -- findings

    def _finding(
        self, kind: str, pos: Pos, verdict: str, message: str
    ) -> NativeFinding:
        return NativeFinding(
            native_category=f"MC:{kind}",
            file=self.program.path,
            line=pos.line,
            column=pos.column,
            verdict=verdict,
            message=message,
        )

    def _range_check(
        self,
        kind: str,
        result: Interval,
        rng: Interval,
        pos: Pos,
        sink: _Sink,
        describe: str,
    ) -> Interval | None:
        """Report values of ``result`` outside ``rng``; continue inside it."""
        if rng.contains_interval(result):
            if self.emit_safe:
                sink.add(self._finding(kind, pos, "proven-safe", f"{describe}: in range"))
            return result
        inside = result.meet(rng)
        verdict = "proven-unsafe" if inside is None else "undecided"
        sink.add(
            self._finding(
                kind, pos, verdict, f"{describe}: result {result} exceeds {rng}"
            )
        )
        return inside

    # -- expression evaluation

    def eval(self, e: Expr, state: AbstractState, sink: _Sink) -> _Value:
        if isinstance(e, IntLit):
            return _Value(Interval.point(e.value), self.int_width)
        if isinstance(e, Var):
            return self._eval_var(e, state, sink)
        if isinstance(e, Unary):
            return self._eval_neg(e, state, sink)
        if isinstance(e, Binary):
            return self._eval_binary(e, state, sink)
        raise TypeError(f"unknown expression {e!r}")  # pragma: no cover

    def _eval_var(self, e: Var, state: AbstractState, sink: _Sink) -> _Value:
        vs = state.vars.get(e.name)
        if vs is None:
            sink.add(
                self._finding(
                    "uninit-read",
                    e.pos,
                    "syntactic-violation",
                    f"variable '{e.name}' is used before its declaration",
                )
            )
            return _Value(_width_range(self.int_width), self.int_width)
        if vs.may_uninit:
            verdict = "proven-unsafe" if vs.interval is None else "undecided"
            sink.add(
                self._finding(
                    "uninit-read",
                    e.pos,
                    verdict,
                    f"'{e.name}' may be read before initialization",
                )
            )
        elif self.emit_safe:
            sink.add(
                self._finding(
                    "uninit-read",
                    e.pos,
                    "proven-safe",
                    f"'{e.name}' is initialized on every path",
                )
            )
        width = max(self.int_width, vs.type.bits)
        return _Value(vs.value_or_type_range(), width)

    def _eval_neg(self, e: Unary, state: AbstractState, sink: _Sink) -> _Value:
        operand = self.eval(e.operand, state, sink)
        if operand.interval is None:
            return operand
        rng = _width_range(operand.width)
        result = self._range_check(
            "signed-overflow", ivl.neg(operand.interval), rng, e.pos, sink, "negation"
        )
        return _Value(result, operand.width)

    def _eval_binary(self, e: Binary, state: AbstractState, sink: _Sink) -> _Value:
        left = self.eval(e.left, state, sink)
        right = self.eval(e.right, state, sink)
        if left.interval is None or right.interval is None:
            return _Value(None, max(left.width, right.width))
        li, ri = left.interval, right.interval
        width = max(left.width, right.width)
        rng = _width_range(width)
        op = e.op

        if op in ("+", "-", "*"):
            raw = {"+": ivl.add, "-": ivl.sub, "*": ivl.mul}[op](li, ri)
            if op == "-":
                raw = self._monotone_clamp(e, state, raw)
                if raw is None:
                    return _Value(None, width)
            result = self._range_check(
                "signed-overflow", raw, rng, e.pos, sink, f"'{op}'"
            )
            return _Value(result, width)

        if op in ("/", "%"):
            self._check_div(op, li, ri, rng, e.pos, sink)
            raw = (ivl.div if op == "/" else ivl.mod)(li, ri)
            result = raw.meet(rng) if raw is not None else None
            return _Value(result, width)

        if op in ("<<", ">>"):
            self._check_shift(ri, width, e.pos, sink)
            raw = (ivl.shl if op == "<<" else ivl.shr)(li, ri, width)
            if raw is None:
                return _Value(None, width)
            if op == "<<":
                raw = self._range_check("signed-overflow", raw, rng, e.pos, sink, "'<<'")
            return _Value(raw, width)

        if op in COMPARE_OPS:
            result = ivl.compare(op, li, ri)
            if result is ivl.UNKNOWN:
                result = self._fact_compare(op, e, state) or result
            return _Value(result, self.int_width)

        if op in ("&&", "||"):
            return _Value(ivl.logic(op, li, ri), self.int_width)

        raise ValueError(f"unknown operator {op!r}")  # pragma: no cover

    def _monotone_clamp(
        self, e: Binary, state: AbstractState, raw: Interval
    ) -> Interval | None:
        """Tighten a - b using recorded read-order facts."""
        if not (isinstance(e.left, Var) and isinstance(e.right, Var)):
            return raw
        a, b = e.left.name, e.right.name
        if (b, a) in state.facts:  # b <= a, so a - b >= 0
            if raw.hi < 0:
                return None
            raw = Interval(max(raw.lo, 0), raw.hi)
        if (a, b) in state.facts:  # a <= b, so a - b <= 0
            if raw.lo > 0:
                return None
            raw = Interval(raw.lo, min(raw.hi, 0))
        return raw

    def _fact_compare(self, op: str, e: Binary, state: AbstractState) -> Interval | None:
        if not (isinstance(e.left, Var) and isinstance(e.right, Var)):
            return None
        a, b = e.left.name, e.right.name
        le, ge = (a, b) in state.facts, (b, a) in state.facts
        if op == "<=" and le:
            return ivl.TRUE
        if op == ">=" and ge:
            return ivl.TRUE
        if op == "<" and ge:
            return ivl.FALSE
        if op == ">" and le:
            return ivl.FALSE
        if op == "==" and le and ge:
            return ivl.TRUE
        if op == "!=" and le and ge:
            return ivl.FALSE
        return None

    def _check_div(
        self, op: str, li: Interval, ri: Interval, rng: Interval, pos: Pos, sink: _Sink
    ) -> None:
        if 0 in ri:
            verdict = "proven-unsafe" if ri == Interval.point(0) else "undecided"
            sink.add(
                self._finding(
                    "div-zero", pos, verdict, f"divisor {ri} may be zero"
                )
            )
        elif self.emit_safe:
            sink.add(self._finding("div-zero", pos, "proven-safe", "divisor is nonzero"))
        # INT_MIN / -1 is the one division overflow.
        if rng.lo in li and -1 in ri:
            certain = li == Interval.point(rng.lo) and ri == Interval.point(-1)
            sink.add(
                self._finding(
                    "signed-overflow",
                    pos,
                    "proven-unsafe" if certain else "undecided",
                    f"'{op}' of {rng.lo} by -1 overflows",
                )
            )
        elif self.emit_safe:
            sink.add(
                self._finding("signed-overflow", pos, "proven-safe", f"'{op}' cannot overflow")
            )

    def _check_shift(self, ri: Interval, width: int, pos: Pos, sink: _Sink) -> None:
        if ri.lo < 0:
            verdict = "proven-unsafe" if ri.hi < 0 else "undecided"
            sink.add(
                self._finding(
                    "shift-negative", pos, verdict, f"shift amount {ri} may be negative"
                )
            )
        elif self.emit_safe:
            sink.add(
                self._finding("shift-negative", pos, "proven-safe", "shift amount is nonnegative")
            )
        if ri.hi >= width:
            verdict = "proven-unsafe" if ri.lo >= width else "undecided"
            sink.add(
                self._finding(
                    "shift-amount",
                    pos,
                    verdict,
                    f"shift amount {ri} may reach the promoted width {width}",
                )
            )
        elif self.emit_safe:
            sink.add(
                self._finding(
                    "shift-amount", pos, "proven-safe", f"shift amount is below {width}"
                )
            )

    # -- branch refinement

    def refine(
        self, state: AbstractState | None, cond: Expr, want_true: bool
    ) -> AbstractState | None:
        if state is None:
            return None
        quiet = _Sink(collect=False)
        value = self.eval(cond, state, quiet)
        if value.interval is None:
            return None
        truth = ivl.truthiness(value.interval)
        if truth is ivl.TRUE and not want_true:
            return None
        if truth is ivl.FALSE and want_true:
            return None

        if isinstance(cond, Var):
            op = "!=" if want_true else "=="
            return self._refine_compare(state, op, cond, IntLit(0, cond.pos))
        if isinstance(cond, Binary):
            if cond.op == "&&":
                return self._refine_and(state, cond.left, cond.right, want_true)
            if cond.op == "||":
                return self._refine_and_dual(state, cond.left, cond.right, want_true)
            if cond.op in COMPARE_OPS:
                op = cond.op if want_true else _NEGATED[cond.op]
                return self._refine_compare(state, op, cond.left, cond.right)
        return state.copy()

    def _refine_and(self, state, left, right, want_true):
        if want_true:
            s = self.refine(state, left, True)
            return self.refine(s, right, True)
        # not (A and B) == (not A) or (A and not B)
        not_a = self.refine(state, left, False)
        a = self.refine(state, left, True)
        a_not_b = self.refine(a, right, False)
        return join_states(not_a, a_not_b)

    def _refine_and_dual(self, state, left, right, want_true):
        if not want_true:
            s = self.refine(state, left, False)
            return self.refine(s, right, False)
        a = self.refine(state, left, True)
        not_a = self.refine(state, left, False)
        not_a_b = self.refine(not_a, right, True)
        return join_states(a, not_a_b)

    def _refine_compare(
        self, state: AbstractState, op: str, left: Expr, right: Expr
    ) -> AbstractState | None:
        quiet = _Sink(collect=False)
        lv = self.eval(left, state, quiet).interval
        rv = self.eval(right, state, quiet).interval
        if lv is None or rv is None:
            return None
        out = state.copy()
        if isinstance(left, Var) and left.name in out.vars:
            narrowed = _constrain(lv, op, rv)
            if narrowed is None:
                return None
            vs = out.vars[left.name]
            out.vars[left.name] = VarState(vs.type, narrowed, vs.may_uninit)
        if isinstance(right, Var) and right.name in out.vars:
            narrowed = _constrain(rv, _swap_sides(op), lv)
            if narrowed is None:
                return None
            vs = out.vars[right.name]
            out.vars[right.name] = VarState(vs.type, narrowed, vs.may_uninit)
        return out

    # -- statements

    def exec_block(
        self, state: AbstractState | None, stmts: tuple[Stmt, ...], sink: _Sink
    ) -> AbstractState | None:
        for stmt in stmts:
            if state is None:
                return None
            state = self.exec_stmt(state, stmt, sink)
        return state

    def exec_stmt(
        self, state: AbstractState, stmt: Stmt, sink: _Sink
    ) -> AbstractState | None:
        self.state_updates += 1
        if isinstance(stmt, Decl):
            return self._exec_decl(state, stmt, sink)
        if isinstance(stmt, Assign):
            return self._exec_assign(state, stmt, sink)
        if isinstance(stmt, ExternAssign):
            return self._exec_extern_assign(state, stmt, sink)
        if isinstance(stmt, Assert):
            return self._exec_assert(state, stmt, sink)
        if isinstance(stmt, If):
            return self._exec_if(state, stmt, sink)
        if isinstance(stmt, While):
            return self._exec_while(state, stmt, sink)
        raise TypeError(f"unknown statement {stmt!r}")  # pragma: no cover

    def _convert(
        self, value: _Value, target: IntType, pos: Pos, sink: _Sink
    ) -> Interval | None:
        assert value.interval is not None
        rng = Interval(target.lo, target.hi)
        if rng.contains_interval(value.interval):
            if self.emit_safe and value.width > target.bits:
                sink.add(
                    self._finding(
                        "conv-overflow", pos, "proven-safe",
                        f"value fits {target.name}",
                    )
                )
            return value.interval
        inside = value.interval.meet(rng)
        verdict = "proven-unsafe" if inside is None else "undecided"
        sink.add(
            self._finding(
                "conv-overflow",
                pos,
                verdict,
                f"value {value.interval} exceeds {target.name} range {rng}",
            )
        )
        return rng

    def _declare_implicit(self, state: AbstractState, name: str, pos: Pos, sink: _Sink) -> None:
        from asefkit.minicheck.lang import INT32

        sink.add(
            self._finding(
                "uninit-read",
                pos,
                "syntactic-violation",
                f"variable '{name}' is assigned before its declaration",
            )
        )
        state.set_var(name, VarState.uninitialized(INT32))

    def _exec_decl(self, state: AbstractState, stmt: Decl, sink: _Sink):
        out = state.copy()
        out.kill_var_facts(stmt.name)
        if stmt.init is None:
            out.set_var(stmt.name, VarState.uninitialized(stmt.type))
            return out
        value = self.eval(stmt.init, state, sink)
        if value.interval is None:
            return None
        stored = self._convert(value, stmt.type, stmt.pos, sink)
        out.set_var(stmt.name, VarState.initialized(stmt.type, stored))
        return out

    def _exec_assign(self, state: AbstractState, stmt: Assign, sink: _Sink):
        out = state.copy()
        if stmt.name not in out.vars:
            self._declare_implicit(out, stmt.name, stmt.pos, sink)
        target = out.vars[stmt.name].type
        value = self.eval(stmt.value, out, sink)
        if value.interval is None:
            return None
        stored = self._convert(value, target, stmt.pos, sink)

        source = stmt.value.name if isinstance(stmt.value, Var) else None
        preserved = (
            source is not None
            and source in out.vars
            and stored == value.interval  # no wrap possible
        )
        if source == stmt.name:
            return out  # self-assignment: value and facts unchanged
        out.kill_var_facts(stmt.name)
        out.set_var(stmt.name, VarState.initialized(target, stored))
        if preserved and source is not None:
            for x, y in list(out.facts):
                if x == source:
                    out.facts.add((stmt.name, y))
                if y == source:
                    out.facts.add((x, stmt.name))
            out.facts.add((stmt.name, source))
            out.facts.add((source, stmt.name))
            if source in out.prov:
                out.prov[stmt.name] = out.prov[source]
        return out

    def _exec_extern_assign(self, state: AbstractState, stmt: ExternAssign, sink: _Sink):
        out = state.copy()
        if stmt.name not in out.vars:
            self._declare_implicit(out, stmt.name, stmt.pos, sink)
        target = out.vars[stmt.name].type
        decl = self.program.extern(stmt.extern_name)
        if decl is not None:
            lo, hi = decl.bounds()
            value = _Value(Interval(lo, hi), max(self.int_width, decl.type.bits))
        else:
            value = _Value(Interval(target.lo, target.hi), max(self.int_width, target.bits))
        stored = self._convert(value, target, stmt.pos, sink)
        monotone = (
            decl is not None and decl.monotone and stored == value.interval
        )
        earlier = [
            name
            for name, ext in out.prov.items()
            if ext == stmt.extern_name and name != stmt.name
        ]
        out.kill_var_facts(stmt.name)
        out.set_var(stmt.name, VarState.initialized(target, stored))
        if monotone:
            for name in earlier:
                out.facts.add((name, stmt.name))
            out.prov[stmt.name] = stmt.extern_name
        return out

    def _exec_assert(self, state: AbstractState, stmt: Assert, sink: _Sink):
        self.eval(stmt.cond, state, sink)
        can_be_false = self.refine(state, stmt.cond, False)
        can_be_true = self.refine(state, stmt.cond, True)
        if can_be_false is None:
            verdict = "proven-safe"
            message = "assertion holds on every path"
        elif can_be_true is None:
            verdict = "proven-unsafe"
            message = "assertion fails on every path reaching it"
        else:
            verdict = "undecided"
            message = "assertion may fail"
        if verdict != "proven-safe" or self.emit_safe:
            sink.add(self._finding("assert", stmt.pos, verdict, message))
        return can_be_true

    def _exec_if(self, state: AbstractState, stmt: If, sink: _Sink):
        self.eval(stmt.cond, state, sink)
        then_in = self.refine(state, stmt.cond, True)
        else_in = self.refine(state, stmt.cond, False)
        then_out = self.exec_block(then_in, stmt.then_body, sink)
        else_out = self.exec_block(else_in, stmt.else_body, sink)
        return join_states(then_out, else_out)

    def _exec_while(self, state: AbstractState, stmt: While, sink: _Sink):
        quiet = _Sink(collect=False)
        head = state
        iterations = 0
        while True:
            body_in = self.refine(head, stmt.cond, True)
            body_out = self.exec_block(body_in, stmt.body, quiet)
            nxt = join_states(state, body_out)
            assert nxt is not None
            if state_leq(nxt, head):
                break
            head = widen_states(head, nxt) if iterations >= WIDEN_AFTER else nxt
            iterations += 1

        if sink.collect:
            self.eval(stmt.cond, head, sink)
            body_in = self.refine(head, stmt.cond, True)
            if body_in is not None:
                self.exec_block(body_in, stmt.body, sink)
        return self.refine(head, stmt.cond, False)

    # -- entry points

    def run(self) -> list[NativeFinding]:
        sink = _Sink(collect=True)
        for fn in self.program.functions:
            self.exec_block(AbstractState(), fn.body, sink)
        return sort_findings(sink.findings)


def analyze(program: Program, hw: HardwareTarget, emit_safe: bool = False) -> list[NativeFinding]:
    """Interval analysis only; no witness search."""
    return Analyzer(program, hw, emit_safe).run()


def eval_expr(
    e: Expr, state: AbstractState, hw: HardwareTarget, emit_safe: bool = False
) -> tuple[Interval | None, list[NativeFinding]]:
    """Evaluate one expression in a given abstract state."""
    analyzer = Analyzer(Program((), (), "<expr>"), hw, emit_safe)
    sink = _Sink(collect=True)
    value = analyzer.eval(e, state, sink)
    return value.interval, sink.findings


def analyze_program(program: Program, settings: AnalysisSettings) -> list[NativeFinding]:
    """Analysis plus bounded witness search for the non-safe findings.

    An undecided finding whose witness replays to the bad state is
    upgraded to proven-unsafe; proven-unsafe findings get their witness
    attached when the search finds one.
    """
    from asefkit.minicheck.witness import find_witness

    findings = analyze(program, settings.hardware, settings.emit_safe)
    if not settings.search_witnesses:
        return findings
    out: list[NativeFinding] = []
    for finding in findings:
        if finding.verdict in ("proven-unsafe", "undecided"):
            witness = find_witness(
                program, finding, settings.hardware, settings.witness_budget
            )
            if witness is not None:
                finding = finding.with_witness(witness.values)
        out.append(finding)
    return out


def _swap_sides(op: str) -> str:
    return {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}[op]


def _constrain(a: Interval, op: str, b: Interval) -> Interval | None:
    """The subset of a for which ``a op b`` can hold."""
    lo, hi = a.lo, a.hi
    if op == "<":
        hi = min(hi, b.hi - 1)
    elif op == "<=":
        hi = min(hi, b.hi)
    elif op == ">":
        lo = max(lo, b.lo + 1)
    elif op == ">=":
        lo = max(lo, b.lo)
    elif op == "==":
        lo, hi = max(lo, b.lo), min(hi, b.hi)
    elif op == "!=":
        if b.is_point():
            if a.is_point() and a.lo == b.lo:
                return None
            if b.lo == lo:
                lo += 1
            elif b.lo == hi:
                hi -= 1
    else:  # pragma: no cover
        raise ValueError(f"not a comparison operator: {op}")
    return Interval(lo, hi) if lo <= hi else None
