"""MiniC lexer, AST and recursive-descent parser.

Grammar (C precedence, one comparison level split into equality and
relational as in C):

    program   := (extern_decl | function)*
    extern    := "extern" type IDENT "(" ")" ["monotone"]
                 ["range" "[" sint "," sint "]"] ";"
    function  := "void" IDENT "(" ")" block
    block     := "{" stmt* "}"
    stmt      := type IDENT ["=" expr] ";"          declaration
               | IDENT "=" IDENT "(" ")" ";"        read from an extern
               | IDENT "=" expr ";"                 assignment
               | "if" "(" expr ")" block ["else" (block | if-stmt)]
               | "while" "(" expr ")" block
               | "assert" "(" expr ")" ";"
    expr      := or;  or := and ("||" and)*;  and := eq ("&&" eq)*
    eq        := rel (("=="|"!=") rel)*
    rel       := shift (("<"|"<="|">"|">=") shift)*
    shift     := add (("<<"|">>") add)*
    add       := mul (("+"|"-") mul)*
    mul       := unary (("*"|"/"|"%") unary)*
    unary     := "-" unary | INT | IDENT | "(" expr ")"

Types are signed int8/int16/int32.  Comments are ``//`` and ``/* */``.
Every AST node carries its source position (1-based line, 0-based
column); positions do not participate in node equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union

from asefkit.errors import DocumentSyntaxError


@dataclass(frozen=True)
class Pos:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class IntType:
    name: str
    bits: int

    @property
    def lo(self) -> int:
        return -(1 << (self.bits - 1))

    @property
    def hi(self) -> int:
        return (1 << (self.bits - 1)) - 1


INT8 = IntType("int8", 8)
INT16 = IntType("int16", 16)
INT32 = IntType("int32", 32)
TYPES = {t.name: t for t in (INT8, INT16, INT32)}


# --- AST -----------------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class Unary:
    op: str  # "-"
    operand: "Expr"
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = field(compare=False)


Expr = Union[IntLit, Var, Unary, Binary]

ARITH_OPS = ("+", "-", "*", "/", "%", "<<", ">>")
COMPARE_OPS = ("<", "<=", ">", ">=", "==", "!=")
LOGIC_OPS = ("&&", "||")


@dataclass(frozen=True)
class Decl:
    type: IntType
    name: str
    init: Expr | None
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class ExternAssign:
    name: str
    extern_name: str
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class If:
    cond: Expr
    then_body: tuple["Stmt", ...]
    else_body: tuple["Stmt", ...]
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple["Stmt", ...]
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class Assert:
    cond: Expr
    pos: Pos = field(compare=False)


Stmt = Union[Decl, Assign, ExternAssign, If, While, Assert]


@dataclass(frozen=True)
class ExternDecl:
    name: str
    type: IntType
    monotone: bool = False
    value_range: tuple[int, int] | None = None
    pos: Pos = field(default=Pos(1, 0), compare=False)

    def bounds(self) -> tuple[int, int]:
        if self.value_range is not None:
            return self.value_range
        return self.type.lo, self.type.hi


@dataclass(frozen=True)
class Function:
    name: str
    body: tuple[Stmt, ...]
    pos: Pos = field(compare=False)


@dataclass(frozen=True)
class Program:
    externs: tuple[ExternDecl, ...]
    functions: tuple[Function, ...]
    path: str = "<input>"

    def extern(self, name: str) -> ExternDecl | None:
        for decl in self.externs:
            if decl.name == name:
                return decl
        return None


# --- lexer ---------------------------------------------------------------------

KEYWORDS = {"void", "if", "else", "while", "assert", "extern", "monotone", "range"} | set(TYPES)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><<|>>|<=|>=|==|!=|&&|\|\||[-+*/%<>=(){}\[\],;])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int" | "ident" | "kw" | "op" | "eof"
    text: str
    pos: Pos


def tokenize(text: str, path: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    index = 0
    line = 1
    line_start = 0
    while index < len(text):
        m = _TOKEN_RE.match(text, index)
        if m is None:
            col = index - line_start
            raise DocumentSyntaxError(f"{path}:{line}:{col}: unexpected character {text[index]!r}")
        pos = Pos(line, index - line_start)
        kind = m.lastgroup or ""
        raw = m.group()
        if kind in ("ws", "line_comment", "block_comment"):
            newlines = raw.count("\n")
            if newlines:
                line += newlines
                line_start = index + raw.rfind("\n") + 1
        elif kind == "int":
            tokens.append(Token("int", raw, pos))
        elif kind == "ident":
            tokens.append(Token("kw" if raw in KEYWORDS else "ident", raw, pos))
        else:
            tokens.append(Token("op", raw, pos))
        index = m.end()
    tokens.append(Token("eof", "", Pos(line, index - line_start)))
    return tokens


# --- parser --------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token], path: str):
        self.tokens = tokens
        self.path = path
        self.index = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.index]

    def error(self, message: str, tok: Token | None = None) -> DocumentSyntaxError:
        tok = tok or self.cur
        return DocumentSyntaxError(f"{self.path}:{tok.pos.line}:{tok.pos.column}: {message}")

    def advance(self) -> Token:
        tok = self.cur
        self.index += 1
        return tok

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        if self.cur.kind == kind and (text is None or self.cur.text == text):
            return self.advance()
        return None

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.accept(kind, text)
        if tok is None:
            wanted = text or kind
            raise self.error(f"expected {wanted!r}, got {self.cur.text or 'end of input'!r}")
        return tok

    # -- toplevel

    def program(self) -> Program:
        externs: list[ExternDecl] = []
        functions: list[Function] = []
        while self.cur.kind != "eof":
            if self.cur.kind == "kw" and self.cur.text == "extern":
                externs.append(self.extern_decl())
            elif self.cur.kind == "kw" and self.cur.text == "void":
                functions.append(self.function())
            else:
                raise self.error("expected 'extern' declaration or 'void' function")
        return Program(tuple(externs), tuple(functions), self.path)

    def extern_decl(self) -> ExternDecl:
        start = self.expect("kw", "extern")
        type_ = self.type_name()
        name = self.expect("ident").text
        self.expect("op", "(")
        self.expect("op", ")")
        monotone = self.accept("kw", "monotone") is not None
        value_range = None
        if self.accept("kw", "range"):
            self.expect("op", "[")
            lo = self.signed_int()
            self.expect("op", ",")
            hi = self.signed_int()
            self.expect("op", "]")
            if lo > hi:
                raise self.error(f"empty extern range [{lo}, {hi}]", start)
            value_range = (lo, hi)
        self.expect("op", ";")
        return ExternDecl(name, type_, monotone, value_range, start.pos)

    def signed_int(self) -> int:
        sign = -1 if self.accept("op", "-") else 1
        return sign * int(self.expect("int").text)

    def type_name(self) -> IntType:
        tok = self.cur
        if tok.kind == "kw" and tok.text in TYPES:
            self.advance()
            return TYPES[tok.text]
        raise self.error("expected a type (int8, int16 or int32)")

    def function(self) -> Function:
        start = self.expect("kw", "void")
        name = self.expect("ident").text
        self.expect("op", "(")
        self.expect("op", ")")
        return Function(name, self.block(), start.pos)

    def block(self) -> tuple[Stmt, ...]:
        self.expect("op", "{")
        body: list[Stmt] = []
        while not self.accept("op", "}"):
            if self.cur.kind == "eof":
                raise self.error("unterminated block, expected '}'")
            body.append(self.statement())
        return tuple(body)

    # -- statements

    def statement(self) -> Stmt:
        tok = self.cur
        if tok.kind == "kw":
            if tok.text in TYPES:
                return self.declaration()
            if tok.text == "if":
                return self.if_statement()
            if tok.text == "while":
                self.advance()
                self.expect("op", "(")
                cond = self.expression()
                self.expect("op", ")")
                return While(cond, self.block(), tok.pos)
            if tok.text == "assert":
                self.advance()
                self.expect("op", "(")
                cond = self.expression()
                self.expect("op", ")")
                self.expect("op", ";")
                return Assert(cond, tok.pos)
            raise self.error(f"unexpected keyword {tok.text!r}")
        if tok.kind == "ident":
            name = self.advance().text
            self.expect("op", "=")
            if (
                self.cur.kind == "ident"
                and self.tokens[self.index + 1].kind == "op"
                and self.tokens[self.index + 1].text == "("
            ):
                extern_name = self.advance().text
                self.expect("op", "(")
                self.expect("op", ")")
                self.expect("op", ";")
                return ExternAssign(name, extern_name, tok.pos)
            value = self.expression()
            self.expect("op", ";")
            return Assign(name, value, tok.pos)
        raise self.error(f"expected a statement, got {tok.text or 'end of input'!r}")

    def declaration(self) -> Decl:
        tok = self.cur
        type_ = self.type_name()
        name = self.expect("ident").text
        init = None
        if self.accept("op", "="):
            init = self.expression()
        self.expect("op", ";")
        return Decl(type_, name, init, tok.pos)

    def if_statement(self) -> If:
        start = self.expect("kw", "if")
        self.expect("op", "(")
        cond = self.expression()
        self.expect("op", ")")
        then_body = self.block()
        else_body: tuple[Stmt, ...] = ()
        if self.accept("kw", "else"):
            if self.cur.kind == "kw" and self.cur.text == "if":
                else_body = (self.if_statement(),)
            else:
                else_body = self.block()
        return If(cond, then_body, else_body, start.pos)

    # -- expressions, lowest precedence first

    _BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
        ("||",),
        ("&&",),
        ("==", "!="),
        ("<", "<=", ">", ">="),
        ("<<", ">>"),
        ("+", "-"),
        ("*", "/", "%"),
    )

    def expression(self) -> Expr:
        return self.binary_chain(0)

    def binary_chain(self, level: int) -> Expr:
        if level == len(self._BINARY_LEVELS):
            return self.unary()
        ops = self._BINARY_LEVELS[level]
        left = self.binary_chain(level + 1)
        while self.cur.kind == "op" and self.cur.text in ops:
            op_tok = self.advance()
            right = self.binary_chain(level + 1)
            left = Binary(op_tok.text, left, right, op_tok.pos)
        return left

    def unary(self) -> Expr:
        if self.cur.kind == "op" and self.cur.text == "-":
            tok = self.advance()
            return Unary("-", self.unary(), tok.pos)
        return self.primary()

    def primary(self) -> Expr:
        tok = self.cur
        if tok.kind == "int":
            self.advance()
            return IntLit(int(tok.text), tok.pos)
        if tok.kind == "ident":
            self.advance()
            return Var(tok.text, tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            inner = self.expression()
            self.expect("op", ")")
            return inner
        raise self.error(f"expected an expression, got {tok.text or 'end of input'!r}")


def parse_program(text: str, path: str = "<input>") -> Program:
    return _Parser(tokenize(text, path), path).program()


# --- unparser ------------------------------------------------------------------

_PRECEDENCE = {
    "||": 1, "&&": 2, "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "<<": 5, ">>": 5, "+": 6, "-": 6,
    "*": 7, "/": 7, "%": 7,
}


def unparse_expr(e: Expr, parent_prec: int = 0) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Unary):
        return f"-{unparse_expr(e.operand, 8)}"
    prec = _PRECEDENCE[e.op]
    text = f"{unparse_expr(e.left, prec)} {e.op} {unparse_expr(e.right, prec + 1)}"
    return f"({text})" if prec < parent_prec else text


def _unparse_block(body: tuple[Stmt, ...], indent: int) -> list[str]:
    pad = "    " * indent
    lines: list[str] = []
    for stmt in body:
        if isinstance(stmt, Decl):
            init = f" = {unparse_expr(stmt.init)}" if stmt.init is not None else ""
            lines.append(f"{pad}{stmt.type.name} {stmt.name}{init};")
        elif isinstance(stmt, Assign):
            lines.append(f"{pad}{stmt.name} = {unparse_expr(stmt.value)};")
        elif isinstance(stmt, ExternAssign):
            lines.append(f"{pad}{stmt.name} = {stmt.extern_name}();")
        elif isinstance(stmt, Assert):
            lines.append(f"{pad}assert({unparse_expr(stmt.cond)});")
        elif isinstance(stmt, While):
            lines.append(f"{pad}while ({unparse_expr(stmt.cond)}) {{")
            lines.extend(_unparse_block(stmt.body, indent + 1))
            lines.append(f"{pad}}}")
        elif isinstance(stmt, If):
            lines.append(f"{pad}if ({unparse_expr(stmt.cond)}) {{")
            lines.extend(_unparse_block(stmt.then_body, indent + 1))
            if stmt.else_body:
                lines.append(f"{pad}}} else {{")
                lines.extend(_unparse_block(stmt.else_body, indent + 1))
            lines.append(f"{pad}}}")
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {stmt!r}")
    return lines


def unparse_program(program: Program) -> str:
    lines: list[str] = []
    for decl in program.externs:
        parts = [f"extern {decl.type.name} {decl.name}()"]
        if decl.monotone:
            parts.append("monotone")
        if decl.value_range is not None:
            parts.append(f"range [{decl.value_range[0]}, {decl.value_range[1]}]")
        lines.append(" ".join(parts) + ";")
    if program.externs:
        lines.append("")
    for fn in program.functions:
        lines.append(f"void {fn.name}() {{")
        lines.extend(_unparse_block(fn.body, 1))
        lines.append("}")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"
