"""Bounded search for concrete inputs that reach a flagged bad state.

Each extern-read site gets one value from the corner set {lo, hi, 0,
-1, 1, midpoint} of its havoc interval; assignments are enumerated in
deterministic lexicographic order (sites in program order, corner set
in the order above) and replayed concretely until one reaches the
finding's bad state or the step budget runs out.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from asefkit.asef.documents import HardwareTarget
from asefkit.minicheck.concrete import ConcreteRunner
from asefkit.minicheck.intervals import Interval
from asefkit.minicheck.lang import (
    Decl,
    ExternAssign,
    If,
    IntType,
    Program,
    Stmt,
    While,
)
from asefkit.minicheck.report import NativeFinding

MAX_STEPS_PER_RUN = 2000


@dataclass(frozen=True)
class Witness:
    """A satisfying assignment: one concrete value per extern-read site."""

    values: tuple[tuple[str, int], ...]  # (variable, value) in program order
    site_values: dict[tuple[int, int], int]


@dataclass(frozen=True)
class _Site:
    line: int
    column: int
    var_name: str
    havoc: Interval


def _collect_sites(program: Program) -> list[_Site]:
    types: dict[str, IntType] = {}

    def walk_types(stmts: tuple[Stmt, ...]) -> None:
        for stmt in stmts:
            if isinstance(stmt, Decl):
                types.setdefault(stmt.name, stmt.type)
            elif isinstance(stmt, If):
                walk_types(stmt.then_body)
                walk_types(stmt.else_body)
            elif isinstance(stmt, While):
                walk_types(stmt.body)

    sites: list[_Site] = []

    def walk(stmts: tuple[Stmt, ...]) -> None:
        for stmt in stmts:
            if isinstance(stmt, ExternAssign):
                decl = program.extern(stmt.extern_name)
                if decl is not None:
                    lo, hi = decl.bounds()
                else:
                    target = types.get(stmt.name)
                    lo, hi = (target.lo, target.hi) if target else (-(2**31), 2**31 - 1)
                sites.append(_Site(stmt.pos.line, stmt.pos.column, stmt.name, Interval(lo, hi)))
            elif isinstance(stmt, If):
                walk(stmt.then_body)
                walk(stmt.else_body)
            elif isinstance(stmt, While):
                walk(stmt.body)

    for fn in program.functions:
        walk_types(fn.body)
    for fn in program.functions:
        walk(fn.body)
    return sites


def _corner_values(havoc: Interval) -> list[int]:
    ordered = [havoc.lo, havoc.hi, 0, -1, 1, havoc.midpoint]
    out: list[int] = []
    for value in ordered:
        if value in havoc and value not in out:
            out.append(value)
    return out


def find_witness(
    program: Program,
    finding: NativeFinding,
    hw: HardwareTarget,
    budget: int = 200_000,
) -> Witness | None:
    """Search for inputs reaching the finding's bad state; None if none found.

    ``budget`` caps the total number of executed statements across all
    tried assignments; running out of budget counts as "not found".
    """
    if finding.verdict == "proven-safe":
        raise ValueError("witness search requires a non-safe finding")
    target = (finding.line, finding.column, finding.native_category)
    sites = _collect_sites(program)
    candidates = [_corner_values(site.havoc) for site in sites]

    steps_left = budget
    for assignment in itertools.product(*candidates):
        if steps_left <= 0:
            return None
        site_values = {
            (site.line, site.column): value for site, value in zip(sites, assignment)
        }
        runner = ConcreteRunner(
            program, hw, site_values, max_steps=min(MAX_STEPS_PER_RUN, steps_left)
        )
        events, used = runner.run()
        steps_left -= max(used, 1)
        if any((e.line, e.column, e.category) == target for e in events):
            return Witness(
                values=tuple((site.var_name, value) for site, value in zip(sites, assignment)),
                site_values=site_values,
            )
    return None
