"""Abstract machine state: per-variable intervals plus read-order facts.

A variable's lattice value tracks its interval together with a
may-be-uninitialized flag, so a read after a conditionally-executed
initialization is reported as undecided rather than safe or certain.

Reads from a ``monotone`` extern additionally produce order facts
``x <= y`` between live read results (a later read is never smaller
than an earlier one).  Facts are concrete statements independent of the
intervals: joins and widenings intersect them, assignments that can
change the stored value kill them.  The fact universe is finite (pairs
of declared variables), so they never threaten termination.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from asefkit.minicheck.intervals import Interval, join_opt
from asefkit.minicheck.lang import IntType


@dataclass(frozen=True)
class VarState:
    type: IntType
    interval: Interval | None  # None: no initialized value on any path
    may_uninit: bool

    @classmethod
    def uninitialized(cls, type_: IntType) -> "VarState":
        return cls(type_, None, True)

    @classmethod
    def initialized(cls, type_: IntType, interval: Interval) -> "VarState":
        return cls(type_, interval, False)

    def value_or_type_range(self) -> Interval:
        if self.interval is not None:
            return self.interval
        return Interval(self.type.lo, self.type.hi)

    def join(self, other: "VarState") -> "VarState":
        return VarState(
            self.type,
            join_opt(self.interval, other.interval),
            self.may_uninit or other.may_uninit,
        )

    def leq(self, other: "VarState") -> bool:
        if self.may_uninit and not other.may_uninit:
            return False
        if self.interval is None:
            return True
        if other.interval is None:
            return False
        return other.interval.contains_interval(self.interval)


@dataclass
class AbstractState:
    """One point's knowledge: variable states, read provenance, order facts.

    ``prov`` maps a variable to the monotone extern whose (unmodified)
    read result it holds; ``facts`` holds pairs (x, y) meaning x <= y in
    every concrete execution reaching this point.  Unreachable program
    points are represented as None at the call sites, not as a state.
    """

    vars: dict[str, VarState] = field(default_factory=dict)
    prov: dict[str, str] = field(default_factory=dict)
    facts: set[tuple[str, str]] = field(default_factory=set)

    def copy(self) -> "AbstractState":
        return AbstractState(dict(self.vars), dict(self.prov), set(self.facts))

    def kill_var_facts(self, name: str) -> None:
        self.prov.pop(name, None)
        self.facts = {pair for pair in self.facts if name not in pair}

    def set_var(self, name: str, state: VarState) -> None:
        self.vars[name] = state

    def with_interval(self, name: str, interval: Interval) -> "AbstractState":
        out = self.copy()
        old = out.vars[name]
        out.vars[name] = VarState(old.type, interval, old.may_uninit)
        return out


def join_states(a: AbstractState | None, b: AbstractState | None) -> AbstractState | None:
    if a is None:
        return b.copy() if b is not None else None
    if b is None:
        return a.copy()
    vars_out: dict[str, VarState] = {}
    for name in {**a.vars, **b.vars}:
        va, vb = a.vars.get(name), b.vars.get(name)
        if va is None or vb is None:
            present = va or vb
            assert present is not None
            # Declared on one path only: may be read before declaration
            # on the other, so it joins with "uninitialized".
            vars_out[name] = VarState(present.type, present.interval, True)
        else:
            vars_out[name] = va.join(vb)
    prov_out = {
        name: ext for name, ext in a.prov.items() if b.prov.get(name) == ext
    }
    facts_out = a.facts & b.facts
    return AbstractState(vars_out, prov_out, facts_out)


def widen_states(older: AbstractState, newer: AbstractState) -> AbstractState:
    """Widen unstable variable bounds to their type bounds."""
    vars_out: dict[str, VarState] = {}
    for name in {**older.vars, **newer.vars}:
        vo, vn = older.vars.get(name), newer.vars.get(name)
        if vo is None or vn is None:
            present = vo or vn
            assert present is not None
            vars_out[name] = VarState(present.type, present.interval, True)
        elif vo.interval is None or vn.interval is None:
            vars_out[name] = vo.join(vn)
        else:
            widened = vo.interval.widen_to(vn.interval, vn.type.lo, vn.type.hi)
            vars_out[name] = VarState(vn.type, widened, vo.may_uninit or vn.may_uninit)
    prov_out = {
        name: ext for name, ext in older.prov.items() if newer.prov.get(name) == ext
    }
    return AbstractState(vars_out, prov_out, older.facts & newer.facts)


def state_leq(a: AbstractState, b: AbstractState) -> bool:
    """a is at least as precise as b (a's executions subset b's)."""
    if set(a.vars) != set(b.vars):
        return False
    if not all(a.vars[name].leq(b.vars[name]) for name in a.vars):
        return False
    # Fewer facts / provenance entries = less knowledge = higher in the
    # lattice, so b must not know anything a does not.
    if not set(b.facts) <= set(a.facts):
        return False
    return all(a.prov.get(name) == ext for name, ext in b.prov.items())
