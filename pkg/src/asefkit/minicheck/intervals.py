"""The interval abstract domain over mathematical integers.

Intervals carry exact (unwrapped) integer bounds; overflow handling and
type wrapping are decided by the analyzer on top.  The empty domain
element (unreachable) is represented as None at the call sites, never
as an inverted interval.

Operator definitions mirror the MiniC concrete semantics: ``/`` and
``%`` truncate toward zero, ``<<`` multiplies by a power of two, ``>>``
is an arithmetic (floor) shift.  Division-like operators are computed
over the nonzero part of the divisor; shift operators over the valid
amount range; callers report the stripped-off bad parts as findings.
"""

from __future__ import annotations

from dataclasses import dataclass


def c_div(a: int, b: int) -> int:
    """C-style integer division: truncation toward zero."""
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def c_mod(a: int, b: int) -> int:
    """C-style remainder: sign follows the dividend."""
    return a - c_div(a, b) * b


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"

    def __contains__(self, value: int) -> bool:
        return self.lo <= value <= self.hi

    @classmethod
    def point(cls, value: int) -> "Interval":
        return cls(value, value)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def join(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def meet(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        return Interval(lo, hi) if lo <= hi else None

    def widen_to(self, newer: "Interval", bound_lo: int, bound_hi: int) -> "Interval":
        """Jump unstable bounds to the given (type) bounds."""
        lo = self.lo if newer.lo >= self.lo else min(bound_lo, newer.lo)
        hi = self.hi if newer.hi <= self.hi else max(bound_hi, newer.hi)
        return Interval(lo, hi)

    @property
    def midpoint(self) -> int:
        return (self.lo + self.hi) // 2


def join_opt(a: Interval | None, b: Interval | None) -> Interval | None:
    if a is None:
        return b
    if b is None:
        return a
    return a.join(b)


def _hull(values) -> Interval:
    values = list(values)
    return Interval(min(values), max(values))


def add(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo + b.lo, a.hi + b.hi)


def sub(a: Interval, b: Interval) -> Interval:
    return Interval(a.lo - b.hi, a.hi - b.lo)


def neg(a: Interval) -> Interval:
    return Interval(-a.hi, -a.lo)


def mul(a: Interval, b: Interval) -> Interval:
    return _hull(x * y for x in (a.lo, a.hi) for y in (b.lo, b.hi))


def nonzero_parts(b: Interval) -> list[Interval]:
    """The divisor split at zero; empty if b is exactly [0, 0]."""
    parts = []
    if b.lo <= -1:
        parts.append(Interval(b.lo, min(b.hi, -1)))
    if b.hi >= 1:
        parts.append(Interval(max(b.lo, 1), b.hi))
    return parts


def div(a: Interval, b: Interval) -> Interval | None:
    """Truncated division over the nonzero part of b; None if b == [0,0].

    For a fixed-sign divisor range, c_div is monotone in each argument,
    so corner evaluation per part is exact.
    """
    corners = [
        c_div(x, y)
        for part in nonzero_parts(b)
        for x in (a.lo, a.hi)
        for y in (part.lo, part.hi)
    ]
    return _hull(corners) if corners else None


def mod(a: Interval, b: Interval) -> Interval | None:
    """C remainder over the nonzero part of b; conservative but sound.

    |a % b| < max|b| and |a % b| <= |a|, with the sign of a.
    """
    parts = nonzero_parts(b)
    if not parts:
        return None
    if a.is_point() and b.is_point():
        return Interval.point(c_mod(a.lo, b.lo))
    bound = max(max(abs(p.lo), abs(p.hi)) for p in parts) - 1
    lo = max(-bound, a.lo) if a.lo < 0 else 0
    hi = min(bound, a.hi) if a.hi > 0 else 0
    return Interval(lo, hi)


def shift_amount_parts(b: Interval, width: int) -> Interval | None:
    """The defined shift-amount range [0, width); None if entirely bad."""
    lo, hi = max(b.lo, 0), min(b.hi, width - 1)
    return Interval(lo, hi) if lo <= hi else None


def shl(a: Interval, b: Interval, width: int) -> Interval | None:
    amounts = shift_amount_parts(b, width)
    if amounts is None:
        return None
    return _hull(
        x << y for x in (a.lo, a.hi) for y in (amounts.lo, amounts.hi)
    )


def shr(a: Interval, b: Interval, width: int) -> Interval | None:
    amounts = shift_amount_parts(b, width)
    if amounts is None:
        return None
    return _hull(
        x >> y for x in (a.lo, a.hi) for y in (amounts.lo, amounts.hi)
    )


# --- three-valued comparisons ----------------------------------------------------

TRUE = Interval(1, 1)
FALSE = Interval(0, 0)
UNKNOWN = Interval(0, 1)


def compare(op: str, a: Interval, b: Interval) -> Interval:
    if op == "<":
        if a.hi < b.lo:
            return TRUE
        if a.lo >= b.hi:
            return FALSE
    elif op == "<=":
        if a.hi <= b.lo:
            return TRUE
        if a.lo > b.hi:
            return FALSE
    elif op == ">":
        return compare("<", b, a)
    elif op == ">=":
        return compare("<=", b, a)
    elif op == "==":
        if a.is_point() and b.is_point() and a.lo == b.lo:
            return TRUE
        if a.meet(b) is None:
            return FALSE
    elif op == "!=":
        flipped = compare("==", a, b)
        if flipped is TRUE:
            return FALSE
        if flipped is FALSE:
            return TRUE
    else:  # pragma: no cover
        raise ValueError(f"not a comparison operator: {op}")
    return UNKNOWN


def truthiness(a: Interval) -> Interval:
    """Map a value interval to its boolean observation (0 absent/present)."""
    if a.lo == 0 and a.hi == 0:
        return FALSE
    if 0 not in a:
        return TRUE
    return UNKNOWN


def logic(op: str, a: Interval, b: Interval) -> Interval:
    ta, tb = truthiness(a), truthiness(b)
    if op == "&&":
        if ta is FALSE or tb is FALSE:
            return FALSE
        if ta is TRUE and tb is TRUE:
            return TRUE
    elif op == "||":
        if ta is TRUE or tb is TRUE:
            return TRUE
        if ta is FALSE and tb is FALSE:
            return FALSE
    else:  # pragma: no cover
        raise ValueError(f"not a logic operator: {op}")
    return UNKNOWN
