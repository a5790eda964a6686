"""Hierarchical check-category semantics and native-category mappings.

Check categories are dotted identifiers such as ``numeric.shift.rhs.negative``
where a prefix is a semantic generalization of everything below it.  Each
analysis tool reports in its own native vocabulary; a mapping set translates
``(tool, native name)`` pairs into the shared category tree, which is what
makes reports of different tools comparable.

The default mapping set ships as ``data/default_mappings.tsv`` and is a
plain tab-separated table (toolId, nativeName, categoryId; ``#`` comments)
so it can be extended without touching code.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from typing import TYPE_CHECKING, Iterable

from asefkit.errors import DocumentSyntaxError, UnknownNativeError

if TYPE_CHECKING:  # pragma: no cover - import cycle with asefkit.asef
    from asefkit.asef import AsefCheck, AsefReport

_SEGMENT_RE = re.compile(r"^[a-z][a-z0-9_]*$")


@dataclass(frozen=True)
class CategoryId:
    """A dotted, hierarchical check category identifier."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("category needs at least one segment")
        for seg in self.segments:
            if not _SEGMENT_RE.match(seg):
                raise ValueError(f"invalid category segment {seg!r}")

    @classmethod
    def parse(cls, dotted: str) -> "CategoryId":
        return cls(tuple(dotted.split(".")))

    def __str__(self) -> str:
        return ".".join(self.segments)


def is_ancestor(a: CategoryId, b: CategoryId) -> bool:
    """True iff ``a`` is ``b`` or a generalization of it (prefix order)."""
    return a.segments == b.segments[: len(a.segments)]


def deepest_common(a: CategoryId, b: CategoryId) -> CategoryId | None:
    """Longest shared prefix of two categories, None for disjoint roots."""
    common: list[str] = []
    for x, y in zip(a.segments, b.segments):
        if x != y:
            break
        common.append(x)
    return CategoryId(tuple(common)) if common else None


def related(a: CategoryId, b: CategoryId) -> bool:
    """True iff one category is an ancestor of the other."""
    return is_ancestor(a, b) or is_ancestor(b, a)


@dataclass(frozen=True)
class NativeCategoryMapping:
    """One row of the mapping table: a tool-native name and its category."""

    tool_id: str
    native_name: str
    asef_category: CategoryId


class MappingSet:
    """An ordered collection of native-category mappings.

    Order is preserved from the source table; reverse lookups return
    native names in table order.
    """

    def __init__(self, rows: Iterable[NativeCategoryMapping] = ()):
        self.rows: list[NativeCategoryMapping] = []
        self._by_key: dict[tuple[str, str], NativeCategoryMapping] = {}
        for row in rows:
            self.add(row)

    def add(self, row: NativeCategoryMapping) -> None:
        key = (row.tool_id, row.native_name)
        if key in self._by_key:
            raise ValueError(f"duplicate mapping for {row.tool_id}:{row.native_name}")
        self.rows.append(row)
        self._by_key[key] = row

    def __len__(self) -> int:
        return len(self.rows)

    def map_native(self, tool_id: str, native_name: str) -> CategoryId:
        row = self._by_key.get((tool_id, native_name))
        if row is None:
            raise UnknownNativeError([(tool_id, native_name)])
        return row.asef_category

    def natives_for(self, category: CategoryId, tool_id: str) -> list[str]:
        """Native names of ``tool_id`` mapped to ``category`` or below it."""
        return [
            row.native_name
            for row in self.rows
            if row.tool_id == tool_id and is_ancestor(category, row.asef_category)
        ]

    @classmethod
    def parse(cls, text: str, source: str = "<mapping table>") -> "MappingSet":
        rows = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DocumentSyntaxError(
                    f"{source}:{lineno}: expected 3 tab-separated fields, got {len(parts)}"
                )
            tool_id, native_name, dotted = (p.strip() for p in parts)
            try:
                category = CategoryId.parse(dotted)
            except ValueError as exc:
                raise DocumentSyntaxError(f"{source}:{lineno}: {exc}") from exc
            rows.append(NativeCategoryMapping(tool_id, native_name, category))
        return cls(rows)

    @classmethod
    def load(cls, path) -> "MappingSet":
        from pathlib import Path

        p = Path(path)
        return cls.parse(p.read_text(encoding="utf-8"), source=str(p))


def default_mappings() -> MappingSet:
    """The mapping set shipped with the package."""
    text = (
        importlib_resources.files("asefkit")
        .joinpath("data/default_mappings.tsv")
        .read_text(encoding="utf-8")
    )
    return MappingSet.parse(text, source="default_mappings.tsv")


# --- cross-tool report comparison -------------------------------------------


@dataclass(frozen=True)
class MatchedPair:
    """Two checks agreeing on file, line and (up to precision) category."""

    check_a: "AsefCheck"
    check_b: "AsefCheck"
    common_category: CategoryId


@dataclass
class DiffResult:
    """Outcome of comparing two reports check by check."""

    matched: list[MatchedPair] = field(default_factory=list)
    only_in_a: list["AsefCheck"] = field(default_factory=list)
    only_in_b: list["AsefCheck"] = field(default_factory=list)
    status_conflicts: list[tuple["AsefCheck", "AsefCheck"]] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.only_in_a and not self.only_in_b and not self.status_conflicts


def compare_reports(a: "AsefReport", b: "AsefReport") -> DiffResult:
    """Match checks of two reports by location and category relatedness.

    Two checks match iff their locations resolve to the same file and line
    and one category is an ancestor of the other (tools report at different
    precision levels, so equality would be too strict).  Matching is greedy
    over candidate pairs sorted by (check id in a, check id in b), which is
    maximal, deterministic, and invariant under swapping the arguments.
    """
    from asefkit.asef import resolve_location

    def keyed(report: "AsefReport") -> dict[str, tuple[str, int]]:
        out = {}
        for check in report.checks:
            file_ref, line, _col = resolve_location(report, check.location_ref)
            out[check.id] = (file_ref, line)
        return out

    keys_a = keyed(a)
    keys_b = keyed(b)
    checks_a = sorted(a.checks, key=lambda c: c.id)
    checks_b = sorted(b.checks, key=lambda c: c.id)

    candidates = [
        (ca, cb)
        for ca in checks_a
        for cb in checks_b
        if keys_a[ca.id] == keys_b[cb.id] and related(ca.category, cb.category)
    ]

    taken_a: set[str] = set()
    taken_b: set[str] = set()
    result = DiffResult()
    for ca, cb in candidates:  # already sorted by (ca.id, cb.id)
        if ca.id in taken_a or cb.id in taken_b:
            continue
        taken_a.add(ca.id)
        taken_b.add(cb.id)
        common = deepest_common(ca.category, cb.category)
        assert common is not None  # related() guarantees a shared root
        result.matched.append(MatchedPair(ca, cb, common))
        if ca.status != cb.status:
            result.status_conflicts.append((ca, cb))

    result.only_in_a = [c for c in checks_a if c.id not in taken_a]
    result.only_in_b = [c for c in checks_b if c.id not in taken_b]
    return result
