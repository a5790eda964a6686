"""Immutable model types for ASEF configuration and report documents.

Conventions fixed here so every adapter agrees: timestamps are RFC-3339
UTC, line numbers are 1-based, columns are 0-based, identifiers are
non-empty and contain no whitespace.  Key/value payloads (language
extensions, execution model attributes) are normalized to key-sorted
tuples so that structural equality ignores XML attribute order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum

from asefkit.taxonomy import CategoryId

_ID_RE = re.compile(r"^[A-Za-z0-9_.:-]+$")
_VALID_SIZES = (8, 16, 32, 64)


def _check_id(value: str, what: str) -> str:
    if not _ID_RE.match(value or ""):
        raise ValueError(f"invalid {what} identifier: {value!r}")
    return value


class Endianness(str, Enum):
    LITTLE = "little"
    BIG = "big"


class CStandard(str, Enum):
    C90 = "C90"
    C99 = "C99"
    C11 = "C11"


class CheckStatus(str, Enum):
    """The closed set of check statuses; no other value serializes."""

    SAFE = "Safe"
    UNSAFE = "Unsafe"
    UNDECIDED = "Undecided"
    WARNING = "Warning"
    SYNTACTIC_VIOLATION = "SyntacticViolation"


@dataclass(frozen=True)
class HardwareTarget:
    id: str
    pointer_size_bits: int
    endianness: Endianness
    int_size_bits: int
    short_size_bits: int

    def __post_init__(self) -> None:
        _check_id(self.id, "HardwareTarget")
        for name in ("pointer_size_bits", "int_size_bits", "short_size_bits"):
            if getattr(self, name) not in _VALID_SIZES:
                raise ValueError(f"{name} must be one of {_VALID_SIZES}")
        if not self.short_size_bits <= self.int_size_bits <= self.pointer_size_bits:
            raise ValueError("expected shortSizeBits <= intSizeBits <= pointerSizeBits")


@dataclass(frozen=True)
class LanguageTarget:
    id: str
    standard: CStandard
    extensions: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        _check_id(self.id, "LanguageTarget")
        object.__setattr__(self, "extensions", tuple(sorted(self.extensions)))


@dataclass(frozen=True)
class CheckTarget:
    id: str
    categories: tuple[CategoryId, ...]

    def __post_init__(self) -> None:
        _check_id(self.id, "CheckTarget")
        if not self.categories:
            raise ValueError("CheckTarget needs at least one category")


@dataclass(frozen=True)
class ExecutionModelTarget:
    """Named but deliberately opaque: attributes are free-form key/values."""

    id: str
    attributes: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        _check_id(self.id, "ExecutionModelTarget")
        object.__setattr__(self, "attributes", tuple(sorted(self.attributes)))


@dataclass(frozen=True)
class SourceFile:
    ref: str

    def __post_init__(self) -> None:
        if not self.ref:
            raise ValueError("SourceFile ref must be non-empty")


@dataclass(frozen=True)
class SourceModule:
    id: str
    files: tuple[SourceFile, ...]

    def __post_init__(self) -> None:
        _check_id(self.id, "SourceModule")
        if not self.files:
            raise ValueError("SourceModule needs at least one file")


@dataclass(frozen=True)
class AnalysisTask:
    id: str
    source_module_ref: str
    hardware_target_ref: str
    language_target_ref: str
    check_target_ref: str
    execution_model_target_ref: str | None = None

    def __post_init__(self) -> None:
        _check_id(self.id, "AnalysisTask")
        for name in (
            "source_module_ref",
            "hardware_target_ref",
            "language_target_ref",
            "check_target_ref",
        ):
            _check_id(getattr(self, name), name)
        if self.execution_model_target_ref is not None:
            _check_id(self.execution_model_target_ref, "execution_model_target_ref")


@dataclass(frozen=True)
class UriSubstitutionRule:
    local_prefix: str
    uri_prefix: str

    def __post_init__(self) -> None:
        if not self.local_prefix or not self.uri_prefix:
            raise ValueError("substitution rule prefixes must be non-empty")
        if len(self.local_prefix) > 1 and self.local_prefix.endswith("/"):
            raise ValueError("localPrefix must not end with a path separator")


@dataclass(frozen=True)
class ConfigPart:
    hardware_targets: tuple[HardwareTarget, ...] = ()
    language_targets: tuple[LanguageTarget, ...] = ()
    check_targets: tuple[CheckTarget, ...] = ()
    execution_model_targets: tuple[ExecutionModelTarget, ...] = ()
    source_modules: tuple[SourceModule, ...] = ()
    analysis_tasks: tuple[AnalysisTask, ...] = ()
    uri_substitution_rules: tuple[UriSubstitutionRule, ...] = ()

    def is_empty(self) -> bool:
        return self == EMPTY_PART

    def identified_entries(self) -> list[tuple[str, str, object]]:
        """(kind, id, entry) triples for every id-carrying entry."""
        out: list[tuple[str, str, object]] = []
        kinds = (
            ("HardwareTarget", self.hardware_targets),
            ("LanguageTarget", self.language_targets),
            ("CheckTarget", self.check_targets),
            ("ExecutionModelTarget", self.execution_model_targets),
            ("SourceModule", self.source_modules),
            ("AnalysisTask", self.analysis_tasks),
        )
        for kind, entries in kinds:
            for entry in entries:
                out.append((kind, entry.id, entry))
        return out


EMPTY_PART = ConfigPart()


@dataclass(frozen=True)
class AsefConfiguration:
    """A global configuration part plus an optional host-local overlay."""

    global_part: ConfigPart = EMPTY_PART
    local_part: ConfigPart | None = None


# --- report model -------------------------------------------------------------


@dataclass(frozen=True)
class AsefLocation:
    """A source position, either in a file or relative to another location.

    Exactly one of ``file_ref``/``location_ref`` is set; a chain of
    ``location_ref`` links models macro expansions and must end in a
    file-bearing location.
    """

    id: str
    line: int
    column: int
    file_ref: str | None = None
    location_ref: str | None = None

    def __post_init__(self) -> None:
        _check_id(self.id, "Location")
        if (self.file_ref is None) == (self.location_ref is None):
            raise ValueError("exactly one of fileRef/locationRef must be set")
        if self.file_ref is not None and not self.file_ref:
            raise ValueError("fileRef must be non-empty")
        if self.location_ref is not None:
            _check_id(self.location_ref, "locationRef")
        if self.line < 1:
            raise ValueError("line numbers are 1-based")
        if self.column < 0:
            raise ValueError("columns are 0-based")


@dataclass(frozen=True)
class AsefCheck:
    id: str
    category: CategoryId
    status: CheckStatus
    location_ref: str
    message: str = ""
    trace: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        _check_id(self.id, "Check")
        _check_id(self.location_ref, "locationRef")
        for step in self.trace:
            _check_id(step, "trace step")


@dataclass(frozen=True)
class AsefReport:
    tool_id: str
    task_ref: str
    created_at: datetime
    locations: tuple[AsefLocation, ...] = ()
    checks: tuple[AsefCheck, ...] = ()

    def __post_init__(self) -> None:
        if not self.tool_id:
            raise ValueError("toolId must be non-empty")
        _check_id(self.task_ref, "taskRef")
        if self.created_at.tzinfo is None:
            raise ValueError("createdAt must be timezone-aware UTC")
        object.__setattr__(self, "created_at", self.created_at.astimezone(timezone.utc))

    def location_by_id(self) -> dict[str, AsefLocation]:
        return {loc.id: loc for loc in self.locations}


def format_timestamp(value: datetime) -> str:
    value = value.astimezone(timezone.utc)
    base = value.strftime("%Y-%m-%dT%H:%M:%S")
    if value.microsecond:
        base += f".{value.microsecond:06d}".rstrip("0")
    return base + "Z"


def parse_timestamp(text: str) -> datetime:
    m = re.match(r"^(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2})(\.\d{1,6})?Z$", text)
    if not m:
        raise ValueError(f"expected RFC-3339 UTC timestamp with Z suffix: {text!r}")
    base = datetime.strptime(m.group(1), "%Y-%m-%dT%H:%M:%S")
    frac = (m.group(2) or ".")[1:]
    micro = int(frac.ljust(6, "0")) if frac else 0
    return base.replace(microsecond=micro, tzinfo=timezone.utc)
