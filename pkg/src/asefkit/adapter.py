"""Analysis adapter: run a tool, convert its native report to ASEF.

Covers the tool-facing half of the pipeline: invoking the analyzer on
a prepared workspace, translating tool-native findings into ASEF checks
via the category mapping table, and rewriting workspace-local file
paths to stable resource URIs (and back).

Two tool kinds exist: ``builtin-minicheck`` invokes the bundled
analyzer as a subprocess, and ``canned-stub`` replays a pre-recorded
native report (impersonating an external tool) so multi-tool behavior
is exercisable without proprietary software.  The completion of
``run_tool`` is the "analysis finished" acknowledgment; there is no
separate callback.
"""

from __future__ import annotations

import logging
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from asefkit.asef.documents import (
    AsefCheck,
    AsefLocation,
    AsefReport,
    CheckStatus,
    ConfigPart,
    HardwareTarget,
    UriSubstitutionRule,
)
from asefkit.errors import (
    ConversionError,
    ToolCrashError,
    ToolTimeoutError,
    UnknownNativeError,
)
from asefkit.minicheck.report import parse_native_report
from asefkit.taxonomy import MappingSet

log = logging.getLogger(__name__)

VERDICT_STATUS = {
    "proven-safe": CheckStatus.SAFE,
    "safe": CheckStatus.SAFE,
    "proven-unsafe": CheckStatus.UNSAFE,
    "unsafe": CheckStatus.UNSAFE,
    "undecided": CheckStatus.UNDECIDED,
    "warning": CheckStatus.WARNING,
    "syntactic-violation": CheckStatus.SYNTACTIC_VIOLATION,
}

BUILTIN_MINICHECK = "builtin-minicheck"
CANNED_STUB = "canned-stub"


@dataclass(frozen=True)
class ToolDescriptor:
    tool_id: str
    kind: str
    invocation: tuple[str, ...] = ()  # builtin: overrides the default argv
    report_path: str | None = None  # canned: the recorded native report

    def __post_init__(self) -> None:
        if self.kind not in (BUILTIN_MINICHECK, CANNED_STUB):
            raise ValueError(f"unknown tool kind {self.kind!r}")
        if self.kind == CANNED_STUB and not self.report_path:
            raise ValueError("canned-stub tools need a report_path")


@dataclass
class ConversionContext:
    mappings: MappingSet
    rules: tuple[UriSubstitutionRule, ...]
    task_ref: str


def _task_and_sources(
    cfg: ConfigPart, workspace: Path, task_id: str | None
) -> tuple[str, HardwareTarget, list[Path]]:
    tasks = cfg.analysis_tasks
    if task_id is not None:
        tasks = tuple(t for t in tasks if t.id == task_id)
        if not tasks:
            raise ToolCrashError(f"no analysis task {task_id!r} in the configuration")
    if not tasks:
        raise ToolCrashError("configuration defines no analysis tasks")
    task = tasks[0]
    hardware = next(
        t for t in cfg.hardware_targets if t.id == task.hardware_target_ref
    )
    module = next(m for m in cfg.source_modules if m.id == task.source_module_ref)
    sources = []
    for f in module.files:
        path = Path(f.ref)
        if not path.is_absolute():
            path = workspace / path
        if not path.is_file():
            raise ToolCrashError(f"missing source file: {path}")
        sources.append(path)
    return task.id, hardware, sources


def run_tool(
    tool: ToolDescriptor,
    cfg: ConfigPart,
    workspace: str | Path,
    task_id: str | None = None,
    timeout: float = 60.0,
    emit_safe: bool = False,
) -> str:
    """Run one analysis task; returns the native report text."""
    workspace = Path(workspace)
    _task, hardware, sources = _task_and_sources(cfg, workspace, task_id)

    if tool.kind == CANNED_STUB:
        assert tool.report_path is not None
        path = Path(tool.report_path)
        if not path.is_file():
            raise ToolCrashError(f"missing canned report: {path}")
        text = path.read_text(encoding="utf-8")
        return text.replace("{workspace}", str(workspace))

    with tempfile.TemporaryDirectory(prefix="minicheck-") as tmp:
        out_path = Path(tmp) / "native.txt"
        if tool.invocation:
            argv = [
                arg.format(workspace=workspace, out=out_path)
                for arg in tool.invocation
            ]
        else:
            argv = [
                sys.executable,
                "-m",
                "asefkit.minicheck",
                *map(str, sources),
                "--int-bits",
                str(hardware.int_size_bits),
                "--short-bits",
                str(hardware.short_size_bits),
                "--pointer-bits",
                str(hardware.pointer_size_bits),
                "--endianness",
                hardware.endianness.value,
                "--out",
                str(out_path),
            ]
            if emit_safe:
                argv.append("--emit-safe")
        try:
            proc = subprocess.run(
                argv, capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired as exc:
            raise ToolTimeoutError(
                f"tool {tool.tool_id!r} exceeded {timeout:g} s"
            ) from exc
        if proc.returncode != 0:
            raise ToolCrashError(
                f"tool {tool.tool_id!r} exited with {proc.returncode}: "
                f"{proc.stderr.strip()}"
            )
        if not out_path.is_file():
            raise ToolCrashError(f"tool {tool.tool_id!r} produced no report")
        return out_path.read_text(encoding="utf-8")


def to_asef(
    native_report: str,
    ctx: ConversionContext,
    tool_id: str,
    created_at: datetime | None = None,
) -> AsefReport:
    """One ASEF check per native finding, locations deduplicated.

    Native categories are ``PREFIX:name`` pairs looked up in the mapping
    set; conversion aborts listing every unmapped pair at once.
    """
    findings = parse_native_report(native_report)

    unmapped: list[tuple[str, str]] = []
    categories = []
    for finding in findings:
        prefix, sep, name = finding.native_category.partition(":")
        if not sep:
            raise ConversionError(
                f"native category {finding.native_category!r} has no TOOL: prefix"
            )
        try:
            categories.append(ctx.mappings.map_native(prefix, name))
        except UnknownNativeError:
            unmapped.append((prefix, name))
    if unmapped:
        raise UnknownNativeError(sorted(set(unmapped)))

    loc_ids: dict[tuple[str, int, int], str] = {}
    locations: list[AsefLocation] = []

    def location_id(site: tuple[str, int, int]) -> str:
        if site not in loc_ids:
            loc_ids[site] = f"L{len(loc_ids) + 1}"
            locations.append(
                AsefLocation(
                    id=loc_ids[site],
                    file_ref=site[0],
                    line=site[1],
                    column=site[2],
                )
            )
        return loc_ids[site]

    checks = []
    for index, (finding, category) in enumerate(zip(findings, categories), start=1):
        checks.append(
            AsefCheck(
                id=f"C{index}",
                category=category,
                status=VERDICT_STATUS[finding.verdict],
                location_ref=location_id(finding.site),
                message=finding.message,
                trace=tuple(location_id(step) for step in finding.trace),
            )
        )

    return AsefReport(
        tool_id=tool_id,
        task_ref=ctx.task_ref,
        created_at=created_at or datetime.now(timezone.utc),
        locations=tuple(locations),
        checks=tuple(checks),
    )


def substitute_uris(
    report: AsefReport, rules: tuple[UriSubstitutionRule, ...] | list[UriSubstitutionRule]
) -> AsefReport:
    """Rewrite file refs under a rule's local prefix to resource URIs.

    The longest matching prefix wins; refs matching no rule stay intact
    and are logged as warnings.  Already-substituted reports pass
    through unchanged, so the operation is idempotent.
    """
    ordered = sorted(rules, key=lambda r: len(r.local_prefix), reverse=True)

    def rewrite(ref: str) -> str:
        for rule in ordered:
            if ref == rule.local_prefix or ref.startswith(rule.local_prefix + "/"):
                return rule.uri_prefix + ref[len(rule.local_prefix):]
        if "://" not in ref:
            log.warning("no substitution rule matches file ref %r", ref)
        return ref

    locations = tuple(
        AsefLocation(
            id=loc.id,
            line=loc.line,
            column=loc.column,
            file_ref=rewrite(loc.file_ref) if loc.file_ref is not None else None,
            location_ref=loc.location_ref,
        )
        for loc in report.locations
    )
    return AsefReport(
        tool_id=report.tool_id,
        task_ref=report.task_ref,
        created_at=report.created_at,
        locations=locations,
        checks=report.checks,
    )
