"""Operations over parsed ASEF documents: merging, resolution, validation."""

from __future__ import annotations

from dataclasses import dataclass

from asefkit.asef.documents import (
    AsefConfiguration,
    AsefLocation,
    AsefReport,
    ConfigPart,
)
from asefkit.errors import (
    DanglingReferenceError,
    LocationCycleError,
    UnknownIdError,
)
from asefkit.taxonomy import is_ancestor


def merge_local(cfg: AsefConfiguration, overlay: ConfigPart) -> ConfigPart:
    """Overlay host-local entries over the global part, matched by id.

    Entries present in both parts are replaced by the local one; entries
    present in only one part are kept.  Substitution rules are keyed by
    their local prefix.  The merged part is reference-checked.
    """
    merged = _merge_parts(cfg.global_part, overlay)
    check_references(merged)
    return merged


def effective_part(cfg: AsefConfiguration) -> ConfigPart:
    """The configuration a host actually runs: global merged with local."""
    if cfg.local_part is None:
        check_references(cfg.global_part)
        return cfg.global_part
    return merge_local(cfg, cfg.local_part)


def _merge_by_id(base: tuple, overlay: tuple, key) -> tuple:
    overlay_keys = {key(entry) for entry in overlay}
    overlay_by_key = {key(entry): entry for entry in overlay}
    out = [overlay_by_key[key(e)] if key(e) in overlay_keys else e for e in base]
    base_keys = {key(e) for e in base}
    out.extend(e for e in overlay if key(e) not in base_keys)
    return tuple(out)


def _merge_parts(base: ConfigPart, overlay: ConfigPart) -> ConfigPart:
    by_id = lambda entry: entry.id
    return ConfigPart(
        hardware_targets=_merge_by_id(base.hardware_targets, overlay.hardware_targets, by_id),
        language_targets=_merge_by_id(base.language_targets, overlay.language_targets, by_id),
        check_targets=_merge_by_id(base.check_targets, overlay.check_targets, by_id),
        execution_model_targets=_merge_by_id(
            base.execution_model_targets, overlay.execution_model_targets, by_id
        ),
        source_modules=_merge_by_id(base.source_modules, overlay.source_modules, by_id),
        analysis_tasks=_merge_by_id(base.analysis_tasks, overlay.analysis_tasks, by_id),
        uri_substitution_rules=_merge_by_id(
            base.uri_substitution_rules,
            overlay.uri_substitution_rules,
            lambda rule: rule.local_prefix,
        ),
    )


def check_references(part: ConfigPart) -> None:
    """Every AnalysisTask reference must resolve to a declared target."""
    hardware = {t.id for t in part.hardware_targets}
    languages = {t.id for t in part.language_targets}
    checks = {t.id for t in part.check_targets}
    models = {t.id for t in part.execution_model_targets}
    modules = {m.id for m in part.source_modules}
    for task in part.analysis_tasks:
        wanted = [
            (task.source_module_ref, modules, "source module"),
            (task.hardware_target_ref, hardware, "hardware target"),
            (task.language_target_ref, languages, "language target"),
            (task.check_target_ref, checks, "check target"),
        ]
        if task.execution_model_target_ref is not None:
            wanted.append((task.execution_model_target_ref, models, "execution model target"))
        for ref, declared, what in wanted:
            if ref not in declared:
                raise DanglingReferenceError(
                    f"AnalysisTask {task.id!r} references undeclared {what} {ref!r}",
                    ref,
                )


def load_config_pair(global_text: str, local_text: str | None = None) -> AsefConfiguration:
    """Load the two-file global/local split.

    The optional overlay file is itself an AsefConfiguration document;
    its LocalPart (or its GlobalPart when it carries no LocalPart) is
    used as the overlay.
    """
    from asefkit.asef.xmlio import parse_config

    cfg = parse_config(global_text)
    if local_text is None:
        return cfg
    overlay_doc = parse_config(local_text)
    overlay = (
        overlay_doc.local_part
        if overlay_doc.local_part is not None
        else overlay_doc.global_part
    )
    merged_cfg = AsefConfiguration(cfg.global_part, overlay)
    effective_part(merged_cfg)
    return merged_cfg


# --- location resolution --------------------------------------------------------


def resolve_location(report: AsefReport, loc_id: str) -> tuple[str, int, int]:
    """Follow a macro chain to its file-bearing terminal location.

    Returns the terminal's (fileRef, line, column).
    """
    by_id = report.location_by_id()
    loc = by_id.get(loc_id)
    if loc is None:
        raise UnknownIdError(f"unknown location id {loc_id!r}")
    seen: list[str] = []
    while loc.file_ref is None:
        seen.append(loc.id)
        if loc.location_ref in seen:
            raise LocationCycleError(seen + [loc.location_ref])
        nxt = by_id.get(loc.location_ref or "")
        if nxt is None:
            raise UnknownIdError(
                f"location {loc.id!r} references unknown location {loc.location_ref!r}"
            )
        loc = nxt
    return loc.file_ref, loc.line, loc.column


# --- model-level validation -------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """One validation finding; kind is a stable machine-readable slug."""

    kind: str
    subject: str
    message: str


def validate_report(report: AsefReport, cfg: AsefConfiguration) -> list[Violation]:
    """Check a report against its own invariants and a configuration.

    Returns an empty list iff the report is internally consistent, its
    task exists in the merged configuration, and every check category
    falls inside (or below) the task's configured check categories.
    """
    violations: list[Violation] = []
    by_id: dict[str, AsefLocation] = {}
    for loc in report.locations:
        if loc.id in by_id:
            violations.append(
                Violation("duplicate-location-id", loc.id, f"duplicate location id {loc.id!r}")
            )
        by_id[loc.id] = loc

    check_ids: set[str] = set()
    for check in report.checks:
        if check.id in check_ids:
            violations.append(
                Violation("duplicate-check-id", check.id, f"duplicate check id {check.id!r}")
            )
        check_ids.add(check.id)
        for ref in (check.location_ref, *check.trace):
            if ref not in by_id:
                violations.append(
                    Violation(
                        "dangling-location-ref",
                        check.id,
                        f"check {check.id!r} references unknown location {ref!r}",
                    )
                )

    for loc in report.locations:
        seen = {loc.id}
        cur = loc
        while cur.location_ref is not None:
            nxt = by_id.get(cur.location_ref)
            if nxt is None:
                violations.append(
                    Violation(
                        "dangling-location-ref",
                        cur.id,
                        f"location {cur.id!r} references unknown location {cur.location_ref!r}",
                    )
                )
                break
            if nxt.id in seen:
                violations.append(
                    Violation("location-cycle", loc.id, f"cycle through location {nxt.id!r}")
                )
                break
            seen.add(nxt.id)
            cur = nxt

    part = _effective_or_none(cfg, violations)
    if part is None:
        return violations

    task = next((t for t in part.analysis_tasks if t.id == report.task_ref), None)
    if task is None:
        violations.append(
            Violation(
                "unknown-task",
                report.task_ref,
                f"report task {report.task_ref!r} not defined by the configuration",
            )
        )
        return violations

    target = next((t for t in part.check_targets if t.id == task.check_target_ref), None)
    if target is None:  # unreachable on reference-checked configs
        return violations
    for check in report.checks:
        if not any(is_ancestor(cat, check.category) for cat in target.categories):
            violations.append(
                Violation(
                    "category-out-of-scope",
                    check.id,
                    f"check {check.id!r} category {check.category} is outside the "
                    f"configured categories of check target {target.id!r}",
                )
            )
    return violations


def _effective_or_none(cfg: AsefConfiguration, violations: list[Violation]) -> ConfigPart | None:
    try:
        return effective_part(cfg)
    except DanglingReferenceError as exc:
        violations.append(Violation("dangling-config-ref", exc.ref, str(exc)))
        return None
