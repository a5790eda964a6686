"""XML reading and writing for ASEF configurations and reports.

Parsing is strict: unknown elements or attributes, missing required
attributes, out-of-range values, duplicate ids, dangling references and
macro-location cycles are all rejected with the element path that
triggered the problem.  Serialization is canonical (fixed attribute
order, two-space indent, UTF-8), so serializing the same model twice is
byte-stable and ``parse(serialize(x)) == x``.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET

from asefkit.asef.documents import (
    AnalysisTask,
    AsefCheck,
    AsefConfiguration,
    AsefLocation,
    AsefReport,
    CheckStatus,
    CheckTarget,
    ConfigPart,
    CStandard,
    Endianness,
    ExecutionModelTarget,
    HardwareTarget,
    LanguageTarget,
    SourceFile,
    SourceModule,
    UriSubstitutionRule,
    format_timestamp,
    parse_timestamp,
)
from asefkit.errors import (
    DanglingReferenceError,
    DocumentSyntaxError,
    LocationCycleError,
    SchemaError,
)
from asefkit.taxonomy import CategoryId

XML_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


# --- parsing helpers ----------------------------------------------------------


class _Attrs:
    """Attribute accessor that tracks consumption for unknown-attr checks."""

    def __init__(self, elem: ET.Element, path: str):
        self.elem = elem
        self.path = path
        self._left = dict(elem.attrib)

    def required(self, name: str) -> str:
        if name not in self._left:
            raise SchemaError(f"missing required attribute {name!r}", self.path)
        return self._left.pop(name)

    def optional(self, name: str) -> str | None:
        return self._left.pop(name, None)

    def int_required(self, name: str) -> int:
        raw = self.required(name)
        try:
            return int(raw)
        except ValueError:
            raise SchemaError(f"attribute {name!r} must be an integer, got {raw!r}", self.path)

    def remaining(self) -> dict[str, str]:
        left, self._left = self._left, {}
        return left

    def finish(self) -> None:
        if self._left:
            names = ", ".join(sorted(self._left))
            raise SchemaError(f"unknown attribute(s): {names}", self.path)


def _no_children(elem: ET.Element, path: str) -> None:
    for child in elem:
        raise SchemaError(f"unexpected element {child.tag!r}", path)


def _build(factory, path: str):
    """Run a model constructor, turning ValueError into SchemaError."""
    try:
        return factory()
    except ValueError as exc:
        raise SchemaError(str(exc), path) from exc


def _parse_xml(text: str) -> ET.Element:
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        raise DocumentSyntaxError(f"malformed XML: {exc}") from exc


# --- configuration parsing ----------------------------------------------------


def parse_config(xml_text: str) -> AsefConfiguration:
    root = _parse_xml(xml_text)
    if root.tag != "AsefConfiguration":
        raise SchemaError(f"expected root AsefConfiguration, got {root.tag!r}", root.tag)
    _Attrs(root, "AsefConfiguration").finish()

    global_part: ConfigPart | None = None
    local_part: ConfigPart | None = None
    for child in root:
        path = f"AsefConfiguration/{child.tag}"
        if child.tag == "GlobalPart":
            if global_part is not None:
                raise SchemaError("duplicate GlobalPart", path)
            global_part = _parse_part(child, path)
        elif child.tag == "LocalPart":
            if local_part is not None:
                raise SchemaError("duplicate LocalPart", path)
            local_part = _parse_part(child, path)
        else:
            raise SchemaError(f"unexpected element {child.tag!r}", path)

    cfg = AsefConfiguration(global_part or ConfigPart(), local_part)
    # References must resolve on the effective (merged) part.
    from asefkit.asef.ops import effective_part

    effective_part(cfg)
    return cfg


_PART_CHILD_ORDER = (
    "HardwareTarget",
    "LanguageTarget",
    "CheckTarget",
    "ExecutionModelTarget",
    "SourceModule",
    "AnalysisTask",
    "URISubstitutionRule",
)


def _parse_part(elem: ET.Element, base: str) -> ConfigPart:
    _Attrs(elem, base).finish()
    buckets: dict[str, list] = {kind: [] for kind in _PART_CHILD_ORDER}
    counters: dict[str, int] = {kind: 0 for kind in _PART_CHILD_ORDER}
    for child in elem:
        if child.tag not in buckets:
            raise SchemaError(f"unexpected element {child.tag!r}", f"{base}/{child.tag}")
        counters[child.tag] += 1
        path = f"{base}/{child.tag}[{counters[child.tag]}]"
        buckets[child.tag].append(_PART_PARSERS[child.tag](child, path))

    part = ConfigPart(
        hardware_targets=tuple(buckets["HardwareTarget"]),
        language_targets=tuple(buckets["LanguageTarget"]),
        check_targets=tuple(buckets["CheckTarget"]),
        execution_model_targets=tuple(buckets["ExecutionModelTarget"]),
        source_modules=tuple(buckets["SourceModule"]),
        analysis_tasks=tuple(buckets["AnalysisTask"]),
        uri_substitution_rules=tuple(buckets["URISubstitutionRule"]),
    )
    _check_unique_ids(part, base)
    return part


def _check_unique_ids(part: ConfigPart, base: str) -> None:
    seen: dict[str, str] = {}
    for kind, entry_id, _ in part.identified_entries():
        if entry_id in seen:
            raise SchemaError(
                f"duplicate id {entry_id!r} ({seen[entry_id]} vs {kind})", base
            )
        seen[entry_id] = kind
    rules = {}
    for rule in part.uri_substitution_rules:
        if rule.local_prefix in rules:
            raise SchemaError(
                f"duplicate URISubstitutionRule localPrefix {rule.local_prefix!r}", base
            )
        rules[rule.local_prefix] = rule


def _parse_hardware(elem: ET.Element, path: str) -> HardwareTarget:
    attrs = _Attrs(elem, path)
    _no_children(elem, path)
    endianness_raw = attrs.required("endianness")
    try:
        endianness = Endianness(endianness_raw)
    except ValueError:
        raise SchemaError(f"endianness must be little or big, got {endianness_raw!r}", path)
    target = _build(
        lambda: HardwareTarget(
            id=attrs.required("id"),
            pointer_size_bits=attrs.int_required("pointerSizeBits"),
            endianness=endianness,
            int_size_bits=attrs.int_required("intSizeBits"),
            short_size_bits=attrs.int_required("shortSizeBits"),
        ),
        path,
    )
    attrs.finish()
    return target


def _parse_language(elem: ET.Element, path: str) -> LanguageTarget:
    attrs = _Attrs(elem, path)
    _no_children(elem, path)
    ident = attrs.required("id")
    standard_raw = attrs.required("standard")
    try:
        standard = CStandard(standard_raw)
    except ValueError:
        raise SchemaError(
            f"standard must be one of C90/C99/C11, got {standard_raw!r}", path
        )
    extensions = tuple(attrs.remaining().items())
    return _build(lambda: LanguageTarget(ident, standard, extensions), path)


def _parse_check_target(elem: ET.Element, path: str) -> CheckTarget:
    attrs = _Attrs(elem, path)
    ident = attrs.required("id")
    attrs.finish()
    categories = []
    for i, child in enumerate(elem, start=1):
        cpath = f"{path}/{child.tag}[{i}]"
        if child.tag != "CorrectnessCheckCategory":
            raise SchemaError(f"unexpected element {child.tag!r}", cpath)
        cattrs = _Attrs(child, cpath)
        _no_children(child, cpath)
        name = cattrs.required("name")
        cattrs.finish()
        try:
            categories.append(CategoryId.parse(name))
        except ValueError as exc:
            raise SchemaError(str(exc), cpath) from exc
    return _build(lambda: CheckTarget(ident, tuple(categories)), path)


def _parse_execution_model(elem: ET.Element, path: str) -> ExecutionModelTarget:
    attrs = _Attrs(elem, path)
    _no_children(elem, path)
    ident = attrs.required("id")
    attributes = tuple(attrs.remaining().items())
    return _build(lambda: ExecutionModelTarget(ident, attributes), path)


def _parse_source_module(elem: ET.Element, path: str) -> SourceModule:
    attrs = _Attrs(elem, path)
    ident = attrs.required("id")
    attrs.finish()
    files = []
    for i, child in enumerate(elem, start=1):
        cpath = f"{path}/{child.tag}[{i}]"
        if child.tag != "SourceFile":
            raise SchemaError(f"unexpected element {child.tag!r}", cpath)
        cattrs = _Attrs(child, cpath)
        _no_children(child, cpath)
        ref = cattrs.required("ref")
        cattrs.finish()
        files.append(_build(lambda: SourceFile(ref), cpath))
    return _build(lambda: SourceModule(ident, tuple(files)), path)


def _parse_task(elem: ET.Element, path: str) -> AnalysisTask:
    attrs = _Attrs(elem, path)
    _no_children(elem, path)
    task = _build(
        lambda: AnalysisTask(
            id=attrs.required("id"),
            source_module_ref=attrs.required("sourceModuleRef"),
            hardware_target_ref=attrs.required("hardwareTargetRef"),
            language_target_ref=attrs.required("languageTargetRef"),
            check_target_ref=attrs.required("checkTargetRef"),
            execution_model_target_ref=attrs.optional("executionModelTargetRef"),
        ),
        path,
    )
    attrs.finish()
    return task


def _parse_rule(elem: ET.Element, path: str) -> UriSubstitutionRule:
    attrs = _Attrs(elem, path)
    _no_children(elem, path)
    rule = _build(
        lambda: UriSubstitutionRule(
            local_prefix=attrs.required("localPrefix"),
            uri_prefix=attrs.required("uriPrefix"),
        ),
        path,
    )
    attrs.finish()
    return rule


_PART_PARSERS = {
    "HardwareTarget": _parse_hardware,
    "LanguageTarget": _parse_language,
    "CheckTarget": _parse_check_target,
    "ExecutionModelTarget": _parse_execution_model,
    "SourceModule": _parse_source_module,
    "AnalysisTask": _parse_task,
    "URISubstitutionRule": _parse_rule,
}


# --- configuration serialization ----------------------------------------------


def serialize_config(cfg: AsefConfiguration) -> str:
    root = ET.Element("AsefConfiguration")
    if not cfg.global_part.is_empty():
        _emit_part(root, "GlobalPart", cfg.global_part)
    if cfg.local_part is not None:
        _emit_part(root, "LocalPart", cfg.local_part)
    return _render(root)


def _emit_part(root: ET.Element, tag: str, part: ConfigPart) -> None:
    elem = ET.SubElement(root, tag)
    for hw in part.hardware_targets:
        ET.SubElement(
            elem,
            "HardwareTarget",
            {
                "id": hw.id,
                "pointerSizeBits": str(hw.pointer_size_bits),
                "endianness": hw.endianness.value,
                "intSizeBits": str(hw.int_size_bits),
                "shortSizeBits": str(hw.short_size_bits),
            },
        )
    for lang in part.language_targets:
        attrs = {"id": lang.id, "standard": lang.standard.value}
        attrs.update(dict(lang.extensions))
        ET.SubElement(elem, "LanguageTarget", attrs)
    for target in part.check_targets:
        t = ET.SubElement(elem, "CheckTarget", {"id": target.id})
        for category in target.categories:
            ET.SubElement(t, "CorrectnessCheckCategory", {"name": str(category)})
    for model in part.execution_model_targets:
        attrs = {"id": model.id}
        attrs.update(dict(model.attributes))
        ET.SubElement(elem, "ExecutionModelTarget", attrs)
    for module in part.source_modules:
        m = ET.SubElement(elem, "SourceModule", {"id": module.id})
        for f in module.files:
            ET.SubElement(m, "SourceFile", {"ref": f.ref})
    for task in part.analysis_tasks:
        attrs = {
            "id": task.id,
            "sourceModuleRef": task.source_module_ref,
            "hardwareTargetRef": task.hardware_target_ref,
            "languageTargetRef": task.language_target_ref,
            "checkTargetRef": task.check_target_ref,
        }
        if task.execution_model_target_ref is not None:
            attrs["executionModelTargetRef"] = task.execution_model_target_ref
        ET.SubElement(elem, "AnalysisTask", attrs)
    for rule in part.uri_substitution_rules:
        ET.SubElement(
            elem,
            "URISubstitutionRule",
            {"localPrefix": rule.local_prefix, "uriPrefix": rule.uri_prefix},
        )


def _render(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return XML_HEADER + ET.tostring(root, encoding="unicode") + "\n"


# --- report parsing -------------------------------------------------------------


def parse_report(xml_text: str) -> AsefReport:
    root = _parse_xml(xml_text)
    if root.tag != "AsefReport":
        raise SchemaError(f"expected root AsefReport, got {root.tag!r}", root.tag)
    attrs = _Attrs(root, "AsefReport")
    tool_id = attrs.required("toolId")
    task_ref = attrs.required("taskRef")
    created_raw = attrs.required("createdAt")
    attrs.finish()
    try:
        created_at = parse_timestamp(created_raw)
    except ValueError as exc:
        raise SchemaError(str(exc), "AsefReport") from exc

    locations: list[AsefLocation] = []
    checks: list[AsefCheck] = []
    loc_count = check_count = 0
    for child in root:
        if child.tag == "Location":
            loc_count += 1
            locations.append(_parse_location(child, f"AsefReport/Location[{loc_count}]"))
        elif child.tag == "Check":
            check_count += 1
            checks.append(_parse_check(child, f"AsefReport/Check[{check_count}]"))
        else:
            raise SchemaError(f"unexpected element {child.tag!r}", f"AsefReport/{child.tag}")

    report = _build(
        lambda: AsefReport(tool_id, task_ref, created_at, tuple(locations), tuple(checks)),
        "AsefReport",
    )
    _validate_report_structure(report)
    return report


def _parse_location(elem: ET.Element, path: str) -> AsefLocation:
    attrs = _Attrs(elem, path)
    _no_children(elem, path)
    loc = _build(
        lambda: AsefLocation(
            id=attrs.required("id"),
            line=attrs.int_required("line"),
            column=attrs.int_required("column"),
            file_ref=attrs.optional("fileRef"),
            location_ref=attrs.optional("locationRef"),
        ),
        path,
    )
    attrs.finish()
    return loc


def _parse_check(elem: ET.Element, path: str) -> AsefCheck:
    attrs = _Attrs(elem, path)
    ident = attrs.required("id")
    category_raw = attrs.required("category")
    status_raw = attrs.required("status")
    location_ref = attrs.required("locationRef")
    attrs.finish()
    try:
        category = CategoryId.parse(category_raw)
    except ValueError as exc:
        raise SchemaError(str(exc), path) from exc
    try:
        status = CheckStatus(status_raw)
    except ValueError:
        allowed = ", ".join(s.value for s in CheckStatus)
        raise SchemaError(f"status must be one of {allowed}; got {status_raw!r}", path)

    message = ""
    message_seen = False
    trace: list[str] = []
    for i, child in enumerate(elem, start=1):
        cpath = f"{path}/{child.tag}[{i}]"
        if child.tag == "Message":
            if message_seen:
                raise SchemaError("duplicate Message element", cpath)
            message_seen = True
            _Attrs(child, cpath).finish()
            _no_children(child, cpath)
            message = child.text or ""
        elif child.tag == "TraceStep":
            cattrs = _Attrs(child, cpath)
            _no_children(child, cpath)
            trace.append(cattrs.required("locationRef"))
            cattrs.finish()
        else:
            raise SchemaError(f"unexpected element {child.tag!r}", cpath)

    return _build(
        lambda: AsefCheck(ident, category, status, location_ref, message, tuple(trace)),
        path,
    )


def _validate_report_structure(report: AsefReport) -> None:
    """Unique ids, resolvable refs, acyclic file-terminated macro chains."""
    by_id: dict[str, AsefLocation] = {}
    for loc in report.locations:
        if loc.id in by_id:
            raise SchemaError(f"duplicate Location id {loc.id!r}", "AsefReport")
        by_id[loc.id] = loc

    check_ids: set[str] = set()
    for check in report.checks:
        if check.id in check_ids:
            raise SchemaError(f"duplicate Check id {check.id!r}", "AsefReport")
        check_ids.add(check.id)
        for ref in (check.location_ref, *check.trace):
            if ref not in by_id:
                raise DanglingReferenceError(
                    f"check {check.id!r} references unknown location {ref!r}", ref
                )

    state: dict[str, int] = {}  # 1 = visiting, 2 = done

    def walk(loc: AsefLocation, stack: list[str]) -> None:
        state[loc.id] = 1
        stack.append(loc.id)
        if loc.location_ref is not None:
            target = by_id.get(loc.location_ref)
            if target is None:
                raise DanglingReferenceError(
                    f"location {loc.id!r} references unknown location "
                    f"{loc.location_ref!r}",
                    loc.location_ref,
                )
            if state.get(target.id) == 1:
                cycle = stack[stack.index(target.id):]
                raise LocationCycleError(cycle + [target.id])
            if state.get(target.id) != 2:
                walk(target, stack)
        state[loc.id] = 2
        stack.pop()

    for loc in report.locations:
        if state.get(loc.id) != 2:
            walk(loc, [])


# --- report serialization -------------------------------------------------------


def serialize_report(report: AsefReport) -> str:
    root = ET.Element(
        "AsefReport",
        {
            "toolId": report.tool_id,
            "taskRef": report.task_ref,
            "createdAt": format_timestamp(report.created_at),
        },
    )
    for loc in report.locations:
        attrs = {"id": loc.id}
        if loc.file_ref is not None:
            attrs["fileRef"] = loc.file_ref
        else:
            attrs["locationRef"] = loc.location_ref or ""
        attrs["line"] = str(loc.line)
        attrs["column"] = str(loc.column)
        ET.SubElement(root, "Location", attrs)
    for check in report.checks:
        c = ET.SubElement(
            root,
            "Check",
            {
                "id": check.id,
                "category": str(check.category),
                "status": check.status.value,
                "locationRef": check.location_ref,
            },
        )
        if check.message:
            ET.SubElement(c, "Message").text = check.message
        for step in check.trace:
            ET.SubElement(c, "TraceStep", {"locationRef": step})
    return _render(root)
