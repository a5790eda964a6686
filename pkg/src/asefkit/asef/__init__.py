"""ASEF exchange format: configuration and report documents.

Two XML document kinds make tools interchangeable: a configuration
(what to analyze, on which hardware/language targets, with which check
categories) and a report (locations, checks with status and category,
failure traces).  The normative element vocabulary lives in
``schemas/asef-config.xsd`` and ``schemas/asef-report.xsd`` at the repo
root; this package is the executable counterpart.
"""

from asefkit.asef.documents import (
    AnalysisTask,
    AsefCheck,
    AsefConfiguration,
    AsefLocation,
    AsefReport,
    CheckStatus,
    CheckTarget,
    ConfigPart,
    Endianness,
    ExecutionModelTarget,
    HardwareTarget,
    LanguageTarget,
    SourceFile,
    SourceModule,
    UriSubstitutionRule,
)
from asefkit.asef.ops import (
    Violation,
    effective_part,
    load_config_pair,
    merge_local,
    resolve_location,
    validate_report,
)
from asefkit.asef.xmlio import (
    parse_config,
    parse_report,
    serialize_config,
    serialize_report,
)

__all__ = [
    "AnalysisTask",
    "AsefCheck",
    "AsefConfiguration",
    "AsefLocation",
    "AsefReport",
    "CheckStatus",
    "CheckTarget",
    "ConfigPart",
    "Endianness",
    "ExecutionModelTarget",
    "HardwareTarget",
    "LanguageTarget",
    "SourceFile",
    "SourceModule",
    "UriSubstitutionRule",
    "Violation",
    "effective_part",
    "load_config_pair",
    "merge_local",
    "parse_config",
    "parse_report",
    "resolve_location",
    "serialize_config",
    "serialize_report",
    "validate_report",
]
