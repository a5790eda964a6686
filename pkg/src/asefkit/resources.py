"""Linked analysis resources and their append-only on-disk store.

Five resource kinds are linked into a traceability graph: an
AnalysisCase (configuration plus the files to analyze) has
AnalysisResults (one ingested report at one code commit), a result
bundles Checks, a check points at a Location, and locations chain to
other locations (macro expansions) or to a File pinned at an exact
commit.  Following links from any check therefore always ends at the
source file version the finding was produced from.

Storage is deliberately plain: one JSON document per resource under
``docs/``, report XML under ``blobs/``, and an ``index.jsonl`` whose
lines are appended as resources are minted.  Documents are never
rewritten; a crash can only leave orphaned documents, never a visible
resource with dangling links (the referring document is written last).
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Callable, Iterable, Protocol

from asefkit.asef.documents import CheckStatus, format_timestamp, parse_timestamp
from asefkit.asef.xmlio import serialize_report
from asefkit.asef.documents import AsefReport
from asefkit.errors import (
    UnknownResourceError,
    UnresolvableFileError,
    ValidationError,
)
from asefkit.taxonomy import CategoryId

RED, AMBER, GREEN = "red", "amber", "green"

_RED_STATUSES = (CheckStatus.UNSAFE, CheckStatus.SYNTACTIC_VIOLATION)
_AMBER_STATUSES = (CheckStatus.UNDECIDED, CheckStatus.WARNING)


def flag_for(statuses: Iterable[CheckStatus]) -> str:
    """The red/amber/green decision table over a set of check statuses."""
    statuses = list(statuses)
    if any(s in _RED_STATUSES for s in statuses):
        return RED
    if any(s in _AMBER_STATUSES for s in statuses):
        return AMBER
    return GREEN


def glob_to_regex(pattern: str) -> re.Pattern:
    """`*` matches within a path segment, `**` across segments."""
    out = []
    i = 0
    while i < len(pattern):
        ch = pattern[i]
        if ch == "*":
            if pattern[i : i + 2] == "**":
                out.append(".*")
                i += 2
                continue
            out.append("[^/]*")
        elif ch == "?":
            out.append("[^/]")
        else:
            out.append(re.escape(ch))
        i += 1
    return re.compile("^" + "".join(out) + "$")


@dataclass(frozen=True)
class FileLink:
    repo_id: str
    pattern: str  # exact repo-relative path or glob

    def matches(self, path: str) -> bool:
        return glob_to_regex(self.pattern).match(path) is not None

    def __str__(self) -> str:
        return f"{self.repo_id}:{self.pattern}"

    @classmethod
    def parse(cls, text: str) -> "FileLink":
        repo_id, sep, pattern = text.partition(":")
        if not sep or not repo_id or not pattern:
            raise ValidationError(f"expected 'repoId:pattern', got {text!r}")
        return cls(repo_id, pattern)


# --- resource shapes ----------------------------------------------------------


@dataclass(frozen=True)
class FileResource:
    uri: str
    repo_id: str
    path: str
    commit: str
    content_hash: str


@dataclass(frozen=True)
class AnalysisCaseResource:
    uri: str
    title: str
    tool_id: str
    config_xml: str
    file_links: tuple[FileLink, ...]
    created_at: datetime


@dataclass(frozen=True)
class AnalysisResultResource:
    uri: str
    case_ref: str
    commit: str
    tool_id: str
    created_at: datetime
    check_refs: tuple[str, ...]
    file_refs: tuple[str, ...]
    report_ref: str  # store-relative path of the ASEF report document


@dataclass(frozen=True)
class CheckResource:
    uri: str
    result_ref: str
    category: CategoryId
    status: CheckStatus
    location_ref: str
    message: str
    trace_refs: tuple[str, ...] = ()


@dataclass(frozen=True)
class LocationResource:
    uri: str
    line: int
    column: int
    file_ref: str | None = None
    location_ref: str | None = None


Resource = (
    FileResource
    | AnalysisCaseResource
    | AnalysisResultResource
    | CheckResource
    | LocationResource
)

_TYPE_NAMES = {
    FileResource: "File",
    AnalysisCaseResource: "AnalysisCase",
    AnalysisResultResource: "AnalysisResult",
    CheckResource: "Check",
    LocationResource: "Location",
}
_PATH_SEGMENT = {
    "File": "files",
    "AnalysisCase": "cases",
    "AnalysisResult": "results",
    "Check": "checks",
    "Location": "locations",
}


class CodeSource(Protocol):
    """Access to versioned source files, keyed by resource URI."""

    def resolve_uri(self, uri: str) -> tuple[str, str]:
        """URI -> (repo_id, repo-relative path); UnresolvableFileError otherwise."""
        ...

    def read_file(self, repo_id: str, path: str, commit: str) -> bytes:
        ...

    def list_files(self, repo_id: str, commit: str) -> list[str]:
        ...


# --- document (de)serialization --------------------------------------------------


def _to_document(resource: Resource) -> dict:
    if isinstance(resource, FileResource):
        return {
            "type": "File",
            "uri": resource.uri,
            "repoId": resource.repo_id,
            "path": resource.path,
            "commit": resource.commit,
            "contentHash": resource.content_hash,
        }
    if isinstance(resource, AnalysisCaseResource):
        return {
            "type": "AnalysisCase",
            "uri": resource.uri,
            "title": resource.title,
            "toolId": resource.tool_id,
            "configXml": resource.config_xml,
            "fileLinks": [str(link) for link in resource.file_links],
            "createdAt": format_timestamp(resource.created_at),
        }
    if isinstance(resource, AnalysisResultResource):
        return {
            "type": "AnalysisResult",
            "uri": resource.uri,
            "caseRef": resource.case_ref,
            "commit": resource.commit,
            "toolId": resource.tool_id,
            "createdAt": format_timestamp(resource.created_at),
            "checkRefs": list(resource.check_refs),
            "fileRefs": list(resource.file_refs),
            "reportRef": resource.report_ref,
        }
    if isinstance(resource, CheckResource):
        return {
            "type": "Check",
            "uri": resource.uri,
            "resultRef": resource.result_ref,
            "category": str(resource.category),
            "status": resource.status.value,
            "locationRef": resource.location_ref,
            "message": resource.message,
            "traceRefs": list(resource.trace_refs),
        }
    if isinstance(resource, LocationResource):
        doc = {
            "type": "Location",
            "uri": resource.uri,
            "line": resource.line,
            "column": resource.column,
        }
        if resource.file_ref is not None:
            doc["fileRef"] = resource.file_ref
        if resource.location_ref is not None:
            doc["locationRef"] = resource.location_ref
        return doc
    raise TypeError(f"not a resource: {resource!r}")  # pragma: no cover


def _from_document(doc: dict) -> Resource:
    kind = doc.get("type")
    if kind == "File":
        return FileResource(
            doc["uri"], doc["repoId"], doc["path"], doc["commit"], doc["contentHash"]
        )
    if kind == "AnalysisCase":
        return AnalysisCaseResource(
            doc["uri"],
            doc["title"],
            doc["toolId"],
            doc["configXml"],
            tuple(FileLink.parse(item) for item in doc["fileLinks"]),
            parse_timestamp(doc["createdAt"]),
        )
    if kind == "AnalysisResult":
        return AnalysisResultResource(
            doc["uri"],
            doc["caseRef"],
            doc["commit"],
            doc["toolId"],
            parse_timestamp(doc["createdAt"]),
            tuple(doc["checkRefs"]),
            tuple(doc["fileRefs"]),
            doc["reportRef"],
        )
    if kind == "Check":
        return CheckResource(
            doc["uri"],
            doc["resultRef"],
            CategoryId.parse(doc["category"]),
            CheckStatus(doc["status"]),
            doc["locationRef"],
            doc["message"],
            tuple(doc.get("traceRefs", ())),
        )
    if kind == "Location":
        return LocationResource(
            doc["uri"],
            doc["line"],
            doc["column"],
            doc.get("fileRef"),
            doc.get("locationRef"),
        )
    raise ValueError(f"unknown resource document type {kind!r}")


# --- the store ---------------------------------------------------------------------


class ResourceStore:
    """Single-writer, many-reader resource store rooted at a directory."""

    def __init__(self, root: str | Path, base_uri: str = "http://localhost:8765"):
        self.root = Path(root)
        self._lock = threading.RLock()
        self._resources: dict[str, Resource] = {}
        self._counters: dict[str, int] = {name: 0 for name in _PATH_SEGMENT}
        self._blob_counter = 0

        meta_path = self.root / "meta.json"
        if meta_path.is_file():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            self.base_uri = meta["baseUri"]
            self._load()
        else:
            self.base_uri = base_uri.rstrip("/")
            self.root.mkdir(parents=True, exist_ok=True)
            (self.root / "docs").mkdir(exist_ok=True)
            (self.root / "blobs").mkdir(exist_ok=True)
            meta_path.write_text(
                json.dumps({"baseUri": self.base_uri, "version": 1}, indent=2) + "\n",
                encoding="utf-8",
            )
            (self.root / "index.jsonl").touch()

    # -- persistence

    def _load(self) -> None:
        index_path = self.root / "index.jsonl"
        for raw in index_path.read_text(encoding="utf-8").splitlines():
            if not raw.strip():
                continue
            entry = json.loads(raw)
            doc_path = self.root / entry["path"]
            resource = _from_document(json.loads(doc_path.read_text(encoding="utf-8")))
            self._resources[resource.uri] = resource
            kind = entry["type"]
            number = int(entry["uri"].rsplit("/", 1)[1])
            self._counters[kind] = max(self._counters[kind], number)
        existing_blobs = sorted((self.root / "blobs").glob("report-*.xml"))
        if existing_blobs:
            self._blob_counter = max(
                int(p.stem.split("-")[1]) for p in existing_blobs
            )

    def _mint(self, kind: str) -> str:
        self._counters[kind] += 1
        return f"{self.base_uri}/{_PATH_SEGMENT[kind]}/{self._counters[kind]}"

    def _persist(self, resource: Resource) -> None:
        kind = _TYPE_NAMES[type(resource)]
        number = resource.uri.rsplit("/", 1)[1]
        rel = f"docs/{_PATH_SEGMENT[kind][:-1]}-{number}.json"
        doc_path = self.root / rel
        doc_path.write_text(
            json.dumps(_to_document(resource), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        with (self.root / "index.jsonl").open("a", encoding="utf-8") as index:
            index.write(
                json.dumps({"uri": resource.uri, "type": kind, "path": rel}) + "\n"
            )
        self._resources[resource.uri] = resource

    def _store_report_blob(self, report: AsefReport) -> str:
        self._blob_counter += 1
        rel = f"blobs/report-{self._blob_counter}.xml"
        (self.root / rel).write_text(serialize_report(report), encoding="utf-8")
        return rel

    def read_blob(self, rel: str) -> str:
        path = (self.root / rel).resolve()
        if not str(path).startswith(str(self.root.resolve())) or not path.is_file():
            raise UnknownResourceError(f"no stored document {rel!r}")
        return path.read_text(encoding="utf-8")

    # -- lookups

    def get(self, uri: str) -> Resource:
        with self._lock:
            resource = self._resources.get(uri)
        if resource is None:
            raise UnknownResourceError(f"unknown resource {uri!r}")
        return resource

    def _get_typed(self, uri: str, kind: type) -> Resource:
        resource = self.get(uri)
        if not isinstance(resource, kind):
            raise UnknownResourceError(
                f"{uri!r} is a {_TYPE_NAMES[type(resource)]}, "
                f"expected {_TYPE_NAMES[kind]}"
            )
        return resource

    def _all(self, kind: type) -> list:
        with self._lock:
            return [r for r in self._resources.values() if isinstance(r, kind)]

    def list_cases(self) -> list[AnalysisCaseResource]:
        return sorted(self._all(AnalysisCaseResource), key=lambda c: _uri_number(c.uri))

    def results_for_case(self, case_uri: str) -> list[AnalysisResultResource]:
        self._get_typed(case_uri, AnalysisCaseResource)
        results = [
            r for r in self._all(AnalysisResultResource) if r.case_ref == case_uri
        ]
        return sorted(results, key=lambda r: (r.created_at, _uri_number(r.uri)), reverse=True)

    def checks_for_result(self, result_uri: str) -> list[CheckResource]:
        result = self._get_typed(result_uri, AnalysisResultResource)
        return [self._get_typed(uri, CheckResource) for uri in result.check_refs]

    def files_for_result(self, result_uri: str) -> list[FileResource]:
        result = self._get_typed(result_uri, AnalysisResultResource)
        files = [self._get_typed(uri, FileResource) for uri in result.file_refs]
        return sorted(files, key=lambda f: (f.repo_id, f.path))

    def find_result(
        self, case_uri: str, commit: str, tool_id: str
    ) -> AnalysisResultResource | None:
        for result in self._all(AnalysisResultResource):
            if (
                result.case_ref == case_uri
                and result.commit == commit
                and result.tool_id == tool_id
            ):
                return result
        return None

    # -- factories

    def create_case(
        self,
        title: str,
        tool_id: str,
        config_xml: str,
        file_links: Iterable[FileLink | str],
        created_at: datetime | None = None,
    ) -> AnalysisCaseResource:
        links = tuple(
            link if isinstance(link, FileLink) else FileLink.parse(link)
            for link in file_links
        )
        if not title:
            raise ValidationError("case title must be non-empty")
        if not tool_id:
            raise ValidationError("case toolId must be non-empty")
        if not links:
            raise ValidationError("a case needs at least one file link")
        from asefkit.asef.xmlio import parse_config

        parse_config(config_xml)  # reject invalid configurations outright
        from datetime import timezone

        with self._lock:
            case = AnalysisCaseResource(
                uri=self._mint("AnalysisCase"),
                title=title,
                tool_id=tool_id,
                config_xml=config_xml,
                file_links=links,
                created_at=created_at or datetime.now(timezone.utc),
            )
            self._persist(case)
        return case

    def ingest_report(
        self,
        report: AsefReport,
        case_uri: str,
        commit: str,
        code: CodeSource,
    ) -> AnalysisResultResource:
        """Create the result, check, location and file resources of a report.

        File refs must already be substituted to URIs; every URI must
        resolve to a repository file at ``commit``.  Ingesting the same
        (case, commit, tool) again returns the existing result.
        """
        case = self._get_typed(case_uri, AnalysisCaseResource)
        with self._lock:
            existing = self.find_result(case_uri, commit, report.tool_id)
            if existing is not None:
                return existing

            file_cache: dict[tuple[str, str], FileResource] = {
                (f.repo_id, f.path): f
                for f in self._all(FileResource)
                if f.commit == commit
            }
            new_files: list[FileResource] = []

            def file_resource(repo_id: str, path: str) -> FileResource:
                key = (repo_id, path)
                if key not in file_cache:
                    content = code.read_file(repo_id, path, commit)
                    resource = FileResource(
                        uri=self._mint("File"),
                        repo_id=repo_id,
                        path=path,
                        commit=commit,
                        content_hash=hashlib.sha256(content).hexdigest(),
                    )
                    file_cache[key] = resource
                    new_files.append(resource)
                return file_cache[key]

            # Every file of the case at this commit, flagged or clean.
            case_files: list[FileResource] = []
            for link in case.file_links:
                for path in sorted(code.list_files(link.repo_id, commit)):
                    if link.matches(path):
                        case_files.append(file_resource(link.repo_id, path))

            # Locations, terminals first so chain links can be rewritten.
            loc_uris: dict[str, str] = {}
            new_locations: list[LocationResource] = []
            pending = list(report.locations)
            while pending:
                progressed = False
                for loc in list(pending):
                    if loc.location_ref is not None and loc.location_ref not in loc_uris:
                        continue
                    uri = self._mint("Location")
                    loc_uris[loc.id] = uri
                    if loc.file_ref is not None:
                        repo_id, path = code.resolve_uri(loc.file_ref)
                        target = file_resource(repo_id, path)
                        new_locations.append(
                            LocationResource(uri, loc.line, loc.column, file_ref=target.uri)
                        )
                    else:
                        new_locations.append(
                            LocationResource(
                                uri, loc.line, loc.column,
                                location_ref=loc_uris[loc.location_ref],
                            )
                        )
                    pending.remove(loc)
                    progressed = True
                if not progressed:  # pragma: no cover - parse enforces acyclicity
                    raise ValidationError("location chain does not terminate")

            result_uri = self._mint("AnalysisResult")
            new_checks = [
                CheckResource(
                    uri=self._mint("Check"),
                    result_ref=result_uri,
                    category=check.category,
                    status=check.status,
                    location_ref=loc_uris[check.location_ref],
                    message=check.message,
                    trace_refs=tuple(loc_uris[step] for step in check.trace),
                )
                for check in report.checks
            ]

            flagged_file_uris = {
                self._terminal_file_uri_of(loc, {l.uri: l for l in new_locations})
                for loc in new_locations
            }
            file_refs = [f.uri for f in case_files]
            file_refs += [
                uri
                for uri in sorted(flagged_file_uris)
                if uri not in file_refs
            ]

            result = AnalysisResultResource(
                uri=result_uri,
                case_ref=case_uri,
                commit=commit,
                tool_id=report.tool_id,
                created_at=report.created_at,
                check_refs=tuple(c.uri for c in new_checks),
                file_refs=tuple(file_refs),
                report_ref=self._store_report_blob(report),
            )
            for resource in (*new_files, *new_locations, *new_checks, result):
                self._persist(resource)
        return result

    # -- traversal and flags

    def _terminal_file_uri_of(
        self, loc: LocationResource, extra: dict[str, LocationResource] | None = None
    ) -> str:
        seen = 0
        while loc.file_ref is None:
            assert loc.location_ref is not None
            nxt = (extra or {}).get(loc.location_ref)
            if nxt is None:
                nxt = self._get_typed(loc.location_ref, LocationResource)
            loc = nxt
            seen += 1
            if seen > 10_000:  # pragma: no cover
                raise ValidationError("location chain does not terminate")
        return loc.file_ref

    def terminal_location(self, location_uri: str) -> LocationResource:
        loc = self._get_typed(location_uri, LocationResource)
        while loc.file_ref is None:
            assert loc.location_ref is not None
            loc = self._get_typed(loc.location_ref, LocationResource)
        return loc

    def checks_on_file(self, result_uri: str, file_uri: str) -> list[CheckResource]:
        self._get_typed(file_uri, FileResource)
        return [
            check
            for check in self.checks_for_result(result_uri)
            if self.terminal_location(check.location_ref).file_ref == file_uri
        ]

    def file_flag(self, result_uri: str, file_uri: str) -> str:
        checks = self.checks_on_file(result_uri, file_uri)
        return flag_for(check.status for check in checks)

    def result_flag(self, result_uri: str) -> str:
        result = self._get_typed(result_uri, AnalysisResultResource)
        flags = [self.file_flag(result_uri, file_uri) for file_uri in result.file_refs]
        if RED in flags:
            return RED
        if AMBER in flags:
            return AMBER
        return GREEN

    def line_flags(self, result_uri: str, file_uri: str) -> dict[int, list[CheckResource]]:
        out: dict[int, list[CheckResource]] = {}
        for check in self.checks_on_file(result_uri, file_uri):
            line = self.terminal_location(check.location_ref).line
            out.setdefault(line, []).append(check)
        for line in out:
            out[line].sort(key=lambda c: c.uri)
        return dict(sorted(out.items()))


def _uri_number(uri: str) -> int:
    return int(uri.rsplit("/", 1)[1])
