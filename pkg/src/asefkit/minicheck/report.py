"""Native findings and the line-oriented native report text format.

The format is deliberately trivial: a header line, then one
tab-separated record per finding.  It exists so the adapter has a
tool-native artifact to convert, exactly like it would for an external
analyzer.  Records are lossless: messages escape tabs and newlines,
witness and trace fields use ``-`` when absent.

Verdict vocabulary: the analyzer itself produces ``proven-safe``,
``proven-unsafe`` and ``undecided`` (plus ``syntactic-violation`` for
parse-stage misuse such as use before declaration); canned stub reports
may also use the direct status names ``safe``, ``unsafe``, ``warning``
and ``syntactic-violation``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from asefkit.errors import DocumentSyntaxError

HEADER = "#asefkit-native v1"

MC_CATEGORIES = (
    "MC:signed-overflow",
    "MC:conv-overflow",
    "MC:div-zero",
    "MC:shift-amount",
    "MC:shift-negative",
    "MC:uninit-read",
    "MC:assert",
)

ANALYZER_VERDICTS = ("proven-safe", "proven-unsafe", "undecided", "syntactic-violation")
STUB_VERDICTS = ("safe", "unsafe", "undecided", "warning", "syntactic-violation")
ALL_VERDICTS = tuple(dict.fromkeys(ANALYZER_VERDICTS + STUB_VERDICTS))


@dataclass(frozen=True)
class NativeFinding:
    native_category: str
    file: str
    line: int
    column: int
    verdict: str
    message: str
    witness: tuple[tuple[str, int], ...] | None = None
    trace: tuple[tuple[str, int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.verdict not in ALL_VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")

    @property
    def site(self) -> tuple[str, int, int]:
        return (self.file, self.line, self.column)

    def with_witness(self, witness: tuple[tuple[str, int], ...]) -> "NativeFinding":
        rendered = ", ".join(f"{name} = {value}" for name, value in witness)
        return replace(
            self,
            verdict="proven-unsafe",
            witness=witness,
            message=f"{self.message}; witness: {rendered}",
        )


def sort_findings(findings: list[NativeFinding]) -> list[NativeFinding]:
    return sorted(findings, key=lambda f: (f.file, f.line, f.column, f.native_category))


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(text: str) -> str:
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            out.append({"t": "\t", "n": "\n", "\\": "\\"}.get(nxt, nxt))
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def emit_native_report(findings: list[NativeFinding]) -> str:
    lines = [HEADER]
    for f in findings:
        witness = (
            ",".join(f"{name}={value}" for name, value in f.witness)
            if f.witness is not None
            else "-"
        )
        trace = (
            ";".join(f"{file}:{line}:{col}" for file, line, col in f.trace)
            if f.trace
            else "-"
        )
        lines.append(
            "\t".join(
                (
                    f.native_category,
                    _escape(f.file),
                    str(f.line),
                    str(f.column),
                    f.verdict,
                    _escape(f.message),
                    witness,
                    trace,
                )
            )
        )
    return "\n".join(lines) + "\n"


def parse_native_report(text: str) -> list[NativeFinding]:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise DocumentSyntaxError(f"missing native report header {HEADER!r}")
    findings: list[NativeFinding] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip() or raw.startswith("#"):
            continue
        fields = raw.split("\t")
        if len(fields) != 8:
            raise DocumentSyntaxError(
                f"line {lineno}: expected 8 tab-separated fields, got {len(fields)}"
            )
        category, file, line_s, col_s, verdict, message, witness_s, trace_s = fields
        try:
            line, col = int(line_s), int(col_s)
        except ValueError:
            raise DocumentSyntaxError(f"line {lineno}: line/column must be integers")
        witness = None
        if witness_s != "-":
            pairs = []
            for item in witness_s.split(","):
                if item:
                    name, _, value = item.partition("=")
                    try:
                        pairs.append((name, int(value)))
                    except ValueError:
                        raise DocumentSyntaxError(
                            f"line {lineno}: bad witness entry {item!r}"
                        )
            witness = tuple(pairs)
        trace: list[tuple[str, int, int]] = []
        if trace_s != "-":
            for step in trace_s.split(";"):
                try:
                    step_file, step_line, step_col = step.rsplit(":", 2)
                    trace.append((_unescape(step_file), int(step_line), int(step_col)))
                except ValueError:
                    raise DocumentSyntaxError(f"line {lineno}: bad trace step {step!r}")
        try:
            findings.append(
                NativeFinding(
                    category,
                    _unescape(file),
                    line,
                    col,
                    verdict,
                    _unescape(message),
                    witness,
                    tuple(trace),
                )
            )
        except ValueError as exc:
            raise DocumentSyntaxError(f"line {lineno}: {exc}") from exc
    return findings
