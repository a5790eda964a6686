"""Exception hierarchy shared by all asefkit modules.

Every error the toolchain can signal derives from :class:`AsefkitError`
so callers (CLI, service) can map the class to an exit code or HTTP
status in one place.
"""

from __future__ import annotations


class AsefkitError(Exception):
    """Base class for all toolchain errors."""


# --- document format errors (ASEF XML, native reports) ---------------------

class DocumentSyntaxError(AsefkitError):
    """The input is not well-formed (XML or native report text)."""


class SchemaError(AsefkitError):
    """Well-formed input that violates the document schema.

    Carries the path of the offending element, e.g.
    ``AsefConfiguration/GlobalPart/HardwareTarget[2]``.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class DanglingReferenceError(AsefkitError):
    """An identifier reference does not resolve within its document."""

    def __init__(self, message: str, ref: str = ""):
        super().__init__(message)
        self.ref = ref


class LocationCycleError(AsefkitError):
    """A chain of macro locations references itself."""

    def __init__(self, cycle_ids: list[str]):
        super().__init__("location reference cycle: " + " -> ".join(cycle_ids))
        self.cycle_ids = list(cycle_ids)


class UnknownIdError(AsefkitError):
    """Lookup of an id that does not exist in the document."""


# --- taxonomy / conversion --------------------------------------------------

class UnknownNativeError(AsefkitError):
    """A tool-native category name has no mapping to an ASEF category."""

    def __init__(self, pairs: list[tuple[str, str]]):
        rendered = ", ".join(f"{t}:{n}" for t, n in pairs)
        super().__init__(f"unmapped native categories: {rendered}")
        self.pairs = list(pairs)


# --- tool execution ----------------------------------------------------------

class ToolCrashError(AsefkitError):
    """The analysis tool failed: nonzero exit, missing input or report."""


class ToolTimeoutError(AsefkitError):
    """The analysis tool exceeded its time budget."""


# --- resources / orchestration ----------------------------------------------

class ValidationError(AsefkitError):
    """Invalid arguments to a resource factory."""


class UnknownResourceError(AsefkitError):
    """A resource URI that was never minted by this store."""


class UnresolvableFileError(AsefkitError):
    """A report file URI matches no known repository file at the commit."""


class UnknownRepoError(AsefkitError):
    """A push event names a repository that is not bound."""


class RepoUnavailableError(AsefkitError):
    """A bound repository could not be read (retried on the next tick)."""


class CheckoutError(AsefkitError):
    """Checking out a commit into a workspace failed."""


class ConversionError(AsefkitError):
    """Native-to-ASEF conversion failed."""


class PublishError(AsefkitError):
    """Committing the report into the analysis repository failed."""


class IngestError(AsefkitError):
    """Parsing or ingesting a published report failed."""
