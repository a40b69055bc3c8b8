"""Domain errors shared by every assaykg module.

Each error class name doubles as the machine-readable code surfaced by the
HTTP API and the CLI, so the names are part of the external contract.
"""


class AssayKGError(Exception):
    """Base class for all assaykg domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# --- graph ----------------------------------------------------------------

class EmptyTitle(AssayKGError):
    pass


class EmptyLabel(AssayKGError):
    pass


class InvalidUri(AssayKGError):
    pass


class UnknownPaper(AssayKGError):
    pass


class UnknownContribution(AssayKGError):
    pass


class DuplicateStatement(AssayKGError):
    """The (subject, predicate, object) triple already exists; graph unchanged."""


# --- corpus ---------------------------------------------------------------

class UnreadableSource(AssayKGError):
    """Stream-level failure while reading a corpus file."""


# --- semantifier ----------------------------------------------------------

class EmptyCorpus(AssayKGError):
    pass


class EmptyText(AssayKGError):
    pass


class InvalidLabel(AssayKGError):
    """A statement label part is empty or contains the key separator."""


class DegenerateLabelWarning(UserWarning):
    """A label lost all its positive examples to the calibration split."""


# --- curation -------------------------------------------------------------

class SessionClosed(AssayKGError):
    pass


class UnknownProposal(AssayKGError):
    pass


class DuplicateStatementInSession(AssayKGError):
    pass


class PendingProposalsRemain(AssayKGError):
    pass


class InvalidDecision(AssayKGError):
    pass


# --- compare / search -----------------------------------------------------

class EmptySelection(AssayKGError):
    pass


# --- persistence / export -------------------------------------------------

class InvalidBaseUri(AssayKGError):
    pass


class ParseError(AssayKGError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class IoFailure(AssayKGError):
    pass


class VersionMismatch(AssayKGError):
    pass


class ChecksumMismatch(AssayKGError):
    pass


# --- service --------------------------------------------------------------

class UnknownAssay(AssayKGError):
    pass


class UnknownSession(AssayKGError):
    pass


class ModelUnavailable(AssayKGError):
    pass


class InvalidParameter(AssayKGError):
    pass
