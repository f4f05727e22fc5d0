"""Exception types shared across the package.

Two families: document/input problems (bad files, bad dictionaries, IO) and
engine problems (violated invariants, unresolvable paths). The CLI maps the
first family to exit code 1 and the second to exit code 2.
"""


class ModelDiffError(Exception):
    """Base class for every error raised by this package."""


class DocumentError(ModelDiffError):
    """A problem with user-supplied input (documents, dictionaries, IO)."""


class MalformedDocument(DocumentError):
    """Input is not well-formed in the interchange subset grammar."""


class UnknownMetatype(DocumentError):
    """Document uses an element tag outside the supported subsets."""


class ContainmentViolation(DocumentError):
    """An element sits under a parent that may not contain its kind."""


class DanglingEdge(DocumentError):
    """An edge references an id that does not resolve in the document."""


class MissingName(DocumentError):
    """A named metatype occurs without a non-empty name."""


class EmptyGroup(DocumentError):
    """A synonym dictionary line holds fewer than two tokens."""


class IoFailure(DocumentError):
    """Reading or writing files failed."""


class EngineError(ModelDiffError):
    """An operation was invoked on inputs that break its preconditions."""


class MetatypeMismatch(EngineError):
    """Two elements of different metatypes were offered for pairing."""


class InconsistentMatching(EngineError):
    """A matching references elements absent from its models."""


class UnresolvablePath(EngineError):
    """An edit-script path does not resolve at its point of application."""


class InvariantViolation(EngineError):
    """Applying an edit script would produce an invalid model."""
