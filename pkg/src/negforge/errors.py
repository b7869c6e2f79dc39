"""Exception types shared across the package."""

from __future__ import annotations


class NegforgeError(Exception):
    """Base class for all errors raised by this package."""


class MalformedTreeError(NegforgeError):
    """A token list does not form a single-rooted, acyclic dependency tree."""


class ConlluParseError(NegforgeError):
    """Invalid CoNLL-U input. Carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedSentenceError(NegforgeError):
    """The built-in analyzer cannot produce a parse for this input."""


class UnsupportedStructureError(NegforgeError):
    """The sentence matches none of the negation branches."""


class ExternalParserError(NegforgeError):
    """An external parser command failed or produced unusable output."""


class AdapterError(NegforgeError):
    """A scorer adapter process failed, timed out, or broke protocol."""
