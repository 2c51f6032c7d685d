"""Exception types shared across the package.

The CLI maps these onto exit codes: format problems (anything rooted at
FormatError) exit 4, OS-level I/O failures exit 3, bad arguments exit 2.
"""

from __future__ import annotations


class FormatError(Exception):
    """Input bytes or text do not form the container they claim to be."""


class UnsupportedFormatError(FormatError):
    """Well-formed container, but a layout this package refuses to guess at
    (multichannel audio, sample widths other than 16-bit). Callers should
    convert upstream rather than rely on silent downmixing."""


class TranscriptionParseError(FormatError):
    """A transcription file line that cannot be used. Carries the 1-based
    line number so the offending line can be reported precisely."""

    def __init__(self, message: str, lineno: int) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class ParameterError(ValueError):
    """A parameter outside the range the operation can honour."""


class TooShortSignalError(ValueError):
    """Signal shorter than a single analysis frame."""


class DegenerateSignalError(ValueError):
    """Signal with no usable structure for the requested operation
    (e.g. all-zero input to a percentile-based threshold)."""
