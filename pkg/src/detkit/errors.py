"""Exception hierarchy shared by every detkit module."""

from __future__ import annotations


class DetkitError(Exception):
    """Base class for all errors raised by detkit."""


class InvalidBox(DetkitError, ValueError):
    pass


class ParseError(DetkitError, ValueError):
    """Malformed input. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownClass(ParseError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"unknown class {name!r}", line)


class DuplicateClass(DetkitError, ValueError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"duplicate class {name!r}")


class EmptyLabelMap(DetkitError, ValueError):
    pass


class NotARecordFile(DetkitError):
    pass


class TruncatedRecord(DetkitError):
    def __init__(self, offset: int):
        self.offset = offset
        super().__init__(f"truncated record at byte offset {offset}")


class DimensionMismatch(DetkitError):
    pass


class ClassMixture(DetkitError, ValueError):
    pass


class NoClasses(DetkitError, ValueError):
    pass


class UndefinedMetric(DetkitError):
    pass


class BadImage(DetkitError):
    def __init__(self, path, reason: str = ""):
        self.path = path
        super().__init__(f"cannot decode image {path}" + (f": {reason}" if reason else ""))


class IoFailure(DetkitError, OSError):
    pass


class IncompleteManifest(DetkitError):
    def __init__(self, missing: list[str]):
        self.missing = list(missing)
        super().__init__("no audio file for: " + ", ".join(self.missing))


class NotMonotonic(DetkitError, ValueError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"event {index} is earlier than its predecessor")
