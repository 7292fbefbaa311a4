"""Exception hierarchy.  The CLI maps these onto exit codes."""

from __future__ import annotations


class RelqcError(Exception):
    """Base class for all errors raised by relqc."""


class DataError(RelqcError):
    """Malformed or inconsistent input data (pair files, tables)."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(where + message)


class ConfigurationError(DataError):
    """Input that parses but contradicts itself (flags, missing tables)."""


class DegreeError(RelqcError):
    """An inhomogeneous class was given where a homogeneous one is needed."""


class NotNefError(RelqcError):
    """Refusal to assert associativity-dependent results without the nef hypothesis."""


class SpanningError(RelqcError):
    """Presentation generators do not reach every theta function in range."""

    def __init__(self, unreached):
        self.unreached = list(unreached)
        super().__init__(f"generators do not span: unreached {self.unreached}")


class TruncationOverflow(RelqcError):
    """A z-series computation left its declared window."""


class IncompleteTableError(RelqcError):
    """Invariants needed for a computation are neither stored nor derivable."""

    def __init__(self, keys):
        self.keys = sorted(set(keys), key=repr)
        shown = ", ".join(str(k) for k in self.keys[:8])
        more = f" (+{len(self.keys) - 8} more)" if len(self.keys) > 8 else ""
        super().__init__(f"missing invariants: {shown}{more}")
