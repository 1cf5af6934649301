"""Exception hierarchy for the evoattack package.

The CLI maps these onto exit codes: :class:`UsageError` (and bad command
lines) exit 1, everything else derived from :class:`EvoAttackError`
exits 2.
"""


class EvoAttackError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(EvoAttackError):
    """A caller violated an API contract (wrong kind, bad argument)."""


class DimensionError(UsageError):
    """Vector or matrix sizes do not line up."""


class ModelFormatError(EvoAttackError):
    """Weight file has a bad magic number or unsupported version."""


class ModelConsistencyError(EvoAttackError):
    """Weight file parses but its dimensions contradict each other."""


class ModelCorruptionError(EvoAttackError):
    """Weight file contains non-finite parameters."""


class GoldenFormatError(EvoAttackError):
    """Golden-vector file has a malformed record."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ArchiveError(EvoAttackError):
    """Archive segment has a malformed record."""

    def __init__(self, message: str, segment: str, line: int):
        super().__init__(f"{segment}:{line}: {message}")
        self.segment = segment
        self.line = line


class SearchAbort(EvoAttackError):
    """A search run hit a non-recoverable condition (non-finite fitness)."""
