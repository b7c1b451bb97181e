"""
Exception hierarchy for RSLearn.

Every error raised on purpose by the package derives from ``RSLearnError``
and from the builtin exception closest to its meaning, so code that catches
``ValueError`` or ``LookupError`` keeps working.
"""


class RSLearnError(Exception):
    """Base class for all RSLearn errors."""


class InvalidVertexError(RSLearnError, ValueError):
    """A vertex index is out of range, or a query repeats a vertex."""


class InvalidQueryError(InvalidVertexError):
    """A CI query is malformed for the graph or dataset it is asked of."""


class SingularSubmatrixError(RSLearnError, ArithmeticError):
    """The correlation submatrix of a Fisher-Z query is numerically singular."""


class InsufficientSamplesError(RSLearnError, ValueError):
    """The conditioning set is too large for the number of samples."""


class NoRemovableFoundError(RSLearnError, RuntimeError):
    """No active vertex passed the bounded-clique removability check."""

    def __init__(self, m, active):
        self.m = m
        self.active = tuple(active)
        super().__init__(
            f"No removable vertex among {len(self.active)} active vertices "
            f"under clique bound m={m}."
        )


class LearnAutoExhaustedError(RSLearnError, RuntimeError):
    """Every clique bound from 1 to n failed to produce a verified skeleton."""


class MissingSepsetError(RSLearnError, LookupError):
    """A non-adjacent pair of the skeleton has no recorded separating set."""


class SizeMismatchError(RSLearnError, ValueError):
    """Two graphs being compared have different vertex counts."""


class GraphFormatError(RSLearnError, ValueError):
    """An edge-list graph file is malformed."""

    def __init__(self, message, path=None, line_no=None):
        self.path = path
        self.line_no = line_no
        where = ""
        if path is not None:
            where = f"{path}:{line_no}: " if line_no is not None else f"{path}: "
        super().__init__(f"{where}{message}")


class DatasetFormatError(RSLearnError, ValueError):
    """A dataset CSV file is malformed."""


class UnknownVertexNameError(RSLearnError, LookupError):
    """An edge line references a vertex name that was never declared."""


class ConfigError(RSLearnError, ValueError):
    """A benchmark configuration or CLI flag combination is invalid."""


class ResultFormatError(RSLearnError, ValueError):
    """A learner result JSON file is malformed or has an unknown schema."""
