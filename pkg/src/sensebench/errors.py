"""Exception types shared across the package.

Anything deriving from :class:`DataError` describes bad input data (as opposed
to a programming error) and maps to exit status 2 on the command line.
"""


class DataError(ValueError):
    """Malformed or inconsistent input data."""


class EmbeddingFormatError(DataError):
    pass


class ConllFormatError(DataError):
    pass


class InventoryError(DataError):
    pass


class TaskFormatError(DataError):
    pass


class PairFormatError(DataError):
    pass


class OOVError(DataError):
    """A required word has no vector in the table."""
