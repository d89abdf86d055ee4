class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class DataFileError(ValueError):
    """A data file could not be parsed; the message carries the line number."""
