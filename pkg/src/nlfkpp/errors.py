"""Exception types shared across the package."""


class NlfkppError(Exception):
    """Base class for all package errors."""


class BlowupError(NlfkppError):
    """A quantity left its admissible range before the end of the requested
    time interval. Carries the time that was reached."""

    def __init__(self, message, t_reached=None):
        super().__init__(message)
        self.t_reached = t_reached


class WindowError(NlfkppError):
    """Evaluation requested outside the computed validity window."""


class FocalPointError(NlfkppError):
    """A variation solution component vanished where it is needed."""

    def __init__(self, message, t_focal=None):
        super().__init__(message)
        self.t_focal = t_focal


class TruncationError(NlfkppError):
    """A truncated series hit its term cap before reaching the requested
    tail bound. Carries the bound that was achieved."""

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
