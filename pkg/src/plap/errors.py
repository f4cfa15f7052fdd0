"""Exception hierarchy. Every error raised by the package derives from PlapError."""


class PlapError(Exception):
    """Base class."""


class InvalidGeometryError(PlapError, ValueError):
    pass


class InvalidParameterError(PlapError, ValueError):
    pass


class NonFiniteValueError(PlapError, ValueError):
    def __init__(self, index, value=None):
        self.index = index
        self.value = value
        super().__init__(f"non-finite value {value!r} at node {index}")


class IncompatibleFieldsError(PlapError, ValueError):
    pass


class SingularFluxError(PlapError, ArithmeticError):
    pass


class SingularDirectionError(InvalidParameterError):
    pass


class ConvergenceError(PlapError, RuntimeError):
    """Iterative method gave up. ``last`` holds the final iterate."""

    def __init__(self, message, last=None):
        self.last = last
        super().__init__(message)


class BracketingError(PlapError, RuntimeError):
    pass


class TrivialSolutionError(ConvergenceError):
    pass


class StepFailureError(PlapError, RuntimeError):
    def __init__(self, message, time_index=None):
        self.time_index = time_index
        super().__init__(message)


class UnknownScenarioError(PlapError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown scenario"


class PreflightError(PlapError, ValueError):
    def __init__(self, message, min_n=None):
        self.min_n = min_n
        super().__init__(message)


class ConfigError(PlapError, ValueError):
    pass
