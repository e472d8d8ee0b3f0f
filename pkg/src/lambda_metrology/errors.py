"""Exception hierarchy.

Every error raised by the library derives from :class:`MetrologyError`, which is
itself a ``ValueError`` so callers that only care about "bad input" can catch that.
"""

import numpy as np


class MetrologyError(ValueError):
    pass


# linalg


class NonHermitianInput(MetrologyError):
    def __init__(self, deviation: float):
        self.deviation = float(deviation)
        super().__init__(f"matrix is not Hermitian: max |A - A^H| = {self.deviation:.3e}")


class SingularMatrix(MetrologyError):
    def __init__(self, eigenvalue: float, eigenvector=None):
        self.eigenvalue = float(eigenvalue)
        self.eigenvector = None if eigenvector is None else np.asarray(eigenvector)
        super().__init__(f"matrix is singular: eigenvalue {self.eigenvalue:.3e} below rank tolerance")


class DimensionMismatch(MetrologyError):
    pass


# model


class InvalidParams(MetrologyError):
    pass


class UnknownParameter(MetrologyError):
    pass


class NonNormalizedState(MetrologyError):
    pass


class StepTooLarge(MetrologyError):
    pass


# estimation


class InvalidState(MetrologyError):
    pass


class DuplicateParameter(MetrologyError):
    pass


class InvalidPOVM(MetrologyError):
    pass


class SingularQFIM(MetrologyError):
    """The QFIM has a null direction; ``null_vector`` spans it."""

    def __init__(self, eigenvalue: float, null_vector, parameters=()):
        self.eigenvalue = float(eigenvalue)
        self.null_vector = np.asarray(null_vector)
        self.parameters = tuple(parameters)
        super().__init__(
            f"QFIM over {'+'.join(self.parameters) or '?'} is singular "
            f"(eigenvalue {self.eigenvalue:.3e}, null direction {np.round(self.null_vector, 6).tolist()})"
        )


class ZeroDiagonal(MetrologyError):
    def __init__(self, parameter: str, value: float):
        self.parameter = parameter
        self.value = float(value)
        super().__init__(f"QFI for {parameter} vanishes ({self.value:.3e}); independent bound undefined")


# analytic reference


class DomainViolation(MetrologyError):
    pass


# sweep / config


class InvalidSpec(MetrologyError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class LengthMismatch(MetrologyError):
    pass


class ParseError(MetrologyError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownKey(ParseError):
    def __init__(self, line: int, key: str):
        self.key = key
        super().__init__(line, f"unknown key {key!r}")


class ConfigTypeError(ParseError):
    def __init__(self, line: int, key: str, message: str):
        self.key = key
        super().__init__(line, f"{key}: {message}")
