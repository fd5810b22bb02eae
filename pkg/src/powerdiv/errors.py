"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DataFormatError(ValueError):
    """An input file could not be parsed.

    Carries the 1-based line number of the offending row when known.
    """

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class SeriesError(RuntimeError):
    """The series evaluation of the compound-Poisson base measure failed.

    Attributes carry partial diagnostics: how many terms were summed (or
    would be required) and the power/dispersion at which the failure occurred.
    """

    def __init__(self, message: str, *, terms_used: int, p: float, phi: float):
        super().__init__(message)
        self.terms_used = terms_used
        self.p = p
        self.phi = phi
