"""
errors.py
Exception hierarchy for horolab

Precondition violations raise DomainError, failed numerics raise NumericalError,
bad scenario files and unknown claim ids raise ScenarioError. The CLI maps them
onto exit codes 2 and 3.
"""


class HorolabError(Exception):
    """Base class for every error raised by horolab"""


class DomainError(HorolabError, ValueError):
    """A point, boundary point or scheme does not fit the domain it is used with"""


class NumericalError(HorolabError, RuntimeError):
    """A numerical procedure did not converge or could not be certified"""


class ScenarioError(HorolabError, ValueError):
    """A scenario configuration is malformed or names an unknown claim"""

    def __init__(self, message: str, issues=None):
        super().__init__(message)
        self.issues = list(issues or [])
