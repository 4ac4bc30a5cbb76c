"""Exception hierarchy shared by every crelay module.

Each class carries the process exit code the CLI reports for it.
"""

from pathlib import Path

__all__ = (
    "CrelayError",
    "DomainError",
    "DegenerateFitError",
    "ConvergenceError",
    "InputFormatError",
    "IncompleteConfigError",
    "require",
)


class CrelayError(Exception):
    exit_code = 1


class DomainError(CrelayError, ValueError):
    """An argument lies outside the domain of the operation"""

    exit_code = 2


class DegenerateFitError(CrelayError):
    """The data cannot identify the model parameters"""

    exit_code = 3


class ConvergenceError(CrelayError, ArithmeticError):
    """An iterative solver hit its iteration cap"""

    exit_code = 3


class InputFormatError(CrelayError):
    """Malformed CSV or config input, located by path and line"""

    exit_code = 2

    def __init__(self, message: str, path: Path | str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class IncompleteConfigError(CrelayError):
    exit_code = 4


def require(condition: bool, message: str, exc: type[CrelayError] = DomainError) -> None:
    if not condition:
        raise exc(message)
