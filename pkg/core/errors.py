"""
core/errors.py — Exception hierarchy
=====================================
Every error raised on purpose by the toolkit derives from BellChainError, so
callers (the CLI, the sweep runner, the verification suite) can catch one type.

Validation errors also derive from ValueError: pydantic validators raise them
and pydantic wraps them into its own ValidationError; `unwrap_validation`
turns that back into the domain error.
"""

from typing import Any, Optional

from pydantic import ValidationError


class BellChainError(Exception):
    """Base class for all toolkit errors."""


class ScenarioError(BellChainError, ValueError):
    """Invalid number of settings/outcomes, or an index out of range."""


class DimensionError(BellChainError, ValueError):
    """Vector or matrix length does not match the scenario dimension."""


class StateError(BellChainError, ValueError):
    """Schmidt vector is zero, badly normalized, or has negative entries."""


class MatrixError(BellChainError, ArithmeticError):
    """Bell matrix symbol violates a structural property."""


class EntropyUndefinedError(BellChainError, ValueError):
    """Entropy in dits needs log d > 0."""


class DomainError(BellChainError, ValueError):
    """Special-function argument outside its domain."""


class InstanceTooLargeError(BellChainError, ValueError):
    """Problem exceeds the configured enumeration / materialization cap."""


class GridError(BellChainError, ValueError):
    """Sweep grid is empty or its parameters are inconsistent."""


class OutputError(BellChainError, OSError):
    """Result file could not be written."""


class ConfigError(BellChainError, ValueError):
    """Solver or sweep settings out of range."""


class ProbabilityError(BellChainError, ValueError):
    """Probability table has the wrong shape, leaves [0, 1], or is not normalized."""


class ConvergenceError(BellChainError):
    """Power iteration stopped before reaching the residual tolerance."""

    def __init__(self, message: str, result: Optional[Any] = None):
        super().__init__(message)
        self.result = result


def unwrap_validation(exc: ValidationError, fallback: type = ScenarioError) -> BellChainError:
    """
    Return the domain error that caused a pydantic ValidationError.

    Validators raise BellChainError subclasses; pydantic keeps the original
    exception under ctx["error"]. Unknown keys on models that forbid extras are
    reported together. Type errors (e.g. a string where an int is
    expected) have no such context and are mapped onto `fallback`.
    """
    for err in exc.errors():
        original = (err.get("ctx") or {}).get("error")
        if isinstance(original, BellChainError):
            return original
    unknown = [".".join(str(part) for part in err.get("loc", ())) for err in exc.errors()
               if err.get("type") == "extra_forbidden"]
    if unknown:
        return ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first.get("loc", ()))
    return fallback(f"{location}: {first.get('msg')}" if location else first.get("msg"))
