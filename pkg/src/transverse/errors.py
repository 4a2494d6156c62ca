"""Exception hierarchy shared by the toolkit.

Every failure mode that callers are expected to handle has its own class;
generic ValueError/RuntimeError never escape the public API.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatchError(ToolkitError):
    """Operands live in different ambient dimensions."""


class PreconditionError(ToolkitError):
    """A documented precondition of an operation was violated."""


class UnsupportedVariantError(ToolkitError):
    """The requested operation has no exact rule for this set variant."""


class InfeasibleProblemError(ToolkitError):
    """A feasibility system (LP or projection target) is empty."""


class NonConvergenceError(ToolkitError):
    """An iterative routine hit its iteration cap before meeting tolerance."""


class RepresentationCapError(ToolkitError):
    """A cone representation exceeded the configured ray budget."""


class ScenarioFormatError(ToolkitError):
    """A scenario file is malformed: bad JSON, missing required fields,
    an unknown set variant or analysis name, or invalid budgets."""
