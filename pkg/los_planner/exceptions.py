"""Exception hierarchy shared by the engine, scenario I/O and front ends."""

from pathlib import Path


class LosPlannerError(Exception):
    """Root of every error raised by los_planner."""


class InvalidQueryError(LosPlannerError, ValueError):
    """A geometric query or override that cannot be answered."""


class OccludedEndpointError(LosPlannerError):
    """The query endpoint sits inside an obstacle or below the ground."""


class DegenerateLinkError(LosPlannerError, ValueError):
    """Zero-length link in the channel model."""


class DimensionMismatchError(LosPlannerError, ValueError):
    """Grids of different shapes combined."""


class ScenarioError(LosPlannerError):
    """A scenario file could not be parsed."""

    def __init__(self, message: str, path: str | Path | None = None, location: str | None = None):
        self.path = str(path) if path is not None else None
        self.location = location
        prefix = ""
        if self.path:
            prefix = f"{self.path}: "
        if location:
            prefix += f"{location}: "
        super().__init__(prefix + message)


class ScenarioValidationError(ScenarioError):
    """A scenario parsed but violates an invariant."""


class ReportError(LosPlannerError, OSError):
    """Writing or reading a result artifact failed."""

    def __init__(self, message: str, path: str | Path):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")
