"""Source positions, diagnostics, and the toolchain's exception types."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class SourcePos:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    message: str
    pos: SourcePos | None = field(default=None, compare=False)
    severity: str = "error"

    def __str__(self) -> str:
        where = f"{self.pos}: " if self.pos else ""
        return f"{where}{self.severity}: {self.message}"

    def sort_key(self) -> tuple:
        if self.pos is None:
            return ("", 0, 0, self.message)
        return (self.pos.file, self.pos.line, self.pos.column, self.message)


class RiskctlError(Exception):
    """Base class for all toolchain errors."""

    def __init__(self, message: str, pos: SourcePos | None = None):
        self.pos = pos
        super().__init__(f"{pos}: {message}" if pos else message)


class DslSyntaxError(RiskctlError):
    pass


class ModelError(RiskctlError):
    """Semantic error in a risk model (unresolved names, bad invariants)."""


class CodegenError(RiskctlError):
    pass


class GclSyntaxError(RiskctlError):
    pass


class GclSemanticError(RiskctlError):
    pass


class EngineError(RiskctlError):
    """State-space construction or solver failure."""


class QueryError(RiskctlError):
    """Unsupported or ill-posed verification query."""


class FormatError(RiskctlError):
    """Malformed interchange file (.tra/.sta/.lab)."""
