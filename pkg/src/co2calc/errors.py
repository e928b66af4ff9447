from __future__ import annotations

from dataclasses import dataclass


class Co2Error(Exception):
    """Base class for every error raised by the kernel."""


class SortError(Co2Error):
    pass


class WellFormednessError(Co2Error):
    pass


class DefinitionError(Co2Error):
    """Undefined or unguarded process identifier."""


class StateCapExceeded(Co2Error):
    def __init__(self, cap: int, what: str = "states"):
        super().__init__(f"exploration exceeded the cap of {cap} {what}")
        self.cap = cap


class UnsupportedGoal(Co2Error):
    """The goal lies outside the decidable clausal fragment (not the same as 'unprovable')."""


class FragmentError(Co2Error):
    """Input formula is not in the PCL- fragment."""


class AgreementSearchError(Co2Error):
    pass


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    col: int
    message: str
    suggestion: str | None = None

    def __str__(self) -> str:
        text = f"{self.line}:{self.col}: {self.severity}: {self.message}"
        if self.suggestion:
            text += f" (hint: {self.suggestion})"
        return text


class ParseError(Co2Error):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))
