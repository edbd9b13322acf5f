"""Exception hierarchy shared by all phasecal modules."""

from __future__ import annotations


class CalibrationError(ValueError):
    """Base class for every error raised by phasecal."""


# grid
class InvalidStep(CalibrationError):
    pass


class ElevationOffGrid(CalibrationError):
    pass


# phase model
class UnwrapAmbiguity(CalibrationError):
    pass


class NotNormalized(CalibrationError):
    pass


# estimation
class RankDeficient(CalibrationError):
    pass


class MaskTooTight(CalibrationError):
    pass


class DegenerateRing(CalibrationError):
    pass


class EmptyInput(CalibrationError):
    pass


class UncalibratedFrequency(CalibrationError, KeyError):
    """No profile entry close enough to the requested frequency."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


# observables
class DegenerateFrequencies(CalibrationError):
    pass


class MismatchedStructure(CalibrationError):
    pass


# file formats
class FormatError(CalibrationError):
    """Parse failure; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where = f"{where}{line}:"
        super().__init__(f"{where} {message}" if where else message)


class MissingNode(FormatError):
    pass


class DuplicateNode(FormatError):
    pass


class BadHeader(FormatError):
    pass


class UnitError(FormatError):
    pass


class BadLabel(FormatError):
    pass


class TruncatedSection(FormatError):
    pass


class UnresampleableGrid(CalibrationError):
    pass
