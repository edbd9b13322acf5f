"""Frequency-indexed antenna calibration: PCO plus residual PCV grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UncalibratedFrequency
from .grid import Direction, SphericalGrid, build_default_grid
from .phase import Pco, PcvMap

FREQUENCY_MATCH_MHZ = 5.0

SCENARIOS = ("EVB", "sharkfin", "vehicle")


@dataclass(frozen=True)
class FrequencyCalibration:
    frequency: float
    pco: Pco
    pcv: PcvMap


@dataclass(frozen=True)
class CalibrationProfile:
    antenna: str
    entries: tuple[FrequencyCalibration, ...]
    scenario: str = "EVB"

    def __post_init__(self) -> None:
        freqs = [e.frequency for e in self.entries]
        if len(set(freqs)) != len(freqs):
            raise ValueError("calibration frequencies must be distinct")
        if self.scenario not in SCENARIOS:
            raise ValueError(f"scenario must be one of {SCENARIOS}, got {self.scenario!r}")
        object.__setattr__(self, "entries", tuple(sorted(self.entries, key=lambda e: e.frequency)))

    @property
    def frequencies(self) -> list[float]:
        return [e.frequency for e in self.entries]

    def for_frequency(self, frequency: float) -> FrequencyCalibration:
        """Entry closest to ``frequency``; must be within 5 MHz."""
        if not self.entries:
            raise UncalibratedFrequency("calibration profile is empty")
        best = min(self.entries, key=lambda e: abs(e.frequency - frequency))
        if abs(best.frequency - frequency) > FREQUENCY_MATCH_MHZ:
            raise UncalibratedFrequency(f"no calibration within {FREQUENCY_MATCH_MHZ} MHz of {frequency} MHz")
        return best

    def phase_center_error_mm(self, aoa: Direction, frequency: float) -> float:
        """``u(aoa) . pco + pcv(aoa)`` in mm."""
        entry = self.for_frequency(frequency)
        u = aoa.unit_vector()
        return float(u @ entry.pco.as_array()) + entry.pcv.at(aoa.elevation, aoa.phi)


def pure_offset_profile(
    pco_by_frequency: dict[float, Pco],
    antenna: str = "SYNTHETIC",
    scenario: str = "EVB",
    grid: SphericalGrid | None = None,
) -> CalibrationProfile:
    """Profile with the given offsets and identically zero PCV."""
    grid = grid or build_default_grid()
    entries = tuple(
        FrequencyCalibration(f, p, PcvMap(grid, f, np.zeros(grid.shape)))
        for f, p in pco_by_frequency.items()
    )
    return CalibrationProfile(antenna, entries, scenario)
