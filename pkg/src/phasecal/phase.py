"""Phase model of a displaced phase center, ARP normalization and phase to PCV.

Sign convention: a phase center displaced toward the arriving signal gives a
positive phase (positive dot product between arrival direction and offset).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotNormalized, UnwrapAmbiguity
from .grid import Direction, FloatArray, PhaseMap, ScalarMap, SphericalGrid, direction_unit_vector

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact

PCO_SANITY_MM = 1000.0


def wavelength_mm(frequency_mhz: float) -> float:
    if not frequency_mhz > 0:
        raise ValueError(f"frequency must be positive, got {frequency_mhz}")
    # c[m/s] / f[MHz] = c / (f * 1e6) m = c / f * 1e-3 mm
    return SPEED_OF_LIGHT / float(frequency_mhz) * 1e-3


@dataclass(frozen=True)
class Pco:
    """Phase center offset in mm; x forward (az 0), y left (az 90), z up."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or abs(v) >= PCO_SANITY_MM:
                raise ValueError(f"PCO component {name}={v} outside (-{PCO_SANITY_MM}, {PCO_SANITY_MM}) mm")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, a) -> "Pco":
        x, y, z = (float(v) for v in a)
        return cls(x, y, z)

    def as_array(self) -> FloatArray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True, eq=False)
class PcvMap(ScalarMap):
    """Phase center variation in mm over the grid."""


def forward_phase(pco: Pco, d: Direction, frequency: float) -> float:
    """Phase in degrees (not wrapped) seen from direction ``d``."""
    return float(360.0 / wavelength_mm(frequency) * direction_unit_vector(d) @ pco.as_array())


def forward_phase_map(pco: Pco, grid: SphericalGrid, frequency: float) -> PhaseMap:
    values = 360.0 / wavelength_mm(frequency) * (grid.unit_vectors() @ pco.as_array())
    return PhaseMap(grid, frequency, values)


def wrap_phase(values) -> FloatArray:
    """Wrap degrees into (-180, 180]."""
    v = np.asarray(values, dtype=float)
    w = np.mod(v + 180.0, 360.0) - 180.0
    return np.where(w == -180.0, 180.0, w)


def wrapped(phase_map: PhaseMap) -> PhaseMap:
    return PhaseMap(phase_map.grid, phase_map.frequency, wrap_phase(phase_map.values))


def circular_mean_deg(values) -> float:
    r = np.deg2rad(np.asarray(values, dtype=float))
    return float(np.rad2deg(np.arctan2(np.mean(np.sin(r)), np.mean(np.cos(r)))))


def unwrap_and_normalize(raw: PhaseMap) -> PhaseMap:
    """Unwrap each azimuth cut from zenith down and zero the phase at the ARP.

    The zenith nodes are one physical direction, so they are collapsed to their
    circular mean before the walk. Raises UnwrapAmbiguity when neighbouring
    azimuths on a ring still disagree by more than half a cycle afterwards.
    """
    grid = raw.grid
    if not grid.has_zenith:
        raise ValueError("ARP normalization needs the zenith (elevation 90) ring")
    v = np.array(raw.values, dtype=float)
    # averaging deviations from one sample keeps a constant ring exact
    ref = v[-1, 0] + circular_mean_deg(wrap_phase(v[-1] - v[-1, 0]))
    v[-1] = ref
    prev = v[-1].copy()
    for i in range(v.shape[0] - 2, -1, -1):
        cur = v[i]
        cur = cur + 360.0 * np.round((prev - cur) / 360.0)
        v[i] = cur
        prev = cur
    v -= ref
    v[-1] = 0.0

    if v.shape[1] > 1:
        jumps = np.abs(v - np.roll(v, -1, axis=1))
        if v.shape[1] == 2:
            jumps = jumps[:, :1]
        bad = np.argwhere(jumps > 180.0)
        if bad.size:
            i, j = bad[0]
            raise UnwrapAmbiguity(
                f"azimuth neighbours differ by {jumps[i, j]:.1f} deg at elevation "
                f"{grid.elevation_samples[i]}, azimuth {grid.azimuth_samples[j]}"
            )
    return PhaseMap(grid, raw.frequency, v, normalized=True)


def phase_to_pcv(phase, frequency: float):
    """Degrees to mm: ``phase / 360 * c / f``."""
    out = np.asarray(phase, dtype=float) / 360.0 * wavelength_mm(frequency)
    if out.ndim == 0:
        return float(out)
    return out


def pcv_map(normalized: PhaseMap) -> PcvMap:
    if not normalized.normalized:
        raise NotNormalized("phase map must be ARP-normalized before PCV conversion")
    return PcvMap(normalized.grid, normalized.frequency, phase_to_pcv(normalized.values, normalized.frequency))


def forward_pcv_values(pco: Pco, grid: SphericalGrid) -> FloatArray:
    """Zenith-referenced PCV (mm) produced by a pure offset: ``u . pco - z``."""
    return grid.unit_vectors() @ pco.as_array() - pco.z


def pcv_range(pcv: ScalarMap) -> tuple[float, float]:
    return float(np.min(pcv.values)), float(np.max(pcv.values))
