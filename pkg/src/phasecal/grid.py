"""Spherical sampling lattice, directions and scalar fields over it.

External surfaces (files, reports) speak elevation; the trigonometry below
works in boresight angle ``theta = 90 - elevation``. Both are in degrees;
radians only appear inside the trig calls.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from numpy.typing import NDArray

from .errors import ElevationOffGrid, InvalidStep, MissingNode

FloatArray = NDArray[np.float64]

_ANGLE_EPS = 1e-9


def wrap_azimuth(phi: float) -> float:
    """Normalize an azimuth to [0, 360); 360 maps onto 0."""
    phi = float(phi) % 360.0
    if abs(phi - 360.0) < _ANGLE_EPS:
        phi = 0.0
    return phi


@dataclass(frozen=True)
class Direction:
    """Arrival direction: boresight angle ``theta`` and azimuth ``phi`` in degrees."""

    theta: float
    phi: float

    def __post_init__(self) -> None:
        theta = float(self.theta)
        if not (-_ANGLE_EPS <= theta <= 90.0 + _ANGLE_EPS) or not np.isfinite(theta):
            raise ValueError(f"theta must lie in [0, 90] degrees, got {self.theta}")
        object.__setattr__(self, "theta", min(max(theta, 0.0), 90.0))
        object.__setattr__(self, "phi", wrap_azimuth(self.phi))

    @classmethod
    def from_elevation(cls, elevation: float, azimuth: float) -> "Direction":
        return cls(theta=90.0 - float(elevation), phi=azimuth)

    @property
    def elevation(self) -> float:
        return 90.0 - self.theta

    def unit_vector(self) -> FloatArray:
        return direction_unit_vector(self)


def direction_unit_vector(d: Direction) -> FloatArray:
    """Antenna-frame unit vector ``(sin t cos p, sin t sin p, cos t)``."""
    t = np.deg2rad(d.theta)
    p = np.deg2rad(d.phi)
    return np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])


def unit_vectors(theta_deg: FloatArray, phi_deg: FloatArray) -> FloatArray:
    """Vectorized unit vectors; output has a trailing axis of length 3."""
    t = np.deg2rad(np.asarray(theta_deg, dtype=float))
    p = np.deg2rad(np.asarray(phi_deg, dtype=float))
    st = np.sin(t)
    return np.stack([st * np.cos(p), st * np.sin(p), np.cos(t)], axis=-1)


def _frozen(a: FloatArray) -> FloatArray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SphericalGrid:
    """Elevation x azimuth lattice, iterated elevation-major."""

    elevation_samples: tuple[float, ...]
    azimuth_samples: tuple[float, ...]

    def __post_init__(self) -> None:
        el = tuple(float(e) for e in self.elevation_samples)
        az = tuple(wrap_azimuth(a) for a in self.azimuth_samples)
        if not el or not az:
            raise ValueError("grid needs at least one elevation and one azimuth")
        if any(b <= a for a, b in zip(el, el[1:])):
            raise ValueError("elevation samples must be strictly increasing")
        if any(b <= a for a, b in zip(az, az[1:])):
            raise ValueError("azimuth samples must be strictly increasing within [0, 360)")
        if el[0] < 0.0 or el[-1] > 90.0:
            raise ValueError("elevation samples must lie in [0, 90]")
        object.__setattr__(self, "elevation_samples", el)
        object.__setattr__(self, "azimuth_samples", az)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SphericalGrid):
            return NotImplemented
        return (
            self.elevation_samples == other.elevation_samples
            and self.azimuth_samples == other.azimuth_samples
        )

    def __hash__(self) -> int:
        return hash((self.elevation_samples, self.azimuth_samples))

    @property
    def elevations(self) -> FloatArray:
        return np.asarray(self.elevation_samples)

    @property
    def azimuths(self) -> FloatArray:
        return np.asarray(self.azimuth_samples)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.elevation_samples), len(self.azimuth_samples)

    @property
    def size(self) -> int:
        return len(self.elevation_samples) * len(self.azimuth_samples)

    @property
    def has_zenith(self) -> bool:
        return abs(self.elevation_samples[-1] - 90.0) < _ANGLE_EPS

    def mesh(self) -> tuple[FloatArray, FloatArray]:
        """(elevation, azimuth) arrays of shape ``self.shape``."""
        return np.meshgrid(self.elevations, self.azimuths, indexing="ij")

    def theta_mesh(self) -> tuple[FloatArray, FloatArray]:
        el, az = self.mesh()
        return 90.0 - el, az

    def unit_vectors(self) -> FloatArray:
        theta, phi = self.theta_mesh()
        return unit_vectors(theta, phi)

    def nodes(self) -> Iterator[tuple[float, float]]:
        for el in self.elevation_samples:
            for az in self.azimuth_samples:
                yield el, az

    def elevation_index(self, elevation: float) -> int:
        idx = np.flatnonzero(np.abs(self.elevations - float(elevation)) < _ANGLE_EPS)
        if idx.size == 0:
            raise ElevationOffGrid(f"elevation {elevation} is not a grid sample")
        return int(idx[0])


def build_default_grid(step_el: float = 1.0, step_az: float = 5.0) -> SphericalGrid:
    """Uniform range lattice: elevation 0..90 and azimuth 0..360 (exclusive)."""
    step_el = float(step_el)
    step_az = float(step_az)
    if not (0.0 < step_el <= 90.0) or not (0.0 < step_az <= 360.0):
        raise InvalidStep(f"steps must be positive and within range, got {step_el}, {step_az}")
    n_el = 90.0 / step_el
    n_az = 360.0 / step_az
    if abs(n_el - round(n_el)) > 1e-9 or abs(n_az - round(n_az)) > 1e-9:
        raise InvalidStep("steps must divide 90 (elevation) and 360 (azimuth) evenly")
    el = [i * step_el for i in range(int(round(n_el)) + 1)]
    az = [i * step_az for i in range(int(round(n_az)))]
    return SphericalGrid(tuple(el), tuple(az))


@dataclass(frozen=True, eq=False)
class ScalarMap:
    """One value per grid node, shape ``(n_elevation, n_azimuth)``."""

    grid: SphericalGrid
    frequency: float
    values: FloatArray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise MissingNode(
                f"map has shape {values.shape}, grid requires {self.grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise MissingNode("map contains non-finite nodes")
        if not float(self.frequency) > 0.0:
            raise ValueError(f"frequency must be positive, got {self.frequency}")
        object.__setattr__(self, "frequency", float(self.frequency))
        object.__setattr__(self, "values", _frozen(values))

    def ring(self, elevation: float) -> FloatArray:
        return self.values[self.grid.elevation_index(elevation)]

    def at(self, elevation: float, azimuth: float) -> float:
        return bilinear(self.grid, self.values, elevation, azimuth)


@dataclass(frozen=True, eq=False)
class PhaseMap(ScalarMap):
    """Measured phase in degrees; ``normalized`` once referenced to the ARP."""

    normalized: bool = False

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.normalized and self.grid.has_zenith:
            zen = self.values[-1]
            if np.max(np.abs(zen)) > 1e-9:
                raise ValueError("normalized phase map must be zero at zenith")


@dataclass(frozen=True, eq=False)
class GainMap:
    """RHCP / LHCP gain in dBic per grid node."""

    grid: SphericalGrid
    frequency: float
    rhcp_dbic: FloatArray
    lhcp_dbic: FloatArray

    def __post_init__(self) -> None:
        for name in ("rhcp_dbic", "lhcp_dbic"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.shape != self.grid.shape:
                raise MissingNode(f"{name} has shape {a.shape}, grid requires {self.grid.shape}")
            object.__setattr__(self, name, _frozen(a))
        object.__setattr__(self, "frequency", float(self.frequency))


@dataclass(frozen=True, eq=False)
class FieldMap:
    """Complex dual-linear (V, H) port samples per grid node."""

    grid: SphericalGrid
    frequency: float
    e_v: NDArray[np.complex128] = field(repr=False)
    e_h: NDArray[np.complex128] = field(repr=False)
    # (V amp, V phase deg, H amp, H phase deg) as read from file, if known
    polar: FloatArray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        for name in ("e_v", "e_h"):
            a = np.array(getattr(self, name), dtype=complex)
            if a.shape != self.grid.shape:
                raise MissingNode(f"{name} has shape {a.shape}, grid requires {self.grid.shape}")
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        object.__setattr__(self, "frequency", float(self.frequency))


def bilinear(grid: SphericalGrid, values: FloatArray, elevation, azimuth):
    """Bilinear interpolation in (elevation, azimuth), periodic in azimuth.

    Raises ElevationOffGrid when a query falls outside the sampled elevations.
    Scalars in, scalar out; arrays broadcast.
    """
    el = np.asarray(elevation, dtype=float)
    az = np.mod(np.asarray(azimuth, dtype=float), 360.0)
    els = grid.elevations
    if np.any(el < els[0] - _ANGLE_EPS) or np.any(el > els[-1] + _ANGLE_EPS):
        raise ElevationOffGrid(
            f"elevation outside sampled range [{els[0]}, {els[-1]}]"
        )
    el = np.clip(el, els[0], els[-1])
    values = np.asarray(values, dtype=float)

    if els.size == 1:
        i0 = np.zeros(el.shape, dtype=int)
        i1 = i0
        w_el = np.zeros(el.shape)
    else:
        i1 = np.clip(np.searchsorted(els, el, side="right"), 1, els.size - 1)
        i0 = i1 - 1
        w_el = (el - els[i0]) / (els[i1] - els[i0])

    azs = grid.azimuths
    n_az = azs.size
    if n_az == 1:
        j0 = np.zeros(az.shape, dtype=int)
        j1 = j0
        w_az = np.zeros(az.shape)
    else:
        ext = np.append(azs, azs[0] + 360.0)
        # queries below the first sample wrap to the last interval
        az_q = np.where(az < azs[0], az + 360.0, az)
        k = np.clip(np.searchsorted(ext, az_q, side="right"), 1, n_az) - 1
        j0 = k
        j1 = (k + 1) % n_az
        w_az = (az_q - ext[k]) / (ext[k + 1] - ext[k])

    v00 = values[i0, j0]
    v01 = values[i0, j1]
    v10 = values[i1, j0]
    v11 = values[i1, j1]
    out = (
        v00 * (1 - w_el) * (1 - w_az)
        + v01 * (1 - w_el) * w_az
        + v10 * w_el * (1 - w_az)
        + v11 * w_el * w_az
    )
    if out.ndim == 0:
        return float(out)
    return out
