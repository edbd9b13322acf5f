"""Synthetic range data with known ground truth, for tests and demos."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .formats.ffd import MeasurementSet
from .grid import FieldMap, GainMap, PhaseMap, SphericalGrid, build_default_grid
from .metrics import circular_to_vh
from .phase import Pco, wavelength_mm, wrap_phase


def ripple_mm(grid: SphericalGrid, amplitude: float) -> np.ndarray:
    """Azimuth-independent analytic PCV ripple ``A sin^2(2 theta)``, zero at zenith."""
    theta, _ = grid.theta_mesh()
    return amplitude * np.sin(np.deg2rad(2.0 * theta)) ** 2


def synth_phase_map(
    pco: Pco,
    frequency: float,
    grid: SphericalGrid | None = None,
    ripple: float = 0.0,
    noise_deg: float = 0.0,
    offset_deg: float = 0.0,
    rng: np.random.Generator | None = None,
    wrap: bool = True,
) -> PhaseMap:
    """Wrapped chamber phase for a pure offset plus optional ripple and noise."""
    grid = grid or build_default_grid()
    mm = grid.unit_vectors() @ pco.as_array()
    if ripple:
        mm = mm + ripple_mm(grid, ripple)
    phase = 360.0 / wavelength_mm(frequency) * mm + offset_deg
    if noise_deg:
        if rng is None:
            raise ValueError("noise requires a random generator")
        phase = phase + rng.normal(0.0, noise_deg, size=grid.shape)
    if wrap:
        phase = wrap_phase(phase)
    return PhaseMap(grid, frequency, phase)


def _pattern(grid: SphericalGrid):
    """Smooth RHCP pattern: gain -6..+5 dBic, AR 10 dB at horizon to 1 dB at zenith."""
    el, _ = grid.mesh()
    s = np.sin(np.deg2rad(el))
    gain_db = -6.0 + 11.0 * s
    ar_db = 1.0 + 9.0 * (1.0 - s)
    rho = 10.0 ** (ar_db / 20.0)
    leak = (rho - 1.0) / (rho + 1.0)
    return 10.0 ** (gain_db / 20.0), leak


def synth_field_map(pco: Pco, frequency: float, grid: SphericalGrid | None = None) -> FieldMap:
    grid = grid or build_default_grid()
    amp, leak = _pattern(grid)
    psi = np.deg2rad(360.0 / wavelength_mm(frequency) * (grid.unit_vectors() @ pco.as_array()))
    e_r = amp * np.exp(1j * psi)
    e_l = amp * leak * np.exp(1j * psi)
    e_v, e_h = circular_to_vh(e_r, e_l)
    polar = np.stack(
        [np.abs(e_v), np.rad2deg(np.angle(e_v)), np.abs(e_h), np.rad2deg(np.angle(e_h))], axis=-1
    )
    return FieldMap(grid, frequency, e_v, e_h, polar=polar)


def synth_gain_map(frequency: float, grid: SphericalGrid | None = None) -> GainMap:
    grid = grid or build_default_grid()
    amp, leak = _pattern(grid)
    return GainMap(grid, frequency, 20.0 * np.log10(amp), 20.0 * np.log10(amp * leak))


def synth_measurement_set(
    pco: Pco,
    frequencies: Iterable[float],
    quantity: str = "phase_deg",
    ripple: float = 0.0,
    noise_deg: float = 0.0,
    seed: int = 0,
    antenna: str = "SYNTHETIC",
    scenario: str = "EVB",
    grid: SphericalGrid | None = None,
) -> MeasurementSet:
    rng = np.random.default_rng(seed)
    maps = {}
    for f in sorted(float(f) for f in frequencies):
        if quantity == "phase_deg":
            maps[f] = synth_phase_map(pco, f, grid, ripple=ripple, noise_deg=noise_deg, rng=rng)
        elif quantity == "vh_complex":
            maps[f] = synth_field_map(pco, f, grid)
        elif quantity == "gain_dbic":
            maps[f] = synth_gain_map(f, grid)
        else:
            raise ValueError(f"unknown quantity {quantity!r}")
    return MeasurementSet(antenna, scenario, quantity, maps)
