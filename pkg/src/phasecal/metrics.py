"""Polarization conversion, linear average gain and axial ratio over elevation.

Circular hands follow ``e_R = (e_V - j e_H) / sqrt(2)`` with an ``exp(+j w t)``
time dependence; the tests pin this convention.
"""

from __future__ import annotations

import numpy as np

from .grid import FieldMap, GainMap

AR_CEILING_DB = 60.0

_SQRT2 = np.sqrt(2.0)


def vh_to_circular(e_v, e_h):
    """Dual-linear port fields to (RHCP, LHCP) components."""
    e_v = np.asarray(e_v, dtype=complex)
    e_h = np.asarray(e_h, dtype=complex)
    return (e_v - 1j * e_h) / _SQRT2, (e_v + 1j * e_h) / _SQRT2


def circular_to_vh(e_r, e_l):
    e_r = np.asarray(e_r, dtype=complex)
    e_l = np.asarray(e_l, dtype=complex)
    return (e_r + e_l) / _SQRT2, 1j * (e_r - e_l) / _SQRT2


def axial_ratio(e_r, e_l):
    """Axial ratio in dB from hand magnitudes, clamped at 60 dB."""
    r = np.abs(np.asarray(e_r, dtype=float))
    l = np.abs(np.asarray(e_l, dtype=float))
    num = r + l
    den = np.abs(r - l)
    floor = num * 10.0 ** (-AR_CEILING_DB / 20.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ar = np.where(den > floor, 20.0 * np.log10(num / np.maximum(den, floor)), AR_CEILING_DB)
    ar = np.where(num == 0.0, AR_CEILING_DB, ar)
    ar = np.minimum(ar, AR_CEILING_DB)
    return float(ar) if ar.ndim == 0 else ar


def _db_to_power(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_average(db_values) -> float:
    """Average dB power samples in the linear domain."""
    return float(10.0 * np.log10(np.mean(_db_to_power(db_values))))


def linear_average_gain(gain: GainMap, elevation: float, hand: str = "rhcp") -> float:
    """Azimuth-averaged gain (dBi) of one ring, averaged as linear power."""
    if hand not in ("rhcp", "lhcp"):
        raise ValueError(f"hand must be 'rhcp' or 'lhcp', got {hand!r}")
    values = gain.rhcp_dbic if hand == "rhcp" else gain.lhcp_dbic
    return linear_average(values[gain.grid.elevation_index(elevation)])


def mean_axial_ratio(ar_db) -> float:
    """Average ARs as linear amplitude ratios, return dB."""
    ratios = 10.0 ** (np.asarray(ar_db, dtype=float) / 20.0)
    return float(20.0 * np.log10(np.mean(ratios)))


def axial_ratio_map(gain: GainMap):
    """Per-node AR (dB) from RHCP/LHCP gains."""
    return axial_ratio(10.0 ** (gain.rhcp_dbic / 20.0), 10.0 ** (gain.lhcp_dbic / 20.0))


def average_axial_ratio(gain: GainMap, elevation: float) -> float:
    i = gain.grid.elevation_index(elevation)
    return mean_axial_ratio(axial_ratio_map(gain)[i])


def field_to_gain(fields: FieldMap) -> GainMap:
    """RHCP/LHCP gains (dBic) from V/H field samples given in normalized volts."""
    e_r, e_l = vh_to_circular(fields.e_v, fields.e_h)
    tiny = 1e-300
    return GainMap(
        fields.grid,
        fields.frequency,
        20.0 * np.log10(np.maximum(np.abs(e_r), tiny)),
        20.0 * np.log10(np.maximum(np.abs(e_l), tiny)),
    )


def elevation_curves(gain: GainMap) -> list[tuple[float, float, float]]:
    """(elevation, LAG dBi, AR dB) rows for every ring."""
    ar = axial_ratio_map(gain)
    rows = []
    for i, el in enumerate(gain.grid.elevation_samples):
        rows.append((el, linear_average(gain.rhcp_dbic[i]), mean_axial_ratio(ar[i])))
    return rows


def azimuth_cut(gain: GainMap, elevation: float) -> list[tuple[float, float, float, float]]:
    """(azimuth, RHCP dBic, LHCP dBic, AR dB) rows for one elevation ring."""
    i = gain.grid.elevation_index(elevation)
    ar = axial_ratio_map(gain)[i]
    return [
        (az, float(gain.rhcp_dbic[i, j]), float(gain.lhcp_dbic[i, j]), float(ar[j]))
        for j, az in enumerate(gain.grid.azimuth_samples)
    ]
