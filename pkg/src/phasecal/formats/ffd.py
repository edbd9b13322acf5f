"""FFD v1: flat far-field range measurement interchange format.

Layout (UTF-8 text)::

    # comment lines start with '#'
    antenna=<name>
    scenario=<EVB|sharkfin|vehicle>
    quantity=<phase_deg|gain_dbic|vh_complex>
    freq_mhz,elev_deg,azim_deg,value[,value2,value3,value4]
    1176.0,0.0,0.0,12.5
    ...

``phase_deg`` carries one value (degrees), ``gain_dbic`` two (RHCP, LHCP) and
``vh_complex`` four (V amplitude, V phase deg, H amplitude, H phase deg).
Azimuth 360 is folded onto 0; a 360 row identical to its 0 row is
accepted as the closing sample. Floats are written with ``repr`` so a
write/parse round trip is bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from ..errors import BadHeader, DuplicateNode, MissingNode, UnitError
from ..grid import FieldMap, GainMap, PhaseMap, SphericalGrid, wrap_azimuth

QUANTITY_COLUMNS = {"phase_deg": 1, "gain_dbic": 2, "vh_complex": 4}
COLUMN_HEADER = ("freq_mhz", "elev_deg", "azim_deg", "value", "value2", "value3", "value4")
SCENARIO_ALIASES = {
    "evb": "EVB",
    "sharkfin": "sharkfin",
    "shark-fin": "sharkfin",
    "vehicle": "vehicle",
    "on-vehicle": "vehicle",
}
PHASE_LIMIT_DEG = 1e5

AnyMap = Union[PhaseMap, GainMap, FieldMap]


@dataclass(frozen=True)
class MeasurementSet:
    antenna: str
    scenario: str
    quantity: str
    maps: dict[float, AnyMap] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIO_ALIASES.values():
            raise BadHeader(f"unknown scenario {self.scenario!r}")
        if self.quantity not in QUANTITY_COLUMNS:
            raise BadHeader(f"unknown quantity {self.quantity!r}")
        object.__setattr__(self, "maps", dict(sorted(self.maps.items())))

    @property
    def frequencies(self) -> list[float]:
        return list(self.maps)


def _float(token: str, what: str, lineno: int, source: str | None) -> float:
    try:
        v = float(token)
    except ValueError:
        raise UnitError(f"{what} {token!r} is not a number", lineno, source) from None
    if not math.isfinite(v):
        raise UnitError(f"{what} {token!r} is not finite", lineno, source)
    return v


def _split_header(lines: list[str]):
    """(header dict, index of first data row) or None if the layout is unusual."""
    header: dict[str, str] = {}
    for k, raw in enumerate(lines):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and "," not in line:
            key, _, value = line.partition("=")
            header[key.strip().lower()] = value.strip()
            continue
        if line.split(",", 1)[0].strip() == COLUMN_HEADER[0]:
            return header, k + 1
        return None
    return None


def _parse_fast(text: str) -> MeasurementSet | None:
    """Vectorized parse of a well-formed file; None defers to the checked path."""
    lines = text.splitlines()
    split = _split_header(lines)
    if split is None:
        return None
    header, start = split
    if set(header) != {"antenna", "scenario", "quantity"}:
        return None
    quantity = header["quantity"]
    if quantity not in QUANTITY_COLUMNS or header["scenario"].lower() not in SCENARIO_ALIASES:
        return None
    width = 3 + QUANTITY_COLUMNS[quantity]
    body = [ln for ln in lines[start:] if ln.strip() and not ln.lstrip().startswith("#")]
    if not body:
        return None
    try:
        arr = np.array([[float(c) for c in ln.split(",")] for ln in body], dtype=float)
    except ValueError:
        return None
    if arr.ndim != 2 or arr.shape[1] != width or not np.all(np.isfinite(arr)):
        return None
    freq, el, az, vals = arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3:]
    if np.any(freq <= 0) or np.any((el < 0) | (el > 90)) or np.any((az < 0) | (az >= 360.0 - 1e-9)):
        return None
    if quantity == "phase_deg" and np.any(np.abs(vals[:, 0]) > PHASE_LIMIT_DEG):
        return None
    if quantity == "vh_complex" and np.any((vals[:, 0] < 0) | (vals[:, 2] < 0)):
        return None
    maps: dict[float, AnyMap] = {}
    for f in dict.fromkeys(freq.tolist()):
        rows = freq == f
        els, i = np.unique(el[rows], return_inverse=True)
        azs, j = np.unique(az[rows], return_inverse=True)
        if rows.sum() != els.size * azs.size:
            return None
        grid_vals = np.full((els.size, azs.size, width - 3), np.nan)
        grid_vals[i, j] = vals[rows]
        if np.isnan(grid_vals).any():
            return None  # a duplicate masking a hole
        grid = SphericalGrid(tuple(els.tolist()), tuple(azs.tolist()))
        maps[f] = _build_map(quantity, grid, f, grid_vals)
    return MeasurementSet(header["antenna"], SCENARIO_ALIASES[header["scenario"].lower()], quantity, maps)


def parse_ffd(text: str, source: str | None = None) -> MeasurementSet:
    """Parse FFD text; errors carry ``source`` and the offending line number."""
    fast = _parse_fast(text)
    if fast is not None:
        return fast
    return _parse_checked(text, source)


def _parse_checked(text: str, source: str | None) -> MeasurementSet:
    header: dict[str, str] = {}
    nodes: dict[float, dict[tuple[float, float], tuple[float, ...]]] = {}
    closed: set[tuple[float, float]] = set()
    quantity = None
    n_values = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" in line and "," not in line:
            key, _, value = line.partition("=")
            key = key.strip().lower()
            if key not in ("antenna", "scenario", "quantity"):
                raise BadHeader(f"unknown header key {key!r}", lineno, source)
            if nodes:
                raise BadHeader("header lines must precede data rows", lineno, source)
            header[key] = value.strip()
            continue
        cols = [c.strip() for c in line.split(",")]
        if cols[0] == COLUMN_HEADER[0]:
            continue
        if quantity is None:
            missing = {"antenna", "scenario", "quantity"} - header.keys()
            if missing:
                raise BadHeader(f"missing header line(s): {', '.join(sorted(missing))}", lineno, source)
            quantity = header["quantity"]
            if quantity not in QUANTITY_COLUMNS:
                raise BadHeader(f"unknown quantity {quantity!r}", lineno, source)
            if header["scenario"].lower() not in SCENARIO_ALIASES:
                raise BadHeader(f"unknown scenario {header['scenario']!r}", lineno, source)
            n_values = QUANTITY_COLUMNS[quantity]
        if len(cols) != 3 + n_values:
            raise BadHeader(
                f"expected {3 + n_values} columns for {quantity}, got {len(cols)}", lineno, source
            )
        freq = _float(cols[0], "frequency", lineno, source)
        el = _float(cols[1], "elevation", lineno, source)
        az = _float(cols[2], "azimuth", lineno, source)
        vals = tuple(_float(c, "value", lineno, source) for c in cols[3:])
        if freq <= 0:
            raise UnitError(f"frequency {freq} MHz must be positive", lineno, source)
        if not 0.0 <= el <= 90.0:
            raise UnitError(f"elevation {el} outside [0, 90] deg", lineno, source)
        if not 0.0 <= az <= 360.0:
            raise UnitError(f"azimuth {az} outside [0, 360] deg", lineno, source)
        if quantity == "phase_deg" and abs(vals[0]) > PHASE_LIMIT_DEG:
            raise UnitError(f"phase {vals[0]} deg outside +/-{PHASE_LIMIT_DEG:g}", lineno, source)
        if quantity == "vh_complex" and (vals[0] < 0 or vals[2] < 0):
            raise UnitError("field amplitudes must be non-negative", lineno, source)
        closing = az == 360.0
        az = wrap_azimuth(az)
        per_freq = nodes.setdefault(freq, {})
        if (el, az) in per_freq:
            # a closing 360 deg sample may repeat the 0 deg one verbatim
            if (closing or (freq, el) in closed) and per_freq[(el, az)] == vals:
                continue
            raise DuplicateNode(f"node (freq={freq:g}, elev={el:g}, azim={az:g}) repeated", lineno, source)
        per_freq[(el, az)] = vals
        if closing:
            closed.add((freq, el))

    if quantity is None:
        missing = {"antenna", "scenario", "quantity"} - header.keys()
        if missing:
            raise BadHeader(f"missing header line(s): {', '.join(sorted(missing))}", None, source)
        raise MissingNode("file contains no measurement rows", None, source)

    maps: dict[float, AnyMap] = {}
    for freq, per_freq in nodes.items():
        els = sorted({k[0] for k in per_freq})
        azs = sorted({k[1] for k in per_freq})
        grid = SphericalGrid(tuple(els), tuple(azs))
        arr = np.empty(grid.shape + (n_values,))
        for i, el in enumerate(els):
            for j, az in enumerate(azs):
                try:
                    arr[i, j] = per_freq[(el, az)]
                except KeyError:
                    raise MissingNode(
                        f"missing node (freq={freq:g}, elev={el:g}, azim={az:g})", None, source
                    ) from None
        maps[freq] = _build_map(quantity, grid, freq, arr)
    return MeasurementSet(header["antenna"], SCENARIO_ALIASES[header["scenario"].lower()], quantity, maps)


def _build_map(quantity: str, grid: SphericalGrid, freq: float, arr: np.ndarray) -> AnyMap:
    if quantity == "phase_deg":
        return PhaseMap(grid, freq, arr[..., 0])
    if quantity == "gain_dbic":
        return GainMap(grid, freq, arr[..., 0], arr[..., 1])
    e_v = arr[..., 0] * np.exp(1j * np.deg2rad(arr[..., 1]))
    e_h = arr[..., 2] * np.exp(1j * np.deg2rad(arr[..., 3]))
    # keep the exact polar inputs so writing back is lossless
    return FieldMap(grid, freq, e_v, e_h, polar=arr.copy())


def _value_table(quantity: str, m: AnyMap) -> np.ndarray:
    """Per-node value columns, shape grid + (n_values,)."""
    if quantity == "phase_deg":
        return np.asarray(m.values, dtype=float)[..., None]
    if quantity == "gain_dbic":
        return np.stack([m.rhcp_dbic, m.lhcp_dbic], axis=-1)
    if m.polar is not None:
        return np.asarray(m.polar, dtype=float)
    return np.stack(
        [np.abs(m.e_v), np.rad2deg(np.angle(m.e_v)), np.abs(m.e_h), np.rad2deg(np.angle(m.e_h))], axis=-1
    )


def write_ffd(ms: MeasurementSet) -> str:
    n_values = QUANTITY_COLUMNS[ms.quantity]
    out = [
        "# FFD v1",
        f"antenna={ms.antenna}",
        f"scenario={ms.scenario}",
        f"quantity={ms.quantity}",
        ",".join(COLUMN_HEADER[: 3 + n_values]),
    ]
    for freq, m in ms.maps.items():
        table = _value_table(ms.quantity, m).reshape(-1, n_values).tolist()
        f = repr(float(freq))
        nodes = ((repr(el), repr(az)) for el in m.grid.elevation_samples for az in m.grid.azimuth_samples)
        for (el, az), vals in zip(nodes, table):
            out.append(",".join([f, el, az, *map(repr, vals)]))
    return "\n".join(out) + "\n"
