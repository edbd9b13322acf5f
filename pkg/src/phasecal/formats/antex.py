"""ANTEX 1.4 subset: one receiver antenna per file, absolute PCV.

Labelled records are 60 columns of content plus a label starting at column
61. Pattern records (``NOAZI`` and one row per azimuth, 0..360 inclusive)
hold one F8.2 value per zenith angle 0..90 step 5. By default those records
are folded into continuation lines of at most 80 characters: the first line
carries the row key and nine values, continuation lines start with eight
blanks. ``fold_rows=False`` writes each record on a single line instead; the
parser accepts both.

Axis mapping: x (azimuth 0) -> NORTH, y (azimuth 90) -> EAST, z -> UP. The
PCV values are written with the package phase model sign: the phase
center error along a direction is ``u . PCO + PCV``.
"""

from __future__ import annotations

import re

import numpy as np

from ..errors import BadLabel, ElevationOffGrid, TruncatedSection, UnresampleableGrid
from ..grid import SphericalGrid, bilinear
from ..phase import Pco, PcvMap
from ..profile import CalibrationProfile, FrequencyCalibration

ZENITH_STEP = 5.0
AZIMUTH_STEP = 5.0
VALUES_PER_LINE = 9
LINE_WIDTH = 80

FREQUENCY_CODES = (("G01", 1575.42), ("G02", 1227.60), ("G05", 1176.45))
CODE_MATCH_MHZ = 15.0

LABELS = (
    "ANTEX VERSION / SYST",
    "PCV TYPE / REFANT",
    "COMMENT",
    "END OF HEADER",
    "START OF ANTENNA",
    "TYPE / SERIAL NO",
    "METH / BY / # / DATE",
    "DAZI",
    "ZEN1 / ZEN2 / DZEN",
    "# OF FREQUENCIES",
    "START OF FREQUENCY",
    "NORTH / EAST / UP",
    "END OF FREQUENCY",
    "END OF ANTENNA",
)

_FREQ_COMMENT = re.compile(r"^FREQUENCY\s+(\w\d\d)\s+MHZ\s+(\S+)")
_SCENARIO_COMMENT = re.compile(r"^SCENARIO\s+(\S+)")


def frequency_code(frequency: float) -> str:
    code, nominal = min(FREQUENCY_CODES, key=lambda c: abs(c[1] - frequency))
    if abs(nominal - frequency) > CODE_MATCH_MHZ:
        raise ValueError(f"{frequency} MHz is not near a GPS band with an ANTEX code")
    return code


def _code_frequency(code: str) -> float:
    for c, nominal in FREQUENCY_CODES:
        if c == code:
            return nominal
    raise ValueError(f"unsupported frequency code {code!r}")


def _record(content: str, label: str) -> str:
    if len(content) > 60:
        raise ValueError(f"record content exceeds 60 columns: {content!r}")
    return content.ljust(60) + label


def _f(value: float, width: int, decimals: int) -> str:
    s = f"{value:{width}.{decimals}f}"
    if float(s) == 0.0:
        s = f"{0.0:{width}.{decimals}f}"
    if len(s) > width:
        raise ValueError(f"value {value} does not fit F{width}.{decimals}")
    return s


def antex_lattice() -> tuple[np.ndarray, np.ndarray]:
    zen = np.arange(0.0, 90.0 + 1e-9, ZENITH_STEP)
    az = np.arange(0.0, 360.0 + 1e-9, AZIMUTH_STEP)
    return zen, az


def resample_to_antex(pcv: PcvMap) -> np.ndarray:
    """PCV on the (azimuth 0..360) x (zenith 0..90) lattice, bilinear."""
    grid = pcv.grid
    if grid.shape[1] < 2:
        raise UnresampleableGrid("need at least two azimuth samples to interpolate")
    zen, az = antex_lattice()
    el_q, az_q = np.meshgrid(90.0 - zen, az)
    try:
        return bilinear(grid, pcv.values, el_q, az_q)
    except ElevationOffGrid as exc:
        raise UnresampleableGrid(f"source grid does not cover zenith 0..90: {exc}") from exc


def _pattern_lines(key: str, values, fold: bool) -> list[str]:
    cells = [_f(v, 8, 2) for v in values]
    if not fold:
        return [key + "".join(cells)]
    lines = []
    for k in range(0, len(cells), VALUES_PER_LINE):
        lead = key if k == 0 else " " * 8
        lines.append(lead + "".join(cells[k : k + VALUES_PER_LINE]))
    return lines


def write_antex(cal: CalibrationProfile, fold_rows: bool = True, date: str = "") -> str:
    zen, az = antex_lattice()
    lines = [
        _record(f"{1.4:8.1f}" + " " * 12 + "G", "ANTEX VERSION / SYST"),
        _record("A", "PCV TYPE / REFANT"),
        _record("PHASECAL CHAMBER CALIBRATION", "COMMENT"),
        _record("OFFSETS NORTH=X(AZ 0) EAST=Y(AZ 90) UP=Z, MM", "COMMENT"),
        _record("PHASE CENTER ERROR ALONG U = U.PCO + PCV", "COMMENT"),
        _record(f"SCENARIO {cal.scenario}", "COMMENT"),
        _record("", "END OF HEADER"),
        _record("", "START OF ANTENNA"),
        _record(f"{cal.antenna[:20]:<20}{'':<20}{'':<10}{'':<10}", "TYPE / SERIAL NO"),
        _record(f"{'CHAMBER':<20}{'PHASECAL':<20}{0:6d}    {date[:10]:<10}", "METH / BY / # / DATE"),
        _record(f"  {AZIMUTH_STEP:6.1f}", "DAZI"),
        _record(f"  {zen[0]:6.1f}{zen[-1]:6.1f}{ZENITH_STEP:6.1f}", "ZEN1 / ZEN2 / DZEN"),
        _record(f"{len(cal.entries):6d}", "# OF FREQUENCIES"),
    ]
    for entry in cal.entries:
        code = frequency_code(entry.frequency)
        lines.append(_record(f"FREQUENCY {code} MHZ {entry.frequency!r}", "COMMENT"))
    for entry in cal.entries:
        code = frequency_code(entry.frequency)
        grid_pcv = resample_to_antex(entry.pcv)
        p = entry.pco
        lines.append(_record(f"   {code}", "START OF FREQUENCY"))
        lines.append(_record(_f(p.x, 10, 2) + _f(p.y, 10, 2) + _f(p.z, 10, 2), "NORTH / EAST / UP"))
        lines.extend(_pattern_lines("   NOAZI", grid_pcv[:-1].mean(axis=0), fold_rows))
        for a, row in zip(az, grid_pcv):
            lines.extend(_pattern_lines(_f(a, 8, 1), row, fold_rows))
        lines.append(_record(f"   {code}", "END OF FREQUENCY"))
    lines.append(_record("", "END OF ANTENNA"))
    return "\n".join(lines) + "\n"


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.i = 0

    def peek(self) -> str | None:
        return self.lines[self.i] if self.i < len(self.lines) else None

    def next(self, what: str) -> str:
        if self.i >= len(self.lines):
            raise TruncatedSection(f"file ends before {what}", self.i)
        line = self.lines[self.i]
        self.i += 1
        return line

    @property
    def lineno(self) -> int:
        return self.i


def _label(line: str) -> str | None:
    if len(line) <= 60:
        return None
    label = line[60:].strip()
    return label if label in LABELS else None


def _looks_labelled(line: str) -> bool:
    return len(line) > 60 and any(ch.isalpha() for ch in line[60:])


def _expect(lines: _Lines, label: str, skip_comments: bool = True) -> str:
    while True:
        line = lines.next(label)
        got = _label(line)
        if got == "COMMENT" and skip_comments and label != "COMMENT":
            continue
        if got != label:
            raise BadLabel(f"expected {label!r}, found {line[60:].strip()!r}", lines.lineno)
        return line


def _numbers(text: str, lineno: int) -> list[float]:
    try:
        return [float(t) for t in text.split()]
    except ValueError:
        raise BadLabel(f"unrecognized record: {text.strip()[:40]!r}", lineno) from None


def _pattern_row(lines: _Lines, n: int, what: str) -> tuple[str, list[float]]:
    line = lines.next(what)
    if _label(line) is not None or _looks_labelled(line):
        if _label(line) is None:
            raise BadLabel(f"unknown label {line[60:].strip()!r}", lines.lineno)
        raise TruncatedSection(f"{what}: pattern row missing before {line[60:].strip()!r}", lines.lineno)
    key = line[:8]
    values = _numbers(line[8:], lines.lineno)
    while len(values) < n:
        nxt = lines.peek()
        if nxt is None or not nxt.startswith(" " * 8) or _label(nxt) is not None or _looks_labelled(nxt):
            raise TruncatedSection(f"{what}: {len(values)} of {n} values", lines.lineno)
        lines.next(what)
        values.extend(_numbers(nxt, lines.lineno))
    if len(values) != n:
        raise TruncatedSection(f"{what}: expected {n} values, got {len(values)}", lines.lineno)
    return key, values


def parse_antex(text: str) -> CalibrationProfile:
    lines = _Lines(text)
    first = lines.next("ANTEX VERSION / SYST")
    if _label(first) != "ANTEX VERSION / SYST":
        raise BadLabel("first record must be 'ANTEX VERSION / SYST'", 1)

    exact_freq: dict[str, float] = {}
    scenario = "EVB"
    while True:
        line = lines.next("END OF HEADER")
        label = _label(line)
        if label == "END OF HEADER":
            break
        if label is None:
            raise BadLabel(f"unknown header label {line[60:].strip()!r}", lines.lineno)
        if label == "COMMENT":
            m = _SCENARIO_COMMENT.match(line[:60])
            if m:
                scenario = m.group(1)

    _expect(lines, "START OF ANTENNA")
    antenna = _expect(lines, "TYPE / SERIAL NO")[:20].strip()
    _expect(lines, "METH / BY / # / DATE")
    dazi = float(_expect(lines, "DAZI")[2:8])
    zparts = _expect(lines, "ZEN1 / ZEN2 / DZEN")[2:20]
    zen1, zen2, dzen = (float(zparts[k : k + 6]) for k in (0, 6, 12))
    n_freq = int(_expect(lines, "# OF FREQUENCIES")[:6])
    n_zen = int(round((zen2 - zen1) / dzen)) + 1
    zen = zen1 + dzen * np.arange(n_zen)
    n_az = int(round(360.0 / dazi)) + 1 if dazi > 0 else 0

    entries = []
    for _ in range(n_freq):
        while True:
            line = lines.next("START OF FREQUENCY")
            label = _label(line)
            if label == "COMMENT":
                m = _FREQ_COMMENT.match(line[:60])
                if m:
                    exact_freq[m.group(1)] = float(m.group(2))
                continue
            if label != "START OF FREQUENCY":
                if label == "END OF ANTENNA":
                    raise TruncatedSection("fewer frequency blocks than declared", lines.lineno)
                raise BadLabel(f"expected 'START OF FREQUENCY', found {line[60:].strip()!r}", lines.lineno)
            break
        code = line[3:6]
        neu = _expect(lines, "NORTH / EAST / UP")
        pco = Pco(float(neu[0:10]), float(neu[10:20]), float(neu[20:30]))
        key, _ = _pattern_row(lines, n_zen, "NOAZI")
        if key.strip() != "NOAZI":
            raise BadLabel(f"expected NOAZI row, found {key!r}", lines.lineno)
        rows = []
        azs = []
        for _k in range(n_az):
            key, vals = _pattern_row(lines, n_zen, "azimuth row")
            try:
                azs.append(float(key))
            except ValueError:
                raise BadLabel(f"expected an azimuth row key, found {key!r}", lines.lineno) from None
            rows.append(vals)
        _expect(lines, "END OF FREQUENCY")
        frequency = exact_freq.get(code, _code_frequency(code))
        entries.append(FrequencyCalibration(frequency, pco, _pcv_from_lattice(frequency, zen, azs, rows)))
    _expect(lines, "END OF ANTENNA")
    return CalibrationProfile(antenna, tuple(entries), scenario)


def _pcv_from_lattice(frequency: float, zen, azs, rows) -> PcvMap:
    azs = np.asarray(azs)
    rows = np.asarray(rows)
    keep = azs < 360.0 - 1e-9
    elevations = tuple(float(e) for e in (90.0 - zen)[::-1])
    grid = SphericalGrid(elevations, tuple(float(a) for a in azs[keep]))
    # rows are (azimuth, zenith); grid wants (elevation ascending, azimuth)
    values = rows[keep][:, ::-1].T
    return PcvMap(grid, frequency, values)
