"""Circular error probable over horizontal PCO scatter, and the summary table.

CEP radii are nearest-rank percentiles of the distances from the mean point,
so every reported radius is one of the observed distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyInput
from .pco import PcoPointCloud

CEP_FRACTIONS = (0.50, 0.68, 0.95)

SCENARIO_LABELS = {"EVB": "EVB", "sharkfin": "Shark-fin", "vehicle": "On-vehicle"}

# nominal band centres used for table headers, MHz
BANDS = (("L1", 1575.42), ("L2", 1227.60), ("L5", 1176.45))


def nearest_rank(fraction: float, n: int) -> int:
    """1-based inclusive ceiling rank ``ceil(fraction * n)``."""
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    # round first so that e.g. 0.68 * 25 lands on 17, not 17.000000000000004
    return max(1, math.ceil(round(fraction * n, 9)))


def _radii(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise EmptyInput("CEP needs at least one point")
    return np.hypot(*(pts - pts.mean(axis=0)).T)


def cep(points, fraction: float) -> float:
    """Radius about the mean enclosing ``fraction`` of the points (nearest rank)."""
    radii = np.sort(_radii(points))
    return float(radii[nearest_rank(fraction, radii.size) - 1])


@dataclass(frozen=True)
class CepReport:
    mean_xy: tuple[float, float]
    cep50: float
    cep68: float
    cep95: float
    n_points: int

    def __post_init__(self) -> None:
        if not (0.0 <= self.cep50 <= self.cep68 <= self.cep95):
            raise ValueError("CEP radii must be non-decreasing")


def cep_from_points(points) -> CepReport:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    radii = np.sort(_radii(pts))
    r = [float(radii[nearest_rank(f, radii.size) - 1]) for f in CEP_FRACTIONS]
    mean = pts.mean(axis=0)
    return CepReport((float(mean[0]), float(mean[1])), r[0], r[1], r[2], int(pts.shape[0]))


def cep_report(cloud: PcoPointCloud) -> CepReport:
    """CEP50/68/95 of the cloud projected onto the horizontal (x, y) plane."""
    if len(cloud) == 0:
        raise EmptyInput("point cloud is empty after masking")
    return cep_from_points(cloud.xyz()[:, :2])


def band_label(frequency_mhz: float) -> str:
    name, _ = min(BANDS, key=lambda b: abs(b[1] - frequency_mhz))
    return f"{name}: {frequency_mhz:g}MHz"


@dataclass(frozen=True)
class TableColumn:
    """One scenario column of the summary table."""

    label: str
    pcv_min: float
    pcv_max: float
    cep50: float
    cep68: float
    cep95: float


def format_mm(v: float) -> str:
    """One-decimal mm text; never shows a signed zero."""
    s = f"{v:.1f}"
    return "0.0" if s == "-0.0" else s


def format_pcv_range(lo: float, hi: float) -> str:
    return f"{format_mm(lo)} to {format_mm(hi)}"


def format_table(sections: Sequence[tuple[float, Sequence[TableColumn]]]) -> str:
    """Tab-delimited PCV-range / CEP table, one block per frequency.

    Each block: band header, scenario header (first block only), PCV range, a
    ``PCO`` divider and the three CEP rows, all mm values with one decimal.
    Header and divider lines carry one trailing tab per column.
    """
    lines: list[str] = []
    for i, (freq, columns) in enumerate(sections):
        pad = "\t" * len(columns)
        lines.append(band_label(freq) + pad)
        if i == 0:
            lines.append("\t" + "\t".join(c.label for c in columns))
        lines.append("PCV [mm]\t" + "\t".join(format_pcv_range(c.pcv_min, c.pcv_max) for c in columns))
        lines.append("PCO" + pad)
        for key in ("cep50", "cep68", "cep95"):
            label = f"CEP{key[3:]}[mm]"
            lines.append(label + "\t" + "\t".join(format_mm(getattr(c, key)) for c in columns))
    return "\n".join(lines) + "\n"
