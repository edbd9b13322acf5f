"""Measurement set -> normalized phase -> PCV -> PCO, ring cloud and CEP."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dispersion import SCENARIO_LABELS, CepReport, TableColumn, cep_report, format_table
from .errors import EmptyInput
from .formats.ffd import MeasurementSet
from .grid import FieldMap, PhaseMap
from .metrics import vh_to_circular
from .pco import DEFAULT_MASK_DEG, PcoEstimate, PcoPointCloud, residual_pcv, solve_pco, solve_pco_per_elevation
from .phase import PcvMap, pcv_map, pcv_range, unwrap_and_normalize
from .profile import CalibrationProfile, FrequencyCalibration


@dataclass(frozen=True)
class FrequencyResult:
    frequency: float
    pcv: PcvMap
    estimate: PcoEstimate
    cloud: PcoPointCloud
    cep: CepReport | None
    residual: PcvMap

    def table_column(self, label: str) -> TableColumn:
        lo, hi = pcv_range(self.pcv)
        cep = self.cep or CepReport((0.0, 0.0), 0.0, 0.0, 0.0, 0)
        return TableColumn(label, lo, hi, cep.cep50, cep.cep68, cep.cep95)


@dataclass(frozen=True)
class CalibrationResult:
    antenna: str
    scenario: str
    results: tuple[FrequencyResult, ...]
    mask: float = DEFAULT_MASK_DEG
    estimate_bias: bool = False
    weight: str = "equal"

    def profile(self) -> CalibrationProfile:
        return CalibrationProfile(
            self.antenna,
            tuple(FrequencyCalibration(r.frequency, r.estimate.pco, r.residual) for r in self.results),
            self.scenario,
        )

    def table(self) -> str:
        label = SCENARIO_LABELS.get(self.scenario, self.scenario)
        return format_table([(r.frequency, [r.table_column(label)]) for r in self.results])


def calibrate_map(
    raw: PhaseMap,
    mask: float = DEFAULT_MASK_DEG,
    estimate_bias: bool = False,
    weight: str = "equal",
) -> FrequencyResult:
    normalized = raw if raw.normalized else unwrap_and_normalize(raw)
    estimate = solve_pco(normalized, mask, estimate_bias=estimate_bias, weight=weight)
    cloud = solve_pco_per_elevation(normalized, mask)
    cep = cep_report(cloud) if len(cloud) else None
    return FrequencyResult(
        frequency=raw.frequency,
        pcv=pcv_map(normalized),
        estimate=estimate,
        cloud=cloud,
        cep=cep,
        residual=residual_pcv(normalized, estimate.pco),
    )


def rhcp_phase_map(fields: FieldMap) -> PhaseMap:
    """Wrapped RHCP phase (degrees) of a dual-linear field map."""
    e_r, _ = vh_to_circular(fields.e_v, fields.e_h)
    return PhaseMap(fields.grid, fields.frequency, np.rad2deg(np.angle(e_r)))


def select_frequencies(available: Iterable[float], wanted: Iterable[float] | None, tol: float = 0.5) -> list[float]:
    available = sorted(available)
    if not wanted:
        return available
    chosen = []
    for w in wanted:
        match = [f for f in available if abs(f - w) <= tol]
        if not match:
            raise EmptyInput(f"frequency {w:g} MHz not present (have {', '.join(f'{f:g}' for f in available)})")
        chosen.append(match[0])
    return sorted(set(chosen))


def calibrate(
    ms: MeasurementSet,
    mask: float = DEFAULT_MASK_DEG,
    estimate_bias: bool = False,
    weight: str = "equal",
    frequencies: Iterable[float] | None = None,
) -> CalibrationResult:
    if ms.quantity == "phase_deg":
        phase = ms.maps
    elif ms.quantity == "vh_complex":
        phase = {f: rhcp_phase_map(m) for f, m in ms.maps.items()}
    else:
        raise EmptyInput(f"calibration needs phase_deg or vh_complex data, file holds {ms.quantity}")
    results = tuple(
        calibrate_map(phase[f], mask, estimate_bias, weight)
        for f in select_frequencies(ms.maps, frequencies)
    )
    return CalibrationResult(ms.antenna, ms.scenario, results, mask, estimate_bias, weight)
