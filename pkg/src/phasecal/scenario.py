"""Two-receiver carrier-phase scenario for checking antenna calibration closure.

A base receiver with an ideal antenna and a rover with a known antenna
profile track the same satellites from the same arrival directions (short
baseline). The rover's double differences therefore keep the antenna
phase-center error unless a calibration is applied.

Scenario files are plain ``key = value`` text, ``#`` starts a comment::

    frequency_mhz = 1575.42
    epochs = 4
    seed = 7
    satellites = G01 60 45; G07 35 120; G12 20 250
    truth_pco_mm = 3, -2, 5
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CalibrationError
from .grid import Direction
from .observables import (
    L1_MHZ,
    Observation,
    ObservableEpoch,
    difference,
    observed_minus_computed,
    synth_carrier_phase,
    synth_code_pseudorange,
)
from .phase import Pco
from .profile import CalibrationProfile, pure_offset_profile

BASE = "base"
ROVER = "rover"


class ScenarioError(CalibrationError):
    pass


@dataclass(frozen=True)
class Satellite:
    satellite_id: str
    elevation: float
    azimuth: float

    @property
    def aoa(self) -> Direction:
        return Direction.from_elevation(self.elevation, self.azimuth)


@dataclass(frozen=True)
class Scenario:
    satellites: tuple[Satellite, ...]
    frequency_mhz: float = L1_MHZ
    epochs: int = 3
    seed: int = 0
    truth_pco_mm: Pco = field(default_factory=Pco)
    truth_calibration: str | None = None
    iono_m: float = 3.0
    tropo_m: float = 2.4
    receiver_clock_s: float = 1e-4
    satellite_clock_s: float = 1e-5
    code_noise_m: float = 0.0
    phase_noise_cycles: float = 0.0
    baseline_m: float = 10.0

    def __post_init__(self) -> None:
        if len(self.satellites) < 2:
            raise ScenarioError("a double-difference scenario needs at least 2 satellites")
        if self.epochs < 1:
            raise ScenarioError("epochs must be >= 1")
        ids = [s.satellite_id for s in self.satellites]
        if len(set(ids)) != len(ids):
            raise ScenarioError("satellite ids must be unique")


_FLOAT_KEYS = {
    "frequency_mhz",
    "iono_m",
    "tropo_m",
    "receiver_clock_s",
    "satellite_clock_s",
    "code_noise_m",
    "phase_noise_cycles",
    "baseline_m",
}
_INT_KEYS = {"epochs", "seed"}


def _parse_satellites(value: str) -> tuple[Satellite, ...]:
    sats = []
    for chunk in value.split(";"):
        parts = chunk.split()
        if not parts:
            continue
        if len(parts) != 3:
            raise ScenarioError(f"satellite entry {chunk.strip()!r} must be 'ID ELEV AZIM'")
        sid, el, az = parts[0], float(parts[1]), float(parts[2])
        if not 0.0 <= el <= 90.0:
            raise ScenarioError(f"satellite {sid} elevation {el} outside [0, 90]")
        sats.append(Satellite(sid, el, az))
    return tuple(sats)


def parse_scenario(text: str, base_dir: Path | None = None) -> Scenario:
    kwargs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ScenarioError(f"line {lineno}: expected 'key = value'")
        key = key.strip().lower()
        value = value.strip()
        try:
            if key == "satellites":
                kwargs[key] = _parse_satellites(value)
            elif key == "truth_pco_mm":
                kwargs[key] = Pco.from_array(float(v) for v in value.split(","))
            elif key == "truth_calibration":
                p = Path(value)
                if base_dir is not None and not p.is_absolute():
                    p = base_dir / p
                kwargs[key] = str(p)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            elif key in _INT_KEYS:
                kwargs[key] = int(value)
            else:
                raise ScenarioError(f"line {lineno}: unknown key {key!r}")
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(f"line {lineno}: bad value for {key}: {exc}") from None
    if "satellites" not in kwargs:
        raise ScenarioError("scenario must list satellites")
    return Scenario(**kwargs)


def truth_profile(sc: Scenario) -> CalibrationProfile:
    if sc.truth_calibration:
        from .formats.store import load_profile

        return load_profile(sc.truth_calibration)
    return pure_offset_profile({sc.frequency_mhz: sc.truth_pco_mm}, antenna="ROVER-TRUTH")


@dataclass(frozen=True)
class SimulatedObservation:
    epoch: ObservableEpoch
    aoa: Direction


def simulate_epochs(sc: Scenario, truth: CalibrationProfile) -> list[SimulatedObservation]:
    """All (epoch, satellite, receiver) samples, in that nesting order."""
    rng = np.random.default_rng(sc.seed)
    n_sat = len(sc.satellites)
    ranges = rng.uniform(2.0e7, 2.6e7, n_sat)
    rates = rng.uniform(-800.0, 800.0, n_sat)
    offsets = rng.uniform(-sc.baseline_m, sc.baseline_m, n_sat)
    iono = rng.uniform(0.2, 1.0, n_sat) * sc.iono_m
    tropo = np.array([sc.tropo_m / max(math.sin(math.radians(max(s.elevation, 3.0))), 1e-3) for s in sc.satellites])
    amb = rng.integers(-1_000_000, 1_000_000, size=(n_sat, 2))
    out = []
    for k in range(sc.epochs):
        sat_clk = rng.normal(0.0, sc.satellite_clock_s, n_sat)
        rx_clk = rng.normal(0.0, sc.receiver_clock_s, 2)
        for i, sat in enumerate(sc.satellites):
            aoa = sat.aoa
            for r, rx in enumerate((BASE, ROVER)):
                pce = 0.0
                if rx == ROVER:
                    pce = truth.phase_center_error_mm(aoa, sc.frequency_mhz) * 1e-3
                code_noise = rng.normal(0.0, sc.code_noise_m) if sc.code_noise_m else 0.0
                phase_noise = rng.normal(0.0, sc.phase_noise_cycles) if sc.phase_noise_cycles else 0.0
                e = ObservableEpoch(
                    satellite_id=sat.satellite_id,
                    receiver_id=rx,
                    epoch=k,
                    true_range=float(ranges[i] + rates[i] * 30.0 * k + (offsets[i] if r else 0.0)),
                    frequency=sc.frequency_mhz,
                    iono_code=float(iono[i]),
                    tropo=float(tropo[i]),
                    receiver_clock=float(rx_clk[r]),
                    satellite_clock=float(sat_clk[i]),
                    ambiguity=int(amb[i, r]),
                    phase_center_error=pce,
                    code_noise=code_noise,
                    phase_noise=phase_noise,
                )
                out.append(SimulatedObservation(e, aoa))
    return out


@dataclass(frozen=True)
class DdRow:
    epoch: int
    satellite_id: str
    reference_id: str
    injected: float
    uncorrected: float
    corrected: float


def _rover_cal(applied: CalibrationProfile | None, rx: str) -> CalibrationProfile | None:
    return applied if rx == ROVER else None


def double_difference_rows(
    sims: list[SimulatedObservation], applied: CalibrationProfile | None
) -> list[DdRow]:
    """Per-epoch DD residuals (cycles) with and without the rover calibration."""
    by_epoch: dict[int, list[SimulatedObservation]] = {}
    for s in sims:
        by_epoch.setdefault(s.epoch.epoch, []).append(s)
    rows = []
    for k, group in sorted(by_epoch.items()):

        def obs(fn):
            return [
                Observation(s.epoch.satellite_id, s.epoch.receiver_id, k, fn(s)) for s in group
            ]

        injected = difference(obs(lambda s: s.epoch.phase_center_error / s.epoch.wavelength), "double")
        # receiver order is (base, rover); flip sign so DD reads rover - base
        unc = difference(obs(lambda s: observed_minus_computed(s.epoch, s.aoa, None)), "double")
        cor = difference(
            obs(lambda s: observed_minus_computed(s.epoch, s.aoa, _rover_cal(applied, s.epoch.receiver_id))),
            "double",
        )
        ref = group[0].epoch.satellite_id
        for sid in injected:
            # + 0.0 folds -0.0 so CSV output never shows a signed zero
            rows.append(DdRow(k, sid, ref, -injected[sid] + 0.0, -unc[sid] + 0.0, -cor[sid] + 0.0))
    return rows


def _stats(values) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return 0.0, 0.0
    return float(np.sqrt(np.mean(v**2))), float(np.max(np.abs(v)))


@dataclass(frozen=True)
class SimulationResult:
    scenario: Scenario
    observations: list[SimulatedObservation]
    rows: list[DdRow]

    @property
    def max_corrected(self) -> float:
        return _stats([r.corrected for r in self.rows])[1]

    @property
    def max_closure_error(self) -> float:
        """Largest |uncorrected - injected| over all DD rows."""
        return max((abs(r.uncorrected - r.injected) for r in self.rows), default=0.0)


def run_simulation(sc: Scenario, applied: CalibrationProfile | None = None) -> SimulationResult:
    """Simulate the scenario; ``applied`` defaults to the generating profile."""
    truth = truth_profile(sc)
    applied = truth if applied is None else applied
    sims = simulate_epochs(sc, truth)
    return SimulationResult(sc, sims, double_difference_rows(sims, applied))


def observables_csv(result: SimulationResult, applied: CalibrationProfile | None) -> str:
    buf = io.StringIO()
    buf.write("epoch,satellite,receiver,freq_mhz,elev_deg,azim_deg,code_m,phase_cycles,omc_uncorrected_cycles,omc_corrected_cycles\n")
    for s in result.observations:
        e = s.epoch
        cal = _rover_cal(applied, e.receiver_id)
        buf.write(
            f"{e.epoch},{e.satellite_id},{e.receiver_id},{e.frequency!r},{s.aoa.elevation!r},{s.aoa.phi!r},"
            f"{synth_code_pseudorange(e)!r},{synth_carrier_phase(e, s.aoa, cal)!r},"
            f"{observed_minus_computed(e, s.aoa, None)!r},{observed_minus_computed(e, s.aoa, cal)!r}\n"
        )
    return buf.getvalue()


def residuals_csv(result: SimulationResult) -> str:
    buf = io.StringIO()
    buf.write("epoch,satellite,reference,injected_dd_cycles,uncorrected_dd_cycles,corrected_dd_cycles\n")
    for r in result.rows:
        buf.write(f"{r.epoch},{r.satellite_id},{r.reference_id},{r.injected:.15e},{r.uncorrected:.15e},{r.corrected:.15e}\n")
    return buf.getvalue()


def residual_report(result: SimulationResult) -> str:
    lam_mm = 299_792_458.0 / (result.scenario.frequency_mhz * 1e6) * 1e3
    unc_rms, unc_max = _stats([r.uncorrected for r in result.rows])
    cor_rms, cor_max = _stats([r.corrected for r in result.rows])
    lines = [
        f"double-difference carrier residuals, {result.scenario.frequency_mhz:g} MHz, "
        f"{len(result.rows)} DD value(s)",
        "\tuncorrected\tcorrected",
        f"RMS [cycles]\t{unc_rms:.3e}\t{cor_rms:.3e}",
        f"MAX [cycles]\t{unc_max:.3e}\t{cor_max:.3e}",
        f"RMS [mm]\t{unc_rms * lam_mm:.1f}\t{cor_rms * lam_mm:.1f}",
        f"MAX [mm]\t{unc_max * lam_mm:.1f}\t{cor_max * lam_mm:.1f}",
        f"closure |uncorrected - injected| max [cycles]\t{result.max_closure_error:.3e}",
    ]
    return "\n".join(lines) + "\n"
