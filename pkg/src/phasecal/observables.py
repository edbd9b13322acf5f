"""Synthetic code / carrier observables with a labelled error budget.

Carrier phases are assembled from labelled terms and summed with
``math.fsum``; differencing works on plain value records so the same algebra
applies to pseudoranges, phases or observed-minus-computed residuals.
"""

from __future__ import annotations

import math
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable

from .errors import DegenerateFrequencies, MismatchedStructure
from .grid import Direction
from .phase import SPEED_OF_LIGHT
from .profile import CalibrationProfile

L1_MHZ = 1575.42
L5_MHZ = 1176.45

MODELED_TERMS = ("geometry", "iono", "tropo", "clock", "ambiguity")


def wavelength_m(frequency_mhz: float) -> float:
    return SPEED_OF_LIGHT / (float(frequency_mhz) * 1e6)


@dataclass(frozen=True)
class ObservableEpoch:
    """One satellite-receiver-epoch sample. Distances in m, clocks in s.

    ``iono_code`` is the group delay at this epoch's frequency; the carrier
    sees the same magnitude with opposite sign. ``phase_center_error`` is the
    injected receiver antenna term; displacement and wind-up are opaque inputs.
    """

    satellite_id: str
    receiver_id: str
    epoch: int
    true_range: float
    frequency: float = L1_MHZ
    iono_code: float = 0.0
    tropo: float = 0.0
    receiver_clock: float = 0.0
    satellite_clock: float = 0.0
    ambiguity: int = 0
    phase_center_error: float = 0.0
    site_displacement: float = 0.0
    phase_windup: float = 0.0
    code_noise: float = 0.0
    phase_noise: float = 0.0  # cycles

    def __post_init__(self) -> None:
        if int(self.ambiguity) != self.ambiguity:
            raise ValueError("integer ambiguity must be an integer")
        object.__setattr__(self, "ambiguity", int(self.ambiguity))
        if not self.frequency > 0:
            raise ValueError("frequency must be positive")

    @property
    def iono_phase(self) -> float:
        return -self.iono_code

    @property
    def wavelength(self) -> float:
        return wavelength_m(self.frequency)


def synth_code_pseudorange(e: ObservableEpoch) -> float:
    """``d + I + T + c (dt_u - dt^s) + noise`` in m."""
    return math.fsum(
        [
            e.true_range,
            e.iono_code,
            e.tropo,
            SPEED_OF_LIGHT * (e.receiver_clock - e.satellite_clock),
            e.code_noise,
        ]
    )


def correction_m(cal: CalibrationProfile | None, aoa: Direction | None, frequency: float) -> float:
    if cal is None:
        return 0.0
    if aoa is None:
        raise ValueError("applying a calibration needs the arrival direction")
    return cal.phase_center_error_mm(aoa, frequency) * 1e-3


def carrier_phase_terms(
    e: ObservableEpoch,
    aoa: Direction | None = None,
    cal: CalibrationProfile | None = None,
) -> "OrderedDict[str, float]":
    """Labelled contributions (cycles) to the carrier phase of ``e``."""
    lam = e.wavelength
    antenna = e.phase_center_error - correction_m(cal, aoa, e.frequency)
    return OrderedDict(
        geometry=e.true_range / lam,
        iono=e.iono_phase / lam,
        tropo=e.tropo / lam,
        antenna=antenna / lam,
        displacement=e.site_displacement / lam,
        windup=e.phase_windup / lam,
        clock=SPEED_OF_LIGHT / lam * (e.receiver_clock - e.satellite_clock),
        ambiguity=float(e.ambiguity),
        noise=e.phase_noise,
    )


def synth_carrier_phase(
    e: ObservableEpoch,
    aoa: Direction | None = None,
    cal: CalibrationProfile | None = None,
) -> float:
    """Carrier phase in cycles; with ``cal`` the antenna correction is applied."""
    return math.fsum(carrier_phase_terms(e, aoa, cal).values())


def observed_minus_computed(
    e: ObservableEpoch,
    aoa: Direction | None = None,
    cal: CalibrationProfile | None = None,
) -> float:
    """Carrier residual (cycles) once geometry, atmosphere, clocks and N are known."""
    terms = carrier_phase_terms(e, aoa, cal)
    return math.fsum(v for k, v in terms.items() if k not in MODELED_TERMS)


def _check_frequencies(f_l1: float, f_l5: float) -> float:
    if not (f_l1 > 0 and f_l5 > 0) or f_l1 == f_l5:
        raise DegenerateFrequencies(f"need two distinct positive frequencies, got {f_l1}, {f_l5}")
    return f_l5**2 / (f_l1**2 - f_l5**2)


def dispersive_scale(iono_l1: float, f_l1: float, f_target: float) -> float:
    """Ionospheric delay at ``f_target`` given its value at ``f_l1`` (1/f^2 law)."""
    return iono_l1 * (f_l1 / f_target) ** 2


def estimate_iono_group(rho_l1: float, rho_l5: float, f_l1: float = L1_MHZ, f_l5: float = L5_MHZ) -> float:
    """Pseudorange ionospheric group delay at L1 (m)."""
    k = _check_frequencies(f_l1, f_l5)
    return k * (rho_l5 - rho_l1)


def estimate_iono_phase(
    phi_l1: float,
    phi_l5: float,
    n_l1: int,
    n_l5: int,
    f_l1: float = L1_MHZ,
    f_l5: float = L5_MHZ,
) -> float:
    """Carrier ionospheric phase advance at L1 (m); ambiguities must be known."""
    k = _check_frequencies(f_l1, f_l5)
    lam1 = wavelength_m(f_l1)
    lam5 = wavelength_m(f_l5)
    return -k * (lam1 * (phi_l1 - n_l1) - lam5 * (phi_l5 - n_l5))


def round_ambiguity(rho: float, phi: float, frequency: float) -> int:
    """Code-aided integer guess ``round(phi - rho / lambda)``."""
    return int(round(phi - rho / wavelength_m(frequency)))


@dataclass(frozen=True)
class Observation:
    satellite_id: str
    receiver_id: str
    epoch: int
    value: float


def _table(observations: Iterable[Observation]):
    table: dict[tuple[int, str, str], float] = {}
    epochs: list[int] = []
    sats: list[str] = []
    rxs: list[str] = []
    for o in observations:
        key = (o.epoch, o.satellite_id, o.receiver_id)
        if key in table:
            raise MismatchedStructure(f"duplicate observation {key}")
        table[key] = float(o.value)
        for seq, item in ((epochs, o.epoch), (sats, o.satellite_id), (rxs, o.receiver_id)):
            if item not in seq:
                seq.append(item)
    return table, epochs, sats, rxs


def _single(table, epoch, sats, rxs) -> "OrderedDict[str, float]":
    if len(rxs) != 2:
        raise MismatchedStructure(f"single difference needs exactly 2 receivers, got {len(rxs)}")
    out = OrderedDict()
    for s in sats:
        try:
            out[s] = table[(epoch, s, rxs[0])] - table[(epoch, s, rxs[1])]
        except KeyError as exc:
            raise MismatchedStructure(f"satellite {s} missing at a receiver in epoch {epoch}") from exc
    return out


def _double(table, epoch, sats, rxs, reference) -> "OrderedDict[str, float]":
    sd = _single(table, epoch, sats, rxs)
    if len(sd) < 2:
        raise MismatchedStructure("double difference needs at least 2 satellites")
    ref = sats[0] if reference is None else reference
    if ref not in sd:
        raise MismatchedStructure(f"reference satellite {ref} not observed")
    return OrderedDict((s, sd[s] - sd[ref]) for s in sats if s != ref)


def difference(
    observations: Iterable[Observation],
    order: str,
    reference: str | None = None,
) -> "OrderedDict[str, float]":
    """Between-receiver, -satellite and -epoch differences keyed by satellite.

    ``single``: one epoch, two receivers, value(rx0) - value(rx1).
    ``double``: single differences minus the reference satellite's (default:
    first satellite seen). ``triple``: double differences of the second epoch
    minus the first. Receivers and epochs are ordered by first appearance.
    """
    table, epochs, sats, rxs = _table(observations)
    if order == "single":
        if len(epochs) != 1:
            raise MismatchedStructure("single difference needs a common epoch")
        return _single(table, epochs[0], sats, rxs)
    if order == "double":
        if len(epochs) != 1:
            raise MismatchedStructure("double difference needs a common epoch")
        return _double(table, epochs[0], sats, rxs, reference)
    if order == "triple":
        if len(epochs) != 2:
            raise MismatchedStructure(f"triple difference needs exactly 2 epochs, got {len(epochs)}")
        dd0 = _double(table, epochs[0], sats, rxs, reference)
        dd1 = _double(table, epochs[1], sats, rxs, reference)
        return OrderedDict((s, dd1[s] - dd0[s]) for s in dd0)
    raise ValueError(f"order must be single, double or triple, got {order!r}")
