"""JSON persistence of calibration results (profile plus fit diagnostics)."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..dispersion import CepReport
from ..grid import SphericalGrid
from ..pco import PcoEstimate, PcoPointCloud
from ..phase import Pco, PcvMap
from ..pipeline import CalibrationResult, FrequencyResult
from ..profile import CalibrationProfile

FORMAT_TAG = "phasecal-calibration/1"


def _map_to_json(m: PcvMap) -> dict:
    return {
        "elevation_deg": list(m.grid.elevation_samples),
        "azimuth_deg": list(m.grid.azimuth_samples),
        "values_mm": m.values.tolist(),
    }


def _map_from_json(d: dict, frequency: float) -> PcvMap:
    grid = SphericalGrid(tuple(d["elevation_deg"]), tuple(d["azimuth_deg"]))
    return PcvMap(grid, frequency, np.asarray(d["values_mm"], dtype=float))


def _pco(p: Pco) -> list[float]:
    return [p.x, p.y, p.z]


def result_to_json(result: CalibrationResult) -> str:
    freqs = []
    for r in result.results:
        e = r.estimate
        freqs.append(
            {
                "frequency_mhz": r.frequency,
                "pco_mm": _pco(e.pco),
                "rms_residual_mm": e.rms_residual,
                "condition_number": e.condition_number,
                "n_obs": e.n_obs,
                "bias_mm": e.bias,
                "cloud": [[el, *_pco(p)] for el, p in r.cloud.points],
                "cep_mm": None
                if r.cep is None
                else {
                    "mean_xy": list(r.cep.mean_xy),
                    "cep50": r.cep.cep50,
                    "cep68": r.cep.cep68,
                    "cep95": r.cep.cep95,
                    "n_points": r.cep.n_points,
                },
                "pcv": _map_to_json(r.pcv),
                "residual_pcv": _map_to_json(r.residual),
            }
        )
    doc = {
        "format": FORMAT_TAG,
        "antenna": result.antenna,
        "scenario": result.scenario,
        "mask_deg": float(result.mask),
        "estimate_bias": result.estimate_bias,
        "weight": result.weight,
        "frequencies": freqs,
    }
    return json.dumps(doc, indent=1) + "\n"


def result_from_json(text: str) -> CalibrationResult:
    doc = json.loads(text)
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"not a phasecal calibration file (format={doc.get('format')!r})")
    mask = float(doc["mask_deg"])
    results = []
    for f in doc["frequencies"]:
        freq = float(f["frequency_mhz"])
        pco = Pco.from_array(f["pco_mm"])
        cloud = PcoPointCloud(
            tuple((float(el), Pco(x, y, z)) for el, x, y, z in f["cloud"]), mask=mask, frequency=freq
        )
        c = f["cep_mm"]
        cep = None if c is None else CepReport(tuple(c["mean_xy"]), c["cep50"], c["cep68"], c["cep95"], c["n_points"])
        est = PcoEstimate(pco, f["rms_residual_mm"], f["condition_number"], f["n_obs"], mask, f["bias_mm"])
        results.append(
            FrequencyResult(
                freq,
                _map_from_json(f["pcv"], freq),
                est,
                cloud,
                cep,
                _map_from_json(f["residual_pcv"], freq),
            )
        )
    return CalibrationResult(
        doc["antenna"], doc["scenario"], tuple(results), mask, bool(doc["estimate_bias"]), doc["weight"]
    )


def load_profile(path: str | Path) -> CalibrationProfile:
    """Calibration profile from a phasecal JSON file or an ANTEX file."""
    from .antex import parse_antex

    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".atx":
        return parse_antex(text)
    return result_from_json(text).profile()
