"""Plot-ready CSV tables and the text calibration report."""

from __future__ import annotations

import io
from pathlib import Path
from typing import Iterable

from .dispersion import format_mm
from .grid import GainMap
from .metrics import azimuth_cut, elevation_curves
from .pipeline import CalibrationResult

AZIMUTH_CUT_ELEVATION = 36.0


def pcv_grid_csv(result: CalibrationResult) -> str:
    """Heatmap table: PCV and post-fit residual PCV per grid node."""
    buf = io.StringIO()
    buf.write("freq_mhz,elev_deg,azim_deg,pcv_mm,residual_pcv_mm\n")
    for r in result.results:
        grid = r.pcv.grid
        for i, el in enumerate(grid.elevation_samples):
            for j, az in enumerate(grid.azimuth_samples):
                buf.write(f"{r.frequency:g},{el:g},{az:g},{r.pcv.values[i, j]:.6f},{r.residual.values[i, j]:.6f}\n")
    return buf.getvalue()


def cloud_csv(result: CalibrationResult) -> str:
    """Scatter table: one per-elevation PCO solution per row."""
    buf = io.StringIO()
    buf.write("freq_mhz,elev_deg,x_mm,y_mm,z_mm\n")
    for r in result.results:
        for el, p in r.cloud.points:
            buf.write(f"{r.frequency:g},{el:g},{p.x:.6f},{p.y:.6f},{p.z:.6f}\n")
    return buf.getvalue()


def pco_csv(result: CalibrationResult) -> str:
    buf = io.StringIO()
    buf.write("freq_mhz,x_mm,y_mm,z_mm,bias_mm,rms_residual_mm,condition_number,n_obs,mask_deg\n")
    for r in result.results:
        e = r.estimate
        bias = "" if e.bias is None else f"{e.bias:.6f}"
        buf.write(
            f"{r.frequency:g},{e.pco.x:.6f},{e.pco.y:.6f},{e.pco.z:.6f},{bias},"
            f"{e.rms_residual:.6e},{e.condition_number:.6e},{e.n_obs},{e.mask:g}\n"
        )
    return buf.getvalue()


def lag_ar_csv(gains: Iterable[GainMap]) -> str:
    """Per-ring linear average gain and axial ratio curves."""
    buf = io.StringIO()
    buf.write("freq_mhz,elev_deg,lag_dbi,ar_db\n")
    for g in gains:
        for el, lag, ar in elevation_curves(g):
            buf.write(f"{g.frequency:g},{el:g},{lag:.4f},{ar:.4f}\n")
    return buf.getvalue()


def azimuth_cut_csv(gains: Iterable[GainMap], elevation: float = AZIMUTH_CUT_ELEVATION) -> str:
    buf = io.StringIO()
    buf.write("freq_mhz,elev_deg,azim_deg,rhcp_dbic,lhcp_dbic,ar_db\n")
    for g in gains:
        for az, rhcp, lhcp, ar in azimuth_cut(g, elevation):
            buf.write(f"{g.frequency:g},{elevation:g},{az:g},{rhcp:.4f},{lhcp:.4f},{ar:.4f}\n")
    return buf.getvalue()


def text_report(result: CalibrationResult) -> str:
    """The dispersion table followed by the fitted offsets, one decimal in mm."""
    lines = [result.table().rstrip("\n"), ""]
    lines.append(f"antenna\t{result.antenna}")
    lines.append(f"mask [deg]\t{result.mask:g}")
    lines.append(f"weight\t{result.weight}")
    lines.append("freq [MHz]\tPCO x [mm]\tPCO y [mm]\tPCO z [mm]")
    for r in result.results:
        p = r.estimate.pco
        lines.append(f"{r.frequency:g}\t{format_mm(p.x)}\t{format_mm(p.y)}\t{format_mm(p.z)}")
    return "\n".join(lines) + "\n"


def write_calibration_tables(result: CalibrationResult, out: Path) -> list[Path]:
    """Write every CSV derived from a calibration; returns paths in write order."""
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "pcv_grid.csv": pcv_grid_csv(result),
        "pco_cloud.csv": cloud_csv(result),
        "pco.csv": pco_csv(result),
        "report.txt": text_report(result),
    }
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
