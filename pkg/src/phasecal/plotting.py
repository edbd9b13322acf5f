"""PNG figures for the report path: PCV heatmap, PCO cloud, LAG/AR curves, azimuth cut.

Figures are built on :class:`matplotlib.figure.Figure` directly so no GUI
backend or global pyplot state is involved.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import numpy as np
from matplotlib.figure import Figure

from .dispersion import band_label
from .grid import GainMap
from .metrics import azimuth_cut, elevation_curves
from .pipeline import CalibrationResult, FrequencyResult

# fixed metadata keeps PNG bytes stable across runs
_PNG_META = {"Software": None}
DPI = 100


def _save(fig: Figure, path: Path) -> Path:
    fig.savefig(path, dpi=DPI, metadata=_PNG_META)
    return path


def pcv_heatmap(r: FrequencyResult) -> Figure:
    grid = r.pcv.grid
    fig = Figure(figsize=(7.0, 4.0))
    ax = fig.add_subplot()
    az = np.asarray(grid.azimuth_samples)
    el = np.asarray(grid.elevation_samples)
    mesh = ax.pcolormesh(az, el, r.pcv.values, shading="nearest", cmap="RdBu_r")
    fig.colorbar(mesh, ax=ax, label="PCV [mm]")
    ax.set_xlabel("azimuth [deg]")
    ax.set_ylabel("elevation [deg]")
    ax.set_title(f"PCV, {band_label(r.frequency)}")
    fig.tight_layout()
    return fig


def pco_cloud(r: FrequencyResult) -> Figure:
    """Horizontal scatter of per-elevation offsets with CEP circles."""
    fig = Figure(figsize=(5.0, 5.0))
    ax = fig.add_subplot()
    xyz = r.cloud.xyz()
    if len(xyz):
        sc = ax.scatter(xyz[:, 0], xyz[:, 1], c=r.cloud.elevations(), s=12, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="elevation [deg]")
    if r.cep is not None:
        cx, cy = r.cep.mean_xy
        t = np.linspace(0.0, 2.0 * np.pi, 181)
        for name, radius in (("CEP50", r.cep.cep50), ("CEP68", r.cep.cep68), ("CEP95", r.cep.cep95)):
            ax.plot(cx + radius * np.cos(t), cy + radius * np.sin(t), lw=1, label=f"{name} {radius:.1f} mm")
        ax.legend(loc="upper right", fontsize=8)
    p = r.estimate.pco
    ax.plot([p.x], [p.y], "k+", ms=10)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")
    ax.set_title(f"PCO per elevation, {band_label(r.frequency)}")
    fig.tight_layout()
    return fig


def lag_ar_curves(gains: Iterable[GainMap]) -> Figure:
    fig = Figure(figsize=(7.0, 4.0))
    ax = fig.add_subplot()
    ax2 = ax.twinx()
    for k, g in enumerate(gains):
        rows = np.asarray(elevation_curves(g))
        ax.plot(rows[:, 0], rows[:, 1], color=f"C{k}", label=f"LAG {g.frequency:g} MHz")
        ax2.plot(rows[:, 0], rows[:, 2], color=f"C{k}", ls="--", label=f"AR {g.frequency:g} MHz")
    ax.set_xlabel("elevation [deg]")
    ax.set_ylabel("linear average gain [dBi]")
    ax2.set_ylabel("axial ratio [dB]")
    h1, l1 = ax.get_legend_handles_labels()
    h2, l2 = ax2.get_legend_handles_labels()
    ax.legend(h1 + h2, l1 + l2, fontsize=8, loc="lower right")
    fig.tight_layout()
    return fig


def azimuth_polar(gains: Iterable[GainMap], elevation: float) -> Figure:
    fig = Figure(figsize=(5.0, 5.0))
    ax = fig.add_subplot(projection="polar")
    for g in gains:
        rows = np.asarray(azimuth_cut(g, elevation))
        az = np.deg2rad(np.append(rows[:, 0], rows[0, 0] + 360.0))
        ax.plot(az, np.append(rows[:, 1], rows[0, 1]), label=f"RHCP {g.frequency:g} MHz")
    ax.set_theta_zero_location("N")
    ax.set_theta_direction(-1)
    ax.set_title(f"gain at elevation {elevation:g} deg [dBic]")
    ax.legend(fontsize=8, loc="lower left")
    fig.tight_layout()
    return fig


def render_calibration(result: CalibrationResult, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for r in result.results:
        tag = f"{r.frequency:g}MHz"
        paths.append(_save(pcv_heatmap(r), out / f"pcv_{tag}.png"))
        paths.append(_save(pco_cloud(r), out / f"pco_cloud_{tag}.png"))
    return paths


def render_gain(gains: list[GainMap], out: Path, elevation: float) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    return [
        _save(lag_ar_curves(gains), out / "lag_ar.png"),
        _save(azimuth_polar(gains, elevation), out / "azimuth_cut.png"),
    ]
