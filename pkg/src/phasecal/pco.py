"""Least-squares phase center offset estimation.

The observation vector is the ARP-normalized phase converted to mm. Because
normalization subtracts the zenith phase, the matching design row for a node
is ``u(node) - u(zenith)``: ``(sin t cos p, sin t sin p, cos t - 1)``. With
that row a noiseless pure-offset map is reproduced exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRing, MaskTooTight, NotNormalized, RankDeficient
from .grid import FloatArray, PhaseMap
from .phase import PCO_SANITY_MM, Pco, PcvMap, forward_pcv_values, pcv_map

log = logging.getLogger(__name__)

DEFAULT_MASK_DEG = 10.0
MAX_CONDITION = 1e12
WEIGHTINGS = ("equal", "sin-theta")


@dataclass(frozen=True)
class PcoEstimate:
    pco: Pco
    rms_residual: float
    condition_number: float
    n_obs: int
    mask: float
    bias: float | None = None


@dataclass(frozen=True)
class PcoPointCloud:
    """One solved offset per elevation ring, ascending elevation."""

    points: tuple[tuple[float, Pco], ...]
    mask: float = DEFAULT_MASK_DEG
    frequency: float | None = None

    def __post_init__(self) -> None:
        els = [el for el, _ in self.points]
        if len(set(els)) != len(els):
            raise ValueError("elevations in a point cloud must be unique")
        if any(el < self.mask for el in els):
            raise ValueError("point cloud contains elevations below its mask")

    def __len__(self) -> int:
        return len(self.points)

    def elevations(self) -> FloatArray:
        return np.array([el for el, _ in self.points])

    def xyz(self) -> FloatArray:
        return np.array([p.as_array() for _, p in self.points]).reshape(-1, 3)


def design_rows(theta_deg, phi_deg) -> FloatArray:
    """Zenith-referenced direction rows, trailing axis of length 3."""
    t = np.deg2rad(np.asarray(theta_deg, dtype=float))
    p = np.deg2rad(np.asarray(phi_deg, dtype=float))
    st = np.sin(t)
    # cos t - 1 written as -2 sin^2(t/2) to keep precision near zenith
    return np.stack([st * np.cos(p), st * np.sin(p), -2.0 * np.sin(t / 2) ** 2], axis=-1)


def apply_elevation_mask(phase_map: PhaseMap, mask_deg: float) -> np.ndarray:
    """Boolean node selection of grid shape: ``elevation >= mask``."""
    mask_deg = float(mask_deg)
    if not (0.0 <= mask_deg < 90.0):
        raise ValueError(f"elevation mask must lie in [0, 90), got {mask_deg}")
    el, _ = phase_map.grid.mesh()
    return el >= mask_deg - 1e-9


def _require_normalized(phase_map: PhaseMap) -> None:
    if not phase_map.normalized:
        raise NotNormalized("PCO estimation requires an ARP-normalized phase map")


def _weights(theta: FloatArray, weight: str) -> FloatArray:
    if weight == "equal":
        return np.ones_like(theta)
    if weight == "sin-theta":
        return np.sin(np.deg2rad(theta))
    raise ValueError(f"unknown weighting {weight!r}; expected one of {WEIGHTINGS}")


def _lstsq(a: FloatArray, b: FloatArray, w: FloatArray) -> tuple[FloatArray, float]:
    sw = np.sqrt(w)
    aw = a * sw[:, None]
    bw = b * sw
    # SVD-based minimum-norm solve; singular values give the condition number
    sol, _, rank, sv = np.linalg.lstsq(aw, bw, rcond=None)
    if sv.size < a.shape[1] or sv[-1] == 0.0:
        raise RankDeficient(f"design matrix has rank {rank} < {a.shape[1]}")
    cond = float(sv[0] / sv[-1])
    if cond > MAX_CONDITION or rank < a.shape[1]:
        raise RankDeficient(f"design matrix condition number {cond:.3g} exceeds {MAX_CONDITION:g}")
    return sol, cond


def _observations(phase_map: PhaseMap, selected: np.ndarray):
    """Masked (theta, phi, mm) rows with the zenith ring collapsed to one row."""
    grid = phase_map.grid
    theta, phi = grid.theta_mesh()
    mm = pcv_map(phase_map).values
    sel = selected.copy()
    rows_t, rows_p, rows_v = [], [], []
    if grid.has_zenith and sel[-1].any():
        sel[-1] = False
        rows_t.append(0.0)
        rows_p.append(0.0)
        rows_v.append(float(mm[-1, 0]))
    # fixed elevation-major order keeps the summation deterministic
    t = np.concatenate([theta[sel], rows_t])
    p = np.concatenate([phi[sel], rows_p])
    v = np.concatenate([mm[sel], rows_v])
    return t, p, v


def solve_pco(
    phase_map: PhaseMap,
    mask_elevation: float = DEFAULT_MASK_DEG,
    estimate_bias: bool = False,
    weight: str = "equal",
) -> PcoEstimate:
    """Global least-squares PCO from every node at or above the mask."""
    _require_normalized(phase_map)
    selected = apply_elevation_mask(phase_map, mask_elevation)
    theta, phi, obs = _observations(phase_map, selected)
    n_params = 4 if estimate_bias else 3
    if obs.size < 3 or obs.size < n_params:
        raise MaskTooTight(
            f"only {obs.size} observation(s) survive a {mask_elevation} deg mask"
        )
    a = design_rows(theta, phi)
    if estimate_bias:
        a = np.column_stack([a, np.ones(obs.size)])
    sol, cond = _lstsq(a, obs, _weights(theta, weight))
    resid = obs - a @ sol
    return PcoEstimate(
        pco=Pco.from_array(sol[:3]),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
        condition_number=max(cond, 1.0),
        n_obs=int(obs.size),
        mask=float(mask_elevation),
        bias=float(sol[3]) if estimate_bias else None,
    )


def solve_ring(phase_map: PhaseMap, elevation: float) -> Pco:
    """Three-parameter solve restricted to one elevation ring."""
    return Pco.from_array(_ring_solution(phase_map, elevation))


def _ring_solution(phase_map: PhaseMap, elevation: float) -> FloatArray:
    _require_normalized(phase_map)
    if abs(float(elevation) - 90.0) < 1e-9:
        raise DegenerateRing("the zenith ring is a single physical direction")
    return _ring_solutions(phase_map, [elevation])[0]


def _ring_solutions(phase_map: PhaseMap, elevations) -> FloatArray:
    """Stacked three-parameter ring fits, shape ``(len(elevations), 3)``."""
    grid = phase_map.grid
    idx = [grid.elevation_index(e) for e in elevations]
    if not idx:
        return np.empty((0, 3))
    if grid.shape[1] < 3:
        raise RankDeficient(f"rings have {grid.shape[1]} azimuth(s); at least 3 are needed")
    theta = 90.0 - grid.elevations[idx]
    shape = (len(idx), grid.shape[1])
    a = design_rows(np.broadcast_to(theta[:, None], shape), np.broadcast_to(grid.azimuths, shape))
    b = pcv_map(phase_map).values[idx]
    # one batched SVD instead of a solve per ring
    u, sv, vt = np.linalg.svd(a, full_matrices=False)
    for k, s_k in enumerate(sv):
        if s_k[-1] == 0.0 or s_k[0] / s_k[-1] > MAX_CONDITION:
            raise RankDeficient(f"ring at elevation {elevations[k]} is rank deficient")
    coeff = np.einsum("nij,ni->nj", u, b) / sv
    return np.einsum("nji,nj->ni", vt, coeff)


def solve_pco_per_elevation(phase_map: PhaseMap, mask_elevation: float = DEFAULT_MASK_DEG) -> PcoPointCloud:
    """Independent ring solves for every unmasked elevation below zenith.

    Near zenith the vertical component of a ring solve is weakly determined
    (its design column is ``cos t - 1``); rings whose solution leaves the PCO
    sanity bound are dropped with a warning.
    """
    _require_normalized(phase_map)
    apply_elevation_mask(phase_map, mask_elevation)
    rings = [
        el
        for el in phase_map.grid.elevation_samples
        if el >= mask_elevation - 1e-9 and abs(el - 90.0) >= 1e-9
    ]
    points = []
    for el, sol in zip(rings, _ring_solutions(phase_map, rings)):
        if np.any(np.abs(sol) >= PCO_SANITY_MM):
            log.warning("dropping ring at elevation %g: solution %s outside sanity bound", el, sol)
            continue
        points.append((el, Pco.from_array(sol)))
    return PcoPointCloud(tuple(points), mask=float(mask_elevation), frequency=phase_map.frequency)


def residual_pcv(phase_map: PhaseMap, pco: Pco) -> PcvMap:
    """PCV left after removing the zenith-referenced contribution of ``pco``."""
    pcv = pcv_map(phase_map)
    return PcvMap(pcv.grid, pcv.frequency, pcv.values - forward_pcv_values(pco, pcv.grid))
