from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasecal.errors import NotNormalized, UnwrapAmbiguity
from phasecal.grid import Direction, PhaseMap, build_default_grid
from phasecal.phase import (
    SPEED_OF_LIGHT,
    Pco,
    circular_mean_deg,
    forward_pcv_values,
    forward_phase,
    forward_phase_map,
    pcv_map,
    pcv_range,
    phase_to_pcv,
    unwrap_and_normalize,
    wavelength_mm,
    wrap_phase,
)

L1 = 1575.42
GRID = build_default_grid()
pco_component = st.floats(-50, 50, allow_nan=False)


def test_speed_of_light_is_exact():
    assert SPEED_OF_LIGHT == 299_792_458.0


def test_wavelength_oracles():
    assert wavelength_mm(1.0) == pytest.approx(299_792.458)
    assert wavelength_mm(1176.0) == pytest.approx(254.925, abs=1e-3)
    assert wavelength_mm(L1) == pytest.approx(190.2937, abs=1e-4)
    with pytest.raises(ValueError):
        wavelength_mm(0.0)


def test_phase_to_pcv_oracles():
    assert phase_to_pcv(360.0, 1176.0) == pytest.approx(254.925, abs=1e-3)
    assert phase_to_pcv(36.0, L1) == pytest.approx(19.029, abs=1e-3)
    np.testing.assert_allclose(phase_to_pcv(np.array([0.0, 180.0]), 1176.0), [0.0, 127.4628], atol=1e-4)


def test_forward_phase_oracle():
    # 10 mm along boresight at L1 -> 360 * 10 / 190.294 deg
    assert forward_phase(Pco(0, 0, 10), Direction(0, 0), L1) == pytest.approx(18.918, abs=1e-3)
    assert forward_phase(Pco(10, 0, 0), Direction(90, 0), L1) == pytest.approx(18.918, abs=1e-3)
    assert forward_phase(Pco(10, 0, 0), Direction(90, 90), L1) == pytest.approx(0.0, abs=1e-12)


@given(pco_component, pco_component, pco_component, pco_component, pco_component, pco_component,
       st.floats(-3, 3), st.floats(-3, 3))
def test_forward_phase_is_linear(x1, y1, z1, x2, y2, z2, a, b):
    d = Direction(37.0, 211.0)
    p1, p2 = np.array([x1, y1, z1]), np.array([x2, y2, z2])
    combo = a * p1 + b * p2
    if np.any(np.abs(combo) >= 1000):
        return
    lhs = forward_phase(Pco.from_array(combo), d, L1)
    rhs = a * forward_phase(Pco.from_array(p1), d, L1) + b * forward_phase(Pco.from_array(p2), d, L1)
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(pco_component, pco_component, st.floats(0, 360))
def test_horizontal_rotation_equivariance(x, y, rot):
    p = Pco(x, y, 0.0)
    r = np.deg2rad(rot)
    q = Pco(x * np.cos(r) - y * np.sin(r), x * np.sin(r) + y * np.cos(r), 0.0)
    assert forward_phase(q, Direction(50.0, 30.0 + rot), L1) == pytest.approx(
        forward_phase(p, Direction(50.0, 30.0), L1), abs=1e-9
    )


def test_pco_sanity_bound():
    with pytest.raises(ValueError):
        Pco(1000.0, 0, 0)
    with pytest.raises(ValueError):
        Pco(0, float("nan"), 0)


def test_wrap_phase_range():
    np.testing.assert_array_equal(wrap_phase([180.0, -180.0, 540.0, 181.0, 0.0]), [180.0, 180.0, 180.0, -179.0, 0.0])


@given(st.floats(-1e4, 1e4))
def test_wrap_is_idempotent(v):
    w = wrap_phase(v)
    assert -180.0 < w <= 180.0
    assert wrap_phase(w) == w


def test_circular_mean_across_the_cut():
    assert circular_mean_deg([179.0, -179.0]) == pytest.approx(180.0, abs=1e-9) or circular_mean_deg(
        [179.0, -179.0]
    ) == pytest.approx(-180.0, abs=1e-9)
    assert circular_mean_deg([10.0, 20.0]) == pytest.approx(15.0)


@settings(max_examples=30, deadline=None)
@given(pco_component, pco_component, pco_component, st.floats(-180, 180))
def test_unwrap_normalize_recovers_zenith_referenced_pcv(x, y, z, offset):
    pco = Pco(x, y, z)
    raw = PhaseMap(GRID, 1176.45, wrap_phase(forward_phase_map(pco, GRID, 1176.45).values + offset))
    norm = unwrap_and_normalize(raw)
    assert norm.normalized
    np.testing.assert_allclose(pcv_map(norm).values, forward_pcv_values(pco, GRID), atol=1e-9)


@settings(max_examples=20, deadline=None)
@given(pco_component, pco_component, pco_component)
def test_normalize_is_idempotent(x, y, z):
    raw = PhaseMap(GRID, L1, wrap_phase(forward_phase_map(Pco(x, y, z), GRID, L1).values))
    once = unwrap_and_normalize(raw)
    twice = unwrap_and_normalize(PhaseMap(GRID, L1, once.values))
    np.testing.assert_allclose(twice.values, once.values, atol=1e-9)


def test_zero_pco_normalizes_to_zero():
    raw = PhaseMap(GRID, L1, np.full(GRID.shape, 42.0))
    assert np.all(unwrap_and_normalize(raw).values == 0.0)


def test_unwrap_ambiguity_detected():
    v = np.zeros(GRID.shape)
    # a half-cycle azimuth step that no radial unwrap can explain
    v[:45, 20] = -10.0
    v[:45, 21] = 175.0
    with pytest.raises(UnwrapAmbiguity):
        unwrap_and_normalize(PhaseMap(GRID, L1, v))


def test_pcv_requires_normalized():
    with pytest.raises(NotNormalized):
        pcv_map(PhaseMap(GRID, L1, np.zeros(GRID.shape)))


def test_pcv_range():
    raw = forward_phase_map(Pco(0, 0, 5), GRID, L1)
    pcv = pcv_map(unwrap_and_normalize(raw))
    lo, hi = pcv_range(pcv)
    assert lo == pytest.approx(-5.0)
    assert hi == pytest.approx(0.0, abs=1e-12)


def test_unwrap_absorbs_single_cycle_slip():
    raw = forward_phase_map(Pco(4.0, -3.0, 7.0), GRID, L1)
    slipped = raw.values.copy()
    slipped[37, 11] += 360.0
    a = unwrap_and_normalize(raw).values
    b = unwrap_and_normalize(PhaseMap(GRID, L1, slipped)).values
    np.testing.assert_allclose(a, b, atol=1e-9)
