from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from phasecal.grid import GainMap, build_default_grid
from phasecal.metrics import (
    AR_CEILING_DB,
    average_axial_ratio,
    axial_ratio,
    azimuth_cut,
    circular_to_vh,
    elevation_curves,
    field_to_gain,
    linear_average,
    linear_average_gain,
    mean_axial_ratio,
    vh_to_circular,
)
from phasecal.phase import Pco
from phasecal.synthesis import synth_field_map, synth_gain_map

finite = st.floats(-1e3, 1e3, allow_nan=False)


def test_linear_average_oracle():
    assert linear_average([0.0, -10.0]) == pytest.approx(-2.596, abs=1e-3)
    assert linear_average([3.0, 3.0, 3.0]) == pytest.approx(3.0)


@pytest.mark.parametrize("ratio, expected", [(3.0, 6.021), (5.0, 3.522)])
def test_axial_ratio_oracles(ratio, expected):
    assert axial_ratio(1.0, 1.0 / ratio) == pytest.approx(expected, abs=1e-3)


def test_axial_ratio_limits():
    assert axial_ratio(1.0, 0.0) == pytest.approx(0.0)
    # equal hands = linear polarization
    assert axial_ratio(1.0, 1.0) == AR_CEILING_DB
    assert axial_ratio(0.0, 0.0) == AR_CEILING_DB
    assert np.all(axial_ratio(np.ones(3), np.array([0.5, 1.0, 0.999999])) <= AR_CEILING_DB)


def test_pure_polarizations():
    # vertical only: equal parts of both hands
    e_r, e_l = vh_to_circular(1.0, 0.0)
    assert abs(e_r) == pytest.approx(abs(e_l))
    # e_H = +j e_V is pure RHCP in this convention
    e_r, e_l = vh_to_circular(1.0 / np.sqrt(2), 1j / np.sqrt(2))
    assert abs(e_r) == pytest.approx(1.0)
    assert abs(e_l) == pytest.approx(0.0, abs=1e-15)


@given(finite, finite, finite, finite)
def test_vh_round_trip(a, b, c, d):
    e_v, e_h = complex(a, b), complex(c, d)
    v2, h2 = circular_to_vh(*vh_to_circular(e_v, e_h))
    scale = max(1.0, abs(e_v), abs(e_h))
    assert abs(v2 - e_v) <= 1e-12 * scale
    assert abs(h2 - e_h) <= 1e-12 * scale


@given(finite, finite, finite, finite)
def test_conversion_preserves_power(a, b, c, d):
    e_v, e_h = complex(a, b), complex(c, d)
    e_r, e_l = vh_to_circular(e_v, e_h)
    total = abs(e_v) ** 2 + abs(e_h) ** 2
    assert abs(e_r) ** 2 + abs(e_l) ** 2 == pytest.approx(total, rel=1e-12, abs=1e-12)


def test_mean_axial_ratio_is_linear_domain():
    assert mean_axial_ratio([0.0, 20.0 * np.log10(3.0)]) == pytest.approx(20.0 * np.log10(2.0))


def test_gain_map_averages():
    g = build_default_grid(10, 30)
    rhcp = np.zeros(g.shape)
    rhcp[:, ::2] = -10.0
    gain = GainMap(g, 1176.0, rhcp, rhcp - 20.0)
    assert linear_average_gain(gain, 40.0) == pytest.approx(-2.596, abs=1e-3)
    assert linear_average_gain(gain, 40.0, "lhcp") == pytest.approx(-22.596, abs=1e-3)
    assert average_axial_ratio(gain, 40.0) == pytest.approx(
        mean_axial_ratio(axial_ratio(np.ones(2), np.full(2, 0.1)))
    )
    with pytest.raises(ValueError):
        linear_average_gain(gain, 40.0, "vertical")


def test_synthetic_pattern_curves():
    gain = synth_gain_map(1575.42)
    rows = elevation_curves(gain)
    assert len(rows) == 91
    el0, lag0, ar0 = rows[0]
    el90, lag90, ar90 = rows[-1]
    assert (el0, el90) == (0.0, 90.0)
    assert lag0 == pytest.approx(-6.0) and lag90 == pytest.approx(5.0)
    assert ar0 == pytest.approx(10.0) and ar90 == pytest.approx(1.0)
    cut = azimuth_cut(gain, 36.0)
    assert len(cut) == 72
    assert all(r[3] == pytest.approx(cut[0][3]) for r in cut)


def test_field_to_gain_matches_gain_pattern():
    fields = synth_field_map(Pco(3, 1, 2), 1176.45)
    direct = synth_gain_map(1176.45)
    derived = field_to_gain(fields)
    np.testing.assert_allclose(derived.rhcp_dbic, direct.rhcp_dbic, atol=1e-9)
    np.testing.assert_allclose(derived.lhcp_dbic, direct.lhcp_dbic, atol=1e-9)
