from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from phasecal.errors import EmptyInput
from phasecal.dispersion import (
    CepReport,
    TableColumn,
    band_label,
    cep,
    cep_from_points,
    cep_report,
    format_mm,
    format_pcv_range,
    format_table,
    nearest_rank,
)
from phasecal.pco import PcoPointCloud
from phasecal.phase import Pco

DATA = Path(__file__).parent / "data"


def brute_force_cep(points: np.ndarray, fraction: float) -> float:
    """Smallest observed radius enclosing at least ``fraction`` of the points."""
    centre = points.mean(axis=0)
    radii = sorted(float(np.hypot(*(p - centre))) for p in points)
    n = len(radii)
    for r in radii:
        if sum(1 for q in radii if q <= r) >= fraction * n - 1e-9:
            return r
    return radii[-1]


def test_nearest_rank_values():
    assert nearest_rank(0.5, 10) == 5
    assert nearest_rank(0.5, 11) == 6
    assert nearest_rank(0.68, 25) == 17
    assert nearest_rank(0.95, 20) == 19
    assert nearest_rank(0.95, 1) == 1
    with pytest.raises(ValueError):
        nearest_rank(1.0, 10)


@settings(max_examples=200, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 60), st.just(2)), elements=st.floats(-100, 100)),
       st.sampled_from([0.5, 0.68, 0.95]))
def test_cep_matches_brute_force(points, fraction):
    assert cep(points, fraction) == brute_force_cep(points, fraction)


def test_cep_of_identical_points_is_zero():
    r = cep_from_points(np.tile([3.0, -2.0], (30, 1)))
    assert (r.cep50, r.cep68, r.cep95) == (0.0, 0.0, 0.0)
    assert r.mean_xy == (3.0, -2.0)


def test_rayleigh_cep50():
    rng = np.random.default_rng(2024)
    pts = rng.normal(0.0, 1.0, size=(100_000, 2))
    assert cep(pts, 0.5) == pytest.approx(np.sqrt(2 * np.log(2)), rel=0.02)


@given(arrays(np.float64, st.tuples(st.integers(1, 40), st.just(2)), elements=st.floats(-50, 50)),
       st.floats(-100, 100), st.floats(-100, 100))
def test_cep_translation_invariant(points, dx, dy):
    a = cep_from_points(points)
    b = cep_from_points(points + [dx, dy])
    assert b.cep50 == pytest.approx(a.cep50, abs=1e-9)
    assert b.cep95 == pytest.approx(a.cep95, abs=1e-9)
    assert a.cep50 <= a.cep68 <= a.cep95


def test_cep_report_uses_horizontal_plane():
    cloud = PcoPointCloud(((10.0, Pco(1, 0, 100)), (20.0, Pco(-1, 0, -100))), mask=10.0, frequency=1176.0)
    r = cep_report(cloud)
    assert r.cep95 == pytest.approx(1.0)
    with pytest.raises(EmptyInput):
        cep_report(PcoPointCloud((), mask=10.0, frequency=1176.0))


def test_report_requires_monotone_radii():
    with pytest.raises(ValueError):
        CepReport((0.0, 0.0), 2.0, 1.0, 3.0, 3)


def test_number_formatting():
    assert format_mm(-0.04) == "0.0"
    assert format_mm(1.25) == "1.2"
    assert format_pcv_range(-36.3, 16.5) == "-36.3 to 16.5"
    assert band_label(1176.0) == "L5: 1176MHz"
    assert band_label(1575.42) == "L1: 1575.42MHz"


def test_evb_l5_block_layout():
    text = format_table([(1176.0, [TableColumn("EVB", -36.3, 16.5, 1.9, 2.3, 3.5)])])
    assert text.splitlines() == [
        "L5: 1176MHz\t",
        "\tEVB",
        "PCV [mm]\t-36.3 to 16.5",
        "PCO\t",
        "CEP50[mm]\t1.9",
        "CEP68[mm]\t2.3",
        "CEP95[mm]\t3.5",
    ]


def test_three_scenario_table_matches_reference_fixture():
    cols = {
        1176.0: [
            TableColumn("EVB", -36.3, 16.5, 1.9, 2.3, 3.5),
            TableColumn("Shark-fin", -57.7, 24.4, 4.4, 5.4, 8.3),
            TableColumn("On-vehicle", -86.7, 10.7, 5.1, 7.3, 18.8),
        ],
        1575.42: [
            TableColumn("EVB", -32.5, 19.1, 1.4, 1.7, 2.6),
            TableColumn("Shark-fin", -32.4, 24.1, 3.3, 4.0, 6.2),
            TableColumn("On-vehicle", -76.2, 20.1, 3.9, 5.5, 14.2),
        ],
    }
    text = format_table(list(cols.items()))
    assert text == (DATA / "reference_table.txt").read_text(encoding="utf-8")
