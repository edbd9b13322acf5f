from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasecal.errors import DegenerateFrequencies, MismatchedStructure
from phasecal.grid import Direction
from phasecal.observables import (
    L1_MHZ,
    L5_MHZ,
    Observation,
    ObservableEpoch,
    carrier_phase_terms,
    difference,
    dispersive_scale,
    estimate_iono_group,
    estimate_iono_phase,
    observed_minus_computed,
    round_ambiguity,
    synth_carrier_phase,
    synth_code_pseudorange,
    wavelength_m,
)
from phasecal.phase import Pco
from phasecal.profile import pure_offset_profile

K = L5_MHZ**2 / (L1_MHZ**2 - L5_MHZ**2)


def test_constants_and_oracles():
    assert wavelength_m(1.0) == pytest.approx(299.792458)
    assert K == pytest.approx(1.26061, abs=1e-5)
    assert dispersive_scale(1.0, L1_MHZ, L5_MHZ) == pytest.approx((L1_MHZ / L5_MHZ) ** 2)


def test_phase_center_error_in_cycles():
    e = ObservableEpoch("G01", "r", 0, 2.0e7, phase_center_error=0.005)
    assert carrier_phase_terms(e)["antenna"] == pytest.approx(0.0263, abs=1e-4)


def test_code_model():
    e = ObservableEpoch("G01", "r", 0, 2.0e7, iono_code=3.0, tropo=2.0, receiver_clock=1e-6, satellite_clock=2e-6)
    assert synth_code_pseudorange(e) == pytest.approx(2.0e7 + 5.0 - 299.792458)


def test_iono_sign_is_opposite_on_carrier():
    e = ObservableEpoch("G01", "r", 0, 1000.0, iono_code=4.0)
    assert e.iono_phase == -4.0
    assert carrier_phase_terms(e)["iono"] == pytest.approx(-4.0 / e.wavelength)


def _dual_band(d: float, iono_l1: float, n1: int, n5: int):
    e1 = ObservableEpoch("G01", "r", 0, d, L1_MHZ, iono_code=iono_l1, ambiguity=n1)
    e5 = ObservableEpoch("G01", "r", 0, d, L5_MHZ, iono_code=dispersive_scale(iono_l1, L1_MHZ, L5_MHZ), ambiguity=n5)
    return e1, e5


@settings(max_examples=100)
@given(st.floats(0.1, 50.0), st.floats(1e3, 1e5), st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_dual_frequency_estimators_close(iono, d, n1, n5):
    e1, e5 = _dual_band(d, iono, n1, n5)
    assert estimate_iono_group(synth_code_pseudorange(e1), synth_code_pseudorange(e5)) == pytest.approx(iono, abs=1e-9)
    phi1, phi5 = synth_carrier_phase(e1), synth_carrier_phase(e5)
    assert estimate_iono_phase(phi1, phi5, n1, n5) == pytest.approx(-iono, abs=1e-9)


def test_estimators_at_orbital_range_hit_float_resolution():
    # at 2e7 m the input spacing is ~3.7e-9 m, so exactness is bounded by it
    ulp = math.ulp(2.6e7)
    for iono in np.linspace(0.1, 50.0, 25):
        e1, e5 = _dual_band(2.3e7, float(iono), 0, 0)
        err = estimate_iono_group(synth_code_pseudorange(e1), synth_code_pseudorange(e5)) - iono
        assert abs(err) <= 2 * K * ulp


def test_degenerate_frequencies():
    with pytest.raises(DegenerateFrequencies):
        estimate_iono_group(1.0, 2.0, 1176.0, 1176.0)
    with pytest.raises(DegenerateFrequencies):
        estimate_iono_phase(1.0, 2.0, 0, 0, -1.0, 1176.0)


@given(st.floats(1e3, 2.6e7), st.integers(-10**7, 10**7))
def test_round_ambiguity_recovers_n(d, n):
    e = ObservableEpoch("G01", "r", 0, d, ambiguity=n)
    assert round_ambiguity(synth_code_pseudorange(e), synth_carrier_phase(e), e.frequency) == n


def test_calibration_removes_antenna_term():
    cal = pure_offset_profile({L1_MHZ: Pco(3.0, -2.0, 5.0)})
    aoa = Direction.from_elevation(40.0, 120.0)
    eps = cal.phase_center_error_mm(aoa, L1_MHZ) * 1e-3
    e = ObservableEpoch("G01", "r", 0, 2.2e7, phase_center_error=eps)
    assert observed_minus_computed(e, aoa, None) == pytest.approx(eps / e.wavelength, abs=1e-15)
    assert observed_minus_computed(e, aoa, cal) == 0.0
    with pytest.raises(ValueError):
        observed_minus_computed(e, None, cal)


def _epochs(rng, sats, rxs, n_epochs):
    """Zero-baseline samples: shared range and atmosphere, random clocks and N."""
    n = {s: {r: int(rng.integers(-10**6, 10**6)) for r in rxs} for s in sats}
    rows = []
    for k in range(n_epochs):
        rx_clk = {r: rng.normal(0, 1e-4) for r in rxs}
        for s in sats:
            d = 2.1e7 + 1e3 * sats.index(s) + 50.0 * k
            sat_clk = 1e-5 * (sats.index(s) + 1) * (k + 1)
            for r in rxs:
                kw = dict(
                    satellite_id=s,
                    receiver_id=r,
                    epoch=k,
                    true_range=d,
                    iono_code=2.0 + sats.index(s),
                    tropo=2.4,
                    receiver_clock=rx_clk[r],
                    satellite_clock=sat_clk,
                    ambiguity=n[s][r],
                )
                rows.append(ObservableEpoch(**kw))
    return rows


def _obs(rows, value_fn):
    return [Observation(e.satellite_id, e.receiver_id, e.epoch, value_fn(e)) for e in rows]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1e-3, 1e-3), st.floats(0, 30), st.floats(0, 20))
def test_single_difference_cancels_satellite_terms(seed, sat_clk, iono, tropo):
    rng = np.random.default_rng(seed)
    a = _epochs(rng, ["G01", "G02"], ["a", "b"], 1)
    b = [
        ObservableEpoch(**{**e.__dict__, "satellite_clock": sat_clk, "iono_code": iono, "tropo": tropo})
        for e in a
    ]
    da = difference(_obs(a, synth_carrier_phase), "single")
    db = difference(_obs(b, synth_carrier_phase), "single")
    scale = max(abs(synth_carrier_phase(e)) for e in a)
    for s in da:
        assert abs(da[s] - db[s]) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-1e-3, 1e-3), st.floats(-1e-3, 1e-3))
def test_double_difference_cancels_receiver_clocks(seed, clk_a, clk_b):
    rng = np.random.default_rng(seed)
    a = _epochs(rng, ["G01", "G02", "G03"], ["a", "b"], 1)
    clocks = {"a": clk_a, "b": clk_b}
    b = [ObservableEpoch(**{**e.__dict__, "receiver_clock": clocks[e.receiver_id]}) for e in a]
    da = difference(_obs(a, synth_carrier_phase), "double")
    db = difference(_obs(b, synth_carrier_phase), "double")
    scale = max(abs(synth_carrier_phase(e)) for e in a)
    assert list(da) == ["G02", "G03"]
    for s in da:
        assert abs(da[s] - db[s]) <= 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(-10**6, 10**6))
def test_triple_difference_cancels_constant_ambiguity(seed, shift):
    rng = np.random.default_rng(seed)
    a = _epochs(rng, ["G01", "G02", "G03"], ["a", "b"], 2)
    b = [ObservableEpoch(**{**e.__dict__, "ambiguity": e.ambiguity + shift * (1 + int(e.satellite_id[1:]) % 3)}) for e in a]
    da = difference(_obs(a, synth_carrier_phase), "triple")
    db = difference(_obs(b, synth_carrier_phase), "triple")
    scale = max(abs(synth_carrier_phase(e)) for e in b)
    for s in da:
        assert abs(da[s] - db[s]) <= 1e-12 * scale


def test_difference_structure_errors():
    one = [Observation("G01", "a", 0, 1.0), Observation("G01", "b", 0, 2.0)]
    assert difference(one, "single") == {"G01": -1.0}
    with pytest.raises(MismatchedStructure):
        difference(one, "double")
    with pytest.raises(MismatchedStructure):
        difference(one + [Observation("G01", "a", 0, 3.0)], "single")
    with pytest.raises(MismatchedStructure):
        difference(one + [Observation("G02", "a", 0, 3.0)], "single")
    with pytest.raises(MismatchedStructure):
        difference(one, "triple")
    with pytest.raises(ValueError):
        difference(one, "quadruple")


def test_double_difference_reference_choice():
    obs = [
        Observation(s, r, 0, v)
        for s, (va, vb) in {"G01": (1.0, 0.0), "G02": (5.0, 1.0), "G03": (2.0, 2.0)}.items()
        for r, v in (("a", va), ("b", vb))
    ]
    assert difference(obs, "double") == {"G02": 3.0, "G03": -1.0}
    assert difference(obs, "double", reference="G03") == {"G01": 1.0, "G02": 4.0}
    with pytest.raises(MismatchedStructure):
        difference(obs, "double", reference="G09")
