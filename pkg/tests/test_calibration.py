import numpy as np
import pytest
from hypothesis import given, strategies as st

from freqact.calibration import (
    CalibrationParams,
    apply,
    apply_array,
    default_gain,
    estimate_params,
)
from freqact.errors import InsufficientDataError, ParameterError
from freqact.ingest import Dataset, RawSample


def constant(n, x, y, z):
    return Dataset(np.arange(n), np.tile([x, y, z], (n, 1)))


def test_offsets_from_constant_window():
    p = estimate_params(constant(100, 512, 512, 716), gains=(204, 204, 204))
    assert (p.offset_x, p.offset_y, p.offset_z) == (512, 512, 512)


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        estimate_params(constant(50, 512, 512, 716), gains=204, window=100)


def test_window_must_be_positive():
    with pytest.raises(ParameterError):
        estimate_params(constant(50, 1, 1, 1), window=0)


def test_gain_validation():
    with pytest.raises(ParameterError):
        CalibrationParams(0, 0, 0, 1.0, 0.0, 1.0)
    with pytest.raises(ParameterError):
        CalibrationParams(0, 0, 0, 1.0, float("inf"), 1.0)


def test_default_gain():
    assert default_gain() == pytest.approx(273.0)
    assert default_gain(0.2, 2.5, 4095) == pytest.approx(327.6)


def test_monte_carlo_offset_recovery():
    # offset estimate lands within 512 +/- 1 in more than 99% of windows
    rng = np.random.default_rng(7)
    trials = 2000
    raw = rng.normal(512, 2, size=(trials, 100, 3))
    hits = 0
    for t in range(trials):
        p = estimate_params(raw[t], gains=(204, 204, 204))
        hits += abs(p.offset_x - 512) <= 1
    assert hits / trials > 0.99


def test_offsets_within_three_sigma_over_root_k():
    rng = np.random.default_rng(11)
    sigma, k = 5.0, 100
    true = np.array([2000.0, 2100.0, 1900.0])
    gains = np.array([250.0, 260.0, 270.0])
    # probabilistic bound: per-axis 3-sigma miss rate is 0.27%, about 0.8% over three axes
    misses = 0
    for _ in range(2000):
        raw = true + gains * np.array([0, 0, 1.0]) + rng.normal(0, sigma, (k, 3))
        p = estimate_params(raw, gains=gains, window=k)
        misses += np.any(np.abs(p.offsets - true) > 3 * sigma / np.sqrt(k))
    assert misses / 2000 < 0.02


P = CalibrationParams(2048.0, 2050.0, 2040.0, 273.0, 270.0, 280.0)


def test_upright_and_inverted():
    up = apply(RawSample(0, 2048, 2050, int(P.offset_z + P.gain_z)), P)
    down = apply(RawSample(1, 2048, 2050, int(P.offset_z - P.gain_z)), P)
    assert up.az == 1.0 and down.az == -1.0
    assert up.ax == 0.0 and up.ay == 0.0


def test_clamp_is_flagged():
    s = apply(RawSample(0, 4095, 2050, 2040), P)
    assert s.ax == 6.0 and s.clamped
    assert not apply(RawSample(0, 2048, 2050, 2040), P).clamped


grid = st.integers(-6 * 1024, 6 * 1024).map(lambda k: k / 1024)


@given(grid, grid, grid)
def test_affine_exact(tx, ty, tz):
    # dyadic t keeps offset + t*gain exactly representable
    p = CalibrationParams(2048.0, 2048.0, 2048.0, 256.0, 256.0, 256.0)
    counts = np.array([[2048 + tx * 256, 2048 + ty * 256, 2048 + tz * 256]])
    g, n = apply_array(counts, p)
    assert g[0].tolist() == [tx, ty, tz]
    assert n == 0


def test_calibration_window_of_constant_data_reads_0_0_1():
    ds = constant(100, 2048, 2048, 2321)
    p = estimate_params(ds, gains=273.0)
    g, _ = apply_array(ds.counts, p)
    assert np.allclose(g.mean(axis=0), [0, 0, 1], atol=1e-9, rtol=0)


def test_array_matches_scalar():
    rng = np.random.default_rng(3)
    counts = rng.integers(0, 4096, size=(500, 3))
    g, n = apply_array(counts, P)
    scalar = [apply(RawSample(i, *map(int, c)), P) for i, c in enumerate(counts)]
    assert np.array_equal(g, np.array([(s.ax, s.ay, s.az) for s in scalar]))
    assert n == sum(s.clamped for s in scalar)


def test_text_round_trip():
    assert CalibrationParams.from_text(P.to_text()) == P
