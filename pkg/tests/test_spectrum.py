import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from freqact.errors import ParameterError
from freqact.gen import ActivityScript, Segment, synthesize
from freqact.classifier import body_signal, split_blocks, PipelineConfig
from freqact.calibration import estimate_params
from freqact.labels import Activity
from freqact.spectrum import (
    BodyBlock,
    NormalizedSpectrum,
    fft,
    find_peak,
    inverse_fft,
    naive_dft,
    normalized_spectrum,
)

FS = 50.0
T64 = np.arange(64) / FS


class TestFFT:
    def test_impulse(self):
        x = np.zeros(64)
        x[0] = 1
        assert np.array_equal(fft(x), np.ones(64, dtype=complex))

    def test_constant(self):
        X = fft(np.full(64, 2.5))
        assert abs(X[0] - 64 * 2.5) < 1e-12
        assert np.max(np.abs(X[1:])) < 1e-12

    @pytest.mark.parametrize("n", [2, 4, 8, 16, 32, 64, 128, 256, 1024])
    def test_matches_naive_dft(self, n, rng):
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
        assert np.max(np.abs(fft(x) - naive_dft(x))) < 1e-9

    def test_hundred_blocks_against_oracle(self, rng):
        x = rng.normal(size=(100, 64)) + 1j * rng.normal(size=(100, 64))
        t0 = time.perf_counter()
        got = np.array([fft(v) for v in x])
        elapsed = time.perf_counter() - t0
        ref = np.array([naive_dft(v) for v in x])
        assert np.max(np.abs(got - ref)) < 1e-9
        assert elapsed < 1.0

    def test_batched_rows(self, rng):
        x = rng.normal(size=(5, 32))
        assert np.allclose(fft(x), np.array([naive_dft(r) for r in x]), atol=1e-9)

    @pytest.mark.parametrize("n", [0, 1, 3, 48, 100])
    def test_rejects_non_power_of_two(self, n):
        with pytest.raises(ParameterError):
            fft(np.zeros(n))

    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_parseval_and_round_trip(self, log_n, seed):
        n = 2**log_n
        r = np.random.default_rng(seed)
        x = r.normal(size=n) + 1j * r.normal(size=n)
        X = fft(x)
        e_t = np.sum(np.abs(x) ** 2)
        assert abs(e_t - np.sum(np.abs(X) ** 2) / n) <= 1e-9 * e_t
        assert np.max(np.abs(fft(inverse_fft(X)) - X)) <= 1e-9 * max(1.0, np.abs(X).max())


class TestNormalizedSpectrum:
    def test_on_bin_sinusoid(self):
        spec = normalized_spectrum(BodyBlock(0.5 * np.sin(2 * np.pi * 3.125 * T64)), 256)
        peak = find_peak(spec)
        assert peak.bin == 16 and peak.freq_hz == 3.125
        assert spec.magnitudes[16] == pytest.approx(1.0)
        assert spec.magnitudes.max() == pytest.approx(1.0)
        assert spec.bin_hz == 50 / 256 and len(spec.magnitudes) == 129

    def test_zero_block(self):
        spec = normalized_spectrum(BodyBlock(np.zeros(64)))
        assert spec.energy_floor_hit
        assert not spec.magnitudes.any()
        assert find_peak(spec) is None

    def test_constant_block_hits_floor(self):
        assert normalized_spectrum(BodyBlock(np.full(64, 0.3))).energy_floor_hit

    def test_nfft_smaller_than_block(self):
        with pytest.raises(ParameterError):
            normalized_spectrum(BodyBlock(np.ones(64)), 32)

    def test_block_length_checked(self):
        with pytest.raises(ParameterError):
            BodyBlock(np.ones(63))

    def test_block_timing(self):
        b = BodyBlock(np.zeros(64), 3, 50.0)
        assert b.duration_s == 1.28
        assert b.start_s == pytest.approx(3 * 1.28)

    def test_without_detrend_dc_lobe_wins(self):
        # why the mean is removed: a rectified sine peaks in the DC lobe otherwise
        x = np.abs(np.sin(np.pi * 2.0 * T64))
        raw = find_peak(normalized_spectrum(BodyBlock(x), detrend=False))
        det = find_peak(normalized_spectrum(BodyBlock(x)))
        assert raw.freq_hz < 0.5
        assert abs(det.freq_hz - 2.0) <= 50 / 256

    def test_peak_to_mean_of_rectified_sine(self):
        # fundamental of |sin| is 4/(3 pi) against a mean of 2/pi: ratio 1/3 on-bin
        x = np.abs(np.sin(np.pi * 3.125 * T64))
        assert normalized_spectrum(BodyBlock(x)).peak_to_mean == pytest.approx(1 / 3, rel=2e-2)

    @settings(max_examples=50)
    @given(st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
    def test_scale_invariance(self, c, seed):
        x = np.abs(np.random.default_rng(seed).normal(size=64)) + 0.1
        a = normalized_spectrum(BodyBlock(x))
        b = normalized_spectrum(BodyBlock(c * x))
        assert np.max(np.abs(a.magnitudes - b.magnitudes)) < 1e-9
        assert a.peak_to_mean == pytest.approx(b.peak_to_mean, rel=1e-9)

    @pytest.mark.parametrize("phase", np.linspace(0, 2 * np.pi, 48, endpoint=False))
    def test_on_bin_peak_location(self, phase):
        for k in range(5, 124):
            f = k * FS / 256
            peak = find_peak(normalized_spectrum(BodyBlock(np.sin(2 * np.pi * f * T64 + phase))))
            assert peak.bin == k

    def test_generated_walk_peak_near_target(self):
        script = ActivityScript((Segment(Activity.REST, 4.0), Segment(Activity.WALK, 30.0, 2.0, 0.6)))
        ds, _ = synthesize(script)
        sig, _ = body_signal(ds.counts, estimate_params(ds), PipelineConfig())
        blocks, _ = split_blocks(sig)
        for b in blocks[5:]:
            peak = find_peak(normalized_spectrum(b))
            assert abs(peak.freq_hz - 2.0) <= 50 / 256


class TestFindPeak:
    def spectrum(self, mags):
        return NormalizedSpectrum(np.asarray(mags, dtype=float), 0.1953125, 256)

    def test_direct_lookup(self):
        m = np.zeros(129)
        m[16] = 1.0
        assert find_peak(self.spectrum(m)).freq_hz == 3.125

    def test_dc_excluded(self):
        m = np.zeros(129)
        m[0], m[5] = 1.0, 0.4
        assert find_peak(self.spectrum(m)).bin == 5

    def test_tie_goes_high(self):
        m = np.zeros(129)
        m[10] = m[18] = 1.0
        assert find_peak(self.spectrum(m)).bin == 18

    def test_floor(self):
        s = NormalizedSpectrum(np.zeros(129), 0.1953125, 256, energy_floor_hit=True)
        assert find_peak(s) is None
