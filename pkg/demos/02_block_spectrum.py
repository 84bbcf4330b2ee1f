"""
Normalized spectrum of one block
================================

Each block of 64 body-acceleration samples is zero padded to 256 points,
transformed with a radix-2 FFT and scaled so that its peak equals one.
"""

import numpy as np

from freqact import BodyBlock, find_peak, normalized_spectrum
from freqact.spectrum import fft, naive_dft

# the FFT agrees with the textbook DFT
x = np.random.default_rng(0).normal(size=64)
print("max |fft - dft| =", np.abs(fft(x) - naive_dft(x)).max())

# a rectified 1 Hz sway has its magnitude peak at 2 Hz
t = np.arange(64) / 50
ba = np.abs(0.4 * np.sin(2 * np.pi * 1.0 * t))
spec = normalized_spectrum(BodyBlock(ba, 0, 50.0))
peak = find_peak(spec)
print(f"bin width {spec.bin_hz:.4f} Hz, peak at {peak.freq_hz:.3f} Hz")

# the normalization removes the amplitude: ten times the signal, same spectrum
spec10 = normalized_spectrum(BodyBlock(10 * ba, 0, 50.0))
print("same shape:", np.allclose(spec.magnitudes, spec10.magnitudes))

# the strongest bins
for k in np.argsort(spec.magnitudes)[::-1][:5]:
    print(f"{spec.freqs_hz[k]:6.3f} Hz  {spec.magnitudes[k]:.3f}")
