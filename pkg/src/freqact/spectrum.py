"""Radix-2 FFT and the normalised block spectrum used for classification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

ENERGY_FLOOR = 1e-12
DEFAULT_NFFT = 256


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft(x) -> np.ndarray:
    """Unnormalised forward DFT, iterative decimation in time.

    Length must be a power of two, at least 2.
    """
    a = np.asarray(x, dtype=complex)
    n = a.shape[-1]
    if n < 2 or not _is_pow2(n):
        raise ParameterError(f"FFT length must be a power of two >= 2, got {n}")
    a = a[..., _bit_reverse(n)]
    m = 2
    while m <= n:
        half = m // 2
        w = np.exp(-2j * np.pi * np.arange(half) / m)
        a = a.reshape(a.shape[:-1] + (n // m, m))
        top = a[..., :half]
        bot = a[..., half:] * w
        a = np.concatenate((top + bot, top - bot), axis=-1).reshape(a.shape[:-2] + (n,))
        m *= 2
    return a


def inverse_fft(X) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    return np.conj(fft(np.conj(X))) / X.shape[-1]


def naive_dft(x) -> np.ndarray:
    """O(N^2) reference transform."""
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n) @ x


@dataclass(frozen=True)
class BodyBlock:
    values: np.ndarray
    block_index: int = 0
    sample_rate_hz: float = 50.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not _is_pow2(len(v)) or len(v) < 2:
            raise ParameterError(f"block length must be a power of two >= 2, got {len(v)}")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def duration_s(self) -> float:
        return len(self.values) / self.sample_rate_hz

    @property
    def start_s(self) -> float:
        return self.block_index * len(self.values) / self.sample_rate_hz


@dataclass(frozen=True)
class NormalizedSpectrum:
    """Magnitudes over bins 0..n_fft/2 scaled to a maximum of 1.

    ``peak_to_mean`` is the largest non-DC magnitude divided by the block's
    DC magnitude (N times its mean), before normalisation. It is infinite
    for zero-mean blocks.
    """

    magnitudes: np.ndarray
    bin_hz: float
    n_fft: int
    energy_floor_hit: bool = False
    peak_to_mean: float = float("inf")

    @property
    def freqs_hz(self) -> np.ndarray:
        return np.arange(len(self.magnitudes)) * self.bin_hz


@dataclass(frozen=True)
class SpectralPeak:
    bin: int
    freq_hz: float
    magnitude: float


def normalized_spectrum(block: BodyBlock, n_fft: int = DEFAULT_NFFT, detrend: bool = True) -> NormalizedSpectrum:
    """Zero-padded magnitude spectrum of one block, peak scaled to 1.

    With ``detrend`` the block mean is removed before padding. BA is
    non-negative, so without it the padded DC lobe spills into the lowest
    bins and outweighs any activity peak.
    """
    n = len(block)
    if n_fft < n or not _is_pow2(n_fft):
        raise ParameterError(f"n_fft must be a power of two >= block size {n}, got {n_fft}")
    v = block.values
    dc = abs(float(v.sum()))
    if detrend:
        v = v - v.mean()
    padded = np.zeros(n_fft)
    padded[:n] = v
    mag = np.abs(fft(padded)[: n_fft // 2 + 1])
    bin_hz = block.sample_rate_hz / n_fft
    top = float(mag.max())
    if top < ENERGY_FLOOR:
        return NormalizedSpectrum(np.zeros_like(mag), bin_hz, n_fft, True, 0.0)
    ac = float(mag[1:].max())
    ratio = ac / dc if dc > 0 else float("inf")
    return NormalizedSpectrum(mag / top, bin_hz, n_fft, False, ratio)


def find_peak(spectrum: NormalizedSpectrum) -> SpectralPeak | None:
    """Largest non-DC bin; ties go to the higher bin."""
    if spectrum.energy_floor_hit:
        return None
    m = np.asarray(spectrum.magnitudes)[1:]
    if m.size == 0:
        return None
    k = m.size - 1 - int(np.argmax(m[::-1])) + 1
    return SpectralPeak(k, k * spectrum.bin_hz, float(spectrum.magnitudes[k]))
