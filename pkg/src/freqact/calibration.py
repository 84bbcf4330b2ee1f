"""Linear count-to-g calibration from a stationary, upright start window."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InsufficientDataError, ParameterError, ParseError
from .ingest import Dataset, RawSample

DEFAULT_WINDOW = 100
ACCEL_RANGE_G = 6.0
SENSITIVITY_V_PER_G = 0.2  # MMA7260Q at the +/-6 g setting


def default_gain(
    sensitivity_v_per_g: float = SENSITIVITY_V_PER_G,
    adc_vref: float = 3.0,
    adc_full_scale: int = 4095,
) -> float:
    """Counts per g for a ratiometric accelerometer feeding an ADC."""
    return sensitivity_v_per_g / (adc_vref / adc_full_scale)


@dataclass(frozen=True)
class CalibrationParams:
    offset_x: float
    offset_y: float
    offset_z: float
    gain_x: float
    gain_y: float
    gain_z: float

    def __post_init__(self):
        for name in ("gain_x", "gain_y", "gain_z"):
            g = getattr(self, name)
            if not (math.isfinite(g) and g > 0):
                raise ParameterError(f"{name} must be positive and finite, got {g}")
        for name in ("offset_x", "offset_y", "offset_z"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")

    @property
    def offsets(self) -> np.ndarray:
        return np.array([self.offset_x, self.offset_y, self.offset_z])

    @property
    def gains(self) -> np.ndarray:
        return np.array([self.gain_x, self.gain_y, self.gain_z])

    def to_text(self) -> str:
        keys = ("offset_x", "offset_y", "offset_z", "gain_x", "gain_y", "gain_z")
        return "".join(f"{k} = {getattr(self, k)!r}\n" for k in keys)

    @classmethod
    def from_text(cls, text: str) -> "CalibrationParams":
        values: dict[str, float] = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            if "=" not in s:
                raise ParseError("expected 'key = value'", lineno)
            key, _, raw = s.partition("=")
            try:
                values[key.strip()] = float(raw)
            except ValueError:
                raise ParseError(f"bad number {raw.strip()!r}", lineno) from None
        try:
            return cls(**values)
        except TypeError as exc:
            raise ParseError(f"calibration file: {exc}") from None


@dataclass(frozen=True)
class CalibratedSample:
    index: int
    ax: float
    ay: float
    az: float
    clamped: bool = False


def _as_counts(samples) -> np.ndarray:
    if isinstance(samples, Dataset):
        return np.asarray(samples.counts, dtype=float)
    if len(samples) and isinstance(samples[0], RawSample):
        return np.array([s.counts for s in samples], dtype=float)
    return np.asarray(samples, dtype=float).reshape(-1, 3)


def estimate_params(
    samples,
    gains: float | Sequence[float] | None = None,
    window: int = DEFAULT_WINDOW,
) -> CalibrationParams:
    """Offsets from the mean of the first ``window`` samples.

    The device is assumed upright and still during the window, reading
    0 g on x and y and +1 g on z. Gains are not estimated: one pose fixes
    offsets but not slopes.
    """
    if window < 1:
        raise ParameterError("calibration window must be >= 1")
    counts = _as_counts(samples)
    if len(counts) < window:
        raise InsufficientDataError(
            f"calibration needs {window} samples, dataset has {len(counts)}"
        )
    if gains is None:
        gains = default_gain()
    g = np.broadcast_to(np.asarray(gains, dtype=float), (3,))
    mean = counts[:window].mean(axis=0)
    return CalibrationParams(
        float(mean[0]), float(mean[1]), float(mean[2] - g[2] * 1.0),
        float(g[0]), float(g[1]), float(g[2]),
    )


def apply(sample: RawSample, params: CalibrationParams, accel_range_g: float = ACCEL_RANGE_G) -> CalibratedSample:
    vals = []
    clamped = False
    for raw, off, gain in zip(sample.counts, params.offsets, params.gains):
        a = (raw - off) / gain
        if a > accel_range_g:
            a, clamped = accel_range_g, True
        elif a < -accel_range_g:
            a, clamped = -accel_range_g, True
        vals.append(float(a))
    return CalibratedSample(sample.index, *vals, clamped=clamped)


def apply_array(
    counts, params: CalibrationParams, accel_range_g: float = ACCEL_RANGE_G
) -> tuple[np.ndarray, int]:
    """Vectorised ``apply``: returns (N, 3) g values and the number of clamped samples."""
    c = np.asarray(counts, dtype=float).reshape(-1, 3)
    a = (c - params.offsets) / params.gains
    out_of_range = np.abs(a) > accel_range_g
    np.clip(a, -accel_range_g, accel_range_g, out=a)
    return a, int(out_of_range.any(axis=1).sum())
