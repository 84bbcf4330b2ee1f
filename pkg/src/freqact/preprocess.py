"""Smoothing, gravity removal and the RMS body-acceleration signal.

The gravity filter is an order-7 elliptic high-pass stored as a cascade
of second-order sections in transposed direct form II.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError

GRAVITY_ORDER = 7
GRAVITY_CUTOFF_HZ = 0.5
GRAVITY_RIPPLE_DB = 0.5
GRAVITY_ATTEN_DB = 60.0
MA_ORDER = 3

# Order-7 elliptic high-pass, fs = 50 Hz, passband edge 0.5 Hz, 0.5 dB ripple,
# 60 dB stopband. Produced once with scipy.signal.ellip(..., output="sos") and
# locked by tests/test_preprocess.py against a fresh reference design.
# Rows are (b0, b1, b2, a1, a2); the first-order section comes first.
_GAIN_50HZ = 0.8667353720145281
_SECTIONS_50HZ = (
    (1.0, -1.0, 0.0, -0.8302159718517811, 0.0),
    (1.0, -1.9992479190297372, 1.0, -1.9121803790064873, 0.9218999065256378),
    (1.0, -1.9980503992727514, 1.0000000000000002, -1.9769543049988674, 0.9818176667625302),
    (1.0, -1.9974211465628515, 1.0, -1.9922531369150605, 0.9961493966275998),
)


@dataclass(frozen=True)
class Section:
    b0: float
    b1: float
    b2: float
    a1: float
    a2: float

    @property
    def b(self) -> tuple[float, float, float]:
        return (self.b0, self.b1, self.b2)

    @property
    def a(self) -> tuple[float, float, float]:
        return (1.0, self.a1, self.a2)

    @property
    def order(self) -> int:
        return 2 if (self.a2 != 0.0 or self.b2 != 0.0) else 1

    def poles(self) -> np.ndarray:
        return np.roots(self.a[: self.order + 1])

    def zeros(self) -> np.ndarray:
        return np.roots(self.b[: self.order + 1])


@dataclass(frozen=True)
class FilterCascade:
    sections: tuple[Section, ...]
    overall_gain: float = 1.0
    sample_rate_hz: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "sections", tuple(self.sections))
        r = self.pole_radius()
        if not r < 1.0:
            raise ParameterError(f"unstable cascade: pole radius {r:.6f}")

    @property
    def order(self) -> int:
        return sum(s.order for s in self.sections)

    def poles(self) -> np.ndarray:
        return np.concatenate([s.poles() for s in self.sections])

    def pole_radius(self) -> float:
        p = self.poles()
        return float(np.abs(p).max()) if p.size else 0.0

    def response(self, freqs_hz) -> np.ndarray:
        """Complex gain at each frequency."""
        f = np.asarray(freqs_hz, dtype=float)
        zinv = np.exp(-2j * np.pi * f / self.sample_rate_hz)
        h = np.full(f.shape, self.overall_gain, dtype=complex)
        for s in self.sections:
            h *= (s.b0 + s.b1 * zinv + s.b2 * zinv**2) / (1.0 + s.a1 * zinv + s.a2 * zinv**2)
        return h

    def dc_gain(self) -> float:
        g = self.overall_gain
        for s in self.sections:
            g *= (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2)
        return g

    def as_sos(self) -> np.ndarray:
        """(n_sections, 6) array in the usual [b0 b1 b2 1 a1 a2] layout, gain folded into row 0."""
        rows = np.array([[s.b0, s.b1, s.b2, 1.0, s.a1, s.a2] for s in self.sections])
        rows[0, :3] *= self.overall_gain
        return rows

    def dump(self) -> str:
        lines = [f"# order {self.order}, fs {self.sample_rate_hz:g} Hz", f"gain = {self.overall_gain!r}"]
        for i, s in enumerate(self.sections):
            lines.append(
                f"section {i}: b = {s.b0!r}, {s.b1!r}, {s.b2!r} ; a = 1.0, {s.a1!r}, {s.a2!r}"
            )
        return "\n".join(lines) + "\n"


def _from_sos(sos: np.ndarray, sample_rate_hz: float) -> FilterCascade:
    sos = np.array(sos, dtype=float)
    gain = 1.0
    sections = []
    for row in sos:
        b = row[:3] / row[3]
        a = row[3:] / row[3]
        lead = b[0] if b[0] != 0 else 1.0
        gain *= lead
        b = b / lead
        sections.append(Section(float(b[0]), float(b[1]), float(b[2]), float(a[1]), float(a[2])))
    return FilterCascade(tuple(sections), float(gain), float(sample_rate_hz))


def design_gravity_filter(
    sample_rate_hz: float = 50.0,
    *,
    order: int = GRAVITY_ORDER,
    cutoff_hz: float = GRAVITY_CUTOFF_HZ,
    ripple_db: float = GRAVITY_RIPPLE_DB,
    atten_db: float = GRAVITY_ATTEN_DB,
) -> FilterCascade:
    """Elliptic high-pass separating body acceleration from gravity.

    ``cutoff_hz`` is the passband edge. At the default parameters and 50 Hz
    the embedded coefficients are returned; anything else is designed with
    scipy.
    """
    if not sample_rate_hz > 1.0:
        raise ParameterError("sample rate must exceed 1 Hz")
    if not 0 < cutoff_hz < sample_rate_hz / 2:
        raise ParameterError(
            f"cutoff {cutoff_hz} Hz must lie in (0, Nyquist={sample_rate_hz / 2:g} Hz)"
        )
    defaults = (order, cutoff_hz, ripple_db, atten_db) == (
        GRAVITY_ORDER, GRAVITY_CUTOFF_HZ, GRAVITY_RIPPLE_DB, GRAVITY_ATTEN_DB
    )
    if defaults and sample_rate_hz == 50.0:
        return FilterCascade(tuple(Section(*s) for s in _SECTIONS_50HZ), _GAIN_50HZ, 50.0)
    from scipy import signal

    sos = signal.ellip(order, ripple_db, atten_db, cutoff_hz, "highpass", fs=sample_rate_hz, output="sos")
    return _from_sos(sos, sample_rate_hz)


class SosFilter:
    """Running filter state for one series. Not shareable across threads."""

    def __init__(self, cascade: FilterCascade):
        self.cascade = cascade
        self._coef = [(s.b0, s.b1, s.b2, s.a1, s.a2) for s in cascade.sections]
        self._state = [[0.0, 0.0] for _ in cascade.sections]

    def reset_steady(self, x: float) -> None:
        """Set the states as if ``x`` had been applied forever."""
        u = self.cascade.overall_gain * x
        for st, (b0, b1, b2, a1, a2) in zip(self._state, self._coef):
            y = (b0 + b1 + b2) / (1.0 + a1 + a2) * u
            st[0] = y - b0 * u
            st[1] = b2 * u - a2 * y
            u = y

    def step(self, x: float) -> float:
        u = self.cascade.overall_gain * x
        for st, (b0, b1, b2, a1, a2) in zip(self._state, self._coef):
            y = b0 * u + st[0]
            st[0] = b1 * u - a1 * y + st[1]
            st[1] = b2 * u - a2 * y
            u = y
        return u


def filter_apply(cascade: FilterCascade, series, initial: str = "zero") -> np.ndarray:
    """Run ``series`` through the cascade.

    ``initial="zero"`` starts from rest; ``"steady"`` starts in the steady
    state of the first input value, which removes the start-up step
    transient that a gravity offset would otherwise cause.
    """
    x = np.asarray(series, dtype=float)
    out = np.empty_like(x)
    if x.size == 0:
        return out
    filt = SosFilter(cascade)
    if initial == "steady":
        filt.reset_steady(float(x[0]))
    elif initial != "zero":
        raise ParameterError(f"unknown initial condition {initial!r}")
    step = filt.step
    for n, v in enumerate(x.tolist()):
        out[n] = step(v)
    return out


def moving_average(series, order: int = MA_ORDER) -> np.ndarray:
    """Causal mean of the last ``order`` samples, partial windows at the start."""
    if order < 1:
        raise ParameterError("moving-average order must be >= 1")
    x = np.asarray(series, dtype=float)
    n = x.size
    acc = np.zeros(n)
    # oldest term first, matching the streaming summation order
    for lag in range(order - 1, -1, -1):
        if lag < n:
            acc[lag:] += x[: n - lag]
    counts = np.minimum(np.arange(1, n + 1), order).astype(float)
    return acc / counts


class MovingAverage:
    def __init__(self, order: int = MA_ORDER):
        if order < 1:
            raise ParameterError("moving-average order must be >= 1")
        self._window: deque[float] = deque(maxlen=order)

    def step(self, x: float) -> float:
        self._window.append(x)
        return sum(self._window) / len(self._window)


@dataclass
class BodySignal:
    xb: np.ndarray
    yb: np.ndarray
    zb: np.ndarray
    ba: np.ndarray
    sample_rate_hz: float = 50.0

    def __len__(self) -> int:
        return len(self.ba)

    def axis(self, name: str) -> np.ndarray:
        return {"ba": self.ba, "x": self.xb, "y": self.yb, "z": self.zb}[name]


def rms_magnitude(xb, yb, zb) -> np.ndarray:
    xb, yb, zb = (np.asarray(v, dtype=float) for v in (xb, yb, zb))
    return np.sqrt(xb * xb + yb * yb + zb * zb)


def body_accel(
    calibrated,
    sample_rate_hz: float = 50.0,
    *,
    ma_order: int = MA_ORDER,
    cascade: FilterCascade | None = None,
    initial: str = "steady",
) -> BodySignal:
    """Calibrated (N, 3) g values to per-axis body acceleration and its RMS."""
    if isinstance(calibrated, Sequence) and calibrated and hasattr(calibrated[0], "ax"):
        a = np.array([(s.ax, s.ay, s.az) for s in calibrated], dtype=float)
    else:
        a = np.asarray(calibrated, dtype=float).reshape(-1, 3)
    if len(a) == 0:
        raise ParameterError("empty calibrated series")
    cascade = cascade or design_gravity_filter(sample_rate_hz)
    axes = [filter_apply(cascade, moving_average(a[:, k], ma_order), initial) for k in range(3)]
    return BodySignal(axes[0], axes[1], axes[2], rms_magnitude(*axes), sample_rate_hz)
