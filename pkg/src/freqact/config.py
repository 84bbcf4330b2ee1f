"""Run configuration: defaults, flat ``key = value`` files, validation."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields

from . import calibration
from .classifier import BandTable, PipelineConfig
from .errors import ParameterError, ParseError
from .ingest import IngestConfig


@dataclass(frozen=True)
class RunConfig:
    sample_rate_hz: float = 50.0
    block_size: int = 64
    n_fft: int = 256
    calibration_window: int = calibration.DEFAULT_WINDOW
    ma_order: int = 3
    accel_range_g: float = calibration.ACCEL_RANGE_G
    mode: str = "ba"
    adc_full_scale: int = 4095
    adc_vref: float = 3.0
    sensitivity_v_per_g: float = calibration.SENSITIVITY_V_PER_G
    gain_x: float | None = None
    gain_y: float | None = None
    gain_z: float | None = None
    rest_max_hz: float = 0.5
    walk_lo_hz: float = 1.5
    walk_hi_hz: float = 2.5
    run_lo_hz: float = 2.5
    run_hi_hz: float = 4.0
    min_peak_to_mean: float = 0.235

    def __post_init__(self):
        # constructing these runs their validation
        self.bands().check_nyquist(self.sample_rate_hz)
        self.pipeline()
        if self.adc_full_scale < 1:
            raise ParameterError("adc_full_scale must be >= 1")
        for g in self.gains():
            if not g > 0:
                raise ParameterError("gains must be positive")

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(
            self.sample_rate_hz, self.block_size, self.n_fft, self.calibration_window,
            self.ma_order, self.accel_range_g, self.mode,
        )

    def bands(self) -> BandTable:
        return BandTable(
            self.rest_max_hz, self.walk_lo_hz, self.walk_hi_hz, self.run_lo_hz, self.run_hi_hz,
            self.min_peak_to_mean,
        )

    def ingest(self) -> IngestConfig:
        return IngestConfig(self.adc_full_scale, self.sample_rate_hz)

    def gains(self) -> tuple[float, float, float]:
        base = calibration.default_gain(self.sensitivity_v_per_g, self.adc_vref, self.adc_full_scale)
        return tuple(base if g is None else g for g in (self.gain_x, self.gain_y, self.gain_z))

    def replace(self, **changes) -> "RunConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})

    def dump(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            lines.append(f"{f.name} = {'' if v is None else v}")
        return "\n".join(lines) + "\n"


def _convert(name: str, raw: str):
    types = {f.name: f.type for f in fields(RunConfig)}
    t = types[name]
    raw = raw.strip()
    if t == "str":
        return raw
    if "None" in t and raw == "":
        return None
    if t.startswith("int"):
        return int(raw)
    return float(raw)


def parse_config(text: str) -> dict:
    """Overrides from a flat config file (unknown keys are errors)."""
    known = {f.name for f in fields(RunConfig)}
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        key, sep, value = s.partition("=")
        key = key.strip()
        if not sep:
            raise ParseError("expected 'key = value'", lineno)
        if key not in known:
            raise ParseError(f"unknown config key {key!r}", lineno)
        try:
            out[key] = _convert(key, value)
        except ValueError:
            raise ParseError(f"bad value for {key}: {value.strip()!r}", lineno) from None
    return out
