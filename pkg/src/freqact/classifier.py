"""Block-by-block activity classification by spectral peak frequency."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import calibration, preprocess
from .calibration import CalibrationParams
from .errors import FreqactError, InsufficientDataError, ParameterError
from .ingest import Dataset, IngestConfig, RawSample, read_stream_frame
from .labels import Activity
from .preprocess import BodySignal
from .spectrum import BodyBlock, NormalizedSpectrum, find_peak, normalized_spectrum

MODES = ("ba", "x", "y", "z")


@dataclass(frozen=True)
class BandTable:
    """Peak-frequency bands in Hz.

    Run is (run_lo, run_hi], walk [walk_lo, walk_hi], rest (0, rest_max], so
    a peak at exactly 2.5 Hz is Walk. ``min_peak_to_mean`` is the weakest
    periodic component, relative to the block mean, that still counts as a
    peak; below it the block is DC-dominated and labelled Rest.
    """

    rest_max_hz: float = 0.5
    walk_lo_hz: float = 1.5
    walk_hi_hz: float = 2.5
    run_lo_hz: float = 2.5
    run_hi_hz: float = 4.0
    min_peak_to_mean: float = 0.235

    def __post_init__(self):
        if not (0 < self.rest_max_hz < self.walk_lo_hz <= self.walk_hi_hz <= self.run_lo_hz < self.run_hi_hz):
            raise ParameterError(f"band table is not monotone: {self}")
        if not self.min_peak_to_mean >= 0:
            raise ParameterError("min_peak_to_mean must be >= 0")

    def check_nyquist(self, sample_rate_hz: float) -> None:
        if not self.run_hi_hz < sample_rate_hz / 2:
            raise ParameterError(
                f"run band edge {self.run_hi_hz} Hz is not below Nyquist {sample_rate_hz / 2:g} Hz"
            )

    def band_of(self, freq_hz: float) -> Activity:
        """Band lookup in priority order run, walk, rest."""
        if self.run_lo_hz < freq_hz <= self.run_hi_hz:
            return Activity.RUN
        if self.walk_lo_hz <= freq_hz <= self.walk_hi_hz:
            return Activity.WALK
        if 0 < freq_hz <= self.rest_max_hz:
            return Activity.REST
        return Activity.MISC


@dataclass(frozen=True)
class ActivityLabel:
    kind: Activity
    block_index: int
    peak_freq_hz: float | None = None

    def row(self) -> str:
        peak = "" if self.peak_freq_hz is None else f"{self.peak_freq_hz:.4f}"
        return f"{self.block_index},{self.kind.value},{peak}"


def classify_spectrum(spectrum: NormalizedSpectrum, bands: BandTable, block_index: int = 0) -> ActivityLabel:
    if spectrum.energy_floor_hit:
        return ActivityLabel(Activity.REST, block_index, None)
    peak = find_peak(spectrum)
    if peak is None:
        return ActivityLabel(Activity.REST, block_index, None)
    if spectrum.peak_to_mean < bands.min_peak_to_mean:
        return ActivityLabel(Activity.REST, block_index, peak.freq_hz)
    return ActivityLabel(bands.band_of(peak.freq_hz), block_index, peak.freq_hz)


def classify_block(block: BodyBlock, bands: BandTable | None = None, n_fft: int = 256) -> ActivityLabel:
    bands = bands or BandTable()
    return classify_spectrum(normalized_spectrum(block, n_fft), bands, block.block_index)


def split_blocks(
    signal: BodySignal | np.ndarray, block_size: int = 64, mode: str = "ba", sample_rate_hz: float | None = None
) -> tuple[list[BodyBlock], int]:
    """Consecutive non-overlapping blocks and the number of trailing samples dropped."""
    if block_size < 2:
        raise ParameterError("block size must be >= 2")
    if isinstance(signal, BodySignal):
        series = signal.axis(mode)
        fs = signal.sample_rate_hz
    else:
        series = np.asarray(signal, dtype=float)
        fs = sample_rate_hz or 50.0
    n_blocks = len(series) // block_size
    blocks = [
        BodyBlock(series[i * block_size:(i + 1) * block_size], i, fs) for i in range(n_blocks)
    ]
    return blocks, len(series) - n_blocks * block_size


@dataclass(frozen=True)
class PipelineConfig:
    sample_rate_hz: float = 50.0
    block_size: int = 64
    n_fft: int = 256
    calibration_window: int = calibration.DEFAULT_WINDOW
    ma_order: int = preprocess.MA_ORDER
    accel_range_g: float = calibration.ACCEL_RANGE_G
    mode: str = "ba"

    def __post_init__(self):
        if not self.sample_rate_hz > 0:
            raise ParameterError("sample rate must be positive")
        if self.block_size < 2 or self.block_size & (self.block_size - 1):
            raise ParameterError(f"block size must be a power of two >= 2, got {self.block_size}")
        if self.n_fft < self.block_size or self.n_fft & (self.n_fft - 1):
            raise ParameterError(f"n_fft must be a power of two >= block size, got {self.n_fft}")
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}")
        if self.calibration_window < 1:
            raise ParameterError("calibration window must be >= 1")

    @property
    def block_duration_s(self) -> float:
        return self.block_size / self.sample_rate_hz


@dataclass
class Classification:
    labels: list[ActivityLabel]
    n_discarded: int = 0
    n_clamped: int = 0
    block_size: int = 64
    sample_rate_hz: float = 50.0

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[ActivityLabel]:
        return iter(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    @property
    def kinds(self) -> list[Activity]:
        return [lab.kind for lab in self.labels]

    @property
    def block_duration_s(self) -> float:
        return self.block_size / self.sample_rate_hz


def body_signal(counts, params: CalibrationParams, config: PipelineConfig) -> tuple[BodySignal, int]:
    """Calibrate raw counts and run preprocessing. Returns the signal and the clamp count."""
    g, n_clamped = calibration.apply_array(counts, params, config.accel_range_g)
    cascade = preprocess.design_gravity_filter(config.sample_rate_hz)
    sig = preprocess.body_accel(g, config.sample_rate_hz, ma_order=config.ma_order, cascade=cascade)
    return sig, n_clamped


def classify_dataset(
    dataset: Dataset,
    params: CalibrationParams | None = None,
    bands: BandTable | None = None,
    config: PipelineConfig | None = None,
) -> Classification:
    """Calibrate, preprocess, split and classify every block in order.

    When ``params`` is None they are estimated from the dataset's first
    ``config.calibration_window`` samples (which stay in the stream).
    """
    bands = bands or BandTable()
    config = config or PipelineConfig(sample_rate_hz=dataset.sample_rate_hz)
    bands.check_nyquist(config.sample_rate_hz)
    if len(dataset) == 0:
        raise InsufficientDataError("empty dataset")
    if params is None:
        params = calibration.estimate_params(dataset, window=config.calibration_window)
    sig, n_clamped = body_signal(dataset.counts, params, config)
    blocks, n_discarded = split_blocks(sig, config.block_size, config.mode)
    labels = [classify_block(b, bands, config.n_fft) for b in blocks]
    return Classification(labels, n_discarded, n_clamped, config.block_size, config.sample_rate_hz)


@dataclass(frozen=True)
class StreamError:
    """A feed line that was rejected; the session continues."""

    line: int
    message: str


class StreamClassifier:
    """Online form of ``classify_dataset``: one label per completed block.

    Feed order and arithmetic match the batch path, so on clean input the
    label sequence is identical. A rejected line is dropped without
    advancing the sample counter. Without ``params`` the first
    ``calibration_window`` samples are buffered to estimate them.
    """

    def __init__(
        self,
        params: CalibrationParams | None = None,
        bands: BandTable | None = None,
        config: PipelineConfig | None = None,
        ingest: IngestConfig | None = None,
        gains=None,
    ):
        self.bands = bands or BandTable()
        self.config = config or PipelineConfig()
        self.bands.check_nyquist(self.config.sample_rate_hz)
        self.ingest = ingest or IngestConfig(sample_rate_hz=self.config.sample_rate_hz)
        self.params = params
        self._gains = gains
        self._pending: list[RawSample] = []
        cascade = preprocess.design_gravity_filter(self.config.sample_rate_hz)
        self._ma = [preprocess.MovingAverage(self.config.ma_order) for _ in range(3)]
        self._filters = [preprocess.SosFilter(cascade) for _ in range(3)]
        self._started = False
        self._block: list[float] = []
        self.n_samples = 0
        self.n_blocks = 0
        self.n_clamped = 0
        self._lineno = 0

    def _process(self, sample: RawSample) -> ActivityLabel | None:
        cal = calibration.apply(sample, self.params, self.config.accel_range_g)
        self.n_clamped += cal.clamped
        body = []
        for k, v in enumerate((cal.ax, cal.ay, cal.az)):
            m = self._ma[k].step(v)
            if not self._started:
                self._filters[k].reset_steady(m)
            body.append(self._filters[k].step(m))
        self._started = True
        xb, yb, zb = body
        if self.config.mode == "ba":
            value = math.sqrt(xb * xb + yb * yb + zb * zb)
        else:
            value = body["xyz".index(self.config.mode)]
        self._block.append(value)
        if len(self._block) < self.config.block_size:
            return None
        block = BodyBlock(np.array(self._block), self.n_blocks, self.config.sample_rate_hz)
        self._block = []
        self.n_blocks += 1
        return classify_block(block, self.bands, self.config.n_fft)

    def push(self, sample: RawSample) -> list[ActivityLabel]:
        self.n_samples += 1
        if self.params is None:
            self._pending.append(sample)
            if len(self._pending) < self.config.calibration_window:
                return []
            self.params = calibration.estimate_params(
                self._pending, self._gains, self.config.calibration_window
            )
            pending, self._pending = self._pending, []
            out = [self._process(s) for s in pending]
            return [lab for lab in out if lab is not None]
        lab = self._process(sample)
        return [] if lab is None else [lab]

    def feed_line(self, line: str) -> list[ActivityLabel | StreamError]:
        self._lineno += 1
        try:
            sample = read_stream_frame(line, self.n_samples, self.ingest, lineno=self._lineno)
        except FreqactError as exc:
            return [StreamError(self._lineno, str(exc))]
        if sample is None:
            return []
        return self.push(sample)

    @property
    def pending_samples(self) -> int:
        return len(self._block) + len(self._pending)


def classify_stream(
    feed: Iterable[str | RawSample],
    params: CalibrationParams | None = None,
    bands: BandTable | None = None,
    config: PipelineConfig | None = None,
    **kwargs,
) -> Iterator[ActivityLabel | StreamError]:
    """Yield labels (and rejected-line events) as blocks complete."""
    session = StreamClassifier(params, bands, config, **kwargs)
    for item in feed:
        if isinstance(item, RawSample):
            yield from session.push(item)
        else:
            yield from session.feed_line(item)
