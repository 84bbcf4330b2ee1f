"""Frequency-based Rest/Walk/Run classification of tri-axial accelerometer data."""

from .calibration import CalibratedSample, CalibrationParams, estimate_params
from .classifier import (
    ActivityLabel,
    BandTable,
    Classification,
    PipelineConfig,
    StreamClassifier,
    StreamError,
    classify_block,
    classify_dataset,
    classify_spectrum,
    classify_stream,
    split_blocks,
)
from .evaluate import AccuracyReport, ConfusionMatrix, report, score
from .gen import ActivityScript, Segment, default_corpus, synthesize, write_corpus
from .ingest import Dataset, IngestConfig, LabelTrack, RawSample, parse_labels, parse_samples, read_stream_frame, write_samples
from .labels import Activity
from .preprocess import BodySignal, FilterCascade, body_accel, design_gravity_filter, filter_apply, moving_average
from .spectrum import BodyBlock, NormalizedSpectrum, SpectralPeak, fft, find_peak, normalized_spectrum

__version__ = "0.1.0"
