"""Synthetic REST -> WALK -> RUN recordings with known block labels.

Walk and run drive one axis with a sinusoid at half the target frequency.
The RMS magnitude rectifies it, so the BA fundamental lands on the target.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .calibration import CalibrationParams, default_gain
from .classifier import BandTable
from .errors import ParseError, ScriptError
from .ingest import Dataset, LabelTrack, write_labels, write_samples
from .labels import Activity
from .spectrum import BodyBlock, find_peak, normalized_spectrum

KINDS = (Activity.REST, Activity.WALK, Activity.RUN)
AXES = "xyz"


def default_params(adc_full_scale: int = 4095) -> CalibrationParams:
    """Zero-g at mid-scale, gain from the default ADC reference."""
    mid = float((adc_full_scale + 1) // 2)
    g = default_gain(adc_full_scale=adc_full_scale)
    return CalibrationParams(mid, mid, mid, g, g, g)


@dataclass(frozen=True)
class Segment:
    kind: Activity
    duration_s: float
    target_ba_freq_hz: float | None = None
    amplitude_g: float = 0.0


@dataclass(frozen=True)
class ActivityScript:
    segments: tuple[Segment, ...]
    noise_sigma_g: float = 0.0
    seed: int = 0
    gravity_axis: str = "+z"
    motion_axis: str = "z"

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    def validate(self, bands: BandTable | None = None, accel_range_g: float = 6.0) -> None:
        bands = bands or BandTable()
        if self.noise_sigma_g < 0:
            raise ScriptError("noise_sigma_g must be >= 0")
        if len(self.gravity_axis) != 2 or self.gravity_axis[0] not in "+-" or self.gravity_axis[1] not in AXES:
            raise ScriptError(f"gravity_axis must look like '+z', got {self.gravity_axis!r}")
        if self.motion_axis not in AXES:
            raise ScriptError(f"motion_axis must be one of x, y, z")
        for i, seg in enumerate(self.segments):
            if not seg.duration_s > 0:
                raise ScriptError(f"segment {i}: duration must be positive")
            if seg.kind not in KINDS:
                raise ScriptError(f"segment {i}: kind {seg.kind.value} cannot be generated")
            if seg.kind is Activity.REST:
                continue
            f = seg.target_ba_freq_hz
            lo, hi = (
                (bands.walk_lo_hz, bands.walk_hi_hz) if seg.kind is Activity.WALK
                else (bands.run_lo_hz, bands.run_hi_hz)
            )
            if f is None or not lo < f < hi:
                raise ScriptError(f"segment {i}: {seg.kind.value} target {f} Hz not inside ({lo}, {hi})")
            if seg.amplitude_g <= 0:
                raise ScriptError(f"segment {i}: amplitude must be positive")
            peak = seg.amplitude_g + (1.0 if self.motion_axis == self.gravity_axis[1] else 0.0)
            if peak > accel_range_g:
                raise ScriptError(f"segment {i}: {peak:g} g exceeds the +/-{accel_range_g:g} g range")


def _majority(kinds: np.ndarray) -> Activity:
    # ties go to the activity that appears later in the block
    best, best_n = None, -1
    for k in dict.fromkeys(kinds.tolist()):
        n = int(np.count_nonzero(kinds == k))
        if n >= best_n:
            best, best_n = k, n
    return KINDS[best]


def synthesize(
    script: ActivityScript,
    params: CalibrationParams | None = None,
    sample_rate_hz: float = 50.0,
    *,
    bands: BandTable | None = None,
    adc_full_scale: int = 4095,
    block_size: int = 64,
    n_fft: int = 256,
    self_check: bool = True,
) -> tuple[Dataset, LabelTrack]:
    bands = bands or BandTable()
    params = params or default_params(adc_full_scale)
    script.validate(bands)
    rng = np.random.default_rng(script.seed)
    fs = sample_rate_hz

    lengths = [int(round(s.duration_s * fs)) for s in script.segments]
    n = sum(lengths)
    accel = np.zeros((n, 3))
    sign = 1.0 if script.gravity_axis[0] == "+" else -1.0
    accel[:, AXES.index(script.gravity_axis[1])] = sign
    kinds = np.zeros(n, dtype=int)
    motion = np.zeros(n)

    phase = 0.0
    start = 0
    for seg, m in zip(script.segments, lengths):
        kinds[start:start + m] = KINDS.index(seg.kind)
        if seg.kind is not Activity.REST:
            drive = seg.target_ba_freq_hz / 2
            ph = phase + 2 * np.pi * drive * np.arange(m) / fs
            motion[start:start + m] = seg.amplitude_g * np.sin(ph)
            phase = float(ph[-1] + 2 * np.pi * drive / fs) if m else phase
            if self_check:
                _check_segment(seg, motion[start:start + m], fs, block_size, n_fft)
        start += m
    accel[:, AXES.index(script.motion_axis)] += motion
    if script.noise_sigma_g > 0:
        accel += rng.normal(0.0, script.noise_sigma_g, size=accel.shape)

    counts = np.rint(params.offsets + params.gains * accel)
    counts = np.clip(counts, 0, adc_full_scale).astype(np.int64)
    dataset = Dataset(np.arange(n), counts, fs)

    n_blocks = n // block_size
    labels = tuple(_majority(kinds[i * block_size:(i + 1) * block_size]) for i in range(n_blocks))
    return dataset, LabelTrack(labels)


def _check_segment(seg: Segment, motion: np.ndarray, fs: float, block_size: int, n_fft: int) -> None:
    """The rectified drive must peak within one bin of the target."""
    if len(motion) < block_size:
        return
    mid = (len(motion) - block_size) // 2
    spec = normalized_spectrum(BodyBlock(np.abs(motion[mid:mid + block_size]), 0, fs), n_fft)
    peak = find_peak(spec)
    if peak is None or abs(peak.freq_hz - seg.target_ba_freq_hz) > spec.bin_hz:
        got = None if peak is None else round(peak.freq_hz, 4)
        raise ScriptError(
            f"{seg.kind.value} segment: BA peak {got} Hz is more than one bin from {seg.target_ba_freq_hz} Hz"
        )


def default_corpus(
    n_datasets: int = 17,
    noise_sigma_g: float = 0.0,
    seed: int = 2008,
) -> list[ActivityScript]:
    """Seeded REST -> WALK -> RUN scripts with per-dataset tempo and intensity."""
    scripts = []
    for i in range(n_datasets):
        rng = np.random.default_rng([seed, i])
        segs = (
            Segment(Activity.REST, float(np.round(rng.uniform(12, 20), 2))),
            Segment(Activity.WALK, float(np.round(rng.uniform(20, 40), 2)),
                    float(np.round(rng.uniform(1.7, 2.3), 3)), float(np.round(rng.uniform(0.5, 0.8), 3))),
            Segment(Activity.RUN, float(np.round(rng.uniform(20, 40), 2)),
                    float(np.round(rng.uniform(2.8, 3.7), 3)), float(np.round(rng.uniform(0.9, 1.5), 3))),
        )
        scripts.append(ActivityScript(segs, noise_sigma_g, seed * 1000 + i))
    return scripts


def format_script(script: ActivityScript) -> str:
    lines = [
        f"seed = {script.seed}",
        f"noise_sigma_g = {script.noise_sigma_g!r}",
        f"gravity_axis = {script.gravity_axis}",
        f"motion_axis = {script.motion_axis}",
    ]
    for s in script.segments:
        if s.kind is Activity.REST:
            lines.append(f"segment = rest {s.duration_s!r}")
        else:
            lines.append(f"segment = {s.kind.value} {s.duration_s!r} {s.target_ba_freq_hz!r} {s.amplitude_g!r}")
    return "\n".join(lines) + "\n"


def parse_script(text: str) -> ActivityScript:
    """Read ``key = value`` lines; ``segment = kind duration [freq amplitude]`` may repeat."""
    opts: dict[str, str] = {}
    segments = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        key, sep, value = s.partition("=")
        if not sep:
            raise ParseError("expected 'key = value'", lineno)
        key, value = key.strip(), value.strip()
        if key == "segment":
            parts = value.split()
            try:
                kind = Activity.from_token(parts[0])
                nums = [float(p) for p in parts[1:]]
            except (KeyError, IndexError, ValueError):
                raise ParseError(f"bad segment {value!r}", lineno) from None
            if kind is Activity.REST and len(nums) == 1:
                segments.append(Segment(kind, nums[0]))
            elif kind is not Activity.REST and len(nums) == 3:
                segments.append(Segment(kind, nums[0], nums[1], nums[2]))
            else:
                raise ParseError(f"bad segment {value!r}", lineno)
        elif key in ("seed", "noise_sigma_g", "gravity_axis", "motion_axis"):
            opts[key] = value
        else:
            raise ParseError(f"unknown key {key!r}", lineno)
    try:
        return ActivityScript(
            tuple(segments),
            float(opts.get("noise_sigma_g", 0.0)),
            int(opts.get("seed", 0)),
            opts.get("gravity_axis", "+z"),
            opts.get("motion_axis", "z"),
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _script_record(script: ActivityScript) -> dict:
    return {
        "seed": script.seed,
        "noise_sigma_g": script.noise_sigma_g,
        "gravity_axis": script.gravity_axis,
        "motion_axis": script.motion_axis,
        "segments": [
            {"kind": s.kind.value, "duration_s": s.duration_s,
             "target_ba_freq_hz": s.target_ba_freq_hz, "amplitude_g": s.amplitude_g}
            for s in script.segments
        ],
    }


def write_corpus(
    scripts: Sequence[ActivityScript],
    directory: str | Path,
    *,
    params: CalibrationParams | None = None,
    sample_rate_hz: float = 50.0,
    **kwargs,
) -> dict:
    """One samples file and one labels file per script plus ``manifest.json``."""
    directory = Path(directory)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"{directory}: {exc.strerror}") from exc
    entries = []
    for i, script in enumerate(scripts):
        name = f"set_{i:02d}"
        dataset, track = synthesize(script, params, sample_rate_hz, **kwargs)
        files = {
            "samples": f"{name}.csv",
            "labels": f"{name}.lbl",
            "script": f"{name}.script",
        }
        contents = (write_samples(dataset), write_labels(track), format_script(script))
        for fname, body in zip(files.values(), contents):
            path = directory / fname
            try:
                path.write_text(body)
            except OSError as exc:
                raise OSError(f"{path}: {exc.strerror}") from exc
        entries.append({"name": name, **files, "n_samples": len(dataset),
                        "n_blocks": len(track), **_script_record(script)})
    manifest = {"sample_rate_hz": sample_rate_hz, "datasets": entries}
    path = directory / "manifest.json"
    try:
        path.write_text(json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror}") from exc
    return manifest


def scripts_from_manifest(manifest: dict) -> list[ActivityScript]:
    out = []
    for e in manifest["datasets"]:
        segs = tuple(
            Segment(Activity.from_token(s["kind"]), s["duration_s"], s["target_ba_freq_hz"], s["amplitude_g"])
            for s in e["segments"]
        )
        out.append(ActivityScript(segs, e["noise_sigma_g"], e["seed"], e["gravity_axis"], e["motion_axis"]))
    return out
