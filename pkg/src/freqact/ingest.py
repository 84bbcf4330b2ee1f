"""Sample files, label files and the line-oriented streaming feed.

Sample lines are ``[index,]ax,ay,az`` with comma or whitespace separators.
``#`` starts a comment line; blank lines are ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyInputError, ParseError, RangeError
from .labels import Activity

_SPLIT = re.compile(r"[,\s]+")


@dataclass(frozen=True)
class IngestConfig:
    adc_full_scale: int = 4095
    sample_rate_hz: float = 50.0


@dataclass(frozen=True)
class RawSample:
    index: int
    ax: int
    ay: int
    az: int

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.ax, self.ay, self.az)


@dataclass(eq=False)
class Dataset:
    """Ordered raw samples held as arrays.

    ``index`` has shape (N,), ``counts`` has shape (N, 3) and may be float
    when a caller builds synthetic or rescaled data directly.
    """

    index: np.ndarray
    counts: np.ndarray
    sample_rate_hz: float = 50.0

    def __post_init__(self):
        self.index = np.asarray(self.index, dtype=np.int64)
        self.counts = np.asarray(self.counts)
        if self.counts.ndim != 2 or self.counts.shape[1] != 3:
            raise ValueError("counts must have shape (N, 3)")
        if len(self.index) != len(self.counts):
            raise ValueError("index and counts lengths differ")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")

    @classmethod
    def from_samples(cls, samples: Sequence[RawSample], sample_rate_hz: float = 50.0) -> "Dataset":
        idx = [s.index for s in samples]
        counts = np.array([s.counts for s in samples], dtype=np.int64).reshape(-1, 3)
        return cls(idx, counts, sample_rate_hz)

    def __len__(self) -> int:
        return len(self.index)

    def __getitem__(self, i: int) -> RawSample:
        c = self.counts[i]
        return RawSample(int(self.index[i]), *(int(v) for v in c))

    def __iter__(self) -> Iterator[RawSample]:
        for i in range(len(self)):
            yield self[i]

    @property
    def samples(self) -> list[RawSample]:
        return list(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.sample_rate_hz == other.sample_rate_hz
            and np.array_equal(self.index, other.index)
            and np.array_equal(self.counts, other.counts)
        )


@dataclass(frozen=True)
class LabelTrack:
    labels: tuple[Activity, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Activity]:
        return iter(self.labels)

    def __getitem__(self, i):
        return self.labels[i]


def _lines(text: str | Iterable[str]) -> Iterable[str]:
    if isinstance(text, str):
        return text.splitlines()
    return text


def _is_skippable(line: str) -> bool:
    s = line.strip()
    return not s or s.startswith("#")


def _to_count(token: str, lineno: int | None) -> int:
    try:
        value = int(token)
    except ValueError:
        try:
            f = float(token)
        except ValueError:
            raise ParseError(f"non-numeric field {token!r}", lineno) from None
        if not f.is_integer():
            raise ParseError(f"ADC count must be an integer, got {token!r}", lineno) from None
        value = int(f)
    return value


def _parse_fields(line: str, lineno: int | None) -> list[int]:
    fields = [t for t in _SPLIT.split(line.strip()) if t]
    if len(fields) not in (3, 4):
        raise ParseError(f"expected 3 or 4 fields, got {len(fields)}", lineno)
    return [_to_count(t, lineno) for t in fields]


def _check_range(counts: Sequence[int], full_scale: int, lineno: int | None) -> None:
    for v in counts:
        if v < 0 or v > full_scale:
            raise RangeError(f"count {v} outside [0, {full_scale}]", lineno)


def read_stream_frame(
    line: str,
    index: int | None = None,
    config: IngestConfig | None = None,
    *,
    lineno: int | None = None,
) -> RawSample | None:
    """Parse one feed line.

    Returns None for blank and comment lines. When the line has no index
    column, ``index`` (the caller's running counter) is used.
    """
    config = config or IngestConfig()
    if _is_skippable(line):
        return None
    values = _parse_fields(line, lineno)
    if len(values) == 4:
        idx, counts = values[0], values[1:]
    else:
        if index is None:
            raise ParseError("line has no index column and no running index was given", lineno)
        idx, counts = index, values
    _check_range(counts, config.adc_full_scale, lineno)
    return RawSample(idx, *counts)


def parse_samples(text: str | Iterable[str], config: IngestConfig | None = None) -> Dataset:
    config = config or IngestConfig()
    index: list[int] = []
    counts: list[list[int]] = []
    with_index: bool | None = None
    for lineno, line in enumerate(_lines(text), start=1):
        if _is_skippable(line):
            continue
        values = _parse_fields(line, lineno)
        has_index = len(values) == 4
        if with_index is None:
            with_index = has_index
        elif has_index != with_index:
            raise ParseError("inconsistent number of fields (index column appears or disappears)", lineno)
        if has_index:
            idx, c = values[0], values[1:]
            if index and idx <= index[-1]:
                raise ParseError(f"index {idx} not strictly increasing", lineno)
        else:
            idx, c = len(index), values
        _check_range(c, config.adc_full_scale, lineno)
        index.append(idx)
        counts.append(c)
    if not index:
        raise EmptyInputError("no sample lines in input")
    return Dataset(np.array(index, dtype=np.int64), np.array(counts, dtype=np.int64), config.sample_rate_hz)


def write_samples(dataset: Dataset) -> str:
    counts = np.asarray(dataset.counts)
    if not np.issubdtype(counts.dtype, np.integer):
        rounded = np.rint(counts)
        if not np.array_equal(rounded, counts):
            raise ValueError("only integer counts can be written")
        counts = rounded.astype(np.int64)
    rows = [f"{i},{x},{y},{z}" for i, (x, y, z) in zip(dataset.index.tolist(), counts.tolist())]
    return "\n".join(rows) + "\n"


def parse_labels(text: str | Iterable[str]) -> LabelTrack:
    out = []
    for lineno, line in enumerate(_lines(text), start=1):
        if _is_skippable(line):
            continue
        try:
            out.append(Activity.from_token(line))
        except KeyError:
            raise ParseError(f"unknown label {line.strip()!r}", lineno) from None
    return LabelTrack(tuple(out))


def write_labels(track: Iterable[Activity]) -> str:
    return "".join(f"{a.value}\n" for a in track)
