"""Block-by-block scoring against reference labels and accuracy tables."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import AlignmentError, ParseError
from .labels import ORDER, Activity


def _kind(x) -> Activity:
    return x if isinstance(x, Activity) else x.kind


@dataclass
class ConfusionMatrix:
    """Counts indexed (truth, predicted) in rest, walk, run, misc order."""

    counts: np.ndarray = field(default_factory=lambda: np.zeros((4, 4), dtype=np.int64))
    n_datasets: int = 1

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64).reshape(4, 4)
        if (self.counts < 0).any():
            raise ValueError("negative count")

    def __getitem__(self, key: tuple[Activity, Activity]) -> int:
        t, p = key
        return int(self.counts[ORDER.index(t), ORDER.index(p)])

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.counts + other.counts, self.n_datasets + other.n_datasets)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    def render(self) -> str:
        head = "truth\\pred " + " ".join(f"{a.value:>5}" for a in ORDER)
        rows = [head]
        for i, a in enumerate(ORDER):
            rows.append(f"{a.value:<10} " + " ".join(f"{int(c):>5}" for c in self.counts[i]))
        return "\n".join(rows)


def score(predicted: Sequence, truth: Sequence) -> ConfusionMatrix:
    """``predicted`` may hold ActivityLabels or Activity values."""
    predicted, truth = list(predicted), list(truth)
    if len(predicted) != len(truth):
        raise AlignmentError(f"{len(predicted)} predicted blocks vs {len(truth)} reference labels")
    cm = np.zeros((4, 4), dtype=np.int64)
    for p, t in zip(predicted, truth):
        cm[ORDER.index(_kind(t)), ORDER.index(_kind(p))] += 1
    return ConfusionMatrix(cm)


def percent(n_correct: int, n_blocks: int) -> Decimal:
    """100 * n_correct / n_blocks to one decimal, half away from zero."""
    if n_blocks == 0:
        return Decimal("0.0")
    exact = Fraction(100 * n_correct, n_blocks)
    return (Decimal(exact.numerator) / Decimal(exact.denominator)).quantize(
        Decimal("0.1"), rounding=ROUND_HALF_UP
    )


@dataclass(frozen=True)
class ReportRow:
    name: str
    n_datasets: int
    n_blocks: int
    n_correct: int

    @property
    def n_wrong(self) -> int:
        return self.n_blocks - self.n_correct

    @property
    def accuracy_pct(self) -> Decimal:
        return percent(self.n_correct, self.n_blocks)


@dataclass(frozen=True)
class AccuracyReport:
    per_dataset: tuple[ReportRow, ...]
    aggregate: ReportRow
    block_size: int | None = None
    sample_rate_hz: float | None = None

    @property
    def block_duration_s(self) -> Decimal | None:
        if self.block_size is None or self.sample_rate_hz is None:
            return None
        return Decimal(self.block_size) / Decimal(repr(float(self.sample_rate_hz)))

    def render_text(self) -> str:
        """Column per dataset plus the pooled column, one row per quantity."""
        cols = list(self.per_dataset) + [self.aggregate]
        width = max(8, *(len(c.name) + 2 for c in cols))
        rows = [
            ("Dataset", [c.name for c in cols]),
            ("No. of data sets", [str(c.n_datasets) for c in cols]),
            ("Total no. of blocks", [str(c.n_blocks) for c in cols]),
            ("No. of blocks classified correctly", [str(c.n_correct) for c in cols]),
            ("No. of blocks classified wrongly", [str(c.n_wrong) for c in cols]),
            ("Accuracy %", [f"{c.accuracy_pct}%" for c in cols]),
        ]
        label_w = max(len(r[0]) for r in rows) + 2
        out = [r[0].ljust(label_w) + "".join(v.rjust(width) for v in r[1]) for r in rows]
        if self.block_duration_s is not None:
            out.append(f"Block length: {self.block_size} samples = {self.block_duration_s.normalize():f} s "
                       f"at {self.sample_rate_hz:g} Hz")
        return "\n".join(out) + "\n"

    def render_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "n_datasets", "n_blocks", "n_correct", "n_wrong", "accuracy_pct"])
        for r in list(self.per_dataset) + [self.aggregate]:
            w.writerow([r.name, r.n_datasets, r.n_blocks, r.n_correct, r.n_wrong, f"{r.accuracy_pct}"])
        return buf.getvalue()


AGGREGATE_NAME = "all"


def report(
    matrices: Mapping[str, ConfusionMatrix] | Iterable[tuple[str, ConfusionMatrix]],
    *,
    aggregate_name: str = AGGREGATE_NAME,
    block_size: int | None = None,
    sample_rate_hz: float | None = None,
) -> AccuracyReport:
    """Per-dataset rows and a pooled aggregate (summed counts, not averaged percentages)."""
    items = list(matrices.items()) if isinstance(matrices, Mapping) else list(matrices)
    if not items:
        raise ValueError("report needs at least one confusion matrix")
    rows = tuple(ReportRow(name, cm.n_datasets, cm.total, cm.correct) for name, cm in items)
    agg = ReportRow(
        aggregate_name,
        sum(r.n_datasets for r in rows),
        sum(r.n_blocks for r in rows),
        sum(r.n_correct for r in rows),
    )
    return AccuracyReport(rows, agg, block_size, sample_rate_hz)


def parse_report_csv(text: str) -> AccuracyReport:
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for lineno, rec in enumerate(reader, start=2):
        try:
            row = ReportRow(rec["name"], int(rec["n_datasets"]), int(rec["n_blocks"]), int(rec["n_correct"]))
        except (KeyError, TypeError, ValueError):
            raise ParseError("bad report row", lineno) from None
        if row.n_wrong != int(rec["n_wrong"]):
            raise ParseError("n_wrong does not match n_blocks - n_correct", lineno)
        rows.append(row)
    if not rows:
        raise ParseError("empty report")
    return AccuracyReport(tuple(rows[:-1]), rows[-1])


def parse_predictions(text: str) -> list[Activity]:
    """Read ``block_index,label,peak_hz`` rows as written by ``classify``."""
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        parts = [p.strip() for p in s.split(",")]
        if parts[0] == "block_index":
            continue
        token = parts[1] if len(parts) >= 2 else parts[0]
        try:
            out.append(Activity.from_token(token))
        except KeyError:
            raise ParseError(f"unknown label {token!r}", lineno) from None
    return out
