"""Dataset loading, vocabulary, sequence encoding and stratified splits."""

from __future__ import annotations

import csv
import enum
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .numerics import Rng
from .preprocess import PreprocessOptions, preprocess_pipeline

log = logging.getLogger(__name__)

PAD, UNK = 0, 1
PAD_TOKEN, UNK_TOKEN = "<pad>", "<unk>"


class ClassLabel(enum.IntEnum):
    NAG = 0
    CAG = 1
    OAG = 2

    @classmethod
    def parse(cls, s: str) -> "ClassLabel":
        return cls[s.strip().upper()]


CLASS_NAMES = tuple(c.name for c in ClassLabel)


class DatasetError(ValueError):
    pass


@dataclass
class LabeledExample:
    id: str
    tokens: list[str]
    label: ClassLabel
    raw_text: str


def _is_label(s: str) -> bool:
    return s.strip().upper() in CLASS_NAMES


def read_rows(path: str | Path, format: str = "csv", n_cols: int = 3) -> tuple[list[tuple[int, list[str]]], int]:
    """Raw ``(line_number, row)`` pairs from a delimited file.

    A first row whose last column is not a class label is taken as a header
    when ``n_cols == 3``. Returns the rows and the number of rows skipped for
    empty text.
    """
    if format not in ("csv", "tsv"):
        raise DatasetError(f"unsupported format {format!r}")
    delimiter = "," if format == "csv" else "\t"
    rows = []
    skipped = 0
    try:
        fh = open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, delimiter=delimiter)
        first = True
        start = 1
        for row in reader:
            lineno = start
            start = reader.line_num + 1
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != n_cols:
                raise DatasetError(f"{path}: line {lineno}: expected {n_cols} columns, got {len(row)}")
            if first:
                first = False
                if n_cols == 3 and not _is_label(row[2]):
                    continue
            if not row[1 if n_cols >= 2 else 0].strip():
                skipped += 1
                continue
            rows.append((lineno, row))
    return rows, skipped


def load_dataset(
    path: str | Path,
    format: str = "csv",
    options: PreprocessOptions | None = None,
) -> list[LabeledExample]:
    rows, skipped = read_rows(path, format)
    if skipped:
        log.warning("%s: skipped %d rows with empty text", path, skipped)
    out = []
    for lineno, (id_, text, label) in rows:
        if not _is_label(label):
            raise DatasetError(f"{path}: line {lineno}: unknown label {label!r}")
        out.append(LabeledExample(id_, preprocess_pipeline(text, options), ClassLabel.parse(label), text))
    return out


@dataclass
class Vocabulary:
    itos: list[str] = field(default_factory=lambda: [PAD_TOKEN, UNK_TOKEN])
    stoi: dict[str, int] = field(init=False)

    def __post_init__(self):
        if self.itos[:2] != [PAD_TOKEN, UNK_TOKEN]:
            raise ValueError("vocabulary must start with PAD and UNK")
        self.stoi = {t: i for i, t in enumerate(self.itos)}
        if len(self.stoi) != len(self.itos):
            raise ValueError("duplicate vocabulary entries")

    def __len__(self) -> int:
        return len(self.itos)

    def __contains__(self, token: str) -> bool:
        return token in self.stoi

    def index(self, token: str) -> int:
        return self.stoi.get(token, UNK)

    def decode(self, indices: Sequence[int]) -> list[str]:
        return [self.itos[i] for i in indices]


def build_vocab(examples: Sequence[LabeledExample | Sequence[str]], min_freq: int = 2) -> Vocabulary:
    """Tokens with frequency >= ``min_freq``, most frequent first, ties lexicographic."""
    if min_freq < 1:
        raise ValueError("min_freq must be >= 1")
    counts: Counter[str] = Counter()
    for ex in examples:
        counts.update(ex.tokens if isinstance(ex, LabeledExample) else ex)
    counts.pop(PAD_TOKEN, None)
    counts.pop(UNK_TOKEN, None)
    kept = sorted((t for t, c in counts.items() if c >= min_freq), key=lambda t: (-counts[t], t))
    return Vocabulary([PAD_TOKEN, UNK_TOKEN, *kept])


def encode(tokens: Sequence[str], vocab: Vocabulary, max_len: int | None = None) -> list[int]:
    """Vocabulary indices for ``tokens``; an empty post encodes as ``[UNK]``."""
    if max_len is not None and max_len < 1:
        raise ValueError("max_len must be positive")
    if not tokens:
        return [UNK]
    if max_len is not None:
        tokens = tokens[:max_len]
    return [vocab.index(t) for t in tokens]


def stratified_split(
    examples: Sequence[LabeledExample],
    dev_fraction: float,
    seed: int,
) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Per-class split taking ``floor(count * dev_fraction)`` of each class for dev.

    Both halves keep the input order.
    """
    if not 0 < dev_fraction < 0.5:
        raise ValueError(f"dev_fraction must be in (0, 0.5), got {dev_fraction}")
    by_class: dict[int, list[int]] = {}
    for i, ex in enumerate(examples):
        by_class.setdefault(int(ex.label), []).append(i)
    rng = Rng(seed)
    dev_idx: set[int] = set()
    for label in sorted(by_class):
        members = by_class[label]
        if len(members) < 2:
            raise ValueError(f"class {ClassLabel(label).name} has fewer than 2 examples")
        k = int(len(members) * dev_fraction)
        perm = rng.permutation(len(members))
        dev_idx.update(members[j] for j in perm[:k])
    train = [ex for i, ex in enumerate(examples) if i not in dev_idx]
    dev = [ex for i, ex in enumerate(examples) if i in dev_idx]
    return train, dev


def class_histogram(examples: Sequence[LabeledExample]) -> dict[str, int]:
    counts = Counter(ex.label.name for ex in examples)
    return {name: counts.get(name, 0) for name in CLASS_NAMES}
