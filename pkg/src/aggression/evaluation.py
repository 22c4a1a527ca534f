"""Confusion matrices, weighted F1, the uniform random baseline and report files."""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CLASS_NAMES
from .numerics import Rng, derive_seed

N_CLASSES = len(CLASS_NAMES)


@dataclass
class MetricsReport:
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    weighted_f1: float
    accuracy: float

    def as_dict(self) -> dict[str, float]:
        out = {"weighted_f1": self.weighted_f1, "accuracy": self.accuracy}
        for c, name in enumerate(CLASS_NAMES):
            out[f"{name}.precision"] = float(self.precision[c])
            out[f"{name}.recall"] = float(self.recall[c])
            out[f"{name}.f1"] = float(self.f1[c])
            out[f"{name}.support"] = int(self.support[c])
        return out


def confusion(gold: Sequence[int], pred: Sequence[int]) -> np.ndarray:
    """3x3 count matrix, rows = gold class, columns = predicted class."""
    gold = np.asarray(gold, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if gold.shape != pred.shape:
        raise ValueError(f"gold and pred lengths differ: {gold.size} vs {pred.size}")
    if gold.size == 0:
        raise ValueError("cannot score an empty label list")
    m = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(m, (gold, pred), 1)
    return m


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    out = np.zeros(num.shape, dtype=np.float64)
    np.divide(num, den, out=out, where=den != 0)
    return out


def weighted_f1(m: np.ndarray) -> MetricsReport:
    """Per-class precision/recall/F1 and their support-weighted F1; 0/0 counts as 0."""
    m = np.asarray(m)
    total = m.sum()
    if total <= 0:
        raise ValueError("empty confusion matrix")
    diag = np.diag(m).astype(np.float64)
    support = m.sum(axis=1)
    precision = _safe_div(diag, m.sum(axis=0).astype(np.float64))
    recall = _safe_div(diag, support.astype(np.float64))
    f1 = _safe_div(2 * precision * recall, precision + recall)
    wf1 = float((support * f1).sum() / total)
    return MetricsReport(precision, recall, f1, support, wf1, float(diag.sum() / total))


def score(gold: Sequence[int], pred: Sequence[int]) -> MetricsReport:
    return weighted_f1(confusion(gold, pred))


def batched_weighted_f1(gold: np.ndarray, preds: np.ndarray) -> np.ndarray:
    # preds: (trials, n); returns one weighted F1 per trial
    trials = preds.shape[0]
    cells = gold[None, :] * N_CLASSES + preds
    counts = np.zeros((trials, N_CLASSES * N_CLASSES), dtype=np.int64)
    for k in range(trials):
        counts[k] = np.bincount(cells[k], minlength=N_CLASSES * N_CLASSES)
    cm = counts.reshape(trials, N_CLASSES, N_CLASSES)
    diag = np.diagonal(cm, axis1=1, axis2=2).astype(np.float64)
    support = cm.sum(axis=2).astype(np.float64)
    predicted = cm.sum(axis=1).astype(np.float64)
    precision = _safe_div(diag, predicted)
    recall = _safe_div(diag, support)
    f1 = _safe_div(2 * precision * recall, precision + recall)
    return (support * f1).sum(axis=1) / gold.size


def random_predictions(n: int, seed: int, trial: int) -> np.ndarray:
    """Uniform class draws for one trial; the stream depends only on (seed, trial)."""
    return Rng(derive_seed(seed, trial)).randint(N_CLASSES, n)


def random_baseline(gold: Sequence[int], seed: int = 0, trials: int = 1000) -> float:
    """Mean weighted F1 of uniform random guessing over ``trials`` draws."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    gold = np.asarray(gold, dtype=np.int64)
    preds = np.stack([random_predictions(gold.size, seed, t) for t in range(trials)])
    return float(batched_weighted_f1(gold, preds).mean())


def emit_report(
    report: MetricsReport,
    matrix: np.ndarray,
    prefix: str | Path,
    svg: bool = False,
) -> list[Path]:
    """Write ``metrics.txt`` and ``confusion.csv`` (and optionally ``confusion.svg``) under ``prefix``."""
    out_dir = Path(prefix)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        metrics_path = out_dir / "metrics.txt"
        with open(metrics_path, "w", encoding="utf-8") as fh:
            for key, value in report.as_dict().items():
                fh.write(f"{key}={value!r}\n")
        cm_path = out_dir / "confusion.csv"
        with open(cm_path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["gold\\pred", *CLASS_NAMES])
            for name, row in zip(CLASS_NAMES, matrix):
                w.writerow([name, *(int(v) for v in row)])
        written = [metrics_path, cm_path]
        if svg:
            svg_path = out_dir / "confusion.svg"
            svg_path.write_text(render_confusion_svg(matrix), encoding="utf-8")
            written.append(svg_path)
    except OSError as exc:
        raise OSError(f"cannot write report under {out_dir}: {exc}") from exc
    return written


def read_metrics(path: str | Path) -> dict[str, float]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            key, _, value = line.rstrip("\n").partition("=")
            if key:
                out[key] = float(value)
    return out


def read_confusion(path: str | Path) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if rows[0][1:] != list(CLASS_NAMES) or [r[0] for r in rows[1:]] != list(CLASS_NAMES):
        raise ValueError(f"{path}: unexpected confusion matrix header")
    return np.array([[int(v) for v in r[1:]] for r in rows[1:]], dtype=np.int64)


def render_confusion_svg(matrix: np.ndarray, cell: int = 80) -> str:
    """Confusion heatmap: cells shaded by count/max and annotated with the count."""
    m = np.asarray(matrix)
    peak = max(int(m.max()), 1)
    margin = 60
    size = margin + cell * N_CLASSES
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" font-family="sans-serif">',
        f'<text x="{margin + cell * N_CLASSES / 2}" y="15" text-anchor="middle" font-size="12">predicted</text>',
    ]
    for j, name in enumerate(CLASS_NAMES):
        parts.append(
            f'<text x="{margin + cell * j + cell / 2}" y="{margin - 10}" text-anchor="middle" font-size="14">{name}</text>'
        )
        parts.append(
            f'<text x="{margin - 10}" y="{margin + cell * j + cell / 2 + 5}" text-anchor="end" font-size="14">{name}</text>'
        )
    for i in range(N_CLASSES):
        for j in range(N_CLASSES):
            frac = m[i, j] / peak
            shade = int(round(255 * (1 - frac)))
            fill = f"rgb({shade},{shade},255)"
            ink = "white" if frac > 0.5 else "black"
            x, y = margin + cell * j, margin + cell * i
            parts.append(f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" stroke="gray"/>')
            parts.append(
                f'<text x="{x + cell / 2}" y="{y + cell / 2 + 5}" text-anchor="middle" font-size="16" fill="{ink}">{int(m[i, j])}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_predictions(path: str | Path, ids, gold, pred, probs) -> None:
    os.makedirs(Path(path).parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "gold", "predicted", *(f"p_{n}" for n in CLASS_NAMES)])
        for i, g, p, pr in zip(ids, gold, pred, probs):
            w.writerow([i, CLASS_NAMES[g], CLASS_NAMES[p], *(repr(float(x)) for x in pr)])
