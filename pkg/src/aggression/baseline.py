"""Hand-crafted sentiment/punctuation features and a from-scratch random forest."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import ClassLabel
from .numerics import Rng
from .preprocess import is_punct_token

log = logging.getLogger(__name__)

N_FEATURES = 6
N_CLASSES = 3


@dataclass
class SentimentLexicon:
    positive: frozenset[str]
    negative: frozenset[str]
    overlap: int = 0


def _read_wordlist(path: str | Path) -> set[str]:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read lexicon {path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        text = raw.decode("latin-1")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        words.add(line.lower())
    return words


def load_lexicon(positive_path: str | Path, negative_path: str | Path) -> SentimentLexicon:
    """Read positive/negative word lists; words listed in both are dropped from both."""
    pos = _read_wordlist(positive_path)
    neg = _read_wordlist(negative_path)
    both = pos & neg
    if both:
        log.warning("%d words appear in both lexicons and were dropped", len(both))
    return SentimentLexicon(frozenset(pos - both), frozenset(neg - both), len(both))


def extract_features(tokens: Sequence[str], lexicon: SentimentLexicon) -> np.ndarray:
    """Six features: positives, negatives, punctuation tokens, words, 1/(neg+1), ln(neg+1).

    ``tokens`` must still contain punctuation tokens.
    """
    n_pos = n_neg = n_punct = n_words = 0
    for tok in tokens:
        if is_punct_token(tok):
            n_punct += 1
            continue
        n_words += 1
        if tok in lexicon.positive:
            n_pos += 1
        elif tok in lexicon.negative:
            n_neg += 1
    return np.array(
        [n_pos, n_neg, n_punct, n_words, 1.0 / (n_neg + 1), math.log(n_neg + 1)],
        dtype=np.float64,
    )


def gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - np.dot(p, p))


@dataclass
class ForestConfig:
    num_trees: int = 100
    max_depth: int | None = 8
    min_leaf: int = 2
    features_per_split: int = 3  # ceil(sqrt(6))

    def __post_init__(self):
        if self.num_trees < 1:
            raise ValueError("num_trees must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


@dataclass
class DecisionTree:
    """Array-backed binary tree. ``feature[k] == -1`` marks a leaf."""

    feature: list[int] = field(default_factory=list)
    threshold: list[float] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    right: list[int] = field(default_factory=list)
    counts: list[np.ndarray] = field(default_factory=list)

    def _add(self, counts: np.ndarray) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.counts.append(counts)
        return len(self.feature) - 1

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def leaf(self, x: np.ndarray) -> int:
        k = 0
        while self.feature[k] >= 0:
            k = self.left[k] if x[self.feature[k]] <= self.threshold[k] else self.right[k]
        return k

    def predict(self, x: np.ndarray) -> int:
        # argmax takes the first maximum, i.e. the lower class code on ties
        return int(np.argmax(self.counts[self.leaf(x)]))


def best_split(
    X: np.ndarray, y: np.ndarray, features: Sequence[int], min_leaf: int
) -> tuple[int, float, float] | None:
    """Lowest weighted child Gini over midpoint thresholds of the given features.

    Returns ``(feature, threshold, weighted_child_gini)`` or None when no
    threshold leaves ``min_leaf`` samples on both sides.
    """
    n = y.size
    if n < 2:
        return None
    total = np.bincount(y, minlength=N_CLASSES)
    nl = np.arange(1, n, dtype=np.float64)
    nr = n - nl
    size_ok = (nl >= min_leaf) & (nr >= min_leaf)
    best = None
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs, ys = X[order, f], y[order]
        left = np.cumsum(np.eye(N_CLASSES)[ys], axis=0)[:-1]
        right = total - left
        g_left = 1.0 - np.sum((left / nl[:, None]) ** 2, axis=1)
        g_right = 1.0 - np.sum((right / nr[:, None]) ** 2, axis=1)
        score = (nl * g_left + nr * g_right) / n
        valid = size_ok & (xs[:-1] != xs[1:])
        if not valid.any():
            continue
        k = int(np.argmin(np.where(valid, score, np.inf)))
        if best is None or score[k] < best[2] - 1e-15:
            best = (int(f), float((xs[k] + xs[k + 1]) / 2.0), float(score[k]))
    return best


def build_tree(X: np.ndarray, y: np.ndarray, cfg: ForestConfig, rng: Rng) -> DecisionTree:
    tree = DecisionTree()
    n_feat = X.shape[1]
    k_feat = min(cfg.features_per_split, n_feat)

    def grow(idx: np.ndarray, depth: int) -> int:
        counts = np.bincount(y[idx], minlength=N_CLASSES)
        node = tree._add(counts)
        if np.count_nonzero(counts) <= 1 or (cfg.max_depth is not None and depth >= cfg.max_depth):
            return node
        chosen = [int(f) for f in rng.choice(n_feat, k_feat)]
        split = best_split(X[idx], y[idx], chosen, cfg.min_leaf)
        if split is None:
            # no valid threshold among the sampled features: try the rest
            rest = [f for f in range(n_feat) if f not in chosen]
            split = best_split(X[idx], y[idx], rest, cfg.min_leaf) if rest else None
        if split is None:
            return node
        f, thr, _ = split
        go_left = X[idx, f] <= thr
        tree.feature[node] = f
        tree.threshold[node] = thr
        tree.left[node] = grow(idx[go_left], depth + 1)
        tree.right[node] = grow(idx[~go_left], depth + 1)
        return node

    grow(np.arange(y.size), 0)
    return tree


@dataclass
class RandomForest:
    trees: list[DecisionTree]
    cfg: ForestConfig
    seed: int
    bootstrap_indices: list[np.ndarray] = field(default_factory=list, repr=False)


def train_forest(
    features: Sequence[np.ndarray] | np.ndarray,
    labels: Sequence[int],
    cfg: ForestConfig | None = None,
    seed: int = 0,
) -> RandomForest:
    """Bagged Gini trees; tree ``k`` draws its bootstrap and feature subsets from seed ``seed + k``."""
    cfg = cfg or ForestConfig()
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if X.ndim != 2 or X.shape[0] != y.size or y.size == 0:
        raise ValueError(f"features {X.shape} do not match {y.size} labels")
    if np.unique(y).size < 2:
        raise ValueError("need at least two distinct labels to train a forest")
    trees, boots = [], []
    for k in range(cfg.num_trees):
        rng = Rng(seed + k)
        boot = rng.randint(y.size, y.size)
        trees.append(build_tree(X[boot], y[boot], cfg, rng))
        boots.append(boot)
    return RandomForest(trees, cfg, seed, boots)


def forest_predict(forest: RandomForest, fv: np.ndarray) -> tuple[ClassLabel, np.ndarray]:
    """Majority vote over trees; ties go to the lower class code."""
    votes = np.zeros(N_CLASSES)
    for tree in forest.trees:
        votes[tree.predict(fv)] += 1
    probs = votes / len(forest.trees)
    return ClassLabel(int(np.argmax(votes))), probs
