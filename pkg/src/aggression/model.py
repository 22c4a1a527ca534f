"""Embedding -> dropout -> LSTM -> attention -> dense -> softmax classifier.

Gradients are derived by hand (backpropagation through time, including the
attention softmax) and applied with Adam, one example per update.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import evaluation
from .corpus import ClassLabel, Vocabulary, encode
from .numerics import Rng, rand_uniform, sigmoid, softmax

log = logging.getLogger(__name__)

GATES = ("f", "i", "o", "c")
PROB_FLOOR = 1e-12


@dataclass
class ModelConfig:
    embed_dim: int = 100
    hidden_dim: int = 100
    num_classes: int = 3
    dropout_rate: float = 0.3
    learning_rate: float = 0.001
    max_len: int | None = None
    epochs: int = 10
    patience: int = 3
    seed: int = 0
    init_scale: float = 0.08
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    clip_norm: float | None = None
    min_freq: int = 2

    def __post_init__(self):
        if not 0 <= self.dropout_rate < 1:
            raise ValueError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        if min(self.embed_dim, self.hidden_dim, self.num_classes) < 1:
            raise ValueError("all dimensions must be positive")
        if self.max_len is not None and self.max_len < 1:
            raise ValueError("max_len must be positive")


@dataclass
class LstmParams:
    W: dict[str, np.ndarray]  # gate -> (hidden, embed)
    U: dict[str, np.ndarray]  # gate -> (hidden, hidden)
    b: dict[str, np.ndarray]  # gate -> (hidden,)


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray

    @classmethod
    def zeros(cls, hidden_dim: int) -> "LstmState":
        return cls(np.zeros(hidden_dim), np.zeros(hidden_dim))


@dataclass
class ModelParams:
    embedding: np.ndarray
    lstm: LstmParams
    w_a: np.ndarray
    W_d: np.ndarray
    b_d: np.ndarray

    def tensors(self) -> dict[str, np.ndarray]:
        """Name -> array view of every learned tensor, in a fixed order."""
        out = {"embedding": self.embedding}
        for kind in ("W", "U", "b"):
            group = getattr(self.lstm, kind)
            for g in GATES:
                out[f"lstm.{kind}_{g}"] = group[g]
        out["attn.w_a"] = self.w_a
        out["dense.W_d"] = self.W_d
        out["dense.b_d"] = self.b_d
        return out

    @classmethod
    def from_tensors(cls, t: dict[str, np.ndarray]) -> "ModelParams":
        lstm = LstmParams(
            {g: t[f"lstm.W_{g}"] for g in GATES},
            {g: t[f"lstm.U_{g}"] for g in GATES},
            {g: t[f"lstm.b_{g}"] for g in GATES},
        )
        return cls(t["embedding"], lstm, t["attn.w_a"], t["dense.W_d"], t["dense.b_d"])

    def zeros_like(self) -> "ModelParams":
        return ModelParams.from_tensors({k: np.zeros_like(v) for k, v in self.tensors().items()})

    def copy(self) -> "ModelParams":
        return ModelParams.from_tensors({k: v.copy() for k, v in self.tensors().items()})

    @property
    def vocab_size(self) -> int:
        return self.embedding.shape[0]


def init_params(vocab_size: int, cfg: ModelConfig, rng: Rng) -> ModelParams:
    """Uniform [-init_scale, init_scale] weights, zero biases."""
    s, E, H, C = cfg.init_scale, cfg.embed_dim, cfg.hidden_dim, cfg.num_classes
    embedding = rand_uniform(rng, vocab_size, E, s)
    W = {g: rand_uniform(rng, H, E, s) for g in GATES}
    U = {g: rand_uniform(rng, H, H, s) for g in GATES}
    b = {g: np.zeros(H) for g in GATES}
    w_a = rand_uniform(rng, 1, H, s)[0]
    W_d = rand_uniform(rng, C, H, s)
    return ModelParams(embedding, LstmParams(W, U, b), w_a, W_d, np.zeros(C))


@dataclass
class StepCache:
    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    f: np.ndarray
    i: np.ndarray
    o: np.ndarray
    g: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray
    h: np.ndarray


def lstm_step(p: LstmParams, x_t: np.ndarray, prev: LstmState) -> tuple[LstmState, StepCache]:
    H = p.b["f"].shape[0]
    if x_t.shape != (p.W["f"].shape[1],) or prev.h.shape != (H,) or prev.c.shape != (H,):
        raise ValueError(
            f"lstm_step shape mismatch: x {x_t.shape}, h {prev.h.shape}, c {prev.c.shape} "
            f"for W {p.W['f'].shape}"
        )
    pre = {g: p.W[g] @ x_t + p.U[g] @ prev.h + p.b[g] for g in GATES}
    f = sigmoid(pre["f"])
    i = sigmoid(pre["i"])
    o = sigmoid(pre["o"])
    g = np.tanh(pre["c"])
    c = f * prev.c + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    return LstmState(h, c), StepCache(x_t, prev.h, prev.c, f, i, o, g, c, tanh_c, h)


def attention(hs: Sequence[np.ndarray] | np.ndarray, w_a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scalar score per step, softmax over time, weighted sum of hidden states.

    Returns ``(weights, context)``.
    """
    H = np.asarray(hs, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] == 0:
        raise ValueError("attention needs at least one hidden state")
    scores = H @ w_a
    a = softmax(scores)
    return a, a @ H


@dataclass
class ForwardTrace:
    indices: list[int]
    masks: list[np.ndarray | None]
    steps: list[StepCache]
    hs: np.ndarray
    scores: np.ndarray
    weights: np.ndarray
    context: np.ndarray
    logits: np.ndarray
    probs: np.ndarray


def dropout_mask(rng: Rng, n: int, rate: float) -> np.ndarray:
    keep = 1.0 - rate
    return (rng.random(n) < keep).astype(np.float64) / keep


def forward(
    params: ModelParams,
    cfg: ModelConfig,
    indices: Sequence[int],
    train_mode: bool = False,
    rng: Rng | None = None,
) -> tuple[np.ndarray, ForwardTrace]:
    indices = list(indices)
    if not indices:
        raise ValueError("forward needs a non-empty index sequence")
    V = params.vocab_size
    for ix in indices:
        if not 0 <= ix < V:
            raise IndexError(f"token index {ix} out of range for vocabulary of {V}")
    use_dropout = train_mode and cfg.dropout_rate > 0
    if use_dropout and rng is None:
        raise ValueError("train_mode with dropout needs an rng")
    H = params.lstm.b["f"].shape[0]
    state = LstmState.zeros(H)
    masks: list[np.ndarray | None] = []
    steps = []
    for ix in indices:
        x = params.embedding[ix]
        if use_dropout:
            m = dropout_mask(rng, x.size, cfg.dropout_rate)
            x = x * m
        else:
            m = None
        masks.append(m)
        state, cache = lstm_step(params.lstm, x, state)
        steps.append(cache)
    hs = np.stack([s.h for s in steps])
    scores = hs @ params.w_a
    weights = softmax(scores)
    context = weights @ hs
    logits = params.W_d @ context + params.b_d
    probs = softmax(logits)
    return probs, ForwardTrace(indices, masks, steps, hs, scores, weights, context, logits, probs)


def cross_entropy(probs: np.ndarray, gold: int) -> float:
    return float(-np.log(max(float(probs[int(gold)]), PROB_FLOOR)))


def backward(params: ModelParams, cfg: ModelConfig, trace: ForwardTrace, gold: int) -> ModelParams:
    """Exact gradient of ``cross_entropy(forward(...), gold)`` for every parameter."""
    grads = params.zeros_like()
    gold = int(gold)
    dlogits = trace.probs.copy()
    if trace.probs[gold] < PROB_FLOOR:
        # loss is clamped flat there
        dlogits[:] = 0.0
    else:
        dlogits[gold] -= 1.0

    grads.W_d[:] = np.outer(dlogits, trace.context)
    grads.b_d[:] = dlogits
    dv = params.W_d.T @ dlogits

    # context = sum_t a_t h_t, a = softmax(h_t . w_a)
    a, hs = trace.weights, trace.hs
    da = hs @ dv
    de = a * (da - a @ da)
    dhs = np.outer(a, dv) + np.outer(de, params.w_a)
    grads.w_a[:] = de @ hs

    lp, lg = params.lstm, grads.lstm
    H = lp.b["f"].shape[0]
    dh_next = np.zeros(H)
    dc_next = np.zeros(H)
    for t in range(len(trace.steps) - 1, -1, -1):
        s = trace.steps[t]
        dh = dhs[t] + dh_next
        do = dh * s.tanh_c
        dc = dc_next + dh * s.o * (1.0 - s.tanh_c**2)
        dz = {
            "f": dc * s.c_prev * s.f * (1.0 - s.f),
            "i": dc * s.g * s.i * (1.0 - s.i),
            "o": do * s.o * (1.0 - s.o),
            "c": dc * s.i * (1.0 - s.g**2),
        }
        dx = np.zeros_like(s.x)
        dh_next = np.zeros(H)
        for g in GATES:
            lg.W[g] += np.outer(dz[g], s.x)
            lg.U[g] += np.outer(dz[g], s.h_prev)
            lg.b[g] += dz[g]
            dx += lp.W[g].T @ dz[g]
            dh_next += lp.U[g].T @ dz[g]
        dc_next = dc * s.f
        m = trace.masks[t]
        grads.embedding[trace.indices[t]] += dx if m is None else dx * m
    return grads


@dataclass
class AdamState:
    m: ModelParams
    v: ModelParams
    t: int = 0

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "AdamState":
        return cls(params.zeros_like(), params.zeros_like(), 0)


def clip_gradients(grads: ModelParams, max_norm: float) -> float:
    """Rescale ``grads`` in place to global L2 norm <= ``max_norm``; returns the original norm."""
    total = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.tensors().values())))
    if total > max_norm > 0:
        scale = max_norm / total
        for g in grads.tensors().values():
            g *= scale
    return total


def adam_update(params: ModelParams, grads: ModelParams, state: AdamState, cfg: ModelConfig) -> None:
    """One Adam step, updating ``params`` and ``state`` in place."""
    b1, b2, eps, lr = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, cfg.learning_rate
    state.t += 1
    bc1 = 1.0 - b1**state.t
    bc2 = 1.0 - b2**state.t
    pt, gt, mt, vt = params.tensors(), grads.tensors(), state.m.tensors(), state.v.tensors()
    for name, theta in pt.items():
        g, m, v = gt[name], mt[name], vt[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        theta -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    dev_weighted_f1: float


def predict_indices(params: ModelParams, cfg: ModelConfig, indices: Sequence[int]) -> tuple[int, np.ndarray]:
    """Argmax class (ties to the lower code) and the inference-mode probabilities."""
    probs, _ = forward(params, cfg, indices, train_mode=False)
    return argmax_low(probs), probs


def predict(params: ModelParams, cfg: ModelConfig, tokens: Sequence[str], vocab: Vocabulary) -> tuple[ClassLabel, np.ndarray]:
    label, probs = predict_indices(params, cfg, encode(tokens, vocab, cfg.max_len))
    return ClassLabel(label), probs


def argmax_low(probs: np.ndarray) -> int:
    # np.argmax already returns the first maximum
    return int(np.argmax(probs))


def evaluate_f1(params: ModelParams, cfg: ModelConfig, data: Sequence[tuple[list[int], int]]) -> float:
    gold = [y for _, y in data]
    pred = [predict_indices(params, cfg, x)[0] for x, _ in data]
    return evaluation.score(gold, pred).weighted_f1


def train(
    params: ModelParams,
    cfg: ModelConfig,
    train_set: Sequence[tuple[list[int], int]],
    dev_set: Sequence[tuple[list[int], int]],
    rng: Rng,
) -> tuple[ModelParams, list[EpochRecord]]:
    """Per-example Adam training with best-dev-F1 checkpointing.

    ``train_set`` and ``dev_set`` hold ``(indices, label)`` pairs. Training
    stops after ``cfg.epochs`` epochs or ``cfg.patience`` epochs without a
    dev improvement; the parameters of the best dev epoch are returned.
    """
    if not train_set:
        raise ValueError("empty training set")
    if cfg.epochs <= 0:
        return params, []
    params = params.copy()
    state = AdamState.zeros_like(params)
    best = params.copy()
    best_f1 = -np.inf
    stale = 0
    history: list[EpochRecord] = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(train_set))
        total = 0.0
        for k in order:
            indices, label = train_set[k]
            probs, trace = forward(params, cfg, indices, train_mode=True, rng=rng)
            total += cross_entropy(probs, label)
            grads = backward(params, cfg, trace, label)
            if cfg.clip_norm:
                clip_gradients(grads, cfg.clip_norm)
            adam_update(params, grads, state, cfg)
        dev_f1 = evaluate_f1(params, cfg, dev_set) if dev_set else float("nan")
        rec = EpochRecord(epoch, total / len(train_set), dev_f1)
        history.append(rec)
        log.info("epoch %d loss %.4f dev_f1 %.4f", epoch, rec.train_loss, dev_f1)
        if not dev_set:
            best = params.copy()
            continue
        if dev_f1 > best_f1:
            best_f1 = dev_f1
            best = params.copy()
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                break
    return best, history
