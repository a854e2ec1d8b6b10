"""Feed-forward fake news classifier with manual backpropagation.

The input per news item is [relu(projection of its user-interaction row),
news text vector, comment vector] fed through one fused hidden layer and
a sigmoid output. Training is plain minibatch SGD, single-threaded and
fully determined by the seed, with early stopping on a held-out slice of
the training data. The loss is the factor-weighted mean cross-entropy;
in `sample_reweight` mode the factors come from batch-normalized per-news
weights, otherwise they are all 1.
"""

from __future__ import annotations

import copy
import json
import struct
from dataclasses import asdict, dataclass, field

import numpy as np

from .corpus import InteractionMatrix
from .participation import ParticipationProfile
from .weighting import (
    EPS,
    GroupCoefficients,
    reweight_factors,
    vector_norm,
    weight_vector,
)

MODES = ("text_only", "binary_un", "edge_reweight", "sample_reweight")


class TrainingError(RuntimeError):
    """Training cannot proceed (empty data, non-finite loss)."""


@dataclass
class FeatureSet:
    """Aligned per-news features: text vectors plus the interaction row."""

    news_ids: list[str]
    z_news: np.ndarray      # (n, D)
    z_comments: np.ndarray  # (n, D)
    un_rows: np.ndarray     # (n, p); zeros in text_only mode

    def subset(self, idx) -> "FeatureSet":
        idx = np.asarray(idx)
        return FeatureSet(
            news_ids=[self.news_ids[i] for i in idx],
            z_news=self.z_news[idx],
            z_comments=self.z_comments[idx],
            un_rows=self.un_rows[idx],
        )

    def __len__(self) -> int:
        return len(self.news_ids)


@dataclass
class ModelParams:
    un_w: np.ndarray    # (h_u, p)
    un_b: np.ndarray    # (h_u,)
    fuse_w: np.ndarray  # (h_f, h_u + 2D)
    fuse_b: np.ndarray  # (h_f,)
    out_w: np.ndarray   # (h_f,)
    out_b: float

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        return [
            ("un_w", self.un_w),
            ("un_b", self.un_b),
            ("fuse_w", self.fuse_w),
            ("fuse_b", self.fuse_b),
            ("out_w", self.out_w),
            ("out_b", np.atleast_1d(np.asarray(self.out_b, dtype=float))),
        ]


@dataclass
class TrainConfig:
    epochs: int = 300
    batch_size: int = 32
    learning_rate: float = 0.05
    alpha: float = 0.0
    mode: str = "binary_un"
    early_stop_patience: int = 10
    seed: int = 0
    h_u: int = 32
    h_f: int = 64
    val_fraction: float = 0.15

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        if min(self.epochs, self.batch_size, self.h_u, self.h_f) < 1:
            raise ValueError("epochs, batch_size, and layer sizes must be positive")


@dataclass
class TrainLog:
    """Per-epoch record: train loss, val accuracy, mean batch factor."""

    rows: list[dict] = field(default_factory=list)
    best_epoch: int = -1
    best_val_accuracy: float = float("nan")

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("epoch,train_loss,val_accuracy,mean_batch_factor\n")
            for r in self.rows:
                fh.write(
                    f"{r['epoch']},{r['train_loss']:.10f},"
                    f"{r['val_accuracy']:.10f},{r['mean_batch_factor']:.10f}\n"
                )


def init_params(p: int, d: int, h_u: int, h_f: int, rng: np.random.Generator) -> ModelParams:
    """Seeded uniform init in +-1/sqrt(fan_in) per layer."""

    def uniform(shape, fan_in):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    fused_in = h_u + 2 * d
    return ModelParams(
        un_w=uniform((h_u, p), max(p, 1)),
        un_b=uniform((h_u,), max(p, 1)),
        fuse_w=uniform((h_f, fused_in), fused_in),
        fuse_b=uniform((h_f,), fused_in),
        out_w=uniform((h_f,), h_f),
        out_b=float(uniform((), h_f)),
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward_batch(params: ModelParams, features: FeatureSet):
    """Returns (clamped probabilities, cache for backprop)."""
    pre_u = features.un_rows @ params.un_w.T + params.un_b
    act_u = np.maximum(pre_u, 0.0)
    fused_in = np.concatenate([act_u, features.z_news, features.z_comments], axis=1)
    pre_f = fused_in @ params.fuse_w.T + params.fuse_b
    act_f = np.maximum(pre_f, 0.0)
    logits = act_f @ params.out_w + params.out_b
    probs = _sigmoid(logits)
    clamped = np.clip(probs, EPS, 1.0 - EPS)
    cache = (pre_u, fused_in, pre_f, act_f, probs)
    return clamped, cache


def forward(params: ModelParams, features: FeatureSet, index: int = 0) -> float:
    """Probability that one news item is fake."""
    probs, _ = forward_batch(params, features.subset([index]))
    return float(probs[0])


def gradients(
    params: ModelParams,
    features: FeatureSet,
    labels: np.ndarray,
    factors: np.ndarray,
):
    """Loss and its exact analytic gradient for one batch.

    The loss is -(1/M) * sum(factor_i * [y log p + (1-y) log(1-p)]).
    """
    y = np.asarray(labels, dtype=float)
    factors = np.asarray(factors, dtype=float)
    m = len(y)
    probs, (pre_u, fused_in, pre_f, act_f, raw) = forward_batch(params, features)
    ce = y * np.log(probs) + (1.0 - y) * np.log(1.0 - probs)
    loss = float(-(factors * ce).mean())

    d_logit = factors * (raw - y) / m                       # (m,)
    g_out_w = act_f.T @ d_logit
    g_out_b = float(d_logit.sum())
    d_act_f = np.outer(d_logit, params.out_w)
    d_pre_f = d_act_f * (pre_f > 0)
    g_fuse_w = d_pre_f.T @ fused_in
    g_fuse_b = d_pre_f.sum(axis=0)
    d_fused_in = d_pre_f @ params.fuse_w
    h_u = params.un_w.shape[0]
    d_act_u = d_fused_in[:, :h_u]
    d_pre_u = d_act_u * (pre_u > 0)
    g_un_w = d_pre_u.T @ features.un_rows
    g_un_b = d_pre_u.sum(axis=0)

    grads = ModelParams(
        un_w=g_un_w, un_b=g_un_b, fuse_w=g_fuse_w, fuse_b=g_fuse_b,
        out_w=g_out_w, out_b=g_out_b,
    )
    return loss, grads


def evaluate(params: ModelParams, features: FeatureSet, labels) -> float:
    """Accuracy with threshold 0.5; a probability of exactly 0.5 predicts 1."""
    probs, _ = forward_batch(params, features)
    preds = (probs >= 0.5).astype(int)
    return float((preds == np.asarray(labels)).mean())


def stratified_split_indices(labels, ratio: float, seed: int):
    """Seeded stratified index split; the first part gets floor(ratio * n)
    items, with per-class counts set by largest remainder."""
    labels = np.asarray(labels)
    n = len(labels)
    if not 0 < ratio < 1:
        raise ValueError("ratio must be in (0, 1)")
    classes = np.unique(labels)
    if len(classes) < 2:
        raise ValueError("stratified split requires every label class nonempty")
    n_first = int(np.floor(ratio * n))
    ideals = {c: ratio * int((labels == c).sum()) for c in classes}
    take = {c: int(np.floor(v)) for c, v in ideals.items()}
    leftover = n_first - sum(take.values())
    for c in sorted(classes, key=lambda c: (-(ideals[c] - take[c]), c)):
        if leftover <= 0:
            break
        if take[c] < int((labels == c).sum()):
            take[c] += 1
            leftover -= 1
    rng = np.random.default_rng(seed)
    first, second = [], []
    for c in classes:
        idx = np.flatnonzero(labels == c)
        idx = idx[rng.permutation(len(idx))]
        first.extend(idx[: take[c]])
        second.extend(idx[take[c]:])
    return np.array(sorted(first)), np.array(sorted(second))


def train(
    features: FeatureSet,
    labels,
    cfg: TrainConfig,
    matrix: InteractionMatrix | None = None,
    profiles: dict[str, ParticipationProfile] | None = None,
    coeffs: GroupCoefficients = GroupCoefficients(),
    norm_kind: str = "l2",
) -> tuple[ModelParams, TrainLog]:
    """Minibatch SGD with per-batch loss factors and early stopping.

    `matrix` and `profiles` are required only in sample_reweight mode,
    where they supply the per-news weights behind the batch factors.
    Returns the best-validation parameters and the per-epoch log.
    """
    labels = np.asarray(labels, dtype=float)
    if len(features) == 0 or len(labels) != len(features):
        raise TrainingError("empty training set or label length mismatch")

    if cfg.mode == "sample_reweight":
        if matrix is None or profiles is None:
            raise TrainingError("sample_reweight mode needs the binary matrix and profiles")
        wv = weight_vector(matrix, profiles, coeffs, cfg.alpha, norm_kind)
        sample_weights = np.array(
            [wv.values[matrix.row_of[nid]] for nid in features.news_ids]
        )
    else:
        sample_weights = None

    rng = np.random.default_rng(cfg.seed)
    d = features.z_news.shape[1]
    p = features.un_rows.shape[1]
    params = init_params(p, d, cfg.h_u, cfg.h_f, rng)

    if cfg.val_fraction > 0:
        tr_idx, val_idx = stratified_split_indices(
            labels, 1.0 - cfg.val_fraction, cfg.seed
        )
    else:
        tr_idx = val_idx = np.arange(len(labels))
    val_features = features.subset(val_idx)
    val_labels = labels[val_idx]

    log = TrainLog()
    best_params = copy.deepcopy(params)
    best_acc = -1.0
    stale = 0
    for epoch in range(cfg.epochs):
        order = tr_idx[rng.permutation(len(tr_idx))]
        losses = []
        factor_sum, factor_count = 0.0, 0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            if sample_weights is not None:
                batch_w = sample_weights[batch]
                factors = reweight_factors(
                    batch_w, vector_norm(batch_w, norm_kind), cfg.alpha
                )
            else:
                factors = np.ones(len(batch))
            loss, grads = gradients(
                params, features.subset(batch), labels[batch], factors
            )
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}")
            params.un_w -= cfg.learning_rate * grads.un_w
            params.un_b -= cfg.learning_rate * grads.un_b
            params.fuse_w -= cfg.learning_rate * grads.fuse_w
            params.fuse_b -= cfg.learning_rate * grads.fuse_b
            params.out_w -= cfg.learning_rate * grads.out_w
            params.out_b -= cfg.learning_rate * grads.out_b
            losses.append(loss)
            factor_sum += float(factors.sum())
            factor_count += len(factors)

        val_acc = evaluate(params, val_features, val_labels)
        log.rows.append(
            {
                "epoch": epoch,
                "train_loss": float(np.mean(losses)),
                "val_accuracy": val_acc,
                "mean_batch_factor": factor_sum / factor_count,
            }
        )
        if val_acc > best_acc:
            best_acc = val_acc
            best_params = copy.deepcopy(params)
            log.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= cfg.early_stop_patience:
                break
    log.best_val_accuracy = best_acc
    return best_params, log


def save_checkpoint(path, params: ModelParams, cfg: TrainConfig) -> None:
    """One file: a JSON header line, then little-endian float64 arrays in
    declared order."""
    arrays = params.arrays()
    header = {
        "config": asdict(cfg),
        "layers": [(name, list(arr.shape)) for name, arr in arrays],
    }
    with open(path, "wb") as fh:
        fh.write(json.dumps(header).encode("utf-8") + b"\n")
        for _, arr in arrays:
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_checkpoint(path) -> tuple[ModelParams, TrainConfig]:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        blobs = {}
        for name, shape in header["layers"]:
            count = int(np.prod(shape)) if shape else 1
            data = fh.read(count * 8)
            blobs[name] = np.frombuffer(data, dtype="<f8").reshape(shape).copy()
    params = ModelParams(
        un_w=blobs["un_w"],
        un_b=blobs["un_b"],
        fuse_w=blobs["fuse_w"],
        fuse_b=blobs["fuse_b"],
        out_w=blobs["out_w"],
        out_b=float(blobs["out_b"][0]),
    )
    return params, TrainConfig(**header["config"])
