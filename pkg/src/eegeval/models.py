"""Pluggable classifiers: two label-statistics baselines and a band-power MLP
trained with hand-written backpropagation and Adam.

All tie-breaks (modal class, argmax, best epoch) pick the lowest index / first
occurrence, and fitting is a pure function of (data, specs, seed).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import SignalBlock
from .errors import ModelError
from .transform import WindowSegment

DEFAULT_BANDS = (
    ("delta", 0.5, 4.0),
    ("theta", 4.0, 8.0),
    ("alpha", 8.0, 13.0),
    ("beta", 13.0, 30.0),
    ("gamma", 30.0, 45.0),
)

LOG_POWER_FLOOR = 1e-12


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str  # "majority_baseline" | "distribution_baseline" | "bandpower_mlp" | "external"
    hidden_sizes: tuple[int, ...] = (64, 64)
    bands: tuple[tuple[str, float, float], ...] = DEFAULT_BANDS
    external_id: str | None = None

    def __post_init__(self):
        kinds = ("majority_baseline", "distribution_baseline", "bandpower_mlp", "external")
        if self.kind not in kinds:
            raise ModelError(f"unknown classifier kind {self.kind!r}")
        if self.kind == "bandpower_mlp":
            if any(h < 1 for h in self.hidden_sizes):
                raise ModelError("hidden sizes must be >= 1")
            edges = sorted((lo, hi) for _, lo, hi in self.bands)
            for (lo, hi), (lo2, _) in zip(edges, edges[1:]):
                if lo2 < hi:
                    raise ModelError("bands must not overlap")
        if self.kind == "external" and not self.external_id:
            raise ModelError("external classifier needs an identifier")


@dataclass(frozen=True)
class TrainingSpec:
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 0.001
    label_smoothing: float = 0.01
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1 or self.learning_rate <= 0:
            raise ModelError("epochs, batch_size, learning_rate must be positive")
        if not (0 <= self.label_smoothing < 1):
            raise ModelError("label_smoothing must be in [0, 1)")


@dataclass
class TrainedModel:
    spec: ClassifierSpec
    n_classes: int
    # per-kind fitted state
    modal_class: int | None = None
    class_probs: np.ndarray | None = None
    params: "list[tuple[np.ndarray, np.ndarray]] | None" = None  # (W, b) per layer
    feature_mean: np.ndarray | None = None
    feature_std: np.ndarray | None = None
    val_accuracy_history: tuple[float, ...] = ()
    selected_epoch: int = 0
    seed: int = 0


@dataclass(frozen=True)
class PredictionBatch:
    classes: np.ndarray  # (n,)
    probabilities: np.ndarray  # (n, n_classes)


# ---------------------------------------------------------------------------
# band-power features


def bandpower_features(window: WindowSegment | SignalBlock, bands=DEFAULT_BANDS) -> np.ndarray:
    """Log mean periodogram power per channel x band (Hann window, single
    periodogram).  Feature order is channel-major."""
    block = window.signal if isinstance(window, WindowSegment) else window
    x = block.data
    fs = block.sampling_rate_hz
    n = x.shape[1]
    if n == 0:
        raise ModelError("empty window")
    for name, lo, hi in bands:
        if hi > fs / 2:
            raise ModelError(f"band {name} [{lo}, {hi}] exceeds Nyquist {fs / 2}")
    taper = np.hanning(n)
    spectrum = np.fft.rfft(x * taper, axis=1)
    # one-sided power spectral density
    psd = (np.abs(spectrum) ** 2) / (fs * (taper**2).sum())
    psd[:, 1:-1] *= 2.0
    freqs = np.fft.rfftfreq(n, d=1.0 / fs)
    feats = np.empty((x.shape[0], len(bands)), dtype=np.float64)
    for j, (_, lo, hi) in enumerate(bands):
        mask = (freqs >= lo) & (freqs < hi)
        if not mask.any():
            feats[:, j] = np.log(LOG_POWER_FLOOR)
        else:
            feats[:, j] = np.log(psd[:, mask].mean(axis=1) + LOG_POWER_FLOOR)
    return feats.reshape(-1)


def feature_matrix(windows: list[WindowSegment], bands=DEFAULT_BANDS) -> np.ndarray:
    return np.stack([bandpower_features(w, bands) for w in windows])


# ---------------------------------------------------------------------------
# MLP internals


def _init_params(sizes: list[int], rng: np.random.Generator):
    """Seeded He-style scaled-uniform initialization, zero biases."""
    params = []
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        bound = np.sqrt(6.0 / fan_in)
        w = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        params.append((w, np.zeros(fan_out)))
    return params


def _forward(params, x):
    """Returns (activations per layer, softmax probabilities)."""
    acts = [x]
    h = x
    for i, (w, b) in enumerate(params):
        z = h @ w + b
        h = z if i == len(params) - 1 else np.maximum(z, 0.0)
        acts.append(h)
    logits = acts[-1]
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    probs = e / e.sum(axis=1, keepdims=True)
    return acts, probs


def _smoothed_targets(y, n_classes, smoothing):
    t = np.full((len(y), n_classes), smoothing / n_classes)
    t[np.arange(len(y)), y] += 1.0 - smoothing
    return t


def _loss(probs, targets):
    return float(-(targets * np.log(probs + 1e-300)).sum(axis=1).mean())


def _backward(params, acts, probs, targets):
    """Gradients of the mean smoothed cross-entropy w.r.t. every parameter."""
    n = probs.shape[0]
    grads = [None] * len(params)
    delta = (probs - targets) / n  # (n, K)
    for i in range(len(params) - 1, -1, -1):
        w, _ = params[i]
        a_prev = acts[i]
        grads[i] = (a_prev.T @ delta, delta.sum(axis=0))
        if i > 0:
            delta = (delta @ w.T) * (acts[i] > 0)
    return grads


class _Adam:
    def __init__(self, params, tspec: TrainingSpec):
        self.t = 0
        self.tspec = tspec
        self.m = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]
        self.v = [(np.zeros_like(w), np.zeros_like(b)) for w, b in params]

    def step(self, params, grads):
        ts = self.tspec
        self.t += 1
        bc1 = 1.0 - ts.adam_beta1**self.t
        bc2 = 1.0 - ts.adam_beta2**self.t
        new_params = []
        for i, ((w, b), (gw, gb)) in enumerate(zip(params, grads)):
            mw, mb = self.m[i]
            vw, vb = self.v[i]
            mw = ts.adam_beta1 * mw + (1 - ts.adam_beta1) * gw
            mb = ts.adam_beta1 * mb + (1 - ts.adam_beta1) * gb
            vw = ts.adam_beta2 * vw + (1 - ts.adam_beta2) * gw**2
            vb = ts.adam_beta2 * vb + (1 - ts.adam_beta2) * gb**2
            self.m[i] = (mw, mb)
            self.v[i] = (vw, vb)
            w = w - ts.learning_rate * (mw / bc1) / (np.sqrt(vw / bc2) + ts.adam_eps)
            b = b - ts.learning_rate * (mb / bc1) / (np.sqrt(vb / bc2) + ts.adam_eps)
            new_params.append((w, b))
        return new_params


def fit_mlp_on_features(
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    n_classes: int,
    spec: ClassifierSpec,
    tspec: TrainingSpec,
) -> TrainedModel:
    """Mini-batch Adam on smoothed cross-entropy; restores the parameters of
    the epoch with the best validation accuracy (first occurrence on ties).

    Features are z-scored with train-split statistics only.
    """
    if x_train.shape[1] != x_val.shape[1]:
        raise ModelError(
            f"feature dimension mismatch: train {x_train.shape[1]} vs val {x_val.shape[1]}"
        )
    mean = x_train.mean(axis=0)
    std = x_train.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    xt = (x_train - mean) / std
    xv = (x_val - mean) / std

    rng = np.random.default_rng(tspec.seed)
    sizes = [xt.shape[1], *spec.hidden_sizes, n_classes]
    params = _init_params(sizes, rng)
    opt = _Adam(params, tspec)

    best_acc = -1.0
    best_epoch = 0
    best_params = [(w.copy(), b.copy()) for w, b in params]
    history: list[float] = []
    n = len(xt)
    for epoch in range(tspec.epochs):
        order = rng.permutation(n)
        for start in range(0, n, tspec.batch_size):
            idx = order[start : start + tspec.batch_size]
            acts, probs = _forward(params, xt[idx])
            targets = _smoothed_targets(y_train[idx], n_classes, tspec.label_smoothing)
            grads = _backward(params, acts, probs, targets)
            params = opt.step(params, grads)
        _, val_probs = _forward(params, xv)
        val_pred = np.argmax(val_probs, axis=1)
        acc = float((val_pred == y_val).mean())
        history.append(acc)
        if acc > best_acc:
            best_acc = acc
            best_epoch = epoch
            best_params = [(w.copy(), b.copy()) for w, b in params]

    return TrainedModel(
        spec=spec,
        n_classes=n_classes,
        params=best_params,
        feature_mean=mean,
        feature_std=std,
        val_accuracy_history=tuple(history),
        selected_epoch=best_epoch,
        seed=tspec.seed,
    )


# ---------------------------------------------------------------------------
# public fit / predict


def _labels_of(windows: list[WindowSegment]) -> np.ndarray:
    labels = []
    for w in windows:
        if w.label is None:
            raise ModelError(f"window {w.trial_key}#{w.window_index} has no label")
        labels.append(w.label.index)
    return np.asarray(labels, dtype=np.int64)


def fit(
    spec: ClassifierSpec,
    train: list[WindowSegment],
    val: list[WindowSegment],
    tspec: TrainingSpec,
    n_classes: int,
) -> TrainedModel:
    if not train or not val:
        raise ModelError("train and validation sets must be nonempty")
    y_train = _labels_of(train)
    y_val = _labels_of(val)
    if spec.kind == "majority_baseline":
        # baselines fit on train+val combined
        counts = np.bincount(np.concatenate([y_train, y_val]), minlength=n_classes)
        return TrainedModel(
            spec=spec, n_classes=n_classes, modal_class=int(np.argmax(counts)), seed=tspec.seed
        )
    if spec.kind == "distribution_baseline":
        counts = np.bincount(np.concatenate([y_train, y_val]), minlength=n_classes)
        return TrainedModel(
            spec=spec,
            n_classes=n_classes,
            class_probs=counts / counts.sum(),
            seed=tspec.seed,
        )
    if spec.kind == "bandpower_mlp":
        x_train = feature_matrix(train, spec.bands)
        x_val = feature_matrix(val, spec.bands)
        return fit_mlp_on_features(x_train, y_train, x_val, y_val, n_classes, spec, tspec)
    raise ModelError(f"cannot fit classifier kind {spec.kind!r} directly")


def predict_features(model: TrainedModel, x: np.ndarray) -> PredictionBatch:
    if model.params is None:
        raise ModelError("model has no MLP parameters")
    if x.shape[1] != model.params[0][0].shape[0]:
        raise ModelError(
            f"feature dimension {x.shape[1]} != fitted {model.params[0][0].shape[0]}"
        )
    xs = (x - model.feature_mean) / model.feature_std
    _, probs = _forward(model.params, xs)
    return PredictionBatch(classes=np.argmax(probs, axis=1), probabilities=probs)


def predict(model: TrainedModel, windows: list[WindowSegment]) -> PredictionBatch:
    n = len(windows)
    if model.spec.kind == "majority_baseline":
        probs = np.zeros((n, model.n_classes))
        probs[:, model.modal_class] = 1.0
        return PredictionBatch(
            classes=np.full(n, model.modal_class, dtype=np.int64), probabilities=probs
        )
    if model.spec.kind == "distribution_baseline":
        rng = np.random.default_rng(model.seed)
        classes = rng.choice(model.n_classes, size=n, p=model.class_probs)
        probs = np.tile(model.class_probs, (n, 1))
        return PredictionBatch(classes=classes.astype(np.int64), probabilities=probs)
    if model.spec.kind == "bandpower_mlp":
        return predict_features(model, feature_matrix(windows, model.spec.bands))
    raise ModelError(f"cannot predict with classifier kind {model.spec.kind!r}")


# ---------------------------------------------------------------------------
# gradient checking


def gradient_check(
    spec: ClassifierSpec,
    x: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    tspec: TrainingSpec | None = None,
    step: float = 1e-5,
) -> float:
    """Max relative error between analytic gradients and central finite
    differences over every parameter of a freshly initialized network."""
    if len(x) > 8:
        raise ModelError("gradient check is meant for small batches (<= 8)")
    tspec = tspec or TrainingSpec()
    rng = np.random.default_rng(tspec.seed)
    sizes = [x.shape[1], *spec.hidden_sizes, n_classes]
    params = _init_params(sizes, rng)
    targets = _smoothed_targets(y, n_classes, tspec.label_smoothing)

    acts, probs = _forward(params, x)
    grads = _backward(params, acts, probs, targets)

    def loss_with(params_flat):
        rebuilt = []
        pos = 0
        for w, b in params:
            rebuilt_w = params_flat[pos : pos + w.size].reshape(w.shape)
            pos += w.size
            rebuilt_b = params_flat[pos : pos + b.size]
            pos += b.size
            rebuilt.append((rebuilt_w, rebuilt_b))
        _, p = _forward(rebuilt, x)
        return _loss(p, targets)

    flat = np.concatenate([np.concatenate([w.ravel(), b]) for w, b in params])
    flat_grad = np.concatenate([np.concatenate([gw.ravel(), gb]) for gw, gb in grads])
    max_rel = 0.0
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] = flat[i] + step
        up = loss_with(bumped)
        bumped[i] = flat[i] - step
        down = loss_with(bumped)
        numeric = (up - down) / (2 * step)
        denom = max(abs(numeric), abs(flat_grad[i]), 1e-8)
        max_rel = max(max_rel, abs(numeric - flat_grad[i]) / denom)
    return max_rel


# ---------------------------------------------------------------------------
# parameter export


def export_params(model: TrainedModel, path) -> None:
    """Flat little-endian float32 sidecar, layer-ordered (W then b per layer)."""
    if model.params is None:
        raise ModelError("model has no parameters to export")
    flat = np.concatenate([np.concatenate([w.ravel(), b]) for w, b in model.params])
    flat.astype("<f4").tofile(path)


def classifier_spec_to_dict(spec: ClassifierSpec) -> dict:
    return {
        "kind": spec.kind,
        "hidden_sizes": list(spec.hidden_sizes),
        "bands": [[name, lo, hi] for name, lo, hi in spec.bands],
        "external_id": spec.external_id,
    }


def classifier_spec_from_dict(d: dict) -> ClassifierSpec:
    return ClassifierSpec(
        kind=d["kind"],
        hidden_sizes=tuple(d.get("hidden_sizes") or (64, 64)),
        bands=tuple((b[0], float(b[1]), float(b[2])) for b in d.get("bands") or DEFAULT_BANDS),
        external_id=d.get("external_id"),
    )


def training_spec_to_dict(t: TrainingSpec) -> dict:
    return {
        "epochs": t.epochs,
        "batch_size": t.batch_size,
        "learning_rate": t.learning_rate,
        "label_smoothing": t.label_smoothing,
        "adam_beta1": t.adam_beta1,
        "adam_beta2": t.adam_beta2,
        "adam_eps": t.adam_eps,
        "seed": t.seed,
    }


def training_spec_from_dict(d: dict) -> TrainingSpec:
    return TrainingSpec(
        epochs=int(d.get("epochs", 200)),
        batch_size=int(d.get("batch_size", 32)),
        learning_rate=float(d.get("learning_rate", 0.001)),
        label_smoothing=float(d.get("label_smoothing", 0.01)),
        adam_beta1=float(d.get("adam_beta1", 0.9)),
        adam_beta2=float(d.get("adam_beta2", 0.999)),
        adam_eps=float(d.get("adam_eps", 1e-8)),
        seed=int(d.get("seed", 0)),
    )
