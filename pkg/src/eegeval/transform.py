"""Preprocessing pipeline: crop, channel drop, notch/band-pass filtering,
rational resampling, normalization, and windowing.

Filters are designed with scipy (Butterworth second-order sections, biquad
notch) but applied through this package's own zero-phase kernels, so the
filtering path stays independently testable against tone oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import signal as sps

from . import _kernels
from .dataset import SignalBlock
from .errors import TransformError

MAX_RESAMPLE_FACTOR = 1024
KAISER_BETA = 8.6
TAPS_PER_PHASE = 24


# ---------------------------------------------------------------------------
# step specs


@dataclass(frozen=True)
class CropSpec:
    pre_s: float = 0.0
    post_s: float = 0.0

    def __post_init__(self):
        if self.pre_s < 0 or self.post_s < 0:
            raise TransformError("crop durations must be >= 0")


@dataclass(frozen=True)
class ChannelDropSpec:
    names: tuple[str, ...]


@dataclass(frozen=True)
class NotchSpec:
    f0_hz: float
    q: float = 30.0

    def __post_init__(self):
        if self.f0_hz <= 0 or self.q <= 0:
            raise TransformError("notch frequency and q must be > 0")


@dataclass(frozen=True)
class BandpassSpec:
    lo_hz: float
    hi_hz: float
    order: int = 4

    def __post_init__(self):
        if not (0 < self.lo_hz < self.hi_hz):
            raise TransformError(f"invalid band edges [{self.lo_hz}, {self.hi_hz}]")
        if self.order < 2 or self.order % 2 != 0:
            raise TransformError("band-pass order must be a positive even integer")


@dataclass(frozen=True)
class ResampleSpec:
    fs_out_hz: float

    def __post_init__(self):
        if self.fs_out_hz <= 0:
            raise TransformError("output sampling rate must be > 0")


@dataclass(frozen=True)
class NormalizeSpec:
    method: str = "zscore"  # "zscore" | "minmax"

    def __post_init__(self):
        if self.method not in ("zscore", "minmax"):
            raise TransformError(f"unknown normalization method {self.method!r}")


@dataclass(frozen=True)
class WindowSpec:
    size_s: float
    overlap_s: float = 0.0

    def __post_init__(self):
        if self.size_s <= 0 or not (0 <= self.overlap_s < self.size_s):
            raise TransformError("need 0 <= overlap_s < size_s and size_s > 0")


Step = CropSpec | ChannelDropSpec | NotchSpec | BandpassSpec | ResampleSpec | NormalizeSpec | WindowSpec

_STEP_KINDS = {
    CropSpec: "crop",
    ChannelDropSpec: "drop_channels",
    NotchSpec: "notch",
    BandpassSpec: "bandpass",
    ResampleSpec: "resample",
    NormalizeSpec: "normalize",
    WindowSpec: "window",
}


@dataclass(frozen=True)
class TransformSpec:
    steps: tuple[Step, ...] = ()

    def __post_init__(self):
        window_positions = [i for i, s in enumerate(self.steps) if isinstance(s, WindowSpec)]
        if len(window_positions) > 1:
            raise TransformError("at most one window step allowed")
        if window_positions and window_positions[0] != len(self.steps) - 1:
            raise TransformError("the window step must come last")


@dataclass(frozen=True)
class WindowSegment:
    subject_id: str
    session_id: str
    trial_id: str
    window_index: int
    signal: SignalBlock
    label: "object" = None  # labeling.ClassLabel, inherited from the trial

    @property
    def trial_key(self) -> str:
        return f"{self.subject_id}/{self.session_id}/{self.trial_id}"


# ---------------------------------------------------------------------------
# basic steps


def crop(block: SignalBlock, pre_s: float, post_s: float) -> SignalBlock:
    """Remove round(pre_s*fs) leading and round(post_s*fs) trailing samples."""
    fs = block.sampling_rate_hz
    head = round(pre_s * fs)
    tail = round(post_s * fs)
    if head + tail >= block.n_samples:
        raise TransformError(
            f"crop of {head + tail} samples >= trial length {block.n_samples}"
        )
    data = block.data[:, head : block.n_samples - tail]
    return SignalBlock(block.channels, data, fs)


def drop_channels(block: SignalBlock, names) -> SignalBlock:
    names = list(names)
    unknown = [n for n in names if n not in block.channels]
    if unknown:
        raise TransformError(f"cannot drop unknown channels: {unknown}")
    keep = [i for i, ch in enumerate(block.channels) if ch not in names]
    return SignalBlock(
        tuple(block.channels[i] for i in keep), block.data[keep], block.sampling_rate_hz
    )


def normalize(block: SignalBlock, method: str = "zscore") -> SignalBlock:
    """Per-channel z-score or [0,1] min-max; constant channels map to zeros."""
    x = block.data
    if method == "zscore":
        mean = x.mean(axis=1, keepdims=True)
        sd = x.std(axis=1, keepdims=True)
        out = np.where(sd > 0, (x - mean) / np.where(sd > 0, sd, 1.0), 0.0)
    elif method == "minmax":
        lo = x.min(axis=1, keepdims=True)
        hi = x.max(axis=1, keepdims=True)
        span = hi - lo
        out = np.where(span > 0, (x - lo) / np.where(span > 0, span, 1.0), 0.0)
    else:
        raise TransformError(f"unknown normalization method {method!r}")
    return SignalBlock(block.channels, out, block.sampling_rate_hz)


# ---------------------------------------------------------------------------
# zero-phase IIR filtering


def _sos_pad_length(sos: np.ndarray, n_samples: int) -> int:
    # Pad with 3x the length over which the slowest pole's envelope decays to
    # 0.1%, so forward-backward edge transients stay out of the kept samples.
    worst = 0.0
    for section in sos:
        roots = np.roots([1.0, section[4], section[5]])
        if roots.size:
            worst = max(worst, float(np.max(np.abs(roots))))
    if 0.0 < worst < 1.0:
        n_sig = int(math.ceil(math.log(1e-3) / math.log(worst)))
    else:
        n_sig = 2 * sos.shape[0] + 1
    padlen = max(3 * n_sig, 3 * (2 * sos.shape[0] + 1))
    return min(padlen, n_samples - 1)


def _sosfiltfilt(sos: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Forward-backward SOS filtering with odd-reflection padding and
    steady-state initial conditions; output length equals input length."""
    sos = np.ascontiguousarray(sos, dtype=np.float64)
    x = np.ascontiguousarray(x, dtype=np.float64)
    n = x.shape[1]
    padlen = _sos_pad_length(sos, n)
    left = 2.0 * x[:, :1] - x[:, padlen:0:-1]
    right = 2.0 * x[:, -1:] - x[:, -2 : -padlen - 2 : -1]
    ext = np.concatenate([left, x, right], axis=1)
    zi = sps.sosfilt_zi(sos)  # (n_sections, 2), steady-state for unit step
    zi_fwd = np.ascontiguousarray(zi[:, None, :] * ext[None, :, :1])
    y = _kernels.sosfilt(sos, ext, zi_fwd)
    y = np.ascontiguousarray(y[:, ::-1])
    zi_bwd = np.ascontiguousarray(zi[:, None, :] * y[None, :, :1])
    y = _kernels.sosfilt(sos, y, zi_bwd)
    y = y[:, ::-1]
    return np.ascontiguousarray(y[:, padlen : padlen + n])


def notch_filter(block: SignalBlock, f0_hz: float, q: float = 30.0) -> SignalBlock:
    """Second-order IIR notch at f0_hz, applied zero-phase."""
    fs = block.sampling_rate_hz
    if not (0 < f0_hz < fs / 2):
        raise TransformError(f"notch frequency {f0_hz} Hz not below Nyquist {fs / 2} Hz")
    b, a = sps.iirnotch(f0_hz, q, fs=fs)
    sos = np.concatenate([b, a])[None, :]
    return SignalBlock(block.channels, _sosfiltfilt(sos, block.data), fs)


def bandpass_butterworth(
    block: SignalBlock, lo_hz: float, hi_hz: float, order: int = 4
) -> SignalBlock:
    """Butterworth band-pass (cascaded second-order sections, `order` poles per
    band edge), applied zero-phase."""
    fs = block.sampling_rate_hz
    if not (0 < lo_hz < hi_hz < fs / 2):
        raise TransformError(
            f"band edges [{lo_hz}, {hi_hz}] must satisfy 0 < lo < hi < Nyquist {fs / 2}"
        )
    sos = sps.butter(order, [lo_hz, hi_hz], btype="bandpass", fs=fs, output="sos")
    return SignalBlock(block.channels, _sosfiltfilt(sos, block.data), fs)


# ---------------------------------------------------------------------------
# resampling


def resample_ratio(fs_in: float, fs_out: float) -> tuple[int, int]:
    """Reduced rational ratio L/M = fs_out/fs_in, both factors <= 1024."""
    ratio = Fraction(fs_out) / Fraction(fs_in)
    up, down = ratio.numerator, ratio.denominator
    if up > MAX_RESAMPLE_FACTOR or down > MAX_RESAMPLE_FACTOR:
        raise TransformError(
            f"rate ratio {fs_out}/{fs_in} reduces to {up}/{down}; "
            f"factors must be <= {MAX_RESAMPLE_FACTOR}"
        )
    return up, down


def _design_resample_filter(up: int, down: int, fs_in: float, fs_out: float) -> np.ndarray:
    n_phases = max(up, down)
    n_taps = TAPS_PER_PHASE * n_phases
    cutoff_hz = 0.9 * min(fs_in, fs_out) / 2.0
    fs_up = fs_in * up
    fc = cutoff_hz / fs_up  # cycles per sample at the upsampled rate
    center = (n_taps - 1) / 2.0
    i = np.arange(n_taps)
    h = 2.0 * fc * np.sinc(2.0 * fc * (i - center)) * np.kaiser(n_taps, KAISER_BETA)
    return h * (up / h.sum())  # unit passband gain after zero-stuffing


def resample(block: SignalBlock, fs_out_hz: float) -> SignalBlock:
    """Polyphase rational resampling with a Kaiser-windowed-sinc anti-alias
    low-pass at 0.9 x min(fs_in, fs_out)/2; output length floor(n*L/M)."""
    fs_in = block.sampling_rate_hz
    up, down = resample_ratio(fs_in, fs_out_hz)
    if up == 1 and down == 1:
        return block
    h = _design_resample_filter(up, down, fs_in, fs_out_hz)
    n_out = (block.n_samples * up) // down
    offset = (len(h) - 1) // 2
    data = _kernels.polyphase_resample(
        np.ascontiguousarray(block.data, dtype=np.float64), h, up, down, offset, n_out
    )
    return SignalBlock(block.channels, data, fs_out_hz)


# ---------------------------------------------------------------------------
# windowing


def window_count(n_samples: int, win_samples: int, step_samples: int) -> int:
    """Closed form: floor((n - size)/step) + 1, in samples."""
    if win_samples > n_samples:
        raise TransformError(f"window ({win_samples}) longer than trial ({n_samples})")
    return (n_samples - win_samples) // step_samples + 1


def window(
    block: SignalBlock,
    size_s: float,
    overlap_s: float = 0.0,
    *,
    subject_id: str = "",
    session_id: str = "",
    trial_id: str = "",
    label=None,
) -> list[WindowSegment]:
    """Segment a trial into fixed-length windows; the trailing remainder
    shorter than one window is discarded.  Segments inherit the trial label."""
    if not (0 <= overlap_s < size_s):
        raise TransformError("need 0 <= overlap_s < size_s")
    fs = block.sampling_rate_hz
    win_n = round(size_s * fs)
    step_n = round((size_s - overlap_s) * fs)
    if step_n < 1:
        raise TransformError("window step rounds to zero samples")
    k = window_count(block.n_samples, win_n, step_n)
    segments = []
    for i in range(k):
        start = i * step_n
        seg = SignalBlock(block.channels, block.data[:, start : start + win_n], fs)
        segments.append(
            WindowSegment(
                subject_id=subject_id,
                session_id=session_id,
                trial_id=trial_id,
                window_index=i,
                signal=seg,
                label=label,
            )
        )
    return segments


# ---------------------------------------------------------------------------
# pipeline


def apply_pipeline(
    block: SignalBlock,
    spec: TransformSpec,
    *,
    subject_id: str = "",
    session_id: str = "",
    trial_id: str = "",
    label=None,
) -> list[WindowSegment]:
    """Apply steps in declared order; emits windows if a window step is present,
    otherwise a single whole-trial segment.  Errors carry the step index."""
    out = block
    windowed: list[WindowSegment] | None = None
    for i, step in enumerate(spec.steps):
        kind = _STEP_KINDS[type(step)]
        try:
            if isinstance(step, CropSpec):
                out = crop(out, step.pre_s, step.post_s)
            elif isinstance(step, ChannelDropSpec):
                out = drop_channels(out, step.names)
            elif isinstance(step, NotchSpec):
                out = notch_filter(out, step.f0_hz, step.q)
            elif isinstance(step, BandpassSpec):
                out = bandpass_butterworth(out, step.lo_hz, step.hi_hz, step.order)
            elif isinstance(step, ResampleSpec):
                out = resample(out, step.fs_out_hz)
            elif isinstance(step, NormalizeSpec):
                out = normalize(out, step.method)
            elif isinstance(step, WindowSpec):
                windowed = window(
                    out,
                    step.size_s,
                    step.overlap_s,
                    subject_id=subject_id,
                    session_id=session_id,
                    trial_id=trial_id,
                    label=label,
                )
        except TransformError as exc:
            raise TransformError(f"step {i} ({kind}): {exc}") from exc
    if windowed is not None:
        return windowed
    return [
        WindowSegment(
            subject_id=subject_id,
            session_id=session_id,
            trial_id=trial_id,
            window_index=0,
            signal=out,
            label=label,
        )
    ]


# ---------------------------------------------------------------------------
# serialization


def step_to_dict(step: Step) -> dict:
    kind = _STEP_KINDS[type(step)]
    if isinstance(step, CropSpec):
        return {"kind": kind, "pre_s": step.pre_s, "post_s": step.post_s}
    if isinstance(step, ChannelDropSpec):
        return {"kind": kind, "names": list(step.names)}
    if isinstance(step, NotchSpec):
        return {"kind": kind, "f0_hz": step.f0_hz, "q": step.q}
    if isinstance(step, BandpassSpec):
        return {"kind": kind, "lo_hz": step.lo_hz, "hi_hz": step.hi_hz, "order": step.order}
    if isinstance(step, ResampleSpec):
        return {"kind": kind, "fs_out_hz": step.fs_out_hz}
    if isinstance(step, NormalizeSpec):
        return {"kind": kind, "method": step.method}
    if isinstance(step, WindowSpec):
        return {"kind": kind, "size_s": step.size_s, "overlap_s": step.overlap_s}
    raise TransformError(f"unknown step type {type(step)}")


def step_from_dict(d: dict) -> Step:
    kind = d.get("kind")
    try:
        if kind == "crop":
            return CropSpec(pre_s=float(d.get("pre_s", 0.0)), post_s=float(d.get("post_s", 0.0)))
        if kind == "drop_channels":
            return ChannelDropSpec(names=tuple(d["names"]))
        if kind == "notch":
            return NotchSpec(f0_hz=float(d["f0_hz"]), q=float(d.get("q", 30.0)))
        if kind == "bandpass":
            return BandpassSpec(
                lo_hz=float(d["lo_hz"]), hi_hz=float(d["hi_hz"]), order=int(d.get("order", 4))
            )
        if kind == "resample":
            return ResampleSpec(fs_out_hz=float(d["fs_out_hz"]))
        if kind == "normalize":
            return NormalizeSpec(method=d.get("method", "zscore"))
        if kind == "window":
            return WindowSpec(size_s=float(d["size_s"]), overlap_s=float(d.get("overlap_s", 0.0)))
    except KeyError as exc:
        raise TransformError(f"step {kind!r} missing field {exc}") from exc
    raise TransformError(f"unknown step kind {kind!r}")


def spec_to_dicts(spec: TransformSpec) -> list[dict]:
    return [step_to_dict(s) for s in spec.steps]


def spec_from_dicts(steps: list[dict]) -> TransformSpec:
    return TransformSpec(steps=tuple(step_from_dict(d) for d in steps))
