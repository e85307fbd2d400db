"""Pure-numpy reference implementations of the hot inner loops.

Kept semantically identical to the numba kernels; the test suite asserts
element-wise agreement between the two backends.
"""

import numpy as np


def sosfilt(sos, x, zi):
    """Cascaded biquads, direct form II transposed.

    sos: (n_sections, 6) [b0 b1 b2 a0 a1 a2] with a0 == 1
    x:   (n_channels, n_samples)
    zi:  (n_sections, n_channels, 2) initial state (not mutated)
    """
    x = np.asarray(x, dtype=np.float64)
    n_sections = sos.shape[0]
    y = x.copy()
    w = zi.astype(np.float64).copy()
    for s in range(n_sections):
        b0, b1, b2, _, a1, a2 = sos[s]
        w0 = w[s, :, 0].copy()
        w1 = w[s, :, 1].copy()
        out = np.empty_like(y)
        for n in range(y.shape[1]):
            xn = y[:, n]
            yn = b0 * xn + w0
            w0, w1 = b1 * xn - a1 * yn + w1, b2 * xn - a2 * yn
            out[:, n] = yn
        y = out
    return y


def polyphase_resample(x, h, up, down, offset, n_out):
    """Rational resample: zero-stuff by `up`, FIR filter `h`, keep every
    `down`-th sample starting at `offset` (group-delay compensation).

    x: (n_channels, n_in); h: (n_taps,); returns (n_channels, n_out).
    """
    x = np.asarray(x, dtype=np.float64)
    n_ch, n_in = x.shape
    up_len = n_in * up
    y = np.empty((n_ch, n_out), dtype=np.float64)
    for c in range(n_ch):
        stuffed = np.zeros(up_len, dtype=np.float64)
        stuffed[::up] = x[c]
        full = np.convolve(stuffed, h)
        y[c] = full[offset : offset + n_out * down : down]
    return y
