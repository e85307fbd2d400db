"""Numba-compiled versions of the hot inner loops."""

import numpy as np
from numba import njit


@njit(cache=True)
def sosfilt(sos, x, zi):
    n_sections = sos.shape[0]
    n_ch, n = x.shape
    y = x.copy()
    for s in range(n_sections):
        b0 = sos[s, 0]
        b1 = sos[s, 1]
        b2 = sos[s, 2]
        a1 = sos[s, 4]
        a2 = sos[s, 5]
        for c in range(n_ch):
            w0 = zi[s, c, 0]
            w1 = zi[s, c, 1]
            for i in range(n):
                xn = y[c, i]
                yn = b0 * xn + w0
                w0 = b1 * xn - a1 * yn + w1
                w1 = b2 * xn - a2 * yn
                y[c, i] = yn
    return y


@njit(cache=True)
def polyphase_resample(x, h, up, down, offset, n_out):
    n_ch, n_in = x.shape
    n_taps = h.shape[0]
    y = np.zeros((n_ch, n_out), dtype=np.float64)
    for c in range(n_ch):
        for k in range(n_out):
            t = offset + k * down  # index into the upsampled/filtered stream
            m_lo = (t - n_taps + 1 + up - 1) // up
            if m_lo < 0:
                m_lo = 0
            m_hi = t // up
            if m_hi > n_in - 1:
                m_hi = n_in - 1
            acc = 0.0
            for m in range(m_lo, m_hi + 1):
                acc += h[t - m * up] * x[c, m]
            y[c, k] = acc
    return y
