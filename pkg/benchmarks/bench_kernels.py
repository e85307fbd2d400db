"""Benchmark the numba kernels against the pure-numpy fallback.

Times the two hot paths (cascaded SOS filtering and polyphase resampling) on
realistic workloads and prints a speedup table.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from eegeval import _kernels
from eegeval.dataset import SignalBlock
from eegeval.transform import notch_filter, resample


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = {
        "sosfilt 32ch x 60s @512Hz": (
            lambda b: notch_filter(b, 50.0, 30.0),
            SignalBlock(
                tuple(f"c{i}" for i in range(32)), rng.normal(size=(32, 512 * 60)), 512.0
            ),
        ),
        "sosfilt 62ch x 60s @200Hz": (
            lambda b: notch_filter(b, 50.0, 30.0),
            SignalBlock(
                tuple(f"c{i}" for i in range(62)), rng.normal(size=(62, 200 * 60)), 200.0
            ),
        ),
        "resample 32ch 512->128Hz": (
            lambda b: resample(b, 128.0),
            SignalBlock(
                tuple(f"c{i}" for i in range(32)), rng.normal(size=(32, 512 * 60)), 512.0
            ),
        ),
        "resample 62ch 200->128Hz": (
            lambda b: resample(b, 128.0),
            SignalBlock(
                tuple(f"c{i}" for i in range(62)), rng.normal(size=(62, 200 * 60)), 200.0
            ),
        ),
    }

    if "numba" not in _kernels._BACKENDS:
        raise SystemExit("numba backend unavailable; nothing to compare")

    # warm up JIT compilation outside the timed region
    _kernels.set_backend("numba")
    for fn, block in cases.values():
        fn(block)

    print(f"{'case':<28} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, (fn, block) in cases.items():
        _kernels.set_backend("numpy")
        t_numpy = _time(lambda: fn(block), args.repeats)
        _kernels.set_backend("numba")
        t_numba = _time(lambda: fn(block), args.repeats)
        ref = fn(block).data
        _kernels.set_backend("numpy")
        np.testing.assert_allclose(fn(block).data, ref, rtol=1e-12, atol=1e-12)
        print(f"{name:<28} {t_numpy * 1e3:8.1f}ms {t_numba * 1e3:8.1f}ms {t_numpy / t_numba:7.1f}x")


if __name__ == "__main__":
    main()
