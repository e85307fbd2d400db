"""Backend dispatch for the hot numeric kernels.

The numba backend is used by default; set ``EEGEVAL_NO_NUMBA=1`` (or call
``set_backend("numpy")``) to force the pure-numpy fallback.  Both backends
implement identical contracts and agree element-wise.
"""

import os

from . import _numpy

_BACKENDS = {"numpy": _numpy}
try:
    from . import _numba

    _BACKENDS["numba"] = _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    pass

_active = "numpy"
if "numba" in _BACKENDS and os.environ.get("EEGEVAL_NO_NUMBA", "") not in ("1", "true", "yes"):
    _active = "numba"


def set_backend(name: str) -> None:
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(_BACKENDS)}")
    global _active
    _active = name


def get_backend() -> str:
    return _active


def sosfilt(sos, x, zi):
    return _BACKENDS[_active].sosfilt(sos, x, zi)


def polyphase_resample(x, h, up, down, offset, n_out):
    return _BACKENDS[_active].polyphase_resample(x, h, up, down, offset, n_out)
