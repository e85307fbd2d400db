import numpy as np
import pytest

from eegeval.dataset import SignalBlock


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, "rep_" + rep.when, rep)


def tone_block(freq_hz, fs, duration_s, n_channels=1, amplitude=1.0):
    n = int(fs * duration_s)
    t = np.arange(n) / fs
    data = np.tile(amplitude * np.sin(2 * np.pi * freq_hz * t), (n_channels, 1))
    return SignalBlock(tuple(f"c{i}" for i in range(n_channels)), data, fs)


def steady_rms(x, fs, skip_s=1.0):
    """RMS over the steady-state interior, excluding edge-transient samples."""
    skip = int(skip_s * fs)
    core = x[..., skip:-skip] if skip > 0 else x
    return float(np.sqrt((core**2).mean()))


@pytest.fixture(scope="session")
def small_synthetic(tmp_path_factory):
    """4 subjects x 6 trials, 4 channels, 20 s @ 128 Hz, strong alpha effect."""
    from eegeval.synthetic import SyntheticSpec, generate_synthetic

    spec = SyntheticSpec(
        n_subjects=4,
        n_trials_per_session=6,
        n_channels=4,
        trial_length_s=20.0,
        class_effect=(1.0, 3.0),
        seed=3,
    )
    out = tmp_path_factory.mktemp("synth_small")
    manifest = generate_synthetic(spec, out)
    return spec, manifest
