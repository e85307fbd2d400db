"""Acceptance suite: one test per release criterion, each printing an
explicit PASS/FAIL line so the gate is auditable from plain pytest output.

The deep-network result tables this harness exists to host depend on
license-gated datasets and external architectures, so acceptance rests on
property suites, oracle equivalence, and one conditional dataset check that
is skipped with a notice when the licensed data is absent.
"""

import math
import os
from fractions import Fraction

import numpy as np
import pytest

from conftest import steady_rms, tone_block
from eegeval.dataset import SignalBlock
from eegeval.labeling import binarize
from eegeval.metrics import confusion_matrix as cm_impl
from eegeval.metrics import accuracy as accuracy_impl
from eegeval.metrics import kappa as kappa_impl
from eegeval.metrics import mcc as mcc_impl
from eegeval.metrics import precision_recall_f1
from eegeval.models import ClassifierSpec, TrainingSpec, gradient_check
from eegeval.runner import config_from_dict, execute_run
from eegeval.splitting import SplitScheme, materialize_fold, plan_folds, verify_disjoint
from eegeval.synthetic import SyntheticSpec, generate_synthetic
from eegeval.transform import (
    WindowSegment,
    bandpass_butterworth,
    notch_filter,
    resample,
    window_count,
)

DEAP_ROOT = os.environ.get("EEGEVAL_DEAP_ROOT", "")


@pytest.fixture()
def announce(request, capsys):
    """Print one PASS/FAIL line per criterion, visible even under capture."""
    outcome = {"skipped": False}
    yield outcome
    if outcome["skipped"]:
        return
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    with capsys.disabled():
        print(f"[acceptance] {status}: {request.node.name}")


def _check(outcome, condition, message):
    assert condition, message


class TestAcceptance:
    def test_dsp_attenuation_suite(self, announce):
        # 50 Hz notch: stop the line tone to <= 1% RMS, pass 10 Hz within 1%
        tone50 = tone_block(50, 256.0, 10.0)
        out = notch_filter(tone50, 50.0, 30.0)
        residual = steady_rms(out.data, 256.0) / steady_rms(tone50.data, 256.0)
        _check(announce, residual <= 0.01, f"notch residual {residual:.4f} > 1%")

        tone10 = tone_block(10, 256.0, 10.0)
        out = notch_filter(tone10, 50.0, 30.0)
        passband = steady_rms(out.data, 256.0) / steady_rms(tone10.data, 256.0)
        _check(announce, abs(passband - 1.0) <= 0.01, f"notch passband {passband:.4f}")

        # band-pass [0.3, 45] order 4: >= 20 dB down at 90 Hz, 10 Hz within 2%
        tone90 = tone_block(90, 256.0, 10.0)
        out = bandpass_butterworth(tone90, 0.3, 45.0, 4)
        atten = 20 * math.log10(steady_rms(tone90.data, 256.0) / steady_rms(out.data, 256.0))
        _check(announce, atten >= 20.0, f"90 Hz attenuation {atten:.1f} dB < 20")

        out = bandpass_butterworth(tone10, 0.3, 45.0, 4)
        passband = steady_rms(out.data, 256.0) / steady_rms(tone10.data, 256.0)
        _check(announce, abs(passband - 1.0) <= 0.02, f"band-pass passband {passband:.4f}")

    def test_resampler_fidelity(self, announce):
        for fs_in in (512.0, 256.0, 200.0):
            tone = tone_block(10, fs_in, 10.0)
            out = resample(tone, 128.0)
            frac = Fraction(128) / Fraction(int(fs_in))
            _check(
                announce,
                out.n_samples == int(tone.n_samples * frac),
                f"{fs_in}: wrong output length",
            )
            # quadrature demodulation at exactly 10 Hz: a frequency shift
            # would decorrelate and shrink the measured amplitude
            y = out.data[0][128:-128]
            t = (np.arange(out.n_samples) / 128.0)[128:-128]
            amplitude = 2 * abs((y * np.exp(-2j * np.pi * 10.0 * t)).mean())
            _check(
                announce,
                abs(amplitude - 1.0) <= 0.01,
                f"{fs_in}->128: amplitude {amplitude:.4f} off by > 1%",
            )

    def test_window_count_closed_form(self, announce):
        rng = np.random.default_rng(2026)
        for _ in range(1000):
            n = int(rng.integers(8, 20000))
            win = int(rng.integers(1, n + 1))
            step = int(rng.integers(1, win + 1))
            brute = sum(1 for start in range(0, n, step) if start + win <= n)
            closed = window_count(n, win, step)
            _check(announce, closed == brute, f"count mismatch at n={n} win={win} step={step}")
            _check(announce, closed == (n - win) // step + 1, "closed form drifted")

    def test_split_correctness(self, announce, tmp_path):
        from test_splitting import make_manifest, make_segment

        # 15 subjects -> exactly 15 LOSO folds
        folds = plan_folds(make_manifest(15), SplitScheme(kind="loso"))
        _check(announce, len(folds) == 15, f"expected 15 folds, got {len(folds)}")

        # property test over 200 random manifests
        rng = np.random.default_rng(77)
        kinds = ("loso", "lkso", "loto", "lkto", "leave_one_session_out")
        checked = 0
        while checked < 200:
            kind = kinds[int(rng.integers(len(kinds)))]
            n_subj = int(rng.integers(2, 9))
            n_sess = int(rng.integers(2, 4)) if kind == "leave_one_session_out" else 1
            n_trials = int(rng.integers(2, 10))
            manifest = make_manifest(n_subj, n_sessions=n_sess, n_trials=n_trials)
            try:
                folds = plan_folds(manifest, SplitScheme(kind=kind, k=int(rng.integers(1, 3))))
            except Exception:
                continue
            checked += 1
            report = verify_disjoint(folds)
            _check(announce, report.ok, f"{kind}: {report.violations}")
            # no-window-leakage invariant: many windows per trial, and no
            # parent trial may appear on both sides of any fold
            windows = [
                make_segment(s.subject_id, sess.session_id, t.trial_id, i)
                for s in manifest.subjects
                for sess in s.sessions
                for t in sess.trials
                for i in range(3)
            ]
            for fold in folds:
                train, test = materialize_fold(fold, windows)
                train_trials = {(w.subject_id, w.session_id, w.trial_id) for w in train}
                test_trials = {(w.subject_id, w.session_id, w.trial_id) for w in test}
                _check(
                    announce,
                    not (train_trials & test_trials),
                    f"{kind}: trial on both sides of fold {fold.fold_index}",
                )

    def test_metric_oracle_equivalence(self, announce):
        def brute(yt, yp, k):
            n = len(yt)
            acc = sum(1 for a, b in zip(yt, yp) if a == b) / n
            prec, rec, f1 = [], [], []
            for c in range(k):
                tp = sum(1 for a, b in zip(yt, yp) if a == c and b == c)
                fp = sum(1 for a, b in zip(yt, yp) if a != c and b == c)
                fn = sum(1 for a, b in zip(yt, yp) if a == c and b != c)
                p = tp / (tp + fp) if tp + fp else 0.0
                r = tp / (tp + fn) if tp + fn else 0.0
                prec.append(p)
                rec.append(r)
                f1.append(2 * p * r / (p + r) if p + r else 0.0)
            # multiclass MCC straight from its covariance definition
            s = n
            c_corr = sum(1 for a, b in zip(yt, yp) if a == b)
            pk = [sum(1 for b in yp if b == c) for c in range(k)]
            tk = [sum(1 for a in yt if a == c) for c in range(k)]
            num = c_corr * s - sum(p * t for p, t in zip(pk, tk))
            den = math.sqrt(s * s - sum(p * p for p in pk)) * math.sqrt(
                s * s - sum(t * t for t in tk)
            )
            mcc_v = num / den if den else 0.0
            p_o = acc
            p_e = sum(p * t for p, t in zip(pk, tk)) / (s * s)
            kappa_v = (p_o - p_e) / (1 - p_e) if p_e != 1.0 else 0.0
            return acc, prec, rec, f1, mcc_v, kappa_v

        rng = np.random.default_rng(31)
        for _ in range(1000):
            k = int(rng.integers(2, 6))
            n = int(rng.integers(k, 150))
            yt = rng.integers(0, k, size=n).tolist()
            yp = rng.integers(0, k, size=n).tolist()
            cm = cm_impl(yt, yp, k)
            p, r, f1, _, _ = precision_recall_f1(cm)
            b_acc, b_p, b_r, b_f1, b_mcc, b_kappa = brute(yt, yp, k)
            _check(announce, abs(accuracy_impl(cm) - b_acc) < 1e-12, "accuracy mismatch")
            _check(announce, np.abs(p - b_p).max() < 1e-12, "precision mismatch")
            _check(announce, np.abs(r - b_r).max() < 1e-12, "recall mismatch")
            _check(announce, np.abs(f1 - b_f1).max() < 1e-12, "f1 mismatch")
            _check(announce, abs(mcc_impl(cm) - b_mcc) < 1e-12, "mcc mismatch")
            _check(announce, abs(kappa_impl(cm) - b_kappa) < 1e-12, "kappa mismatch")
            if k == 2:
                tn, fp_, fn_, tp = cm[0, 0], cm[0, 1], cm[1, 0], cm[1, 1]
                den = math.sqrt((tp + fp_) * (tp + fn_) * (tn + fp_) * (tn + fn_))
                if den:
                    four_term = (tp * tn - fp_ * fn_) / den
                    _check(
                        announce,
                        abs(mcc_impl(cm) - four_term) < 1e-12,
                        "binary MCC != four-term formula",
                    )

    def test_trivial_baseline_identities(self, announce, tmp_path):
        from eegeval.models import fit, predict
        from test_models import make_windows

        rng = np.random.default_rng(4)
        # majority: fold accuracy == modal-class frequency in the test labels
        for trial in range(20):
            k = int(rng.integers(2, 5))
            train = make_windows(rng.integers(0, k, size=30).tolist(), seed=trial)
            val = make_windows(rng.integers(0, k, size=10).tolist(), seed=trial + 100)
            test_labels = rng.integers(0, k, size=40).tolist()
            test = make_windows(test_labels, seed=trial + 200)
            model = fit(ClassifierSpec(kind="majority_baseline"), train, val, TrainingSpec(), k)
            pred = predict(model, test)
            acc = float((pred.classes == np.array(test_labels)).mean())
            modal_freq = test_labels.count(model.modal_class) / len(test_labels)
            _check(announce, acc == modal_freq, "majority accuracy != modal test frequency")

        # distribution: accuracy over 10k draws within 2 points of
        # sum_c p_train(c) * p_test(c)
        k = 3
        train_labels = [0] * 50 + [1] * 30 + [2] * 20
        train = make_windows(train_labels, seed=0)
        val = make_windows([0, 1, 2], seed=1)
        test_labels = np.tile([0, 0, 0, 0, 0, 1, 1, 1, 2, 2], 1000)
        test = make_windows(test_labels.tolist(), seed=2)
        model = fit(ClassifierSpec(kind="distribution_baseline"), train, val, TrainingSpec(), k)
        pred = predict(model, test)
        acc = float((pred.classes == test_labels).mean())
        p_test = np.bincount(test_labels, minlength=k) / len(test_labels)
        expected = float(np.dot(model.class_probs, p_test))
        _check(
            announce,
            abs(acc - expected) <= 0.02,
            f"distribution baseline accuracy {acc:.4f} vs expected {expected:.4f}",
        )

    def test_mlp_numerical_correctness(self, announce, tmp_path):
        # analytic gradients against central finite differences
        rng = np.random.default_rng(0)
        x = rng.normal(size=(6, 12))
        y = rng.integers(0, 3, size=6)
        err = gradient_check(ClassifierSpec(kind="bandpower_mlp", hidden_sizes=(10, 6)), x, y, 3)
        _check(announce, err <= 1e-4, f"gradient check error {err:.2e} > 1e-4")

        # full 15-subject LOSO on the planted alpha-effect dataset
        base = {
            "seed": 0,
            "dataset": {"synthetic": {"seed": 0, "class_effect": [1.0, 3.0]}},
            "transform": {"steps": [{"kind": "window", "size_s": 4.0, "overlap_s": 0.0}]},
            "split": {"kind": "loso"},
        }
        mlp_doc = dict(base, output_dir=str(tmp_path / "mlp"), model={"kind": "bandpower_mlp"})
        maj_doc = dict(
            base, output_dir=str(tmp_path / "maj"), model={"kind": "majority_baseline"}
        )
        mlp_art = execute_run(config_from_dict(mlp_doc))
        maj_art = execute_run(config_from_dict(maj_doc))
        mlp_acc = mlp_art.aggregate.mean["accuracy"]
        maj_acc = maj_art.aggregate.mean["accuracy"]
        _check(announce, mlp_art.aggregate.n_folds == 15, "expected 15 LOSO folds")
        _check(announce, mlp_acc >= 0.90, f"MLP LOSO accuracy {mlp_acc:.3f} < 0.90")
        _check(
            announce,
            mlp_acc - maj_acc >= 0.20,
            f"MLP lead over majority {mlp_acc - maj_acc:.3f} < 0.20",
        )

    def test_end_to_end_determinism(self, announce, tmp_path):
        import json

        doc = {
            "seed": 9,
            "dataset": {
                "synthetic": {
                    "n_subjects": 4,
                    "n_trials_per_session": 6,
                    "n_channels": 4,
                    "trial_length_s": 20.0,
                    "seed": 3,
                }
            },
            "transform": {"steps": [{"kind": "window", "size_s": 4.0, "overlap_s": 0.0}]},
            "model": {"kind": "bandpower_mlp", "hidden_sizes": [16]},
            "training": {"epochs": 10},
        }
        arts = []
        for name in ("a", "b"):
            arts.append(execute_run(config_from_dict(dict(doc, output_dir=str(tmp_path / name)))))
        a, b = arts
        _check(
            announce,
            a.predictions_path.read_bytes() == b.predictions_path.read_bytes(),
            "predictions CSVs differ between identical runs",
        )
        sa = json.loads(a.summary_path.read_text())
        sb = json.loads(b.summary_path.read_text())
        sa.pop("timings_s")
        sb.pop("timings_s")
        _check(announce, sa == sb, "summaries differ (timings excluded)")

    def test_deap_class_ratios(self, announce, capsys):
        if not DEAP_ROOT:
            announce["skipped"] = True
            with capsys.disabled():
                print(
                    "[acceptance] SKIP: test_deap_class_ratios — DEAP dataset "
                    "not available (set EEGEVAL_DEAP_ROOT to a converted "
                    "DEAP manifest root to enable the class-ratio check)"
                )
            pytest.skip("DEAP dataset not available")

        from eegeval.dataset import load_manifest

        manifest = load_manifest(os.path.join(DEAP_ROOT, "manifest.json"))
        ratings = {"valence": [], "arousal": []}
        for _, _, trial in manifest.iter_trials():
            for dim in ratings:
                ratings[dim].append(trial.label.dimensional[dim])
        expectations = {
            5.0: {"valence": 0.565, "arousal": 0.589},
            4.0: {"valence": 0.722, "arousal": 0.7125},
        }
        for threshold, dims in expectations.items():
            for dim, expected_high in dims.items():
                labels = [binarize(r, threshold).index for r in ratings[dim]]
                high = sum(labels) / len(labels)
                _check(
                    announce,
                    abs(high - expected_high) <= 0.005,
                    f"{dim}@{threshold}: high ratio {high:.4f} vs {expected_high:.4f}",
                )
