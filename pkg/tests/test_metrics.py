import math

import numpy as np
import pytest

from core.exceptions import EmptyWindowError, MissingColumnError
from core.metrics import chattering_index, evaluate, peak_abs, rms_error, settling_time, total_variation
from core.models import Trajectory

DT = 1e-3


def _traj(est, truth, dt=DT):
    est = np.asarray(est, dtype=float)
    return Trajectory(times=np.arange(est.size) * dt, columns={"est": est, "truth": np.asarray(truth, dtype=float)},
                      record_period=dt)


def test_settling_time_at_first_sample_when_always_inside():
    t = np.arange(1001) * DT
    traj = _traj(np.sin(t), np.sin(t))
    assert settling_time(traj, "est", "truth") == 0.0


def test_settling_time_after_last_excursion():
    t = np.arange(1001) * DT
    truth = np.cos(t)
    est = truth.copy()
    est[:200] += 1.0
    est[350] += 0.5
    assert settling_time(_traj(est, truth), "est", "truth") == pytest.approx(351 * DT)


def test_settling_time_none_when_final_sample_outside():
    truth = np.ones(100)
    est = truth.copy()
    est[-1] = 2.0
    assert settling_time(_traj(est, truth), "est", "truth") is None


def test_settling_band_scales_with_truth():
    truth = 10.0 * np.ones(50)
    est = truth + 0.15
    assert settling_time(_traj(est, truth), "est", "truth", band_fraction=0.02) == 0.0
    assert settling_time(_traj(est, truth), "est", "truth", band_fraction=0.01) is None
    with pytest.raises(ValueError):
        settling_time(_traj(est, truth), "est", "truth", band_fraction=1.5)


def test_peak_abs_reports_first_occurrence():
    est = np.array([0.0, -3.0, 1.0, 3.0, 2.0])
    peak, when = peak_abs(_traj(est, np.zeros(5)), "est")
    assert peak == 3.0
    assert when == pytest.approx(DT)


def test_peak_abs_ignores_sign():
    t = np.arange(1001) * DT
    est = np.sin(7.0 * t) + 0.3 * np.cos(2.0 * t)
    traj = Trajectory(times=t, columns={"est": est, "neg": -est}, record_period=DT)
    assert peak_abs(traj, "neg")[0] == peak_abs(traj, "est")[0]
    assert peak_abs(traj, "neg")[1] == peak_abs(traj, "est")[1]


def test_total_variation():
    assert total_variation(np.array([0.0, 1.0, -1.0, 2.0])) == 6.0
    assert total_variation(np.array([5.0])) == 0.0


def test_chattering_index_of_square_wave():
    amp = 0.01
    n = 2001
    truth = np.zeros(n)
    est = amp * np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    idx = chattering_index(_traj(est, truth), "est", "truth", (0.0, (n - 1) * DT))
    assert idx == pytest.approx(2.0 * amp / DT, rel=1e-9)


def test_chattering_index_is_zero_for_exact_tracking():
    t = np.arange(2001) * DT
    traj = _traj(np.sin(5 * t), np.sin(5 * t))
    assert chattering_index(traj, "est", "truth", (0.5, 2.0)) == 0.0


def test_rms_error():
    t = np.arange(100_001) * 1e-5
    traj = _traj(np.sin(2 * math.pi * t), np.zeros_like(t), dt=1e-5)
    assert rms_error(traj, "est", "truth", (0.0, 1.0)) == pytest.approx(1 / math.sqrt(2), rel=1e-4)
    flat = _traj(np.full(10, 0.25), np.zeros(10))
    assert rms_error(flat, "est", "truth", (0.0, 1.0)) == pytest.approx(0.25)


def test_metrics_follow_shift_and_scale():
    t = np.arange(2001) * DT
    truth = np.sin(3 * t)
    est = truth + 0.2 * np.exp(-10 * t) * np.cos(200 * t)
    base = evaluate(_traj(est, truth), "est", "truth", steady_window=(0.5, 2.0))

    shifted = evaluate(_traj(est + 4.0, truth + 4.0), "est", "truth", steady_window=(0.5, 2.0))
    assert shifted.rms_error == pytest.approx(base.rms_error, rel=1e-9)
    assert shifted.chattering_index == pytest.approx(base.chattering_index, abs=1e-9)

    scaled = evaluate(_traj(3.0 * est, 3.0 * truth), "est", "truth", steady_window=(0.5, 2.0))
    assert scaled.settling_time == base.settling_time
    assert scaled.rms_error == pytest.approx(3.0 * base.rms_error, rel=1e-9)
    assert scaled.chattering_index == pytest.approx(3.0 * base.chattering_index, rel=1e-9)
    assert scaled.peak_abs == pytest.approx(3.0 * base.peak_abs, rel=1e-12)


def test_evaluate_defaults_chatter_window_to_steady_window():
    t = np.arange(1001) * DT
    report = evaluate(_traj(np.sin(t), np.sin(t)), "est", "truth", steady_window=(0.25, 1.0))
    assert report.chatter_window == (0.25, 1.0)
    assert report.record_period == DT


def test_empty_window_raises():
    traj = _traj(np.zeros(100), np.zeros(100))
    with pytest.raises(EmptyWindowError):
        rms_error(traj, "est", "truth", (5.0, 6.0))
    with pytest.raises(EmptyWindowError):
        chattering_index(traj, "est", "truth", (0.05, 0.05))
    with pytest.raises(ValueError):
        rms_error(traj, "est", "truth", (0.08, 0.02))


def test_missing_column_raises():
    traj = _traj(np.zeros(10), np.zeros(10))
    with pytest.raises(MissingColumnError, match="sd.sigma9"):
        settling_time(traj, "sd.sigma9", "truth")
