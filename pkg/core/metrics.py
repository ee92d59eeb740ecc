"""
Trajectory metrics: settling time, transient peak, chattering index and RMS error.

All metrics are computed on the recorded (post-stride) samples.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from .exceptions import EmptyWindowError
from .models import MetricReport, Trajectory

logger = logging.getLogger(__name__)

DEFAULT_BAND_FRACTION = 0.02

Window = Tuple[float, float]


def settling_time(traj: Trajectory, est_col: str, truth_col: str,
                  band_fraction: float = DEFAULT_BAND_FRACTION) -> Optional[float]:
    """
    Earliest recorded time after which |est - truth| <= band_fraction * sup|truth|
    holds at every later recorded sample, or None if the error never stays inside.
    """
    if not 0 < band_fraction < 1:
        raise ValueError("band_fraction must lie in (0, 1)")
    est = traj.column(est_col)
    truth = traj.column(truth_col)
    band = band_fraction * float(np.max(np.abs(truth)))
    outside = np.flatnonzero(np.abs(est - truth) > band)
    if outside.size == 0:
        return float(traj.times[0])
    last = int(outside[-1])
    if last == len(traj) - 1:
        return None
    return float(traj.times[last + 1])


def peak_abs(traj: Trajectory, col: str) -> Tuple[float, float]:
    """Largest |value| over the recorded samples and the first time it is attained."""
    values = np.abs(traj.column(col))
    if values.size == 0:
        raise EmptyWindowError(f"column '{col}' is empty")
    idx = int(np.argmax(values))
    return float(values[idx]), float(traj.times[idx])


def _window_values(traj: Trajectory, col: str, window: Window) -> np.ndarray:
    t_from, t_to = window
    if t_to < t_from:
        raise ValueError(f"window end {t_to} precedes its start {t_from}")
    mask = traj.window_mask(t_from, t_to)
    values = traj.column(col)[mask]
    if values.size == 0:
        raise EmptyWindowError(f"window [{t_from}, {t_to}] contains no samples")
    return values


def total_variation(values: np.ndarray) -> float:
    """Discrete total variation sum |x_{j+1} - x_j|."""
    return float(np.sum(np.abs(np.diff(values))))


def chattering_index(traj: Trajectory, est_col: str, truth_col: str, window: Window) -> float:
    """(TV(est) - TV(truth)) per second of window; positive values mean excess oscillation."""
    est = _window_values(traj, est_col, window)
    truth = _window_values(traj, truth_col, window)
    length = window[1] - window[0]
    if length <= 0 or est.size < 2:
        raise EmptyWindowError(f"window {window} is too short for a variation measure")
    return (total_variation(est) - total_variation(truth)) / length


def rms_error(traj: Trajectory, est_col: str, truth_col: str, window: Window) -> float:
    """Root-mean-square of est - truth over the window."""
    err = _window_values(traj, est_col, window) - _window_values(traj, truth_col, window)
    return float(np.sqrt(np.mean(err * err)))


def evaluate(traj: Trajectory, est_col: str, truth_col: str,
             band_fraction: float = DEFAULT_BAND_FRACTION,
             steady_window: Window = (0.5, 2.0),
             chatter_window: Optional[Window] = None) -> MetricReport:
    """Full MetricReport of one estimate column against its truth column."""
    chatter_window = chatter_window or steady_window
    peak, peak_t = peak_abs(traj, est_col)
    report = MetricReport(
        settling_time=settling_time(traj, est_col, truth_col, band_fraction),
        peak_abs=peak,
        peak_time=peak_t,
        chattering_index=chattering_index(traj, est_col, truth_col, chatter_window),
        rms_error=rms_error(traj, est_col, truth_col, steady_window),
        steady_window=tuple(steady_window),
        chatter_window=tuple(chatter_window),
        record_period=traj.record_period,
    )
    logger.debug(f"Metrics {est_col} vs {truth_col}: {report}")
    return report
