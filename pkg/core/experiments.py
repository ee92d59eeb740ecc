"""
Experiment orchestration: simulate a configured differentiator, score its
estimates, and write trajectory / metrics / map CSV files and SVG plots.
"""

import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional, Sequence, Tuple

from utils.config_loader import ConfigLoader
from utils.csv_handler import CSVProcessor
from utils.validators import InputValidator

from . import baselines, differentiators
from .convergence_analysis import (
    crossing_interval, crossing_profile, default_oracle_dt, map_slope_at_origin,
    next_crossing_error, oracle_crossing,
)
from .exceptions import ConfigError
from .integrators import ProgressCallback, simulate
from .metrics import evaluate
from .models import ErrorMapParams, ExperimentConfig, OdeSystem, Recorder, Trajectory
from .signals import HeldNoiseInput, signal_source

logger = logging.getLogger(__name__)

METRIC_FIELDS = (
    "experiment", "method", "order", "estimate", "truth",
    "settling_time", "peak_abs", "peak_time", "chattering_index", "rms_error",
    "steady_from", "steady_to", "chatter_from", "chatter_to", "record_period",
)

MAP_FIELDS = (
    "rho", "k", "e_in", "t_delta", "e_out", "slope_at_origin",
    "e_out_oracle", "t_delta_oracle", "oracle_rel_error", "tolerance",
)

ORACLE_TOLERANCE = 1e-4

_ESTIMATE_PATTERN = re.compile(r"^(?P<prefix>[A-Za-z][\w-]*)\.(?:sigma|z)(?P<order>\d+)$")

Window = Tuple[float, float]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    trajectory: Trajectory
    rows: List[dict]
    trajectory_path: Optional[str] = None
    metrics_path: Optional[str] = None
    plot_path: Optional[str] = None


@dataclass
class MapAnalysisResult:
    rows: List[dict]
    path: Optional[str] = None
    profile_paths: List[str] = field(default_factory=list)
    plot_path: Optional[str] = None

    @property
    def max_oracle_error(self) -> Optional[float]:
        errors = [row["oracle_rel_error"] for row in self.rows if row.get("oracle_rel_error") is not None]
        return max(errors) if errors else None


@dataclass
class CompareResult:
    rows: List[dict]
    table_path: Optional[str] = None
    trajectory_paths: List[str] = field(default_factory=list)
    plot_paths: List[str] = field(default_factory=list)
    steady_window: Window = (0.0, 0.0)
    chatter_window: Window = (0.0, 0.0)


# =============================================================================
# Single experiment
# =============================================================================

def estimate_columns(cfg: ExperimentConfig) -> Tuple[str, ...]:
    if cfg.method == "sd-cascade":
        return differentiators.estimate_columns(len(cfg.sd_stages))
    return baselines.estimate_columns(cfg.method)


def build_system(cfg: ExperimentConfig) -> OdeSystem:
    """Differentiator driven by the configured signal, plus held noise when requested."""
    source = signal_source(cfg.signal)
    if cfg.noise.kind != "none" and cfg.noise.magnitude > 0:
        source = HeldNoiseInput(source, cfg.noise, cfg.plan.t_start, cfg.plan.dt, cfg.plan.n_steps)

    if cfg.method == "sd-cascade":
        return differentiators.build_sd_system(source, cfg.sd_stages, len(cfg.sd_stages), x0=cfg.initial_state)
    baseline = cfg.hgo if cfg.method == "hgo" else cfg.hosm
    return baselines.build_baseline_system(source, baseline, x0=cfg.initial_state)


def run_simulation(cfg: ExperimentConfig, progress: Optional[ProgressCallback] = None) -> Trajectory:
    """Recorded estimates sigma_i / z_i together with true.d1 .. true.dn."""
    system = build_system(cfg)
    recorder = Recorder.for_labels(
        system, estimate_columns(cfg), truth=cfg.signal, truth_orders=range(1, cfg.n_orders + 1),
    )
    return simulate(system, None, cfg.plan, cfg.integrator, recorder, progress)


def pair_columns(names: Sequence[str]) -> List[Tuple[int, str, str]]:
    """(order, estimate, truth) for every `<prefix>.sigma<i>` / `<prefix>.z<i>` with a `true.d<i>` column."""
    pairs = []
    for name in names:
        match = _ESTIMATE_PATTERN.match(name)
        if not match:
            continue
        order = int(match.group("order"))
        truth = f"true.d{order}"
        if order >= 1 and truth in names:
            pairs.append((order, name, truth))
    return pairs


def metric_rows(traj: Trajectory, experiment: str, band_fraction: float,
                steady_window: Window, chatter_window: Window) -> List[dict]:
    """One row per (differentiator, derivative order) pair found in the trajectory."""
    rows = []
    for order, est, truth in pair_columns(traj.names):
        scores = evaluate(traj, est, truth, band_fraction, steady_window, chatter_window)
        rows.append({
            "experiment": experiment,
            "method": est.split(".", 1)[0],
            "order": order,
            "estimate": est,
            "truth": truth,
            "settling_time": scores.settling_time,
            "peak_abs": scores.peak_abs,
            "peak_time": scores.peak_time,
            "chattering_index": scores.chattering_index,
            "rms_error": scores.rms_error,
            "steady_from": scores.steady_window[0],
            "steady_to": scores.steady_window[1],
            "chatter_from": scores.chatter_window[0],
            "chatter_to": scores.chatter_window[1],
            "record_period": scores.record_period,
        })
    return rows


def _file_stem(name: str) -> str:
    return InputValidator.sanitize_filename(name)


def run_experiment(cfg: ExperimentConfig, output_dir: Optional[str] = None,
                   progress: Optional[ProgressCallback] = None, plot: bool = False) -> ExperimentResult:
    """
    Simulate `cfg` and write `<name>.trajectory.csv` and `<name>.metrics.csv`
    (and `<name>.svg` when plot is set) into output_dir, defaulting to cfg.output.
    """
    output_dir = output_dir or cfg.output
    traj = run_simulation(cfg, progress)
    rows = metric_rows(traj, cfg.name, cfg.band_fraction, cfg.steady_window, cfg.chatter_window)

    stem = os.path.join(output_dir, _file_stem(cfg.name))
    header = {"config": ConfigLoader.to_dict(cfg), "record_period": traj.record_period}
    result = ExperimentResult(
        config=cfg,
        trajectory=traj,
        rows=rows,
        trajectory_path=CSVProcessor.write_trajectory(f"{stem}.trajectory.csv", traj, header),
        metrics_path=CSVProcessor.write_table(f"{stem}.metrics.csv", rows, METRIC_FIELDS, header),
    )
    if plot:
        from utils.plotting import plot_estimates
        result.plot_path = plot_estimates(
            traj, [r["estimate"] for r in rows], [r["truth"] for r in rows], f"{stem}.svg", title=cfg.name,
        )
    return result


# =============================================================================
# Return-map analysis
# =============================================================================

def _relative_error(value: float, reference: float) -> float:
    if value == reference:
        return 0.0
    return abs(value - reference) / abs(reference)


def run_map_analysis(rho_grid: Sequence[float], k_grid: Sequence[float], e_grid: Sequence[float],
                     with_oracle: bool = False, output_path: Optional[str] = None,
                     oracle_resolution: float = 1e-4, profile_crossings: int = 0,
                     plot: bool = False,
                     progress: Optional[Callable[[int, int], None]] = None) -> MapAnalysisResult:
    """
    Tabulate the closed-form return map over rho x k x e_sigma.

    With with_oracle, each point is also integrated by brute force and the
    larger relative deviation of (t_delta, e_out) is reported next to the
    tolerance. profile_crossings > 0 additionally writes, per (rho, k), the
    closed-form trajectories over that many crossings starting from the
    largest |e| of the grid.
    """
    if not rho_grid or not k_grid or not e_grid:
        raise ConfigError("grid", "rho, k and e grids must be nonempty")
    for name, grid in (("rho", rho_grid), ("k", k_grid)):
        if any(not v > 0 for v in grid):
            raise ConfigError(name, "grid values must be > 0")

    total = len(rho_grid) * len(k_grid) * len(e_grid)
    rows: List[dict] = []
    for rho in rho_grid:
        for k in k_grid:
            p = ErrorMapParams.from_rho(k, rho)
            slope = map_slope_at_origin(p)
            for e in e_grid:
                row = {
                    "rho": rho,
                    "k": k,
                    "e_in": e,
                    "t_delta": crossing_interval(e, p),
                    "e_out": next_crossing_error(e, p),
                    "slope_at_origin": slope,
                }
                if with_oracle:
                    oracle = oracle_crossing(0.0, e, p, default_oracle_dt(e, p, oracle_resolution))
                    row["e_out_oracle"] = oracle.e_sigma_out
                    row["t_delta_oracle"] = oracle.t_delta
                    row["oracle_rel_error"] = max(_relative_error(oracle.e_sigma_out, row["e_out"]),
                                                  _relative_error(oracle.t_delta, row["t_delta"]))
                    row["tolerance"] = ORACLE_TOLERANCE
                rows.append(row)
                if progress is not None:
                    progress(len(rows), total)

    header = {"map": {
        "rho_grid": list(rho_grid), "k_grid": list(k_grid), "e_grid": list(e_grid),
        "with_oracle": with_oracle, "oracle_resolution": oracle_resolution,
    }}
    result = MapAnalysisResult(rows=rows)
    if output_path:
        result.path = CSVProcessor.write_table(output_path, rows, MAP_FIELDS, header)
        stem = output_path[:-4] if output_path.endswith(".csv") else output_path

        if profile_crossings > 0:
            e0 = max(e_grid, key=abs)
            for rho in rho_grid:
                for k in k_grid:
                    profile = crossing_profile(e0, ErrorMapParams.from_rho(k, rho), profile_crossings)
                    path = f"{stem}.profile.rho{rho:g}.k{k:g}.csv"
                    profile_header = {"profile": {"rho": rho, "k": k, "e0": e0, "crossings": profile_crossings}}
                    result.profile_paths.append(CSVProcessor.write_trajectory(path, profile, profile_header))

        if plot:
            from utils.plotting import plot_return_map
            result.plot_path = plot_return_map(rows, f"{stem}.svg", title="e_sigma return map")

    if with_oracle:
        logger.info(f" Map analysis: {len(rows)} points, max oracle deviation {result.max_oracle_error:.3e}")
    else:
        logger.info(f" Map analysis: {len(rows)} points")
    return result


# =============================================================================
# Comparison
# =============================================================================

def common_windows(cfgs: Sequence[ExperimentConfig]) -> Tuple[Window, Window]:
    """
    Intersection of the members' steady and chatter windows, limited to the
    shortest horizon. An empty intersection falls back to the second half of
    the shared horizon.
    """
    t_start = max(c.plan.t_start for c in cfgs)
    t_end = min(c.plan.t_end for c in cfgs)

    def intersect(windows: Sequence[Window]) -> Window:
        w_from = max(max(w[0] for w in windows), t_start)
        w_to = min(min(w[1] for w in windows), t_end)
        if w_to <= w_from:
            return t_start + 0.5 * (t_end - t_start), t_end
        return w_from, w_to

    return intersect([c.steady_window for c in cfgs]), intersect([c.chatter_window for c in cfgs])


def _member_labels(cfgs: Sequence[ExperimentConfig]) -> List[str]:
    names = [c.name for c in cfgs]
    return [name if names.count(name) == 1 else f"{name}#{i + 1}" for i, name in enumerate(names)]


def compare(cfgs: Sequence[ExperimentConfig], output_dir: str, jobs: int = 1,
            plot: bool = True, progress: Optional[ProgressCallback] = None) -> CompareResult:
    """
    Run several experiments on a shared signal and tabulate their metrics on
    common windows, with one overlay plot per derivative order.

    With jobs > 1 members are simulated in separate processes; outputs are
    written afterwards from this process, in member order.
    """
    if len(cfgs) < 2:
        raise ConfigError("presets", "compare needs at least two experiments")
    reference = cfgs[0].signal.terms
    for cfg in cfgs[1:]:
        if cfg.signal.terms != reference:
            raise ConfigError("signal", f"'{cfg.name}' uses a different signal than '{cfgs[0].name}'")

    steady, chatter = common_windows(cfgs)
    labels = _member_labels(cfgs)
    logger.info(f" Comparing {', '.join(labels)} on steady={steady} chatter={chatter}")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cfgs))) as pool:
            trajectories = list(pool.map(run_simulation, cfgs))
    else:
        trajectories = [run_simulation(cfg, progress) for cfg in cfgs]

    result = CompareResult(rows=[], steady_window=steady, chatter_window=chatter)
    for label, cfg, traj in zip(labels, cfgs, trajectories):
        result.rows.extend(metric_rows(traj, label, cfg.band_fraction, steady, chatter))
        member_header = {"config": ConfigLoader.to_dict(cfg), "record_period": traj.record_period}
        path = os.path.join(output_dir, f"compare.{_file_stem(label)}.trajectory.csv")
        result.trajectory_paths.append(CSVProcessor.write_trajectory(path, traj, member_header))

    header = {
        "members": [ConfigLoader.to_dict(replace(cfg, steady_window=steady, chatter_window=chatter))
                    for cfg in cfgs],
        "steady_window": list(steady),
        "chatter_window": list(chatter),
    }
    result.table_path = CSVProcessor.write_table(
        os.path.join(output_dir, "compare.metrics.csv"), result.rows, METRIC_FIELDS, header,
    )

    if plot:
        from utils.plotting import plot_overlay
        members = dict(zip(labels, trajectories))
        n_orders = min(cfg.n_orders for cfg in cfgs)
        for order in range(1, n_orders + 1):
            estimates = {label: estimate_columns(cfg)[order - 1] for label, cfg in zip(labels, cfgs)}
            path = os.path.join(output_dir, f"compare.order{order}.svg")
            result.plot_paths.append(plot_overlay(members, estimates, f"true.d{order}", path,
                                                  title=f"derivative order {order}"))
    return result


# =============================================================================
# Report
# =============================================================================

def report(csv_path: str, output_path: Optional[str] = None, band_fraction: Optional[float] = None,
           steady_window: Optional[Window] = None, chatter_window: Optional[Window] = None) -> ExperimentResult:
    """
    Recompute the metric table of a trajectory CSV.

    Band fraction and windows default to the ones recorded in the file's
    config header, else to 2% and the last three quarters of the run.
    """
    traj, header = CSVProcessor.read_trajectory(csv_path)
    if len(traj) < 2:
        raise ConfigError("trajectory", f"{csv_path} holds fewer than two records")

    cfg = None
    if isinstance(header.get("config"), dict):
        cfg = ConfigLoader.from_dict(header["config"])

    t0, t1 = float(traj.times[0]), float(traj.times[-1])
    default_window = (t0 + 0.25 * (t1 - t0), t1)
    if band_fraction is None:
        band_fraction = cfg.band_fraction if cfg else 0.02
    steady_window = steady_window or (cfg.steady_window if cfg else default_window)
    chatter_window = chatter_window or (cfg.chatter_window if cfg else steady_window)

    base = os.path.basename(csv_path)
    experiment = cfg.name if cfg else base.split(".", 1)[0]
    rows = metric_rows(traj, experiment, band_fraction, steady_window, chatter_window)
    if not rows:
        raise ConfigError("trajectory", f"{csv_path} has no estimate columns paired with true.d<i>")

    if output_path is None:
        stem = csv_path[:-len(".trajectory.csv")] if csv_path.endswith(".trajectory.csv") \
            else os.path.splitext(csv_path)[0]
        output_path = f"{stem}.report.csv"
    report_header = {
        "source": base,
        "band_fraction": band_fraction,
        "steady_window": list(steady_window),
        "chatter_window": list(chatter_window),
    }
    if cfg is not None:
        report_header["config"] = header["config"]
    path = CSVProcessor.write_table(output_path, rows, METRIC_FIELDS, report_header)
    return ExperimentResult(config=cfg, trajectory=traj, rows=rows, metrics_path=path)
