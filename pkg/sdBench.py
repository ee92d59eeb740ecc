#!/usr/bin/env python3
"""
SD Bench: simulation bench for the switching differentiator.

Runs the switching-differentiator cascade and its high-gain observer and
HOSM baselines on analytic test signals, scores the derivative estimates,
and tabulates the closed-form convergence map of the switching error
dynamics against brute-force integration.

Usage:
    sdBench run sd-paper-1 [--dt 1e-5] [--plot]
    sdBench map --rho 0.01,1,100 --k 1,1000 --oracle
    sdBench compare sd-paper-1 hgo-paper [--jobs 2]
    sdBench report results/sd-paper-1.trajectory.csv
"""

import argparse
import logging
import os
import signal
import sys
from typing import List, Optional

# Configure logging
logging.basicConfig(
    format='%(asctime)s UTC %(levelname)s: %(message)s',
    level=logging.INFO,
    datefmt='%Y-%m-%d %H:%M:%S'
)
logger = logging.getLogger(__name__)

DEBUG_MODE = os.environ.get("SDBENCH_DEBUG", "").lower() in ["true", "1", "yes"]
if DEBUG_MODE:
    logging.getLogger().setLevel(logging.DEBUG)

from utils.dependency_validator import validate_dependencies_with_helpful_exit  # noqa: E402

validate_dependencies_with_helpful_exit()

from core.exceptions import ConfigError, SdBenchError  # noqa: E402
from core import experiments  # noqa: E402
from utils.config_loader import ConfigLoader  # noqa: E402
from utils.user_interface import ProgressBar, msg  # noqa: E402
from utils.validators import InputValidator  # noqa: E402

__version__ = "1.0.0"


# =============================================================================
# Configuration
# =============================================================================

class SDBenchConfig:
    """Configuration constants for SD Bench."""

    OUTPUT_DIR = "results"
    OUTPUT_DIR_ENV = "SDBENCH_OUTPUT_DIR"

    # map subcommand defaults
    DEFAULT_RHO_GRID = "0.01,1,100"
    DEFAULT_K_GRID = "1,1000"
    DEFAULT_E_GRID = "symlog:1e-3:10:25"
    ORACLE_RESOLUTION = 1e-4
    MAP_FILENAME = "map.csv"

    METRIC_COLUMNS = ("experiment", "order", "estimate", "settling_time", "peak_abs",
                      "chattering_index", "rms_error")

    EXIT_OK = 0
    EXIT_UNEXPECTED = 1
    EXIT_ERROR = 2
    EXIT_INTERRUPTED = 130


def resolve_output_dir(flag: Optional[str], fallback: str = SDBenchConfig.OUTPUT_DIR) -> str:
    """--output wins over SDBENCH_OUTPUT_DIR, which wins over the config's own directory."""
    return flag or os.environ.get(SDBenchConfig.OUTPUT_DIR_ENV) or fallback


def _progress(description: str) -> Optional[ProgressBar]:
    if not sys.stderr.isatty():
        return None
    return ProgressBar(total=1, description=description)


def _load_with_overrides(name: str, args: argparse.Namespace):
    cfg = ConfigLoader.load(name)
    if any(v is not None for v in (args.dt, args.t_end, args.stride)):
        cfg = ConfigLoader.with_overrides(cfg, dt=args.dt, t_end=args.t_end, stride=args.stride)
        logger.info(f" Overrides applied to '{cfg.name}': dt={cfg.plan.dt:g} t_end={cfg.plan.t_end:g} "
                    f"stride={cfg.plan.record_stride}")
    return cfg


# =============================================================================
# Subcommands
# =============================================================================

def cmd_run(args: argparse.Namespace, state: dict) -> int:
    cfg = _load_with_overrides(args.config, args)
    state["config"] = ConfigLoader.to_dict(cfg)
    output_dir = resolve_output_dir(args.output, cfg.output)
    state["output_dir"] = output_dir

    msg.print_header(f"Running {cfg.name} ({cfg.method})")
    if cfg.description:
        msg.print_info(cfg.description)

    progress = _progress(cfg.name)
    result = experiments.run_experiment(cfg, output_dir, progress=progress, plot=args.plot)
    if progress:
        progress.complete()

    msg.print_table(result.rows, SDBenchConfig.METRIC_COLUMNS)
    msg.print_success(f"Trajectory: {result.trajectory_path}")
    msg.print_success(f"Metrics:    {result.metrics_path}")
    if result.plot_path:
        msg.print_success(f"Plot:       {result.plot_path}")
    return SDBenchConfig.EXIT_OK


def cmd_map(args: argparse.Namespace, state: dict) -> int:
    rho_grid = InputValidator.parse_grid(args.rho, "rho", positive=True)
    k_grid = InputValidator.parse_grid(args.k, "k", positive=True)
    e_grid = InputValidator.parse_grid(args.e, "e")
    output_dir = resolve_output_dir(args.output)
    state["output_dir"] = output_dir

    msg.print_header("Return-map analysis")
    msg.print_info(f"{len(rho_grid)} rho x {len(k_grid)} k x {len(e_grid)} e points"
                   + (" with brute-force oracle" if args.oracle else ""))

    progress = _progress("map") if args.oracle else None
    result = experiments.run_map_analysis(
        rho_grid, k_grid, e_grid,
        with_oracle=args.oracle,
        output_path=os.path.join(output_dir, SDBenchConfig.MAP_FILENAME),
        oracle_resolution=args.oracle_resolution,
        profile_crossings=args.profile,
        plot=args.plot,
        progress=progress,
    )
    if progress:
        progress.complete()

    slopes = {(row["rho"], row["k"]): row["slope_at_origin"] for row in result.rows}
    msg.print_table([{"rho": rho, "k": k, "slope_at_origin": s} for (rho, k), s in slopes.items()],
                    ("rho", "k", "slope_at_origin"))
    if args.oracle:
        worst = result.max_oracle_error
        if worst <= experiments.ORACLE_TOLERANCE:
            msg.print_success(f"Closed form agrees with the oracle (max relative deviation {worst:.2e})")
        else:
            msg.print_warning(f"Max relative deviation {worst:.2e} exceeds {experiments.ORACLE_TOLERANCE:g}")
    msg.print_success(f"Map table: {result.path}")
    for path in result.profile_paths:
        msg.print_success(f"Profile:   {path}")
    if result.plot_path:
        msg.print_success(f"Plot:      {result.plot_path}")
    return SDBenchConfig.EXIT_OK


def cmd_compare(args: argparse.Namespace, state: dict) -> int:
    if args.jobs < 1:
        raise ConfigError("jobs", "must be >= 1")
    cfgs = [_load_with_overrides(name, args) for name in args.presets]
    state["config"] = {"members": [ConfigLoader.to_dict(cfg) for cfg in cfgs]}
    output_dir = resolve_output_dir(args.output)
    state["output_dir"] = output_dir

    msg.print_header(f"Comparing {', '.join(cfg.name for cfg in cfgs)}")
    result = experiments.compare(cfgs, output_dir, jobs=args.jobs, plot=not args.no_plot)
    msg.print_info(f"Steady window {result.steady_window}, chatter window {result.chatter_window}")
    msg.print_table(result.rows, SDBenchConfig.METRIC_COLUMNS)
    msg.print_success(f"Comparison table: {result.table_path}")
    for path in result.plot_paths:
        msg.print_success(f"Plot: {path}")
    return SDBenchConfig.EXIT_OK


def cmd_report(args: argparse.Namespace, state: dict) -> int:
    if not os.path.isfile(args.csv):
        raise ConfigError("csv", f"no such file: {args.csv}")
    state["output_dir"] = os.path.dirname(os.path.abspath(args.csv))
    result = experiments.report(args.csv, output_path=args.output, band_fraction=args.band_fraction)
    msg.print_header(f"Metrics for {os.path.basename(args.csv)}")
    msg.print_table(result.rows, SDBenchConfig.METRIC_COLUMNS)
    msg.print_success(f"Report: {result.metrics_path}")
    return SDBenchConfig.EXIT_OK


# =============================================================================
# Main Entry Point
# =============================================================================

def setup_signal_handlers():
    """SIGTERM takes the same exit path as Ctrl-C."""
    def signal_handler(signum, frame):
        raise KeyboardInterrupt

    signal.signal(signal.SIGTERM, signal_handler)


def _add_plan_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--dt', type=float, help='Override plan.dt [s]')
    parser.add_argument('--t-end', dest='t_end', type=float, help='Override plan.t_end [s]')
    parser.add_argument('--stride', type=int, help='Override plan.record_stride')


GRID_OPTIONS = ('--rho', '--k', '--e')


def join_grid_values(argv: List[str]) -> List[str]:
    """Fold `--e -0.5,0.5` into `--e=-0.5,0.5` so argparse does not read the value as an option."""
    joined: List[str] = []
    i = 0
    while i < len(argv):
        if argv[i] in GRID_OPTIONS and i + 1 < len(argv):
            joined.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            joined.append(argv[i])
            i += 1
    return joined


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='sdBench', description='Switching differentiator simulation bench')
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='Simulate one preset or JSON config')
    run.add_argument('config', help=f"Preset name ({', '.join(ConfigLoader.list_presets())}) or JSON file")
    _add_plan_overrides(run)
    run.add_argument('--output', help='Output directory')
    run.add_argument('--plot', action='store_true', help='Also write an SVG of estimates vs truth')
    run.set_defaults(handler=cmd_run)

    map_cmd = sub.add_parser('map', help='Tabulate the e_sigma return map')
    map_cmd.add_argument('--rho', default=SDBenchConfig.DEFAULT_RHO_GRID,
                         help='rho grid: a,b,c | lin:a:b:n | log:a:b:n')
    map_cmd.add_argument('--k', default=SDBenchConfig.DEFAULT_K_GRID, help='k grid, same forms')
    map_cmd.add_argument('--e', default=SDBenchConfig.DEFAULT_E_GRID,
                         help='e_sigma grid, same forms plus symlog:a:b:n (negative lists also as --e=-0.5,0.5)')
    map_cmd.add_argument('--oracle', action='store_true', help='Check every point by brute-force integration')
    map_cmd.add_argument('--oracle-resolution', type=float, default=SDBenchConfig.ORACLE_RESOLUTION,
                         help='Oracle step as a fraction of one crossing interval')
    map_cmd.add_argument('--profile', type=int, default=0, metavar='N',
                         help='Also export closed-form trajectories over N crossings')
    map_cmd.add_argument('--plot', action='store_true', help='Also write an SVG of the map')
    map_cmd.add_argument('--output', help='Output directory')
    map_cmd.set_defaults(handler=cmd_map)

    cmp_cmd = sub.add_parser('compare', help='Compare presets on a shared signal')
    cmp_cmd.add_argument('presets', nargs='+', help='Preset names or JSON files (at least two)')
    _add_plan_overrides(cmp_cmd)
    cmp_cmd.add_argument('--jobs', type=int, default=1, help='Simulate members in N processes')
    cmp_cmd.add_argument('--no-plot', action='store_true', help='Skip the per-order SVG overlays')
    cmp_cmd.add_argument('--output', help='Output directory')
    cmp_cmd.set_defaults(handler=cmd_compare)

    rep = sub.add_parser('report', help='Recompute metrics from a trajectory CSV')
    rep.add_argument('csv', help='Trajectory CSV written by run or compare')
    rep.add_argument('--band-fraction', type=float, help='Settling band as a fraction of sup|truth|')
    rep.add_argument('--output', help='Report CSV path')
    rep.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point; returns the process exit status."""
    args = build_parser().parse_args(join_grid_values(sys.argv[1:] if argv is None else list(argv)))
    if args.debug:
        logging.getLogger().setLevel(logging.DEBUG)

    state: dict = {}
    try:
        return args.handler(args, state)
    except KeyboardInterrupt:
        msg.print_error("Interrupted.")
        return SDBenchConfig.EXIT_INTERRUPTED
    except SdBenchError as e:
        msg.print_error(f"{type(e).__name__}: {e}")
        return SDBenchConfig.EXIT_ERROR
    except Exception as e:
        msg.print_error(f"Unexpected failure: {type(e).__name__}: {e}")
        try:
            from utils.debug_reporter import generate_debug_report
            report_path = generate_debug_report(error=e, config=state.get("config"),
                                                output_dir=state.get("output_dir"))
            msg.print_info(f"Debug report saved to: {report_path}")
        except Exception as debug_error:
            msg.print_warning(f"Could not generate debug report: {debug_error}")
        logger.debug("Unhandled exception", exc_info=True)
        return SDBenchConfig.EXIT_UNEXPECTED


def console_main() -> None:
    setup_signal_handlers()
    sys.exit(main())


if __name__ == '__main__':
    console_main()
