from core.exceptions import SimulationDivergenceError
from utils.debug_reporter import DebugReporter, generate_debug_report


def _raised(error):
    try:
        raise error
    except Exception as e:
        return e


def test_report_carries_divergence_time_and_advice():
    error = _raised(SimulationDivergenceError(0.125, "state 3 is nan"))
    reporter = DebugReporter()
    report = reporter.generate_full_report(error=error, config={"name": "sd-paper-1"})
    assert report["error_details"]["time"] == 0.125
    assert any("--dt" in rec for rec in report["recommendations"])

    text = reporter.format_report_as_markdown(report)
    assert "**Simulation time:** 0.125" in text
    assert '"name": "sd-paper-1"' in text
    assert "numpy" in text


def test_generate_debug_report_saves_markdown(tmp_path):
    path = generate_debug_report(_raised(ValueError("bad")), output_dir=str(tmp_path))
    assert path.startswith(str(tmp_path))
    assert path.endswith(".md")
    assert generate_debug_report(save_to_file=False).startswith("# SD Bench Debug Report")
