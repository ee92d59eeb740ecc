"""
Debug reports for unexpected SD Bench failures.

Collects platform, interpreter and numeric-stack versions, the command
line, the resolved experiment configuration and the traceback into a
markdown file next to the experiment outputs.
"""

import importlib
import json
import os
import platform
import sys
import traceback
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional
import logging

logger = logging.getLogger(__name__)

REPORTED_PACKAGES = ("numpy", "matplotlib", "scipy", "pytest")


class DebugReporter:
    """Collects diagnostics and renders them as markdown."""

    def __init__(self):
        self.timestamp = datetime.now(timezone.utc)

    def collect_system_info(self) -> Dict[str, Any]:
        home = str(Path.home())
        return {
            'platform': f"{platform.system()} {platform.release()} ({platform.machine()})",
            'python': sys.version.split()[0],
            'executable': sys.executable.replace(home, '~'),
            'cwd': os.getcwd().replace(home, '~'),
            'cpu_count': os.cpu_count(),
            'env': {var: os.environ.get(var, 'not set')
                    for var in ('SDBENCH_DEBUG', 'SDBENCH_OUTPUT_DIR', 'NO_COLOR', 'MPLBACKEND')},
        }

    def collect_dependency_info(self) -> Dict[str, str]:
        versions = {}
        for package in REPORTED_PACKAGES:
            try:
                module = importlib.import_module(package)
                versions[package] = getattr(module, '__version__', 'unknown')
            except ImportError:
                versions[package] = 'missing'
        return versions

    def collect_error_details(self, error: BaseException) -> Dict[str, Any]:
        details = {
            'type': type(error).__name__,
            'message': str(error),
            'traceback': ''.join(traceback.format_exception(type(error), error, error.__traceback__)),
        }
        # divergence errors carry the failing simulation time
        if hasattr(error, 't'):
            details['time'] = getattr(error, 't')
        return details

    def generate_recommendations(self, report: Dict[str, Any]) -> List[str]:
        recommendations = []
        missing = [pkg for pkg in ('numpy', 'matplotlib')
                   if report.get('dependencies', {}).get(pkg) == 'missing']
        if missing:
            recommendations.append(f"Install missing dependencies: {', '.join(missing)} (pip install -e .)")

        error = report.get('error_details', {})
        if error.get('type') == 'SimulationDivergenceError':
            recommendations.append("Reduce plan.dt (e.g. --dt 1e-7) or lower the switching gain L")
        if error.get('type') == 'MemoryError':
            recommendations.append("Increase plan.record_stride (--stride) to record fewer samples")
        if error.get('type') in ('PermissionError', 'FileNotFoundError'):
            recommendations.append("Check that the output directory (--output / SDBENCH_OUTPUT_DIR) is writable")
        return recommendations

    def generate_full_report(self, error: Optional[BaseException] = None,
                             config: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        report: Dict[str, Any] = {
            'generated_at': self.timestamp.isoformat(),
            'command_line': sys.argv.copy(),
        }
        try:
            report['system_info'] = self.collect_system_info()
        except Exception as e:
            report['system_info'] = {'error': str(e)}
        report['dependencies'] = self.collect_dependency_info()
        if config is not None:
            report['config'] = config
        if error is not None:
            report['error_details'] = self.collect_error_details(error)
        report['recommendations'] = self.generate_recommendations(report)
        return report

    def format_report_as_markdown(self, report: Dict[str, Any]) -> str:
        system = report.get('system_info', {})
        lines = [
            "# SD Bench Debug Report",
            "",
            f"**Generated:** {report['generated_at']}  ",
            f"**Command Line:** `{' '.join(report.get('command_line', []))}`",
            "",
            "## System Information",
            "",
            f"- **OS:** {system.get('platform', 'unknown')}",
            f"- **Python:** {system.get('python', 'unknown')} ({system.get('executable', 'unknown')})",
            f"- **Working Directory:** {system.get('cwd', 'unknown')}",
            f"- **CPUs:** {system.get('cpu_count', 'unknown')}",
        ]
        for var, value in system.get('env', {}).items():
            lines.append(f"- **{var}:** {value}")

        lines.extend(["", "## Dependencies", ""])
        for package, version in report.get('dependencies', {}).items():
            status = "❌" if version == 'missing' else "✅"
            lines.append(f"{status} **{package}** {version}")

        if 'config' in report:
            lines.extend(["", "## Resolved Configuration", "", "```json",
                          json.dumps(report['config'], indent=2, sort_keys=True), "```"])

        if 'error_details' in report:
            error = report['error_details']
            lines.extend(["", "## Error Details", "",
                          f"**Type:** {error['type']}  ",
                          f"**Message:** {error['message']}  "])
            if 'time' in error:
                lines.append(f"**Simulation time:** {error['time']}  ")
            lines.extend(["", "**Traceback:**", "```", error['traceback'].rstrip(), "```"])

        if report.get('recommendations'):
            lines.extend(["", "## Recommendations", ""])
            lines.extend(f"{i}. {rec}" for i, rec in enumerate(report['recommendations'], 1))

        lines.append("")
        return "\n".join(lines)

    def save_report(self, report: Dict[str, Any], output_dir: Optional[str] = None) -> str:
        output_dir = output_dir or os.getcwd()
        os.makedirs(output_dir, exist_ok=True)
        filename = f"sdbench-debug-{self.timestamp.strftime('%Y%m%d_%H%M%S')}-{os.getpid()}.md"
        filepath = Path(output_dir) / filename
        with open(filepath, 'w', encoding='utf-8') as f:
            f.write(self.format_report_as_markdown(report))
        return str(filepath)


def generate_debug_report(error: Optional[BaseException] = None,
                          config: Optional[Dict[str, Any]] = None,
                          save_to_file: bool = True,
                          output_dir: Optional[str] = None) -> str:
    """
    Build a debug report and save it.

    Returns the saved path, or the markdown text when save_to_file is False.
    """
    reporter = DebugReporter()
    report = reporter.generate_full_report(error=error, config=config)
    if save_to_file:
        return reporter.save_report(report, output_dir)
    return reporter.format_report_as_markdown(report)
