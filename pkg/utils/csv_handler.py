"""
CSV processing utilities for SD Bench.

Every file starts with `# `-prefixed comment lines carrying the resolved
configuration as sorted-key JSON, followed by a header row of column
names and one row per record. Floats are written with 17 significant
digits, which round-trips exactly.
"""

import csv
import json
import logging
import os
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from core.exceptions import MissingColumnError
from core.models import Trajectory

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".17g"
COMMENT = "#"


def format_value(value: Any) -> str:
    """None -> empty cell, floats -> 17 significant digits, others -> str."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), FLOAT_FORMAT)
    return str(value)


def parse_value(text: str) -> Any:
    """Inverse of format_value for table cells: '' -> None, numbers -> float."""
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        return text


class CSVProcessor:
    """Reads and writes trajectory and table CSV files."""

    @staticmethod
    def _header_lines(header: Optional[Dict[str, Any]]) -> List[str]:
        lines = []
        for key in sorted(header or {}):
            lines.append(f"{COMMENT} {key}: {json.dumps(header[key], sort_keys=True, default=format_value)}\n")
        return lines

    @staticmethod
    def _ensure_parent(path: str) -> None:
        parent = os.path.dirname(os.path.abspath(path))
        os.makedirs(parent, exist_ok=True)

    @staticmethod
    def write_trajectory(path: str, traj: Trajectory, header: Optional[Dict[str, Any]] = None) -> str:
        """Write `t` plus every trajectory column, in insertion order."""
        CSVProcessor._ensure_parent(path)
        names = list(traj.names)
        data = np.column_stack([traj.times] + [traj.columns[n] for n in names]) if len(traj) else None

        with open(path, "w", encoding="utf-8", newline="") as out_file:
            out_file.writelines(CSVProcessor._header_lines(header))
            writer = csv.writer(out_file, lineterminator="\n")
            writer.writerow(["t"] + names)
            if data is not None:
                for row in data.tolist():
                    writer.writerow([format(v, FLOAT_FORMAT) for v in row])

        logger.info(f" Wrote trajectory ({len(traj)} rows, {len(names)} columns) to {path}")
        return path

    @staticmethod
    def read_header(path: str) -> Dict[str, Any]:
        """Parse the `# key: json` comment block at the top of a file."""
        header: Dict[str, Any] = {}
        with open(path, "r", encoding="utf-8") as in_file:
            for line in in_file:
                if not line.startswith(COMMENT):
                    break
                key, _, value = line[1:].strip().partition(": ")
                try:
                    header[key] = json.loads(value)
                except json.JSONDecodeError:
                    header[key] = value
        return header

    @staticmethod
    def _data_lines(in_file):
        for line in in_file:
            if not line.startswith(COMMENT):
                yield line

    @staticmethod
    def read_trajectory(path: str) -> Tuple[Trajectory, Dict[str, Any]]:
        """Load a trajectory CSV written by write_trajectory."""
        with open(path, "r", encoding="utf-8", newline="") as in_file:
            reader = csv.reader(CSVProcessor._data_lines(in_file))
            try:
                fieldnames = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: no header row") from None
            rows = [[float(v) for v in row] for row in reader if row]

        if not fieldnames or fieldnames[0] != "t":
            raise MissingColumnError("t")
        data = np.array(rows, dtype=float).reshape(len(rows), len(fieldnames))
        header = CSVProcessor.read_header(path)

        record_period = header.get("record_period")
        if record_period is None and len(rows) > 1:
            record_period = float(data[1, 0] - data[0, 0])
        traj = Trajectory(
            times=data[:, 0],
            columns={name: data[:, i] for i, name in enumerate(fieldnames) if i > 0},
            record_period=record_period,
        )
        logger.debug(f"Read trajectory {path}: {len(traj)} rows, columns {traj.names}")
        return traj, header

    @staticmethod
    def write_table(path: str, rows: Sequence[Dict[str, Any]], fieldnames: Sequence[str],
                    header: Optional[Dict[str, Any]] = None) -> str:
        """Write dict rows as a table; missing keys become empty cells."""
        CSVProcessor._ensure_parent(path)
        with open(path, "w", encoding="utf-8", newline="") as out_file:
            out_file.writelines(CSVProcessor._header_lines(header))
            writer = csv.writer(out_file, lineterminator="\n")
            writer.writerow(list(fieldnames))
            for row in rows:
                writer.writerow([format_value(row.get(name)) for name in fieldnames])
        logger.info(f" Wrote table ({len(rows)} rows) to {path}")
        return path

    @staticmethod
    def read_table(path: str) -> List[Dict[str, Any]]:
        with open(path, "r", encoding="utf-8", newline="") as in_file:
            reader = csv.DictReader(CSVProcessor._data_lines(in_file))
            return [{key: parse_value(value) for key, value in row.items()} for row in reader]
