"""
Export of time series, sweep summaries and run manifests.
"""

import json
import logging
import platform
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

from ..constants import CSV_SCHEMA_VERSION
from ..diagnostics.record import record_columns

logger = logging.getLogger(__name__)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return repr(value)
    if hasattr(value, "value") and not isinstance(value, (int, float, str, bool)):
        return value.value
    return value


class DataExporter:
    """Tables of records and sweep cells."""

    def timeseries_frame(self, traj):
        m_max = traj.spec.params.m_max
        names = list(traj.records[0].coefficients) if traj.records else []
        rows = [record.to_row(m_max) for record in traj.records]
        return pd.DataFrame(rows, columns=record_columns(m_max, names))

    def export_timeseries(self, traj, filename):
        frame = self.timeseries_frame(traj)
        frame.to_csv(filename, index=False, float_format="%.17g")
        logger.info("wrote %d rows to %s", len(frame), filename)
        return frame

    def export_table(self, rows, filename, columns=None):
        frame = pd.DataFrame(rows, columns=columns)
        frame.to_csv(filename, index=False, float_format="%.17g")
        logger.info("wrote %d rows to %s", len(frame), filename)
        return frame


class ReportGenerator:
    """Run manifests and monitor reports."""

    def generate_summary_report(self, data, title="focflow run"):
        return {
            "title": title,
            "timestamp": datetime.now().isoformat(),
            "csv_schema": CSV_SCHEMA_VERSION,
            "versions": {
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
            },
            "data": _jsonable(data),
        }

    def save_report(self, report, filename):
        with open(filename, "w", encoding="utf-8") as handle:
            json.dump(report, handle, indent=2, sort_keys=True)
        logger.info("wrote report %s", filename)

    def load_report(self, filename):
        with open(Path(filename), "r", encoding="utf-8") as handle:
            return json.load(handle)

    def format_table(self, rows, columns):
        """Fixed-width text table for the console."""
        widths = [max([len(str(c))] + [len(_cell(row.get(c))) for row in rows]) for c in columns]
        lines = ["  ".join(str(c).ljust(w) for c, w in zip(columns, widths))]
        lines.append("  ".join("-" * w for w in widths))
        for row in rows:
            lines.append("  ".join(_cell(row.get(c)).ljust(w) for c, w in zip(columns, widths)))
        return "\n".join(lines)


def _cell(value):
    if isinstance(value, float):
        return f"{value:.4g}"
    return "" if value is None else str(value)
