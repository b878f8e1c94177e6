"""CSV contracts shared by the CLI, the tools and the analysis re-reader."""

from __future__ import annotations

import csv
from io import StringIO
from pathlib import Path

import pandas as pd

from ..experiment import BinRecord, records_frame
from .constants import CSV_FLOAT_FORMAT

RECORD_COLUMNS = [
    "record_id",
    "omega_mean_rad_s",
    "omega_spread_rad_s",
    "counts_port1",
    "counts_port2",
    "net_port1",
    "net_port2",
]

# appended after the fixed columns so a re-read rebuilds every BinRecord field
RECORD_EXTRA_COLUMNS = [
    "bin_index",
    "t_start_s",
    "expected_dark_port1",
    "expected_dark_port2",
    "n_gates",
    "occupied_gates",
    "coincidences",
]

_RECORD_RENAMES = {
    "omega_mean": "omega_mean_rad_s",
    "omega_spread": "omega_spread_rad_s",
    "expected_dark1": "expected_dark_port1",
    "expected_dark2": "expected_dark_port2",
}

FRINGE_CURVE_COLUMNS = ["omega_rad_s", "p_port1", "p_port2"]

ERROR_COLUMNS = [
    "error",
    "source",
    "fallback",
]


def format_error_csv(error: str, source: str, fallback: str | None = None) -> str:
    """Return a CSV string with error contract."""

    output = StringIO()
    writer = csv.writer(output)
    writer.writerow(ERROR_COLUMNS)
    writer.writerow([error, source, fallback or ""])
    return output.getvalue().strip()


def frame_to_csv(frame: pd.DataFrame, columns: list[str]) -> str:
    return frame.to_csv(columns=columns, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def records_to_csv(records: list[BinRecord]) -> str:
    frame = records_frame(records).rename(columns=_RECORD_RENAMES)
    return frame_to_csv(frame, RECORD_COLUMNS + RECORD_EXTRA_COLUMNS)


def records_from_csv(source: str | Path) -> list[BinRecord]:
    """Rebuild the records from a run CSV given as a path or as CSV text."""
    if isinstance(source, Path) or "\n" not in str(source):
        frame = pd.read_csv(source, float_precision="round_trip")
    else:
        frame = pd.read_csv(StringIO(str(source)), float_precision="round_trip")
    missing = [col for col in RECORD_COLUMNS + RECORD_EXTRA_COLUMNS if col not in frame.columns]
    if missing:
        raise ValueError(f"run CSV lacks columns: {', '.join(missing)}")
    frame = frame.rename(columns={v: k for k, v in _RECORD_RENAMES.items()})
    int_fields = {"record_id", "bin_index", "counts_port1", "counts_port2", "n_gates", "occupied_gates", "coincidences"}
    records = []
    for row in frame.to_dict(orient="records"):
        values = {
            name: int(row[name]) if name in int_fields else float(row[name]) for name in BinRecord.__dataclass_fields__
        }
        records.append(BinRecord(**values))
    return records
