"""CSV and JSON emission of run results.

Files carry no timestamps and are written with sorted keys and fixed
number formatting, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from pathlib import Path

from pydantic import BaseModel

from ergoswitch.errors import ErgoswitchError
from ergoswitch.models import LEDGER_TOL, ResultEnvelope, RunRecord

logger = logging.getLogger(__name__)

CSV_NAME = "results.csv"
JSON_NAME = "results.json"

# Always present, in this order
REQUIRED_COLUMNS = (
    "delta_rho",
    "p_plus",
    "p_minus",
    "W_class",
    "WD",
    "dW",
    "dW_i",
    "dW_c",
    "residual_oracle",
    "phi_opt",
    "alpha_opt",
)

SPLIT_COLUMNS = ("WD_i", "WD_c", "W_class_i", "W_class_c")

NUMBER_FORMAT = ".17g"


def format_cell(value: float | bool | None) -> str:
    """One CSV cell: 17 significant digits, lowercase booleans, empty for None."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return format(float(value), NUMBER_FORMAT)


def extra_columns(records: list[RunRecord]) -> list[str]:
    """Scenario columns in order of first appearance."""
    columns: list[str] = []
    for record in records:
        for name in record.extras:
            if name not in columns and name not in REQUIRED_COLUMNS:
                columns.append(name)
    return columns


def check_ledger(record: RunRecord, row: int) -> None:
    """Refuse to emit a row whose gain does not add up.

    Raises:
        ErgoswitchError: If |dW - dW_i - dW_c| exceeds LEDGER_TOL.
    """
    if record.ledger_residual > LEDGER_TOL:
        raise ErgoswitchError(
            "write_csv",
            f"row {row}: dW={record.dW!r} != dW_i + dW_c "
            f"(residual {record.ledger_residual:.3e})",
        )


def render_csv(records: list[RunRecord]) -> str:
    """CSV text with a header row naming every column."""
    extras = extra_columns(records)
    header = [*REQUIRED_COLUMNS, *SPLIT_COLUMNS, *extras]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row, record in enumerate(records, start=1):
        check_ledger(record, row)
        values = record.model_dump(exclude={"extras"})
        cells = [format_cell(values[name]) for name in (*REQUIRED_COLUMNS, *SPLIT_COLUMNS)]
        cells += [format_cell(record.extras.get(name)) for name in extras]
        writer.writerow(cells)
    return buffer.getvalue()


def render_json(model: BaseModel) -> str:
    """Sorted-key JSON with a trailing newline."""
    return json.dumps(model.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def write_results(envelope: ResultEnvelope, directory: Path) -> tuple[Path, Path]:
    """Write results.csv and results.json into directory, creating it if needed.

    Returns:
        Paths of the CSV and JSON files.
    """
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / CSV_NAME
    json_path = directory / JSON_NAME
    csv_path.write_text(render_csv(envelope.records), encoding="utf-8")
    json_path.write_text(render_json(envelope), encoding="utf-8")
    logger.debug("Wrote %d records to %s", len(envelope.records), directory)
    return csv_path, json_path


__all__ = [
    "CSV_NAME",
    "JSON_NAME",
    "REQUIRED_COLUMNS",
    "SPLIT_COLUMNS",
    "NUMBER_FORMAT",
    "format_cell",
    "extra_columns",
    "check_ledger",
    "render_csv",
    "render_json",
    "write_results",
]
