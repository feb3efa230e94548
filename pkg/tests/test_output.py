"""Tests for CSV and JSON result files."""

import csv
import io
import json
from pathlib import Path

import pytest

from ergoswitch.errors import ErgoswitchError
from ergoswitch.models import ResultEnvelope, RunRecord, RunStatus
from ergoswitch.output import (
    CSV_NAME,
    JSON_NAME,
    REQUIRED_COLUMNS,
    SPLIT_COLUMNS,
    extra_columns,
    format_cell,
    render_csv,
    render_json,
    write_results,
)


def _record(dW: float = 0.125, dW_i: float = 0.0, **extras: float | bool) -> RunRecord:
    return RunRecord(
        delta_rho=0.0,
        p_plus=0.5,
        p_minus=0.5,
        W_class=0.0,
        WD=dW,
        dW=dW,
        dW_i=dW_i,
        dW_c=dW - dW_i,
        residual_oracle=1e-17,
        phi_opt=0.5,
        alpha_opt=0.0,
        WD_i=dW_i,
        WD_c=dW - dW_i,
        W_class_i=0.0,
        W_class_c=0.0,
        extras=dict(extras),
    )


def _envelope(records: list[RunRecord]) -> ResultEnvelope:
    return ResultEnvelope(
        version="0.1.0",
        config={"scenario": "depol_qubit"},
        config_digest="0123456789ab",
        seed=42,
        records=records,
        max_residual=1e-17,
        residual_limit=1e-8,
        status=RunStatus.OK,
    )


class TestFormatCell:
    """Tests for CSV cell formatting."""

    @pytest.mark.parametrize(
        ("value", "expected"),
        [
            (None, ""),
            (True, "true"),
            (False, "false"),
            (1.0, "1"),
            (0.1, "0.10000000000000001"),
            (-3.0, "-3"),
            (0.125, "0.125"),
        ],
    )
    def test_values(self, value: float | bool | None, expected: str) -> None:
        """17 significant digits, lowercase booleans, empty for None."""
        assert format_cell(value) == expected


class TestRenderCsv:
    """Tests for render_csv."""

    def test_header(self) -> None:
        """Required columns first, then the split, then extras in first-seen order."""
        text = render_csv([_record(zeta=0.1), _record(in_window=True, zeta=0.2)])

        header = next(csv.reader(io.StringIO(text)))

        assert header == [*REQUIRED_COLUMNS, *SPLIT_COLUMNS, "zeta", "in_window"]

    def test_missing_extras_are_empty(self) -> None:
        """A record without an extra column leaves its cell empty."""
        rows = list(csv.reader(io.StringIO(render_csv([_record(beta=1.0), _record()]))))

        assert rows[1][-1] == "1"
        assert rows[2][-1] == ""

    def test_extra_columns(self) -> None:
        """Extras never duplicate required columns."""
        assert extra_columns([_record(a=1.0), _record(b=2.0, a=3.0)]) == ["a", "b"]

    def test_ledger_violation(self) -> None:
        """A row whose gain does not add up is refused."""
        broken = _record().model_copy(update={"dW_c": 0.5})

        with pytest.raises(ErgoswitchError, match="row 2"):
            render_csv([_record(), broken])


class TestWriteResults:
    """Tests for results.csv and results.json."""

    def test_files_written(self, tmp_path: Path) -> None:
        """Both files appear in a freshly created directory."""
        csv_path, json_path = write_results(_envelope([_record()]), tmp_path / "out" / "run")

        assert csv_path.name == CSV_NAME
        assert json_path.name == JSON_NAME
        payload = json.loads(json_path.read_text(encoding="utf-8"))
        assert payload["tool"] == "ergoswitch"
        assert payload["config_digest"] == "0123456789ab"
        assert payload["records"][0]["dW"] == 0.125

    def test_byte_identical(self, tmp_path: Path) -> None:
        """The same envelope gives the same bytes."""
        envelope = _envelope([_record(dW=0.3, dW_i=0.1, zeta=-0.2), _record()])

        first = write_results(envelope, tmp_path / "a")
        second = write_results(envelope, tmp_path / "b")

        for left, right in zip(first, second):
            assert left.read_bytes() == right.read_bytes()

    def test_json_sorted(self) -> None:
        """Keys are sorted and the text ends with a newline."""
        text = render_json(_envelope([]))

        assert text.endswith("}\n")
        assert text.index('"config"') < text.index('"records"') < text.index('"tool"')
