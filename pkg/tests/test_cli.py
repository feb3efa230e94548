"""Tests for the ergoswitch command line."""

import json
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from ergoswitch import __version__
from ergoswitch.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, EXIT_RESIDUAL, main
from ergoswitch.errors import NonHermitianError
from ergoswitch.models import CheckResult
from fixtures.run_config_scenarios import BAD_PHI_RUN, DEPOL_PURE_RUN


def _write(tmp_path: Path, text: str) -> str:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return str(path)


def _failing_check(rng: np.random.Generator) -> list[CheckResult]:
    return [CheckResult(name="broken", passed=False, trials=1, max_residual=1.0, tolerance=0.0)]


class TestRunCommand:
    """Tests for `ergoswitch run`."""

    def test_success(self, tmp_path: Path) -> None:
        """A valid file exits 0 and writes both result files."""
        out = tmp_path / "out"

        code = main(["run", _write(tmp_path, DEPOL_PURE_RUN), "--out", str(out)])

        assert code == EXIT_OK
        assert (out / "results.csv").exists()
        assert (out / "results.json").exists()

    def test_points_override(self, tmp_path: Path) -> None:
        """--points changes the number of rows."""
        out = tmp_path / "out"

        main(["run", _write(tmp_path, DEPOL_PURE_RUN), "--out", str(out), "--points", "3"])

        payload = json.loads((out / "results.json").read_text(encoding="utf-8"))
        assert len(payload["records"]) == 3

    def test_seed_override(self, tmp_path: Path) -> None:
        """--seed is recorded in the envelope."""
        out = tmp_path / "out"

        main(["run", _write(tmp_path, DEPOL_PURE_RUN), "--out", str(out), "--seed", "9"])

        assert json.loads((out / "results.json").read_text(encoding="utf-8"))["seed"] == 9

    def test_invalid_config(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """Validation errors exit 2 and name the key and line."""
        code = main(["run", _write(tmp_path, BAD_PHI_RUN), "--out", str(tmp_path)])

        assert code == EXIT_CONFIG
        err = capsys.readouterr().err
        assert "line 4" in err
        assert "control.phi" in err

    def test_missing_file(self, tmp_path: Path) -> None:
        """A missing run file is a configuration error."""
        assert main(["run", str(tmp_path / "missing.toml")]) == EXIT_CONFIG

    def test_residual_exceeded(self, tmp_path: Path) -> None:
        """An oracle residual above the limit exits 3."""
        with patch("ergoswitch.runner._oracle_residual", return_value=1.0):
            code = main(["run", _write(tmp_path, DEPOL_PURE_RUN), "--out", str(tmp_path)])

        assert code == EXIT_RESIDUAL

    def test_numerical_failure_exits_failed(self, tmp_path: Path) -> None:
        """A library failure on a valid run file exits 1, not 2."""
        failure = NonHermitianError("daemonic_ergotropy", 1.0)

        with patch("ergoswitch.runner.daemonic_ergotropy", side_effect=failure):
            code = main(["run", _write(tmp_path, DEPOL_PURE_RUN), "--out", str(tmp_path)])

        assert code == EXIT_FAILED


class TestVerifyCommand:
    """Tests for `ergoswitch verify`."""

    def test_passing_suite(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """A passing suite exits 0 and prints the JSON report."""
        out = tmp_path / "report.json"

        code = main(["verify", "cptp", "--seed", "3", "--out", str(out)])

        assert code == EXIT_OK
        stdout = capsys.readouterr().out
        report = json.loads(stdout)
        assert report["suite"] == "cptp"
        assert report["seed"] == 3
        assert all(check["passed"] for check in report["checks"])
        assert out.read_text(encoding="utf-8") == stdout

    def test_failing_suite(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Any failed check exits 1."""
        with patch.dict("ergoswitch.verification._SUITE_CHECKS", {"cptp": (_failing_check,)}):
            code = main(["verify", "cptp"])

        assert code == EXIT_FAILED
        assert json.loads(capsys.readouterr().out)["checks"][0]["name"] == "broken"

    def test_unknown_suite(self) -> None:
        """argparse rejects unknown suite names."""
        with pytest.raises(SystemExit) as exc_info:
            main(["verify", "everything"])

        assert exc_info.value.code == 2


class TestParser:
    """Tests for global options."""

    def test_version(self, capsys: pytest.CaptureFixture[str]) -> None:
        """--version prints the package version."""
        with pytest.raises(SystemExit) as exc_info:
            main(["--version"])

        assert exc_info.value.code == 0
        assert __version__ in capsys.readouterr().out

    def test_command_required(self) -> None:
        """A subcommand is required."""
        with pytest.raises(SystemExit):
            main([])
