"""Tests for the batch runner."""

import os
from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest

from ergoswitch.config import reset_settings
from ergoswitch.errors import ConfigValidationError, NonHermitianError
from ergoswitch.models import RunStatus
from ergoswitch.output import CSV_NAME, JSON_NAME
from ergoswitch.runconfig import RunConfig, load_run_config, validate_run_config
from ergoswitch.runner import build_state, expand_points, run
from fixtures.run_config_scenarios import (
    ADPF_RUN,
    CUSTOM_RUN,
    DEPOL_DDIM_RUN,
    DEPOL_PURE_RUN,
    THERMAL_GRID_RUN,
)


def _load(tmp_path: Path, text: str) -> RunConfig:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return load_run_config(path)


class TestExpandPoints:
    """Tests for sweep expansion."""

    def test_no_sweep(self) -> None:
        """Without a sweep there is one point."""
        config = validate_run_config({"scenario": "depol_qubit"})

        assert len(expand_points(config)) == 1

    def test_adpf_grid_gets_window_points(self, tmp_path: Path) -> None:
        """Window edges and special points join the linear grid."""
        points = expand_points(_load(tmp_path, ADPF_RUN))
        values = [p.values["delta_rho"] for p in points]

        assert len(values) == 12
        assert values == sorted(values)
        for extra in (-1 / 9, -0.2, 1 / 3):
            assert any(abs(v - extra) < 1e-12 for v in values)

    def test_count_override(self, tmp_path: Path) -> None:
        """points overrides the file's count."""
        assert len(expand_points(_load(tmp_path, ADPF_RUN), 3)) == 6

    def test_cross_product(self, tmp_path: Path) -> None:
        """A secondary sweep multiplies the grid."""
        points = expand_points(_load(tmp_path, THERMAL_GRID_RUN))

        assert len(points) == 12
        assert points[0].values == {"beta": 0.0, "beta_in": 0.0}
        assert points[-1].values == {"beta": 1.0, "beta_in": 3.0}
        assert points[5].config.state.beta_in == 1.0

    def test_invalid_count(self, tmp_path: Path) -> None:
        """Zero points is a configuration error."""
        with pytest.raises(ConfigValidationError):
            expand_points(_load(tmp_path, ADPF_RUN), 0)


class TestBuildState:
    """Tests for input states."""

    def test_populations_with_coherence(self) -> None:
        """Populations in the energy basis with an off-diagonal term."""
        config = validate_run_config(
            {"scenario": "depol_qubit", "state": {"populations": [0.8, 0.2], "coherence": 0.1}}
        )

        rho = build_state(config, config.build_hamiltonian())

        assert rho[0, 0].real == pytest.approx(0.8)
        assert rho[0, 1] == pytest.approx(0.1)

    def test_matrix_must_be_state(self) -> None:
        """An explicit matrix with trace 2 is rejected."""
        config = validate_run_config(
            {
                "scenario": "depol_qubit",
                "state": {"kind": "matrix", "matrix_real": [[1.0, 0.0], [0.0, 1.0]]},
            }
        )

        with pytest.raises(ConfigValidationError, match="unit trace"):
            build_state(config, config.build_hamiltonian())

    def test_random_uses_generator(self, tmp_path: Path) -> None:
        """Random states come from the given generator."""
        config = _load(tmp_path, DEPOL_DDIM_RUN)
        h = config.build_hamiltonian()

        first = build_state(config, h, np.random.default_rng(1))
        second = build_state(config, h, np.random.default_rng(1))

        assert first.shape == (3, 3)
        assert np.array_equal(first, second)


class TestRun:
    """Tests for whole runs."""

    def test_depol_pure(self, tmp_path: Path) -> None:
        """Pure inputs give WD = 1/8 at every point and match the oracle."""
        envelope = run(_load(tmp_path, DEPOL_PURE_RUN), out_dir=tmp_path / "out")

        assert len(envelope.records) == 5
        for record in envelope.records:
            assert record.WD == pytest.approx(0.125, abs=1e-10)
            assert record.residual_oracle is not None
            assert record.residual_oracle <= 1e-10
        assert envelope.status is RunStatus.OK
        assert envelope.exit_code == 0
        assert envelope.seed == 42
        assert (tmp_path / "out" / CSV_NAME).exists()
        assert (tmp_path / "out" / JSON_NAME).exists()

    def test_adpf(self, tmp_path: Path) -> None:
        """adpf records carry the window flag; no incoherent gain inside it."""
        envelope = run(_load(tmp_path, ADPF_RUN), out_dir=tmp_path)

        assert envelope.seed == 7
        assert envelope.max_residual is not None
        assert envelope.max_residual <= 1e-10
        inside = [r for r in envelope.records if r.extras["in_window"]]
        assert inside
        for record in inside:
            assert record.dW_i <= 1e-10
        for record in envelope.records:
            assert record.dW >= -1e-10
            assert record.ledger_residual <= 1e-10

    def test_thermal_activation_grid(self, tmp_path: Path) -> None:
        """Activation on the grid matches beta_in > 2 beta."""
        envelope = run(_load(tmp_path, THERMAL_GRID_RUN), out_dir=tmp_path)

        assert len(envelope.records) == 12
        for record in envelope.records:
            assert record.extras["activated"] == record.extras["predicted_activation"]
        assert any(record.extras["activated"] for record in envelope.records)

    def test_custom_has_no_oracle(self, tmp_path: Path) -> None:
        """Custom pairs run without residuals and report the optimal measurement."""
        envelope = run(_load(tmp_path, CUSTOM_RUN), out_dir=tmp_path)

        (record,) = envelope.records
        assert record.residual_oracle is None
        assert envelope.max_residual is None
        assert 0.0 <= record.phi_opt <= 1.0
        assert record.dW >= -1e-10
        assert envelope.exit_code == 0

    def test_seed_precedence(self, tmp_path: Path) -> None:
        """The explicit seed wins over the file, which wins over the settings."""
        config = _load(tmp_path, DEPOL_DDIM_RUN)

        default = run(config, out_dir=tmp_path / "a")
        explicit = run(config, out_dir=tmp_path / "b", seed=5)
        repeat = run(config, out_dir=tmp_path / "c", seed=5)

        assert default.seed == 42
        assert explicit.seed == 5
        assert explicit.records[0].WD != default.records[0].WD
        assert (tmp_path / "b" / CSV_NAME).read_bytes() == (tmp_path / "c" / CSV_NAME).read_bytes()

    def test_seed_from_settings(self, tmp_path: Path) -> None:
        """ERGOSWITCH_DEFAULT_SEED applies when the file has no seed."""
        config = _load(tmp_path, DEPOL_DDIM_RUN)

        with patch.dict(os.environ, {"ERGOSWITCH_DEFAULT_SEED": "11"}):
            reset_settings()
            envelope = run(config, out_dir=tmp_path)

        assert envelope.seed == 11

    def test_residual_exceeded(self, tmp_path: Path) -> None:
        """A residual above the limit sets exit code 3."""
        with patch("ergoswitch.runner._oracle_residual", return_value=1.0):
            envelope = run(_load(tmp_path, DEPOL_PURE_RUN), out_dir=tmp_path)

        assert envelope.status is RunStatus.RESIDUAL_EXCEEDED
        assert envelope.exit_code == 3
        assert envelope.max_residual == 1.0

    def test_default_output_directory(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        """Without --out or [output] the results directory setting is used."""
        monkeypatch.chdir(tmp_path)
        config = validate_run_config({"scenario": "depol_qubit"})

        run(config)

        assert (tmp_path / "results" / CSV_NAME).exists()

    def test_evaluation_errors_are_config_errors(self, tmp_path: Path) -> None:
        """An unknown channel surfaces as a configuration error."""
        config = validate_run_config(
            {
                "scenario": "custom",
                "channel_a": {"name": "teleporter"},
                "channel_b": {"name": "identity"},
            }
        )

        with pytest.raises(ConfigValidationError, match="Unknown channel"):
            run(config, out_dir=tmp_path)

    def test_numerical_failures_are_not_config_errors(self, tmp_path: Path) -> None:
        """A library failure on a valid configuration keeps its own type."""
        failure = NonHermitianError("daemonic_ergotropy", 1.0)

        with patch("ergoswitch.runner.daemonic_ergotropy", side_effect=failure):
            with pytest.raises(NonHermitianError) as excinfo:
                run(_load(tmp_path, DEPOL_PURE_RUN), out_dir=tmp_path)

        assert not isinstance(excinfo.value, ConfigValidationError)
