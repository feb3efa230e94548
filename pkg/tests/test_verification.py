"""Tests for the seeded invariant suites."""

from unittest.mock import patch

import numpy as np
import pytest

from ergoswitch.errors import ErgoswitchError
from ergoswitch.models import CheckResult
from ergoswitch.verification import SUITES, verify


def _draw(rng: np.random.Generator) -> list[CheckResult]:
    value = float(rng.uniform())
    return [CheckResult(name="draw", passed=True, trials=1, max_residual=value, tolerance=1.0)]


class TestVerify:
    """Tests for verify."""

    @pytest.mark.parametrize("suite", SUITES)
    def test_suite_passes(self, suite: str) -> None:
        """Every suite passes on a fixed seed."""
        report = verify(suite, 42)

        assert report.passed, [c.name for c in report.checks if not c.passed]
        assert report.checks
        assert all(check.trials > 0 for check in report.checks)

    def test_deterministic(self) -> None:
        """The same seed gives the same report."""
        assert verify("switch", 5) == verify("switch", 5)

    def test_all_reseeds_every_suite(self) -> None:
        """'all' gives each suite a fresh generator, so it matches the suites run alone."""
        with patch.dict(
            "ergoswitch.verification._SUITE_CHECKS", {name: (_draw,) for name in SUITES}
        ):
            combined = verify("all", 8)
            separate = [check for suite in SUITES for check in verify(suite, 8).checks]

        assert combined.suite == "all"
        assert len(combined.checks) == len(SUITES)
        assert combined.checks == separate
        assert len({check.max_residual for check in combined.checks}) == 1

    def test_unknown_suite(self) -> None:
        """Unknown suite names are rejected."""
        with pytest.raises(ErgoswitchError, match="Unknown suite"):
            verify("everything", 1)
