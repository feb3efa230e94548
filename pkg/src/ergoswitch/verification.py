"""Seeded invariant suites behind `ergoswitch verify`.

Each suite draws its instances from numpy.random.default_rng(seed), so a
suite run alone reproduces the same checks it contributes to `all`.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from ergoswitch import __version__
from ergoswitch.channels import (
    CPTP_TOL,
    Hamiltonian,
    KrausChannel,
    apply,
    depolarizing,
    gad,
    gibbs_state,
    identity,
    phase_flip,
    thermalizing,
    validate_cptp,
)
from ergoswitch.ergotropy import (
    daemonic_ergotropy,
    optimize_measurement,
    qubit_split,
    split_ergotropy,
    zero_gain_check,
)
from ergoswitch.errors import ErgoswitchError
from ergoswitch.matcore import ComplexMatrix
from ergoswitch.models import AdpfParams, CheckResult, VerificationReport, ZeroGainStatus
from ergoswitch.sampling import (
    random_control,
    random_density_matrix,
    random_hermitian,
    random_measure,
    random_pure_state,
    random_zoo_channel,
)
from ergoswitch.scenarios import (
    REFERENCE_CONTROL,
    REFERENCE_MEASURE,
    adpf_oracle,
    adpf_window,
    coherent_qubit,
    depol_ddim_oracle,
    depol_qubit_oracle,
    maximally_coherent_qubit,
    thermal_input_gain,
    thermal_oracle,
    thermal_state,
)
from ergoswitch.switch import (
    classical_output,
    conditional_states,
    cross_map,
    switch_kraus,
    unnormalized_conditional_states,
)

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-10
GAIN_TOL = 1e-10
ZERO_GAIN_DW_TOL = 1e-8

SUITES = ("cptp", "switch", "ergotropy", "oracles")


@dataclass
class _Tally:
    """Running maximum of a residual over trials."""

    name: str
    tolerance: float
    trials: int = 0
    max_residual: float = 0.0

    def add(self, residual: float) -> None:
        self.trials += 1
        self.max_residual = max(self.max_residual, float(residual))

    def result(self) -> CheckResult:
        return CheckResult(
            name=self.name,
            passed=self.trials > 0 and self.max_residual <= self.tolerance,
            trials=self.trials,
            max_residual=self.max_residual,
            tolerance=self.tolerance,
        )


def _random_energy_hamiltonian(rng: np.random.Generator, dim: int) -> Hamiltonian:
    return Hamiltonian.from_matrix(random_hermitian(rng, dim))


def _random_qubit_state(rng: np.random.Generator) -> ComplexMatrix:
    if rng.uniform() < 0.25:
        return random_pure_state(rng, 2)
    return random_density_matrix(rng, 2)


def _weighted(probability: float, state: ComplexMatrix | None, dim: int) -> ComplexMatrix:
    if state is None:
        return np.zeros((dim, dim), dtype=np.complex128)
    return probability * state


# cptp


def _check_zoo_qubit(rng: np.random.Generator) -> list[CheckResult]:
    tally = _Tally("cptp.zoo_qubit", CPTP_TOL)
    for _ in range(200):
        tally.add(validate_cptp(random_zoo_channel(rng)).deficit)
    return [tally.result()]


def _check_zoo_ddim(rng: np.random.Generator) -> list[CheckResult]:
    tally = _Tally("cptp.zoo_ddim", CPTP_TOL)
    for dim in (3, 4):
        for _ in range(50):
            channel = random_zoo_channel(rng, _random_energy_hamiltonian(rng, dim))
            tally.add(validate_cptp(channel).deficit)
    return [tally.result()]


def _check_depolarizing(rng: np.random.Generator) -> list[CheckResult]:
    tally = _Tally("cptp.depolarizing_output", ORACLE_TOL)
    for dim in (2, 3, 4, 5):
        channel = depolarizing(dim)
        for _ in range(20):
            out = apply(channel, random_density_matrix(rng, dim))
            tally.add(float(np.linalg.norm(out - np.eye(dim) / dim)))
    return [tally.result()]


# switch


def _random_pair(rng: np.random.Generator) -> tuple[KrausChannel, KrausChannel]:
    return random_zoo_channel(rng), random_zoo_channel(rng)


def _check_switch_completeness(rng: np.random.Generator) -> list[CheckResult]:
    tally = _Tally("switch.kraus_completeness", CPTP_TOL)
    for _ in range(100):
        a, b = _random_pair(rng)
        ks = np.stack(switch_kraus(a, b))
        total = np.einsum("kba,kbc->ac", ks.conj(), ks)
        tally.add(float(np.linalg.norm(total - np.eye(2 * a.dim))))
    return [tally.result()]


def _check_conditional_states(rng: np.random.Generator) -> list[CheckResult]:
    probabilities = _Tally("switch.probabilities", ORACLE_TOL)
    closed_form = _Tally("switch.conditional_closed_form", ORACLE_TOL)
    for _ in range(200):
        a, b = _random_pair(rng)
        rho = _random_qubit_state(rng)
        control, measure = random_control(rng), random_measure(rng)
        pair = conditional_states(a, b, rho, control, measure)
        plus, minus = unnormalized_conditional_states(a, b, rho, control, measure)
        probabilities.add(
            max(abs(pair.p_plus + pair.p_minus - 1.0), -min(pair.p_plus, pair.p_minus, 0.0))
        )
        closed_form.add(
            max(
                float(np.linalg.norm(_weighted(pair.p_plus, pair.rho_plus, 2) - plus)),
                float(np.linalg.norm(_weighted(pair.p_minus, pair.rho_minus, 2) - minus)),
            )
        )
    return [probabilities.result(), closed_form.result()]


def _check_commuting_collapse(rng: np.random.Generator) -> list[CheckResult]:
    tally = _Tally("switch.commuting_collapse", ORACLE_TOL)
    hamiltonian = Hamiltonian.qubit()
    for _ in range(120):
        b = random_zoo_channel(rng)
        a = identity(2)
        rho = _random_qubit_state(rng)
        control, measure = random_control(rng), random_measure(rng)
        classical = classical_output(a, b, rho, control.phi)
        pair = conditional_states(a, b, rho, control, measure)
        residual = 0.0
        for state in (pair.rho_plus, pair.rho_minus):
            if state is not None:
                residual = max(residual, float(np.linalg.norm(state - classical)))
        report = daemonic_ergotropy(a, b, rho, control, measure, hamiltonian)
        tally.add(max(residual, abs(report.dW)))
    return [tally.result()]


def _check_thermal_cross_map(rng: np.random.Generator) -> list[CheckResult]:
    tally = _Tally("switch.thermal_cross_map", ORACLE_TOL)
    for _ in range(50):
        dim = int(rng.integers(2, 5))
        hamiltonian = _random_energy_hamiltonian(rng, dim)
        beta = float(rng.uniform(0.0, 3.0))
        channel = thermalizing(hamiltonian, beta)
        rho = random_density_matrix(rng, dim)
        gibbs = gibbs_state(hamiltonian, beta)
        tally.add(float(np.linalg.norm(cross_map(channel, channel, rho) - gibbs @ rho @ gibbs)))
    return [tally.result()]


# ergotropy


def _check_split(rng: np.random.Generator) -> list[CheckResult]:
    ledger = _Tally("ergotropy.split_ledger", ORACLE_TOL)
    closed_form = _Tally("ergotropy.qubit_split_closed_form", ORACLE_TOL)
    hamiltonian = Hamiltonian.qubit()
    for _ in range(1000):
        rho = _random_qubit_state(rng)
        numeric = split_ergotropy(rho, hamiltonian)
        exact = qubit_split(rho, hamiltonian)
        ledger.add(abs(numeric.W - (numeric.W_i or 0.0) - (numeric.W_c or 0.0)))
        closed_form.add(
            max(
                abs((numeric.W_i or 0.0) - (exact.W_i or 0.0)),
                abs((numeric.W_c or 0.0) - (exact.W_c or 0.0)),
                abs(numeric.W - exact.W),
            )
        )
    return [ledger.result(), closed_form.result()]


def _check_gain_nonnegative(rng: np.random.Generator) -> list[CheckResult]:
    tally = _Tally("ergotropy.gain_nonnegative", GAIN_TOL)
    hamiltonian = Hamiltonian.qubit()
    for _ in range(1000):
        a, b = _random_pair(rng)
        rho = _random_qubit_state(rng)
        report = daemonic_ergotropy(
            a, b, rho, random_control(rng), random_measure(rng), hamiltonian
        )
        tally.add(max(0.0, -report.dW, -report.dW_i))
    return [tally.result()]


def _check_zero_gain(rng: np.random.Generator) -> list[CheckResult]:
    soundness = _Tally("ergotropy.zero_gain_soundness", ZERO_GAIN_DW_TOL)
    hamiltonian = Hamiltonian.qubit()
    for _ in range(500):
        a, b = _random_pair(rng)
        rho = _random_qubit_state(rng)
        control, measure = random_control(rng), random_measure(rng)
        check = zero_gain_check(a, b, rho, control, measure, hamiltonian)
        if check.predicted_zero:
            report = daemonic_ergotropy(a, b, rho, control, measure, hamiltonian)
            soundness.add(max(0.0, report.dW))
        else:
            soundness.add(0.0)

    # Imbalance 1 - 2p makes both conditional states affine in A o B [rho]
    family = _Tally("ergotropy.zero_gain_family", ZERO_GAIN_DW_TOL)
    for _ in range(20):
        params = AdpfParams(
            gamma=float(rng.uniform(0.05, 1.0)),
            p=float(rng.uniform(0.05, 0.95)),
            q=float(rng.uniform(0.0, 1.0)),
        )
        delta = 1 - 2 * params.p
        coherence = float(rng.uniform(0.0, 1.0)) * math.sqrt((1 - delta) * (1 + delta)) / 2
        rho = coherent_qubit(delta, coherence, float(rng.uniform(0.0, 2 * math.pi)))
        a, b = gad(params.p, params.gamma), phase_flip(params.q)
        check = zero_gain_check(a, b, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian)
        if check.status is ZeroGainStatus.INDETERMINATE:
            continue
        if check.status is ZeroGainStatus.NONZERO:
            family.add(1.0)
            continue
        _, best = optimize_measurement(a, b, rho, REFERENCE_CONTROL, hamiltonian, max_workers=1)
        family.add(max(0.0, best.dW))
    return [soundness.result(), family.result()]


# oracles


def _check_depol_oracles(rng: np.random.Generator) -> list[CheckResult]:
    qubit = _Tally("oracles.depol_qubit", ORACLE_TOL)
    pure = _Tally("oracles.depol_qubit_pure", ORACLE_TOL)
    hamiltonian = Hamiltonian.qubit()
    a = depolarizing(2)
    for _ in range(200):
        rho = _random_qubit_state(rng)
        report = daemonic_ergotropy(a, a, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian)
        qubit.add(depol_qubit_oracle(rho, hamiltonian).residual(report))
    for _ in range(100):
        rho = random_pure_state(rng, 2)
        report = daemonic_ergotropy(a, a, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian)
        pure.add(abs(report.WD - 0.125))

    ddim = _Tally("oracles.depol_ddim", ORACLE_TOL)
    for dim in (3, 4):
        channel = depolarizing(dim)
        for _ in range(100):
            h = _random_energy_hamiltonian(rng, dim)
            rho = random_density_matrix(rng, dim)
            report = daemonic_ergotropy(
                channel, channel, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, h
            )
            ddim.add(depol_ddim_oracle(rho, h).residual(report))
    return [qubit.result(), pure.result(), ddim.result()]


def _check_thermal_oracles(rng: np.random.Generator) -> list[CheckResult]:
    thermal = _Tally("oracles.thermal", ORACLE_TOL)
    limit = _Tally("oracles.thermal_beta_zero", ORACLE_TOL)
    inputs = _Tally("oracles.thermal_input", ORACLE_TOL)
    hamiltonian = Hamiltonian.qubit()
    for _ in range(200):
        beta = float(rng.uniform(0.0, 3.0))
        rho = _random_qubit_state(rng)
        channel = thermalizing(hamiltonian, beta)
        report = daemonic_ergotropy(
            channel, channel, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian
        )
        thermal.add(thermal_oracle(beta, rho, hamiltonian).residual(report))

        at_zero = thermal_oracle(0.0, rho, hamiltonian).gains
        depol = depol_qubit_oracle(rho, hamiltonian)
        limit.add(max(abs(at_zero.WD - depol.WD), abs(at_zero.WD_i - depol.WD_i)))

        beta_in = float(rng.uniform(0.0, 6.0))
        thermal_in = thermal_state(hamiltonian, beta_in)
        report = daemonic_ergotropy(
            channel, channel, thermal_in, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian
        )
        inputs.add(abs(report.dW - thermal_input_gain(beta, beta_in, hamiltonian)))
    return [thermal.result(), limit.result(), inputs.result()]


def _random_adpf(rng: np.random.Generator) -> AdpfParams:
    return AdpfParams(
        gamma=float(rng.uniform(0.0, 1.0)),
        p=float(rng.uniform(0.0, 1.0)),
        q=float(rng.uniform(0.0, 1.0)),
    )


def _check_adpf_oracles(rng: np.random.Generator) -> list[CheckResult]:
    oracle = _Tally("oracles.adpf", ORACLE_TOL)
    window = _Tally("oracles.adpf_window", ORACLE_TOL)
    hamiltonian = Hamiltonian.qubit()
    for _ in range(200):
        params = _random_adpf(rng)
        a, b = gad(params.p, params.gamma), phase_flip(params.q)
        delta = float(rng.uniform(-1.0, 1.0))
        coherence = float(rng.uniform(0.0, 1.0)) * math.sqrt((1 - delta) * (1 + delta)) / 2
        rho = coherent_qubit(delta, coherence, float(rng.uniform(0.0, 2 * math.pi)))
        report = daemonic_ergotropy(a, b, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian)
        oracle.add(adpf_oracle(params, rho).residual(report))

        edges = adpf_window(params)
        if edges.degenerate:
            inside = float(rng.uniform(-1.0, 1.0))
        else:
            inside = float(rng.uniform(-edges.x_minus, edges.x_plus))
        rho = maximally_coherent_qubit(inside)
        report = daemonic_ergotropy(a, b, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian)
        window.add(abs(report.dW_i))
    return [oracle.result(), window.result()]


_SUITE_CHECKS: dict[str, tuple[Callable[[np.random.Generator], list[CheckResult]], ...]] = {
    "cptp": (_check_zoo_qubit, _check_zoo_ddim, _check_depolarizing),
    "switch": (
        _check_switch_completeness,
        _check_conditional_states,
        _check_commuting_collapse,
        _check_thermal_cross_map,
    ),
    "ergotropy": (_check_split, _check_gain_nonnegative, _check_zero_gain),
    "oracles": (_check_depol_oracles, _check_thermal_oracles, _check_adpf_oracles),
}


def verify(suite: str, seed: int) -> VerificationReport:
    """Run one suite, or every suite for "all".

    Args:
        suite: cptp, switch, ergotropy, oracles or all.
        seed: Seed of each suite's random generator.

    Raises:
        ErgoswitchError: If the suite name is unknown.
    """
    if suite == "all":
        names: tuple[str, ...] = SUITES
    elif suite in _SUITE_CHECKS:
        names = (suite,)
    else:
        known = ", ".join((*SUITES, "all"))
        raise ErgoswitchError("verify", f"Unknown suite '{suite}' (known: {known})")

    checks: list[CheckResult] = []
    for name in names:
        rng = np.random.default_rng(seed)
        for check in _SUITE_CHECKS[name]:
            checks.extend(check(rng))
        logger.info("Suite %s finished", name)

    report = VerificationReport(version=__version__, suite=suite, seed=seed, checks=checks)
    for failed in (c for c in report.checks if not c.passed):
        logger.warning(
            "Check %s failed: max residual %.3e > %.1e",
            failed.name,
            failed.max_residual,
            failed.tolerance,
        )
    return report


__all__ = ["ORACLE_TOL", "GAIN_TOL", "ZERO_GAIN_DW_TOL", "SUITES", "verify"]
