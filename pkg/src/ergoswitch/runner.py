"""Batch runner: expand a RunConfig into points, evaluate them and check the oracles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ergoswitch import __version__
from ergoswitch.channels import (
    Hamiltonian,
    KrausChannel,
    build_channel,
    depolarizing,
    gad,
    phase_flip,
    thermalizing,
)
from ergoswitch.config import get_settings
from ergoswitch.ergotropy import daemonic_ergotropy, optimize_measurement
from ergoswitch.errors import ConfigValidationError, ErgoswitchError
from ergoswitch.matcore import HERMITIAN_TOL, ComplexMatrix, hermiticity_deviation
from ergoswitch.models import (
    ControlSpec,
    DaemonicReport,
    MeasurementMode,
    MeasureSpec,
    ResultEnvelope,
    RunRecord,
    RunStatus,
    Scenario,
)
from ergoswitch.output import write_results
from ergoswitch.parallel import ordered_map
from ergoswitch.runconfig import ChannelSection, RunConfig, StateKind, SweepVariable
from ergoswitch.sampling import random_density_matrix
from ergoswitch.scenarios import (
    REFERENCE_CONTROL,
    REFERENCE_MEASURE,
    adpf_oracle,
    adpf_sweep_points,
    coherent_qubit,
    depol_ddim_oracle,
    depol_qubit_oracle,
    maximally_coherent_qubit,
    merge_points,
    thermal_activation_threshold,
    thermal_oracle,
    thermal_state,
)

logger = logging.getLogger(__name__)

# WD above this counts as activated on the thermal (beta, beta_in) grid
ACTIVATION_TOL = 1e-12

_STATE_TOL = 1e-9


@dataclass(frozen=True)
class Point:
    """One evaluation: the configuration with sweep values applied."""

    config: RunConfig
    values: dict[str, float] = field(default_factory=dict)


def _grid(start: float, stop: float, count: int) -> list[float]:
    return [float(v) for v in np.linspace(start, stop, count)]


def expand_points(config: RunConfig, count: int | None = None) -> list[Point]:
    """Sweep points in ascending order of the sweep variable(s).

    Grids are inclusive of both ends. An adpf delta_rho sweep also gets the
    window edges and the special points that fall inside the range.

    Args:
        config: Validated run configuration.
        count: Overrides the primary sweep count.

    Raises:
        ConfigValidationError: If a swept value is out of range.
    """
    sweep = config.sweep
    if sweep is None:
        return [Point(config)]

    n = count if count is not None else sweep.count
    if n < 1:
        raise ConfigValidationError(f"point count must be >= 1, got {n}", key="sweep.count")
    if config.scenario is Scenario.ADPF and sweep.variable is SweepVariable.DELTA_RHO:
        primary = adpf_sweep_points(config.adpf_params(), sweep.start, sweep.stop, n)
    else:
        primary = merge_points(_grid(sweep.start, sweep.stop, n), sweep.start, sweep.stop)

    secondary: list[float | None] = [None]
    if sweep.secondary is not None:
        start = sweep.secondary_start if sweep.secondary_start is not None else 0.0
        stop = sweep.secondary_stop if sweep.secondary_stop is not None else 0.0
        secondary_count = sweep.secondary_count or 1
        secondary = list(merge_points(_grid(start, stop, secondary_count), start, stop))

    points: list[Point] = []
    for x in primary:
        base = config.with_value(sweep.variable, x)
        for y in secondary:
            if y is None or sweep.secondary is None:
                points.append(Point(base, {sweep.variable.value: x}))
                continue
            points.append(
                Point(
                    base.with_value(sweep.secondary, y),
                    {sweep.variable.value: x, sweep.secondary.value: y},
                )
            )
    return points


def build_channels(
    config: RunConfig, hamiltonian: Hamiltonian
) -> tuple[KrausChannel, KrausChannel]:
    """The channel pair of a scenario.

    Raises:
        ConfigValidationError: If a custom channel name or its parameters are invalid.
    """
    if config.scenario in (Scenario.DEPOL_QUBIT, Scenario.DEPOL_DDIM):
        return depolarizing(hamiltonian.dim), depolarizing(hamiltonian.dim)
    if config.scenario is Scenario.THERMAL:
        beta = config.params.beta or 0.0
        return thermalizing(hamiltonian, beta), thermalizing(hamiltonian, beta)
    if config.scenario is Scenario.ADPF:
        params = config.adpf_params()
        return gad(params.p, params.gamma), phase_flip(params.q)
    if config.channel_a is None or config.channel_b is None:
        raise ConfigValidationError("scenario 'custom' requires [channel_a] and [channel_b]")
    return (
        _custom_channel("channel_a", config.channel_a, hamiltonian),
        _custom_channel("channel_b", config.channel_b, hamiltonian),
    )


def _custom_channel(
    section: str, channel: ChannelSection, hamiltonian: Hamiltonian
) -> KrausChannel:
    try:
        return build_channel(channel.name, channel.params(), hamiltonian)
    except ErgoswitchError as e:
        raise ConfigValidationError(e.message, key=f"{section}.name") from e


def _check_state(rho: ComplexMatrix) -> ComplexMatrix:
    deviation = hermiticity_deviation(rho)
    if deviation > HERMITIAN_TOL:
        raise ConfigValidationError(
            f"state matrix is not Hermitian (deviation {deviation:.3e})", key="state.matrix_imag"
        )
    trace = float(np.trace(rho).real)
    lowest = float(np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0])
    if abs(trace - 1.0) > _STATE_TOL or lowest < -_STATE_TOL:
        raise ConfigValidationError(
            f"state matrix must be positive with unit trace (trace {trace!r}, "
            f"lowest eigenvalue {lowest!r})",
            key="state.matrix_real",
        )
    return rho


def build_state(
    config: RunConfig, hamiltonian: Hamiltonian, rng: np.random.Generator | None = None
) -> ComplexMatrix:
    """Input state of the work medium.

    Coherent, maximally coherent and population states are given in the
    energy eigenbasis; explicit matrices in the computational basis. Random
    states are drawn from rng, or from Settings.default_seed without one.
    """
    state = config.state
    if state.kind is StateKind.THERMAL:
        return thermal_state(hamiltonian, state.beta_in or 0.0)
    if state.kind is StateKind.RANDOM:
        rng = rng or np.random.default_rng(get_settings().default_seed)
        return random_density_matrix(rng, hamiltonian.dim)
    if state.kind is StateKind.MATRIX:
        real = np.asarray(state.matrix_real, dtype=np.float64)
        imag = (
            np.asarray(state.matrix_imag, dtype=np.float64)
            if state.matrix_imag is not None
            else np.zeros_like(real)
        )
        if real.shape != imag.shape or real.ndim != 2 or real.shape[0] != real.shape[1]:
            raise ConfigValidationError(
                "matrix_real and matrix_imag must be square and of equal shape",
                key="state.matrix_imag",
            )
        return _check_state((real + 1j * imag).astype(np.complex128))

    if state.populations is not None:
        energy_basis = np.diag(np.asarray(state.populations, dtype=np.complex128))
        limit = math.sqrt(state.populations[0] * state.populations[1])
        if state.coherence > limit + 1e-12:
            raise ConfigValidationError(
                f"coherence {state.coherence} exceeds sqrt(p_1 p_2) = {limit}",
                key="state.coherence",
            )
        energy_basis[0, 1] = state.coherence * np.exp(1j * state.coherence_phase)
        energy_basis[1, 0] = np.conj(energy_basis[0, 1])
    elif state.kind is StateKind.MAXIMALLY_COHERENT:
        energy_basis = maximally_coherent_qubit(state.delta_rho, state.coherence_phase)
    else:
        energy_basis = coherent_qubit(state.delta_rho, state.coherence, state.coherence_phase)
    return hamiltonian.from_energy_basis(energy_basis)


def _imbalance(rho: ComplexMatrix, hamiltonian: Hamiltonian) -> float | None:
    if hamiltonian.dim != 2:
        return None
    r = hamiltonian.to_energy_basis(rho)
    return float((r[1, 1] - r[0, 0]).real)


@dataclass(frozen=True)
class _Evaluator:
    """Evaluates one point; random_state is shared by every point of a run."""

    random_state: ComplexMatrix | None = None

    def __call__(self, point: Point) -> RunRecord:
        config = point.config
        hamiltonian = config.build_hamiltonian()
        a, b = build_channels(config, hamiltonian)
        rho = self.random_state
        if rho is None:
            rho = build_state(config, hamiltonian)
        control = ControlSpec(phi=config.control.phi, alpha=config.control.alpha)
        measure = MeasureSpec(phi_m=config.measurement.phi, alpha_m=config.measurement.alpha)

        if config.measurement.mode is MeasurementMode.OPTIMIZE:
            _, report = optimize_measurement(a, b, rho, control, hamiltonian, max_workers=1)
        else:
            report = daemonic_ergotropy(a, b, rho, control, measure, hamiltonian)

        reference: DaemonicReport | None = None
        if config.scenario.has_oracle:
            at_reference = (
                config.measurement.mode is MeasurementMode.FIXED
                and control == REFERENCE_CONTROL
                and measure == REFERENCE_MEASURE
            )
            reference = (
                report
                if at_reference
                else daemonic_ergotropy(
                    a, b, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian
                )
            )

        delta_rho = _imbalance(rho, hamiltonian)
        extras: dict[str, float | bool] = dict(point.values)
        residual = None
        if reference is not None:
            residual = _oracle_residual(config, rho, hamiltonian, reference, delta_rho, extras)
        if config.scenario is Scenario.THERMAL and config.state.kind is StateKind.THERMAL:
            beta, beta_in = config.params.beta or 0.0, config.state.beta_in or 0.0
            extras["beta"] = beta
            extras["beta_in"] = beta_in
            extras["activated"] = report.WD > ACTIVATION_TOL
            extras["predicted_activation"] = thermal_activation_threshold(beta, beta_in)

        return RunRecord(
            delta_rho=delta_rho,
            p_plus=report.p_plus,
            p_minus=report.p_minus,
            W_class=report.W_class,
            WD=report.WD,
            dW=report.dW,
            dW_i=report.dW_i,
            dW_c=report.dW_c,
            residual_oracle=residual,
            phi_opt=report.measure.phi_m,
            alpha_opt=report.measure.alpha_m,
            WD_i=report.WD_i,
            WD_c=report.WD_c,
            W_class_i=report.W_class_i,
            W_class_c=report.W_class_c,
            extras=extras,
        )


def _oracle_residual(
    config: RunConfig,
    rho: ComplexMatrix,
    hamiltonian: Hamiltonian,
    reference: DaemonicReport,
    delta_rho: float | None,
    extras: dict[str, float | bool],
) -> float:
    """Scenario oracle against the pipeline report at (1/2, 0), (1/2, 0)."""
    if config.scenario is Scenario.DEPOL_QUBIT:
        return depol_qubit_oracle(rho, hamiltonian).residual(reference)
    if config.scenario is Scenario.DEPOL_DDIM:
        return depol_ddim_oracle(rho, hamiltonian).residual(reference)
    if config.scenario is Scenario.THERMAL:
        return thermal_oracle(config.params.beta or 0.0, rho, hamiltonian).residual(reference)

    oracle = adpf_oracle(config.adpf_params(), rho)
    extras["delta_rho_class"] = oracle.delta_rho_class
    extras["zeta"] = oracle.zeta
    extras["in_window"] = oracle.window.contains(delta_rho or 0.0, tol=1e-12)
    return oracle.residual(reference)


def run(
    config: RunConfig,
    out_dir: Path | None = None,
    points: int | None = None,
    seed: int | None = None,
) -> ResultEnvelope:
    """Evaluate every point of a configuration and write results.csv / results.json.

    Args:
        config: Validated run configuration.
        out_dir: Output directory; defaults to [output] directory, then
            Settings.results_dir.
        points: Overrides the sweep count.
        seed: Overrides the configuration seed (then Settings.default_seed).

    Returns:
        The ResultEnvelope; its exit_code is 3 when an oracle residual
        exceeds Settings.residual_limit.

    Raises:
        ConfigValidationError: If the configuration cannot be evaluated.
        ErgoswitchError: If a numerical step fails on a valid configuration.
    """
    settings = get_settings()
    if seed is None:
        seed = config.seed if config.seed is not None else settings.default_seed

    expanded = expand_points(config, points)
    logger.info(
        "Running scenario %s: %d points, seed %d, %d threads",
        config.scenario.value,
        len(expanded),
        seed,
        settings.threads,
    )

    random_state = None
    if config.state.kind is StateKind.RANDOM:
        random_state = build_state(
            config, config.build_hamiltonian(), np.random.default_rng(seed)
        )
    records = ordered_map(_Evaluator(random_state), expanded, settings.threads)

    residuals = [r.residual_oracle for r in records if r.residual_oracle is not None]
    max_residual = max(residuals) if residuals else None
    status = RunStatus.OK
    if max_residual is not None and max_residual > settings.residual_limit:
        status = RunStatus.RESIDUAL_EXCEEDED
        logger.warning(
            "Oracle residual %.3e exceeds limit %.1e", max_residual, settings.residual_limit
        )

    envelope = ResultEnvelope(
        version=__version__,
        config=config.echo(),
        config_digest=config.digest(),
        seed=seed,
        records=records,
        max_residual=max_residual,
        residual_limit=settings.residual_limit,
        status=status,
    )

    directory = out_dir or Path(config.output.directory or settings.results_dir)
    csv_path, json_path = write_results(envelope, directory)
    logger.info("Wrote %s and %s (status %s)", csv_path, json_path, status.value)
    return envelope


__all__ = [
    "ACTIVATION_TOL",
    "Point",
    "expand_points",
    "build_channels",
    "build_state",
    "run",
]
