"""Closed-form oracles for the worked channel pairs.

Each oracle is an expression independent of the generic
channels -> switch -> ergotropy pipeline, evaluated at control (1/2, 0)
and measurement (1/2, 0). The runner compares the two and reports the
residual.

Two-level scenarios use the energy eigenbasis of the Hamiltonian with
delta = rho_22 - rho_11; energies are in units of the gap e_2 - e_1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from ergoswitch.channels import Hamiltonian, gad, gibbs_state, phase_flip
from ergoswitch.ergotropy import daemonic_ergotropy, optimize_measurement
from ergoswitch.errors import DimensionMismatchError, NotQubitError, ParameterRangeError
from ergoswitch.matcore import ComplexMatrix, as_matrix
from ergoswitch.models import (
    AdpfParams,
    ControlSpec,
    DaemonicReport,
    GainWindow,
    MeasurementMode,
    MeasureSpec,
    SweepRecord,
)
from ergoswitch.parallel import ordered_map

logger = logging.getLogger(__name__)

REFERENCE_CONTROL = ControlSpec(phi=0.5, alpha=0.0)
REFERENCE_MEASURE = MeasureSpec(phi_m=0.5, alpha_m=0.0)

# Sweep points closer than this are merged
DEDUP_TOL = 1e-12


@dataclass(frozen=True)
class DaemonicOracle:
    """Closed-form daemonic ergotropy with its split and the classical ergotropy."""

    WD: float
    WD_i: float
    WD_c: float
    W_class: float = 0.0

    @property
    def dW(self) -> float:
        """Daemonic gain WD - W_class."""
        return self.WD - self.W_class

    def residual(self, report: DaemonicReport) -> float:
        """Largest deviation from a pipeline report."""
        return max(
            abs(self.WD - report.WD),
            abs(self.WD_i - report.WD_i),
            abs(self.WD_c - report.WD_c),
            abs(self.dW - report.dW),
        )


@dataclass(frozen=True)
class ThermalOracle:
    """Thermalizing pair: gains plus the un-normalized conditional states p_+- rho_+-."""

    gains: DaemonicOracle
    p_plus: float
    p_minus: float
    weighted_plus: ComplexMatrix = field(repr=False)
    weighted_minus: ComplexMatrix = field(repr=False)

    def residual(self, report: DaemonicReport) -> float:
        """Largest deviation from a pipeline report."""
        return max(
            self.gains.residual(report),
            abs(self.p_plus - report.p_plus),
            abs(self.p_minus - report.p_minus),
        )


@dataclass(frozen=True)
class AdpfOracle:
    """Amplitude damping + phase flip pair at control (1/2, 0), measurement (1/2, 0).

    Attributes:
        delta_rho_class: Population imbalance of the classical output.
        zeta: Population imbalance of the cross-map.
        window: Initial imbalances without incoherent gain.
        dW: Total daemonic gain.
        dW_i: Incoherent gain (1/2) max{0, |zeta| - |delta_rho_class|}.
        dW_c: dW - dW_i.
        special_points: Imbalances with vanishing total gain (1 - 2p) and with
            a purely incoherent gain, when the latter exists.
    """

    delta_rho_class: float
    zeta: float
    window: GainWindow
    dW: float
    dW_i: float
    dW_c: float
    special_points: tuple[float, ...] = ()

    def residual(self, report: DaemonicReport) -> float:
        """Largest deviation from a pipeline report."""
        return max(
            abs(self.dW - report.dW),
            abs(self.dW_i - report.dW_i),
            abs(self.dW_c - report.dW_c),
        )


def _qubit_frame(
    operation: str, rho: npt.ArrayLike, hamiltonian: Hamiltonian | None
) -> tuple[ComplexMatrix, float]:
    """rho in the energy basis, and the energy gap."""
    r = as_matrix(rho, operation)
    if r.shape[0] != 2:
        raise NotQubitError(operation, r.shape[0])
    hamiltonian = hamiltonian or Hamiltonian.qubit()
    if hamiltonian.dim != 2:
        raise NotQubitError(operation, hamiltonian.dim)
    gap = float(hamiltonian.energies[1] - hamiltonian.energies[0])
    return hamiltonian.to_energy_basis(r), gap


def _imbalance(matrix: ComplexMatrix) -> float:
    return float((matrix[1, 1] - matrix[0, 0]).real)


def _unnormalized_qubit_ergotropy(delta: float, coherence: float) -> float:
    """p W(rho) for p rho with population imbalance delta and |off-diagonal| coherence."""
    return max(0.5 * (delta + math.hypot(delta, 2 * coherence)), 0.0)


def depol_qubit_oracle(
    rho: npt.ArrayLike, hamiltonian: Hamiltonian | None = None
) -> DaemonicOracle:
    """Two completely depolarizing qubit maps.

    WD_i = |delta| / 8, WD = sqrt(delta^2 + 4|rho_12|^2) / 8; a pure state gives WD = 1/8.

    Raises:
        NotQubitError: If rho is not 2x2.
    """
    r, gap = _qubit_frame("depol_qubit_oracle", rho, hamiltonian)
    delta = _imbalance(r)
    wd = gap * math.hypot(delta, 2 * abs(r[0, 1])) / 8
    wd_i = gap * abs(delta) / 8
    return DaemonicOracle(WD=wd, WD_i=wd_i, WD_c=wd - wd_i)


def depol_ddim_oracle(rho: npt.ArrayLike, hamiltonian: Hamiltonian) -> DaemonicOracle:
    """Two completely depolarizing maps in d dimensions.

    WD = (1 / 2d^2) sum_k e_k (r<_k - r>_k) with e_k ascending and r the
    eigenvalues of rho sorted ascending (<) or descending (>); WD_i uses the
    energy-basis populations instead of the eigenvalues.
    """
    r = as_matrix(rho, "depol_ddim_oracle")
    dim = hamiltonian.dim
    if r.shape[0] != dim:
        raise DimensionMismatchError("depol_ddim_oracle", dim, r.shape[0])
    energies = hamiltonian.energies
    scale = 1.0 / (2 * dim**2)

    eigenvalues = np.sort(np.linalg.eigvalsh((r + r.conj().T) / 2))
    populations = np.sort(np.real(np.diag(hamiltonian.to_energy_basis(r))))
    wd = scale * float(np.dot(energies, eigenvalues - eigenvalues[::-1]))
    wd_i = scale * float(np.dot(energies, populations - populations[::-1]))
    return DaemonicOracle(WD=wd, WD_i=wd_i, WD_c=wd - wd_i)


def thermal_oracle(
    beta: float, rho_in: npt.ArrayLike, hamiltonian: Hamiltonian | None = None
) -> ThermalOracle:
    """Two thermalizing qubit maps at inverse temperature beta.

    With e = exp(-beta) the un-normalized conditional states are
    (G +- G rho G) / 2 for the Gibbs state G, and the incoherent daemonic
    ergotropy is max(0, dM_+) + max(0, dM_-) where

        dM_+ = [(1 + e^2) delta - 3 (1 - e^2)] / (4 (1 + e)^2)
        dM_- = [-(1 + e^2) delta - (1 - e^2)] / (4 (1 + e)^2)

    The classical output is the Gibbs state, so the whole daemonic
    ergotropy is gain.

    Raises:
        NotQubitError: If rho is not 2x2.
        ParameterRangeError: If beta is negative or not finite.
    """
    if not (math.isfinite(beta) and beta >= 0.0):
        raise ParameterRangeError("thermal_oracle", "beta", beta, (0.0, math.inf))
    r, gap = _qubit_frame("thermal_oracle", rho_in, hamiltonian)
    e = math.exp(-beta * gap)
    norm = 4 * (1 + e) ** 2
    delta = _imbalance(r)
    d_plus = ((1 + e**2) * delta - 3 * (1 - e**2)) / norm
    d_minus = (-(1 + e**2) * delta - (1 - e**2)) / norm
    wd_i = gap * (max(0.0, d_plus) + max(0.0, d_minus))

    coherence = e * abs(r[0, 1]) / (2 * (1 + e) ** 2)
    wd = gap * (
        _unnormalized_qubit_ergotropy(d_plus, coherence)
        + _unnormalized_qubit_ergotropy(d_minus, coherence)
    )

    gibbs = np.diag([1.0, e]).astype(np.complex128) / (1 + e)
    sandwich = gibbs @ r @ gibbs
    weighted_plus = (gibbs + sandwich) / 2
    weighted_minus = (gibbs - sandwich) / 2
    return ThermalOracle(
        gains=DaemonicOracle(WD=wd, WD_i=wd_i, WD_c=wd - wd_i),
        p_plus=float(np.trace(weighted_plus).real),
        p_minus=float(np.trace(weighted_minus).real),
        weighted_plus=weighted_plus,
        weighted_minus=weighted_minus,
    )


def thermal_input_gain(
    beta: float, beta_in: float, hamiltonian: Hamiltonian | None = None
) -> float:
    """Daemonic gain of two thermalizing maps acting on a thermal input.

    max{0, (e^{-2 beta} - e^{-beta_in}) / (2 (1 + e^{-beta})^2 (1 + e^{-beta_in}))}
    in units of the gap; positive iff beta_in > 2 beta.
    """
    for name, value in (("beta", beta), ("beta_in", beta_in)):
        if not (math.isfinite(value) and value >= 0.0):
            raise ParameterRangeError("thermal_input_gain", name, value, (0.0, math.inf))
    hamiltonian = hamiltonian or Hamiltonian.qubit()
    if hamiltonian.dim != 2:
        raise NotQubitError("thermal_input_gain", hamiltonian.dim)
    gap = float(hamiltonian.energies[1] - hamiltonian.energies[0])
    e, e_in = math.exp(-beta * gap), math.exp(-beta_in * gap)
    return gap * max(0.0, (e**2 - e_in) / (2 * (1 + e) ** 2 * (1 + e_in)))


def thermal_state(hamiltonian: Hamiltonian, beta_in: float) -> ComplexMatrix:
    """Thermal input state at inverse temperature beta_in."""
    return gibbs_state(hamiltonian, beta_in)


def thermal_activation_threshold(beta: float, beta_in: float) -> bool:
    """Whether switching two reservoirs at beta makes a thermal input at beta_in active.

    Work becomes extractable iff T > 2 T_in, i.e. beta_in > 2 beta.
    """
    for name, value in (("beta", beta), ("beta_in", beta_in)):
        if value < 0.0:
            raise ParameterRangeError("thermal_activation_threshold", name, value, (0.0, math.inf))
    return beta_in > 2 * beta


def matched_thermal_beta(p: float) -> float:
    """Inverse temperature with Gibbs(beta) = diag(p, 1 - p) for H = diag(0, 1).

    Defined for 1/2 <= p <= 1; p = 1 gives infinity.
    """
    if not 0.5 <= p <= 1.0:
        raise ParameterRangeError("matched_thermal_beta", "p", p, (0.5, 1.0))
    if p == 1.0:
        return math.inf
    return math.log(p / (1.0 - p))


def coherent_qubit(delta_rho: float, coherence: float, phase: float = 0.0) -> ComplexMatrix:
    """Qubit state with imbalance delta_rho and off-diagonal rho_12 = coherence e^{i phase}.

    Raises:
        ParameterRangeError: If delta_rho is outside [-1, 1] or the coherence
            exceeds sqrt(rho_11 rho_22).
    """
    if not -1.0 <= delta_rho <= 1.0:
        raise ParameterRangeError("coherent_qubit", "delta_rho", delta_rho, (-1.0, 1.0))
    rho_11, rho_22 = (1 - delta_rho) / 2, (1 + delta_rho) / 2
    limit = math.sqrt(rho_11 * rho_22)
    if coherence < 0.0 or coherence > limit + 1e-12:
        raise ParameterRangeError("coherent_qubit", "coherence", coherence, (0.0, limit))
    rho_12 = min(coherence, limit) * np.exp(1j * phase)
    return np.array([[rho_11, rho_12], [np.conj(rho_12), rho_22]], dtype=np.complex128)


def maximally_coherent_qubit(delta_rho: float, phase: float = 0.0) -> ComplexMatrix:
    """Pure qubit state with |rho_12| = sqrt(rho_11 rho_22)."""
    rho_11, rho_22 = (1 - delta_rho) / 2, (1 + delta_rho) / 2
    return coherent_qubit(delta_rho, math.sqrt(max(rho_11 * rho_22, 0.0)), phase)


def adpf_window(params: AdpfParams) -> GainWindow:
    """Imbalances [-x_-, x_+] for which the incoherent gain vanishes.

    With a = 1 - 2p and k = gamma (1 + q) / (2 - gamma (1 + q)):
    p < 1/2 gives x_+ = a, x_- = k a; p > 1/2 gives x_+ = k |a|, x_- = |a|.
    The window is degenerate (no incoherent gain anywhere) when
    gamma (1 - q) = 0. Edges beyond the physical range are clipped to 1.
    """
    gamma, q = params.gamma, params.q
    if gamma * (1 - q) == 0.0:
        return GainWindow(x_minus=1.0, x_plus=1.0, degenerate=True)
    a = 1 - 2 * params.p
    k = gamma * (1 + q) / (2 - gamma * (1 + q))
    if a >= 0:
        x_plus, x_minus = a, k * a
    else:
        x_plus, x_minus = k * abs(a), abs(a)
    return GainWindow(x_minus=min(x_minus, 1.0), x_plus=min(x_plus, 1.0))


def adpf_special_points(params: AdpfParams) -> tuple[float, ...]:
    """1 - 2p (zero total gain) and the purely incoherent-gain imbalance, if defined."""
    points = [1 - 2 * params.p]
    denominator = 4 - params.gamma * (3 + params.q)
    if denominator != 0.0:
        points.append(params.gamma * (2 * params.p - 1) * (3 + params.q) / denominator)
    return tuple(points)


def _adpf_composed(params: AdpfParams, r: ComplexMatrix) -> ComplexMatrix:
    """(A o B)[rho] for the damping / phase-flip pair."""
    gamma, p, q = params.gamma, params.p, params.q
    diagonal = (1 - gamma) * np.diag([r[0, 0].real, r[1, 1].real]) + gamma * np.diag(
        [p, 1 - p]
    )
    off = -(1 - 2 * q) * math.sqrt(1 - gamma) * r[0, 1]
    out = diagonal.astype(np.complex128)
    out[0, 1] = off
    out[1, 0] = np.conj(off)
    return out


def adpf_dW_closed_form(params: AdpfParams, rho: npt.ArrayLike) -> float:
    """Total daemonic gain of the damping / phase-flip pair at (1/2, 0).

    p_+ rho_+ = R - k D and p_- rho_- = k D with R = (A o B)[rho],
    D = diag(p (1 + delta), (1 - p)(1 - delta)) and k = gamma (1 - q) / 2.
    """
    r, _ = _qubit_frame("adpf_dW_closed_form", rho, None)
    delta = _imbalance(r)
    composed = _adpf_composed(params, r)
    k = params.gamma * (1 - params.q) / 2
    d_11, d_22 = params.p * (1 + delta), (1 - params.p) * (1 - delta)
    coherence = abs(composed[0, 1])

    plus = _unnormalized_qubit_ergotropy(_imbalance(composed) - k * (d_22 - d_11), coherence)
    minus = _unnormalized_qubit_ergotropy(k * (d_22 - d_11), 0.0)
    classical = _unnormalized_qubit_ergotropy(_imbalance(composed), coherence)
    return plus + minus - classical


def adpf_oracle(params: AdpfParams, rho: npt.ArrayLike) -> AdpfOracle:
    """Closed forms for the amplitude damping + phase flip pair.

    delta_class = gamma (1 - 2p) + (1 - gamma) delta and
    zeta = delta_class + gamma (1 - q) (delta - (1 - 2p)); energies in units of e_2.

    Raises:
        NotQubitError: If rho is not 2x2.
    """
    r, _ = _qubit_frame("adpf_oracle", rho, None)
    delta = _imbalance(r)
    a = 1 - 2 * params.p
    delta_class = params.gamma * a + (1 - params.gamma) * delta
    zeta = delta_class + params.gamma * (1 - params.q) * (delta - a)
    d_w_i = 0.5 * max(0.0, abs(zeta) - abs(delta_class))
    d_w = adpf_dW_closed_form(params, r)
    return AdpfOracle(
        delta_rho_class=delta_class,
        zeta=zeta,
        window=adpf_window(params),
        dW=d_w,
        dW_i=d_w_i,
        dW_c=d_w - d_w_i,
        special_points=adpf_special_points(params),
    )


def merge_points(values: list[float], start: float, stop: float) -> list[float]:
    """Sort, keep values inside [start, stop] and merge near-duplicates."""
    low, high = min(start, stop), max(start, stop)
    inside = sorted(v for v in values if low - DEDUP_TOL <= v <= high + DEDUP_TOL)
    merged: list[float] = []
    for v in inside:
        if not merged or v - merged[-1] > DEDUP_TOL:
            merged.append(min(max(v, low), high))
    return merged


def adpf_sweep_points(params: AdpfParams, start: float, stop: float, count: int) -> list[float]:
    """Inclusive linspace over delta_rho plus window edges and special points."""
    window = adpf_window(params)
    extra = list(adpf_special_points(params))
    if not window.degenerate:
        extra += [-window.x_minus, window.x_plus]
    grid = [float(v) for v in np.linspace(start, stop, count)]
    return merge_points(grid + extra, start, stop)


def imbalance_sweep(
    params: AdpfParams,
    n: int,
    mode: MeasurementMode = MeasurementMode.FIXED,
    max_workers: int | None = None,
) -> list[SweepRecord]:
    """Gain against initial imbalance for maximally coherent inputs.

    delta_rho runs over [-1, 1] in n points, with the window edges and
    special points injected. Control is (1/2, 0); the measurement is
    (1/2, 0) or optimized per point.

    Raises:
        ParameterRangeError: If n < 3.
    """
    if n < 3:
        raise ParameterRangeError("imbalance_sweep", "n", n, (3, math.inf))
    a, b = gad(params.p, params.gamma), phase_flip(params.q)
    hamiltonian = Hamiltonian.qubit()

    def evaluate(delta_rho: float) -> SweepRecord:
        rho = maximally_coherent_qubit(delta_rho)
        if mode is MeasurementMode.OPTIMIZE:
            _, report = optimize_measurement(
                a, b, rho, REFERENCE_CONTROL, hamiltonian, max_workers=1
            )
        else:
            report = daemonic_ergotropy(
                a, b, rho, REFERENCE_CONTROL, REFERENCE_MEASURE, hamiltonian
            )
        return SweepRecord(
            delta_rho=delta_rho, dW=report.dW, dW_i=report.dW_i, dW_c=report.dW_c
        )

    points = adpf_sweep_points(params, -1.0, 1.0, n)
    logger.debug("Imbalance sweep over %d points (mode=%s)", len(points), mode.value)
    return ordered_map(evaluate, points, max_workers)


__all__ = [
    "REFERENCE_CONTROL",
    "REFERENCE_MEASURE",
    "DaemonicOracle",
    "ThermalOracle",
    "AdpfOracle",
    "depol_qubit_oracle",
    "depol_ddim_oracle",
    "thermal_oracle",
    "thermal_input_gain",
    "thermal_state",
    "thermal_activation_threshold",
    "matched_thermal_beta",
    "coherent_qubit",
    "maximally_coherent_qubit",
    "adpf_window",
    "adpf_special_points",
    "adpf_dW_closed_form",
    "adpf_oracle",
    "merge_points",
    "adpf_sweep_points",
    "imbalance_sweep",
]
