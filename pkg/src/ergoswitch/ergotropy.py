"""Ergotropy, passivity and the daemonic gain of the quantum switch.

The generic path works for any dimension through the eigensolver. The
qubit closed forms at the bottom of the module are independent expressions
of the same quantities, written in the energy eigenbasis with
delta = rho_22 - rho_11 (excited minus ground population).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy.optimize import minimize

from ergoswitch.channels import Hamiltonian, KrausChannel, maps_commute
from ergoswitch.config import get_settings
from ergoswitch.errors import DimensionMismatchError, ErgoswitchError, NotQubitError
from ergoswitch.matcore import (
    DEGENERACY_TOL,
    ComplexMatrix,
    RealVector,
    as_matrix,
    commutator,
    dagger,
    hermitian_eig,
    hermitian_part,
)
from ergoswitch.models import (
    TWO_PI,
    ControlSpec,
    DaemonicReport,
    MeasureSpec,
    ZeroGainStatus,
)
from ergoswitch.parallel import ordered_map
from ergoswitch.switch import (
    classical_output,
    composed_outputs,
    conditional_states,
    cross_map,
    gain_operator,
)

logger = logging.getLogger(__name__)

# Optimizer grid: GRID_SIZE x GRID_SIZE over [0, 1] x [0, 2*pi)
GRID_SIZE = 65
OPTIMIZER_XATOL = 1e-6
OPTIMIZER_FATOL = 1e-12
_TIE_TOL = 1e-12

# Zero-gain checker thresholds
ZERO_GAIN_TOL = 1e-9
GAP_TOL = 1e-8


@dataclass(frozen=True)
class ErgotropyReport:
    """Ergotropy of a state, optionally split into incoherent and coherent parts.

    Attributes:
        W: Total ergotropy (absolute energy units of the Hamiltonian).
        passive_state: sum_k r_k |e_k><e_k|, eigenvalues descending on ascending energies.
        W_i: Incoherent part, or None when the split was not computed.
        W_c: Coherent part W - W_i, or None when the split was not computed.
    """

    W: float
    passive_state: ComplexMatrix = field(repr=False)
    W_i: float | None = None
    W_c: float | None = None


@dataclass(frozen=True)
class ZeroGainReport:
    """Outcome of the zero-gain condition check.

    Attributes:
        status: zero, nonzero, or indeterminate (near-degenerate classical output).
        commutator_residual: Frobenius norm of [rho_class, G].
        dominance_margin: min_k (dr_k - 2|G_kk - G_k+1,k+1|) in the rho_class eigenbasis.
        min_gap: Smallest gap between consecutive classical-output eigenvalues.
        details: Human-readable reason for the status.
    """

    status: ZeroGainStatus
    commutator_residual: float = 0.0
    dominance_margin: float = 0.0
    min_gap: float = 0.0
    details: str = ""

    @property
    def predicted_zero(self) -> bool:
        """True only when the conditions guarantee a vanishing gain."""
        return self.status is ZeroGainStatus.ZERO


def _check_dims(operation: str, hamiltonian: Hamiltonian, *dims: int) -> None:
    for dim in dims:
        if dim != hamiltonian.dim:
            raise DimensionMismatchError(operation, hamiltonian.dim, dim)


def _energy_levels(hamiltonian: Hamiltonian) -> list[slice]:
    """Contiguous index ranges of (near-)equal energies, lowest first."""
    energies = hamiltonian.energies
    levels: list[slice] = []
    start = 0
    for k in range(1, len(energies) + 1):
        if k == len(energies) or energies[k] - energies[k - 1] > DEGENERACY_TOL:
            levels.append(slice(start, k))
            start = k
    return levels


def ergotropy(rho: npt.ArrayLike, hamiltonian: Hamiltonian) -> ErgotropyReport:
    """Maximal work extractable from rho by a cyclic unitary.

    W = Tr[H rho] - sum_k e_k r_k with r_k the eigenvalues of rho sorted
    descending and e_k the energies sorted ascending.

    Raises:
        DimensionMismatchError: If rho and H differ in dimension.
    """
    r = as_matrix(rho, "ergotropy")
    _check_dims("ergotropy", hamiltonian, r.shape[0])
    populations = hermitian_eig(r).eigenvalues
    passive_energy = float(np.dot(populations, hamiltonian.energies))
    work = max(hamiltonian.energy(r) - passive_energy, 0.0)
    passive = hamiltonian.from_energy_basis(np.diag(populations).astype(np.complex128))
    return ErgotropyReport(W=work, passive_state=passive)


def is_passive(
    rho: npt.ArrayLike, hamiltonian: Hamiltonian, tol: float | None = None
) -> bool:
    """Whether rho commutes with H and its populations do not grow with energy.

    Populations inside a degenerate energy level are exempt from ordering;
    across levels every population of a lower level must be at least every
    population of the next level up.
    """
    tol = get_settings().passivity_tol if tol is None else tol
    r = as_matrix(rho, "is_passive")
    _check_dims("is_passive", hamiltonian, r.shape[0])

    if np.linalg.norm(commutator(r, hamiltonian.matrix())) > tol:
        return False

    in_energy_basis = hermitian_part(hamiltonian.to_energy_basis(r))
    spectra = [np.linalg.eigvalsh(in_energy_basis[s, s]) for s in _energy_levels(hamiltonian)]
    return all(
        float(lower.min()) >= float(upper.max()) - tol
        for lower, upper in zip(spectra, spectra[1:])
    )


def _dephase(rho: ComplexMatrix, hamiltonian: Hamiltonian) -> ComplexMatrix:
    """Remove coherences between different energy levels."""
    in_energy_basis = hamiltonian.to_energy_basis(rho)
    pinched = np.zeros_like(in_energy_basis)
    for s in _energy_levels(hamiltonian):
        pinched[s, s] = in_energy_basis[s, s]
    return hamiltonian.from_energy_basis(pinched)


def split_ergotropy(rho: npt.ArrayLike, hamiltonian: Hamiltonian) -> ErgotropyReport:
    """Ergotropy with its incoherent / coherent split.

    W_i is the ergotropy of the energy-dephased state; W_c = W - W_i.

    Raises:
        DimensionMismatchError: If rho and H differ in dimension.
    """
    r = as_matrix(rho, "split_ergotropy")
    total = ergotropy(r, hamiltonian)
    incoherent = ergotropy(_dephase(r, hamiltonian), hamiltonian).W
    incoherent = min(max(incoherent, 0.0), total.W)
    return ErgotropyReport(
        W=total.W,
        passive_state=total.passive_state,
        W_i=incoherent,
        W_c=total.W - incoherent,
    )


def daemonic_ergotropy(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
    hamiltonian: Hamiltonian,
) -> DaemonicReport:
    """Measurement-averaged ergotropy of the switch output and its gain over classical control.

    Each conditional state is split once and its W, W_i, W_c are weighted by
    the branch probability. Degenerate branches contribute nothing.

    Raises:
        DimensionMismatchError: If the channels, state and Hamiltonian disagree.
    """
    _check_dims("daemonic_ergotropy", hamiltonian, a.dim, b.dim)
    pair = conditional_states(a, b, rho_in, control, measure)

    wd = wd_i = wd_c = 0.0
    for probability, state in pair.branches():
        if state is None:
            continue
        branch = split_ergotropy(state, hamiltonian)
        wd += probability * branch.W
        wd_i += probability * (branch.W_i or 0.0)
        wd_c += probability * (branch.W_c or 0.0)

    classical = split_ergotropy(classical_output(a, b, rho_in, control.phi), hamiltonian)
    w_class_i = classical.W_i or 0.0
    w_class_c = classical.W_c or 0.0
    return DaemonicReport(
        measure=measure,
        p_plus=pair.p_plus,
        p_minus=pair.p_minus,
        WD=wd,
        WD_i=wd_i,
        WD_c=wd_c,
        W_class=classical.W,
        W_class_i=w_class_i,
        W_class_c=w_class_c,
        dW=wd - classical.W,
        dW_i=wd_i - w_class_i,
        dW_c=wd_c - w_class_c,
    )


def _stacked_unnormalized_ergotropy(
    stack: npt.NDArray[np.complex128], hamiltonian: Hamiltonian
) -> RealVector:
    """p W(M / p) for every un-normalized state M = p rho in an (n, d, d) stack."""
    herm = (stack + np.conj(np.swapaxes(stack, 1, 2))) / 2
    energy = np.einsum("ab,nba->n", hamiltonian.matrix(), herm).real
    descending = np.linalg.eigvalsh(herm)[:, ::-1]
    return np.asarray(np.maximum(energy - descending @ hamiltonian.energies, 0.0))


@dataclass(frozen=True)
class _Landscape:
    """WD as a vectorized function of the measurement basis."""

    ab: ComplexMatrix
    ba: ComplexMatrix
    chi: ComplexMatrix
    control: ControlSpec
    hamiltonian: Hamiltonian

    def values(self, phi_m: RealVector, alpha_m: RealVector) -> RealVector:
        phi_m = np.clip(phi_m, 0.0, 1.0)
        phi = self.control.phi
        weight = np.sqrt(phi * (1 - phi) * phi_m * (1 - phi_m))[:, None, None]
        term = np.exp(-1j * (self.control.alpha - alpha_m))[:, None, None] * self.chi
        inter = weight * (term + np.conj(np.swapaxes(term, 1, 2)))
        keep = (phi * phi_m)[:, None, None]
        flip = ((1 - phi) * (1 - phi_m))[:, None, None]
        cross_ab = (phi * (1 - phi_m))[:, None, None]
        cross_ba = ((1 - phi) * phi_m)[:, None, None]
        plus = keep * self.ab + flip * self.ba + inter
        minus = cross_ab * self.ab + cross_ba * self.ba - inter
        return _stacked_unnormalized_ergotropy(
            plus, self.hamiltonian
        ) + _stacked_unnormalized_ergotropy(minus, self.hamiltonian)


def optimize_measurement(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    hamiltonian: Hamiltonian,
    *,
    grid_size: int = GRID_SIZE,
    max_workers: int | None = None,
) -> tuple[MeasureSpec, DaemonicReport]:
    """Find the control measurement basis maximizing the daemonic ergotropy.

    A grid over phi' in [0, 1] and alpha' in [0, 2*pi) picks the start point
    (ties go to the smaller phi', then the smaller alpha'); Nelder-Mead then
    refines it. Grid rows are evaluated through ordered_map.

    Returns:
        The optimal MeasureSpec and the full DaemonicReport at it.
    """
    _check_dims("optimize_measurement", hamiltonian, a.dim, b.dim)
    ab, ba = composed_outputs(a, b, rho_in)
    landscape = _Landscape(
        ab=ab, ba=ba, chi=cross_map(a, b, rho_in), control=control, hamiltonian=hamiltonian
    )

    phis = np.linspace(0.0, 1.0, grid_size)
    alphas = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    rows = ordered_map(
        lambda phi_m: landscape.values(np.full(grid_size, phi_m), alphas),
        list(phis),
        max_workers,
    )
    grid = np.vstack(rows)
    best = float(grid.max())
    flat = int(np.flatnonzero(grid.ravel() >= best - _TIE_TOL)[0])
    i, j = divmod(flat, grid_size)
    phi_best, alpha_best = float(phis[i]), float(alphas[j])

    def objective(x: RealVector) -> float:
        return -float(landscape.values(np.array([x[0]]), np.array([x[1]]))[0])

    result = minimize(
        objective,
        x0=np.array([phi_best, alpha_best]),
        method="Nelder-Mead",
        bounds=[(0.0, 1.0), (-math.pi, 3 * math.pi)],
        options={"xatol": OPTIMIZER_XATOL, "fatol": OPTIMIZER_FATOL, "maxiter": 4000},
    )
    if -float(result.fun) > best:
        phi_best = float(np.clip(result.x[0], 0.0, 1.0))
        alpha_best = float(result.x[1])
    logger.debug(
        "Measurement optimum phi'=%.6f alpha'=%.6f (grid %.3e, refined %.3e, %d evals)",
        phi_best,
        alpha_best,
        best,
        -float(result.fun),
        result.nfev,
    )

    measure = MeasureSpec(phi_m=phi_best, alpha_m=alpha_best)
    return measure, daemonic_ergotropy(a, b, rho_in, control, measure, hamiltonian)


def _sign(x: float) -> float:
    return float(np.sign(x))


def _qubit_gap(operation: str, hamiltonian: Hamiltonian, dim: int) -> float:
    if dim != 2:
        raise NotQubitError(operation, dim)
    _check_dims(operation, hamiltonian, dim)
    return float(hamiltonian.energies[1] - hamiltonian.energies[0])


def _imbalance(matrix: ComplexMatrix) -> float:
    return float((matrix[1, 1] - matrix[0, 0]).real)


def causal_incoherent_gain(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    phi: float,
    hamiltonian: Hamiltonian | None = None,
) -> float:
    """Incoherent gain available from learning the application order alone.

    Nonzero only when (A o B)[rho] and (B o A)[rho] have population
    imbalances of opposite sign.

    Raises:
        NotQubitError: If the channels are not qubit channels.
    """
    hamiltonian = hamiltonian or Hamiltonian.qubit()
    gap = _qubit_gap("causal_incoherent_gain", hamiltonian, a.dim)
    ab, ba = composed_outputs(a, b, rho_in)
    d_ab = _imbalance(hamiltonian.to_energy_basis(ab))
    d_ba = _imbalance(hamiltonian.to_energy_basis(ba))
    order_info = 0.5 * (1.0 - _sign(d_ab) * _sign(d_ba))
    return gap * order_info * min(phi * abs(d_ab), (1.0 - phi) * abs(d_ba))


def zero_gain_check(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
    hamiltonian: Hamiltonian,
    tol: float = ZERO_GAIN_TOL,
) -> ZeroGainReport:
    """Decide from the gain operator whether the daemonic gain vanishes.

    The gain is zero when both conditional states are passive with respect to
    sum_k e_k |r_k><r_k| built on the classical output's eigenbasis: G must
    commute with rho_class and, in that basis, 2|G_kk - G_k+1,k+1| <= dr_k.
    A fully degenerate rho_class needs G fully degenerate; a fully degenerate
    H always gives zero. Classical outputs with eigenvalue gaps below GAP_TOL
    (but not fully degenerate) are reported indeterminate.
    """
    _check_dims("zero_gain_check", hamiltonian, a.dim, b.dim)
    if hamiltonian.is_trivial:
        return ZeroGainReport(
            status=ZeroGainStatus.ZERO, details="Hamiltonian is fully degenerate"
        )

    rho_class = classical_output(a, b, rho_in, control.phi)
    g = hermitian_part(gain_operator(a, b, rho_in, control, measure))
    spectrum = hermitian_eig(rho_class)
    gaps = -np.diff(spectrum.eigenvalues)
    min_gap = float(gaps.min())

    if float(spectrum.eigenvalues[0] - spectrum.eigenvalues[-1]) <= DEGENERACY_TOL:
        g_values = np.linalg.eigvalsh(g)
        spread = float(g_values[-1] - g_values[0])
        status = ZeroGainStatus.ZERO if spread <= tol else ZeroGainStatus.NONZERO
        return ZeroGainReport(
            status=status,
            min_gap=min_gap,
            dominance_margin=-spread,
            details=f"Classical output fully degenerate; gain-operator spread {spread:.3e}",
        )

    residual = float(np.linalg.norm(commutator(rho_class, g)))
    vecs = spectrum.eigenvectors
    g_diag = np.real(np.diag(dagger(vecs) @ g @ vecs))
    margin = float(np.min(gaps - 2.0 * np.abs(np.diff(g_diag))))

    if min_gap < GAP_TOL:
        status = ZeroGainStatus.INDETERMINATE
        details = f"Classical output nearly degenerate (min gap {min_gap:.3e})"
    elif residual <= tol and margin >= -tol:
        status = ZeroGainStatus.ZERO
        details = "Conditional states passive on the classical eigenbasis"
    elif residual > tol:
        status = ZeroGainStatus.NONZERO
        details = f"Commutator residual {residual:.3e} exceeds {tol:.1e}"
    else:
        status = ZeroGainStatus.NONZERO
        details = f"Population ordering violated (margin {margin:.3e})"
    return ZeroGainReport(
        status=status,
        commutator_residual=residual,
        dominance_margin=margin,
        min_gap=min_gap,
        details=details,
    )


# Qubit closed forms


@dataclass(frozen=True)
class _QubitTerms:
    """Composed outputs and cross-map of a qubit pair in the energy basis."""

    gap: float
    ab: ComplexMatrix
    ba: ComplexMatrix
    chi: ComplexMatrix
    phi: float

    @property
    def delta_class(self) -> float:
        return self.phi * _imbalance(self.ab) + (1 - self.phi) * _imbalance(self.ba)

    @property
    def order_contrast(self) -> float:
        """phi dAB - (1 - phi) dBA."""
        return self.phi * _imbalance(self.ab) - (1 - self.phi) * _imbalance(self.ba)

    @property
    def zeta(self) -> complex:
        return complex(self.chi[1, 1] - self.chi[0, 0])


def _qubit_terms(
    operation: str,
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    hamiltonian: Hamiltonian,
) -> _QubitTerms:
    gap = _qubit_gap(operation, hamiltonian, a.dim)
    ab, ba = composed_outputs(a, b, rho_in)
    return _QubitTerms(
        gap=gap,
        ab=hamiltonian.to_energy_basis(ab),
        ba=hamiltonian.to_energy_basis(ba),
        chi=hamiltonian.to_energy_basis(cross_map(a, b, rho_in)),
        phi=control.phi,
    )


def _weight(control: ControlSpec, measure: MeasureSpec) -> float:
    return math.sqrt(control.phi * (1 - control.phi) * measure.phi_m * (1 - measure.phi_m))


def _delta_g(terms: _QubitTerms, control: ControlSpec, measure: MeasureSpec) -> float:
    phase = cmath.exp(-1j * (control.alpha - measure.alpha_m))
    return 0.5 * (2 * measure.phi_m - 1) * terms.order_contrast + 2 * _weight(
        control, measure
    ) * (phase * terms.zeta).real


def qubit_split(rho: npt.ArrayLike, hamiltonian: Hamiltonian) -> ErgotropyReport:
    """Closed-form qubit split.

    W_i = max(0, delta) and W_c = (eta - sqrt(eta^2 - 4|rho_12|^2)) / 2 with
    eta^2 = 2 Tr(rho^2) - 1, both in units of the energy gap.

    Raises:
        NotQubitError: If rho is not 2x2.
    """
    r = as_matrix(rho, "qubit_split")
    gap = _qubit_gap("qubit_split", hamiltonian, r.shape[0])
    in_energy_basis = hamiltonian.to_energy_basis(r)
    delta = _imbalance(in_energy_basis)
    coherence = abs(in_energy_basis[0, 1])
    purity = float(np.trace(r @ r).real)
    eta = math.sqrt(max(2 * purity - 1, 0.0))
    w_i = gap * max(0.0, delta)
    w_c = gap * 0.5 * (eta - math.sqrt(max(eta**2 - 4 * coherence**2, 0.0)))
    return ErgotropyReport(
        W=w_i + w_c,
        passive_state=ergotropy(r, hamiltonian).passive_state,
        W_i=w_i,
        W_c=w_c,
    )


def qubit_incoherent_gain(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
    hamiltonian: Hamiltonian,
) -> float:
    """Incoherent daemonic gain max{0, |dG| - |delta_class| / 2} for a qubit pair."""
    terms = _qubit_terms("qubit_incoherent_gain", a, b, rho_in, control, hamiltonian)
    d_g = _delta_g(terms, control, measure)
    return terms.gap * max(0.0, abs(d_g) - abs(terms.delta_class) / 2)


def optimal_incoherent_measurement(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    hamiltonian: Hamiltonian | None = None,
) -> MeasureSpec:
    """Measurement basis maximizing the incoherent daemonic gain.

    alpha' = alpha - arg(zeta) and
    phi' = (1 + N / sqrt(N^2 + 4 phi (1 - phi) |zeta|^2)) / 2 with
    N = phi dAB - (1 - phi) dBA. When both N and zeta vanish every basis is
    optimal and phi' = 1/2 is returned.
    """
    hamiltonian = hamiltonian or Hamiltonian.qubit()
    terms = _qubit_terms(
        "optimal_incoherent_measurement", a, b, rho_in, control, hamiltonian
    )
    n = terms.order_contrast
    radius = math.sqrt(n**2 + 4 * control.phi * (1 - control.phi) * abs(terms.zeta) ** 2)
    phi_m = 0.5 if radius == 0.0 else 0.5 * (1 + n / radius)
    alpha_m = control.alpha - cmath.phase(terms.zeta)
    return MeasureSpec(phi_m=min(max(phi_m, 0.0), 1.0), alpha_m=alpha_m)


def optimal_incoherent_gain(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    hamiltonian: Hamiltonian,
) -> float:
    """Incoherent daemonic gain at the optimal basis.

    (1/2) max{0, sqrt(N^2 + 4 phi (1 - phi) |zeta|^2) - |delta_class|}.
    """
    terms = _qubit_terms("optimal_incoherent_gain", a, b, rho_in, control, hamiltonian)
    radius = math.sqrt(
        terms.order_contrast**2 + 4 * control.phi * (1 - control.phi) * abs(terms.zeta) ** 2
    )
    return terms.gap * 0.5 * max(0.0, radius - abs(terms.delta_class))


def commuting_incoherent_gain(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    hamiltonian: Hamiltonian,
) -> float:
    """Optimal incoherent gain for commuting maps, where delta_class = dAB.

    (1/2) max{0, sqrt((2 phi - 1)^2 delta_class^2 + 4 phi (1 - phi) |zeta|^2) - |delta_class|}.

    Raises:
        ErgoswitchError: If A and B do not commute as maps.
    """
    terms = _qubit_terms("commuting_incoherent_gain", a, b, rho_in, control, hamiltonian)
    if not maps_commute(a, b):
        raise ErgoswitchError("commuting_incoherent_gain", "Maps do not commute")
    phi = control.phi
    d_class = terms.delta_class
    radius = math.sqrt(
        (2 * phi - 1) ** 2 * d_class**2 + 4 * phi * (1 - phi) * abs(terms.zeta) ** 2
    )
    return terms.gap * 0.5 * max(0.0, radius - abs(d_class))


def _gain_terms(
    operation: str,
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
    hamiltonian: Hamiltonian,
) -> tuple[float, float, complex, float, complex]:
    """(gap, delta_class, rho_class_12, dG, G_12) in the energy basis."""
    terms = _qubit_terms(operation, a, b, rho_in, control, hamiltonian)
    phi = control.phi
    rho_class = phi * terms.ab + (1 - phi) * terms.ba
    phase = cmath.exp(-1j * (control.alpha - measure.alpha_m))
    coherent = phase * terms.chi
    g = (measure.phi_m - 0.5) * (phi * terms.ab - (1 - phi) * terms.ba) + _weight(
        control, measure
    ) * (coherent + dagger(coherent))
    return (
        terms.gap,
        terms.delta_class,
        complex(rho_class[0, 1]),
        _delta_g(terms, control, measure),
        complex(g[0, 1]),
    )


def qubit_coherent_gain(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
    hamiltonian: Hamiltonian,
) -> float:
    """Coherent daemonic gain of a qubit pair; may be negative."""
    gap, d_c, c_12, d_g, g_12 = _gain_terms(
        "qubit_coherent_gain", a, b, rho_in, control, measure, hamiltonian
    )
    plus = 0.5 * math.hypot(d_c + 2 * d_g, 2 * abs(c_12 + 2 * g_12))
    minus = 0.5 * math.hypot(d_c - 2 * d_g, 2 * abs(c_12 - 2 * g_12))
    classical = math.hypot(d_c, 2 * abs(c_12))
    incoherent = 0.5 * abs(d_c + 2 * d_g) + 0.5 * abs(d_c - 2 * d_g) - abs(d_c)
    return gap * 0.5 * (plus + minus - classical - incoherent)


def qubit_coherent_zero_condition(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
    hamiltonian: Hamiltonian,
    tol: float = 1e-10,
) -> bool:
    """Sufficient condition for a vanishing (coherent and total) gain of a qubit pair.

    For rho_class != 1/2: (dG, G_12) = lambda (delta_class, rho_class_12) with
    real |lambda| <= 1/2, i.e. delta_class G_12 = dG rho_class_12 together with
    |delta_class| >= 2|dG|. For rho_class = 1/2: dG = G_12 = 0.
    """
    _, d_c, c_12, d_g, g_12 = _gain_terms(
        "qubit_coherent_zero_condition", a, b, rho_in, control, measure, hamiltonian
    )
    if abs(d_c) <= tol and abs(c_12) <= tol:
        return abs(d_g) <= tol and abs(g_12) <= tol
    if abs(d_c) > tol:
        ratio = complex(d_g / d_c)
    else:
        ratio = g_12 / c_12
    if abs(ratio.imag) > tol or abs(ratio.real) > 0.5 + tol:
        return False
    lam = ratio.real
    return abs(d_g - lam * d_c) <= tol and abs(g_12 - lam * c_12) <= tol


__all__ = [
    "GRID_SIZE",
    "ZERO_GAIN_TOL",
    "GAP_TOL",
    "ErgotropyReport",
    "ZeroGainReport",
    "ergotropy",
    "is_passive",
    "split_ergotropy",
    "daemonic_ergotropy",
    "optimize_measurement",
    "causal_incoherent_gain",
    "zero_gain_check",
    "qubit_split",
    "qubit_incoherent_gain",
    "optimal_incoherent_measurement",
    "optimal_incoherent_gain",
    "commuting_incoherent_gain",
    "qubit_coherent_gain",
    "qubit_coherent_zero_condition",
]
