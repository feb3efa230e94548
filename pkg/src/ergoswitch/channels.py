"""Kraus-operator CPTP channels and the channel zoo.

A channel is an ordered tuple of Kraus operators. The order is part of the
channel's identity: two decompositions of the same map give the same
composed maps but different switch cross-maps.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from ergoswitch.errors import DimensionMismatchError, ErgoswitchError, ParameterRangeError
from ergoswitch.matcore import (
    ComplexMatrix,
    RealVector,
    as_matrix,
    dagger,
    frozen,
    hermitian_eig,
)

logger = logging.getLogger(__name__)

# Frobenius deficit ||sum K^dagger K - 1|| accepted as complete
CPTP_TOL = 1e-9

# Matrix-unit probes must agree to this for two maps to commute
COMMUTE_TOL = 1e-10

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by an ordered Kraus decomposition.

    Attributes:
        kraus: Kraus operators K_i, all d x d, stored read-only.
        label: Human-readable name.
    """

    kraus: tuple[ComplexMatrix, ...] = field(repr=False)
    label: str = "channel"

    def __post_init__(self) -> None:
        if not self.kraus:
            raise ErgoswitchError("KrausChannel", "A channel needs at least one Kraus operator")
        ops = tuple(frozen(as_matrix(k, "KrausChannel")) for k in self.kraus)
        dim = ops[0].shape[0]
        for op in ops:
            if op.shape[0] != dim:
                raise DimensionMismatchError("KrausChannel", dim, op.shape[0])
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        """Hilbert-space dimension the channel acts on."""
        return int(self.kraus[0].shape[0])

    def __len__(self) -> int:
        return len(self.kraus)

    def stacked(self) -> npt.NDArray[np.complex128]:
        """Kraus operators as an (n, d, d) array."""
        return np.stack(self.kraus)


@dataclass(frozen=True)
class Hamiltonian:
    """System Hamiltonian in spectral form.

    Attributes:
        energies: Eigenvalues sorted ascending.
        eigenvectors: Orthonormal energy eigenvectors as columns.
    """

    energies: RealVector = field(repr=False)
    eigenvectors: ComplexMatrix = field(repr=False)

    def __post_init__(self) -> None:
        energies = np.asarray(self.energies, dtype=np.float64)
        vectors = as_matrix(self.eigenvectors, "Hamiltonian")
        if energies.shape[0] != vectors.shape[0]:
            raise DimensionMismatchError("Hamiltonian", vectors.shape[0], energies.shape[0])
        if np.any(np.diff(energies) < 0):
            raise ErgoswitchError("Hamiltonian", "Energies must be sorted ascending")
        object.__setattr__(self, "energies", frozen(energies))
        object.__setattr__(self, "eigenvectors", frozen(vectors))

    @classmethod
    def qubit(cls) -> Hamiltonian:
        """Two-level convention: ground energy 0, excited energy 1."""
        return cls.diagonal([0.0, 1.0])

    @classmethod
    def diagonal(cls, energies: Sequence[float]) -> Hamiltonian:
        """Hamiltonian diagonal in the computational basis.

        Energies may be given in any order; basis vectors follow their energy.
        """
        values = np.asarray(energies, dtype=np.float64)
        order = np.argsort(values, kind="stable")
        basis = np.eye(len(values), dtype=np.complex128)[:, order]
        return cls(energies=values[order], eigenvectors=basis)

    @classmethod
    def from_matrix(cls, matrix: npt.ArrayLike) -> Hamiltonian:
        """Build from a Hermitian matrix."""
        spec = hermitian_eig(matrix)
        return cls(energies=spec.eigenvalues[::-1], eigenvectors=spec.eigenvectors[:, ::-1])

    @property
    def dim(self) -> int:
        """Hilbert-space dimension."""
        return int(self.energies.shape[0])

    @property
    def is_trivial(self) -> bool:
        """True when H is proportional to the identity."""
        return bool(self.energies[-1] - self.energies[0] <= 1e-12)

    def matrix(self) -> ComplexMatrix:
        """Dense matrix sum_k e_k |e_k><e_k|."""
        vecs = self.eigenvectors
        return np.asarray((vecs * self.energies) @ dagger(vecs), dtype=np.complex128)

    def to_energy_basis(self, operator: ComplexMatrix) -> ComplexMatrix:
        """Express an operator in the energy eigenbasis."""
        vecs = self.eigenvectors
        return np.asarray(dagger(vecs) @ operator @ vecs, dtype=np.complex128)

    def from_energy_basis(self, operator: ComplexMatrix) -> ComplexMatrix:
        """Inverse of to_energy_basis."""
        vecs = self.eigenvectors
        return np.asarray(vecs @ operator @ dagger(vecs), dtype=np.complex128)

    def energy(self, rho: ComplexMatrix) -> float:
        """Mean energy Tr[H rho]."""
        return float(np.trace(self.matrix() @ rho).real)


@dataclass(frozen=True)
class CptpReport:
    """Result of a completeness check on a Kraus set."""

    label: str
    deficit: float
    tolerance: float = CPTP_TOL

    @property
    def is_valid(self) -> bool:
        """True when sum K^dagger K equals the identity within tolerance."""
        return self.deficit <= self.tolerance


def validate_cptp(channel: KrausChannel, tol: float = CPTP_TOL) -> CptpReport:
    """Check the completeness relation sum_i K_i^dagger K_i = 1.

    Returns:
        CptpReport with the Frobenius norm of the deficit. A violation is
        reported, never raised.
    """
    total = sum((dagger(k) @ k for k in channel.kraus), np.zeros_like(channel.kraus[0]))
    deficit = float(np.linalg.norm(total - np.eye(channel.dim)))
    if deficit > tol:
        logger.debug("Channel %s is not trace preserving (deficit %.3e)", channel.label, deficit)
    return CptpReport(label=channel.label, deficit=deficit, tolerance=tol)


def apply(channel: KrausChannel, rho: npt.ArrayLike) -> ComplexMatrix:
    """Return sum_i K_i rho K_i^dagger.

    Any d x d operator is accepted, so matrix units can be used as probes.

    Raises:
        DimensionMismatchError: If rho's dimension differs from the channel's.
    """
    r = as_matrix(rho, "apply")
    if r.shape[0] != channel.dim:
        raise DimensionMismatchError("apply", channel.dim, r.shape[0])
    ks = channel.stacked()
    return np.asarray(np.einsum("kab,bc,kdc->ad", ks, r, ks.conj()), dtype=np.complex128)


def compose(outer: KrausChannel, inner: KrausChannel) -> KrausChannel:
    """Sequential composition outer o inner with Kraus set {O_i I_j}, i outer.

    Raises:
        DimensionMismatchError: If the channels act on different dimensions.
    """
    if outer.dim != inner.dim:
        raise DimensionMismatchError("compose", outer.dim, inner.dim)
    ops = tuple(o @ i for o in outer.kraus for i in inner.kraus)
    return KrausChannel(kraus=ops, label=f"{outer.label} o {inner.label}")


def matrix_units(dim: int) -> list[ComplexMatrix]:
    """Standard operator basis E_mn = |m><n| in row-major order."""
    units = []
    for m in range(dim):
        for n in range(dim):
            unit = np.zeros((dim, dim), dtype=np.complex128)
            unit[m, n] = 1.0
            units.append(unit)
    return units


def maps_equal(a: KrausChannel, b: KrausChannel, tol: float = COMMUTE_TOL) -> bool:
    """Whether two channels act identically on every matrix unit."""
    if a.dim != b.dim:
        return False
    return all(
        np.max(np.abs(apply(a, e) - apply(b, e))) <= tol for e in matrix_units(a.dim)
    )


def maps_commute(a: KrausChannel, b: KrausChannel, tol: float = COMMUTE_TOL) -> bool:
    """Whether A o B and B o A agree on the full matrix-unit basis.

    Raises:
        DimensionMismatchError: If the channels act on different dimensions.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError("maps_commute", a.dim, b.dim)
    return maps_equal(compose(a, b), compose(b, a), tol)


def weyl_basis(dim: int) -> list[ComplexMatrix]:
    """Orthogonal unitary basis used by the depolarizing and thermalizing maps.

    For d = 2 this is the Pauli set (1, X, Y, Z); for d > 2 the clock-and-shift
    operators X^a Z^b in index order a, b = 0..d-1.
    """
    if dim < 2:
        raise ParameterRangeError("weyl_basis", "d", dim, (2, math.inf))
    if dim == 2:
        return [PAULI_I.copy(), PAULI_X.copy(), PAULI_Y.copy(), PAULI_Z.copy()]
    shift = np.roll(np.eye(dim, dtype=np.complex128), 1, axis=0)
    omega = np.exp(2j * np.pi / dim)
    clock = np.diag(omega ** np.arange(dim)).astype(np.complex128)
    basis = []
    for a in range(dim):
        for b in range(dim):
            op = np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
            basis.append(np.asarray(op, dtype=np.complex128))
    return basis


def identity(dim: int = 2) -> KrausChannel:
    """Identity channel with the single Kraus operator 1."""
    return KrausChannel(kraus=(np.eye(dim, dtype=np.complex128),), label="identity")


def unitary(u: npt.ArrayLike, label: str = "unitary") -> KrausChannel:
    """Unitary channel rho -> U rho U^dagger.

    Raises:
        ErgoswitchError: If U is not unitary within 1e-10.
    """
    op = as_matrix(u, "unitary")
    if np.max(np.abs(dagger(op) @ op - np.eye(op.shape[0]))) > 1e-10:
        raise ErgoswitchError("unitary", "Operator is not unitary")
    return KrausChannel(kraus=(op,), label=label)


def x_rotation(theta: float) -> KrausChannel:
    """Qubit rotation exp(-i theta X / 2) as a unitary channel."""
    u = math.cos(theta / 2) * PAULI_I - 1j * math.sin(theta / 2) * PAULI_X
    return unitary(u, label=f"x_rotation({theta:g})")


def depolarizing(dim: int = 2) -> KrausChannel:
    """Completely depolarizing map rho -> 1/d with Kraus {U_i / d}."""
    if dim < 2:
        raise ParameterRangeError("depolarizing", "d", dim, (2, math.inf))
    ops = tuple(u / dim for u in weyl_basis(dim))
    return KrausChannel(kraus=ops, label=f"depolarizing({dim})")


def _check_unit(operation: str, name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterRangeError(operation, name, value, (0.0, 1.0))


def _gibbs_weights(operation: str, hamiltonian: Hamiltonian, beta: float) -> RealVector:
    if not (math.isfinite(beta) and beta >= 0.0):
        raise ParameterRangeError(operation, "beta", beta, (0.0, math.inf))
    shifted = hamiltonian.energies - hamiltonian.energies[0]
    weights = np.exp(-beta * shifted)
    return np.asarray(weights / weights.sum(), dtype=np.float64)


def gibbs_state(hamiltonian: Hamiltonian, beta: float) -> ComplexMatrix:
    """Thermal state e^{-beta H} / Z.

    Raises:
        ParameterRangeError: If beta is negative or not finite.
    """
    weights = _gibbs_weights("gibbs_state", hamiltonian, beta)
    vecs = hamiltonian.eigenvectors
    return np.asarray((vecs * weights) @ dagger(vecs), dtype=np.complex128)


def thermalizing(hamiltonian: Hamiltonian, beta: float) -> KrausChannel:
    """Map every input to the Gibbs state, with Kraus {A U_i / sqrt(d)}.

    A is the principal square root of the Gibbs state, built from the
    Hamiltonian's own eigenbasis.
    """
    weights = _gibbs_weights("thermalizing", hamiltonian, beta)
    vecs = hamiltonian.eigenvectors
    root = (vecs * np.sqrt(weights)) @ dagger(vecs)
    dim = hamiltonian.dim
    ops = tuple(root @ u / math.sqrt(dim) for u in weyl_basis(dim))
    return KrausChannel(kraus=ops, label=f"thermalizing(beta={beta:g})")


def gad(p: float, gamma: float) -> KrausChannel:
    """Generalized amplitude damping with pumping balance p and strength gamma.

    Kraus order A0..A3: damping towards |0> weighted by p, pumping towards |1>
    weighted by 1 - p.
    """
    _check_unit("gad", "p", p)
    _check_unit("gad", "gamma", gamma)
    sp, sq = math.sqrt(p), math.sqrt(1.0 - p)
    sg, sd = math.sqrt(gamma), math.sqrt(1.0 - gamma)
    a0 = sp * np.array([[1, 0], [0, sd]], dtype=np.complex128)
    a1 = sp * np.array([[0, sg], [0, 0]], dtype=np.complex128)
    a2 = sq * np.array([[sd, 0], [0, 1]], dtype=np.complex128)
    a3 = sq * np.array([[0, 0], [sg, 0]], dtype=np.complex128)
    return KrausChannel(kraus=(a0, a1, a2, a3), label=f"gad(p={p:g}, gamma={gamma:g})")


def phase_flip(q: float) -> KrausChannel:
    """Phase flip with Kraus {sqrt(q) 1, sqrt(1-q) Z}."""
    _check_unit("phase_flip", "q", q)
    b0 = math.sqrt(q) * PAULI_I
    b1 = math.sqrt(1.0 - q) * PAULI_Z
    return KrausChannel(kraus=(b0, b1), label=f"phase_flip(q={q:g})")


ChannelBuilder = Callable[[Mapping[str, float], Hamiltonian], KrausChannel]

CHANNEL_BUILDERS: dict[str, ChannelBuilder] = {
    "identity": lambda params, h: identity(h.dim),
    "depolarizing": lambda params, h: depolarizing(h.dim),
    "thermalizing": lambda params, h: thermalizing(h, float(params.get("beta", 0.0))),
    "gad": lambda params, h: gad(float(params["p"]), float(params["gamma"])),
    "phase_flip": lambda params, h: phase_flip(float(params["q"])),
    "x_rotation": lambda params, h: x_rotation(float(params["theta"])),
}

_QUBIT_ONLY = frozenset({"gad", "phase_flip", "x_rotation"})


def build_channel(
    name: str, params: Mapping[str, float], hamiltonian: Hamiltonian
) -> KrausChannel:
    """Build a zoo channel from its name and a parameter map.

    Args:
        name: One of CHANNEL_BUILDERS.
        params: Parameters by name (gamma, p, q, beta, theta).
        hamiltonian: System Hamiltonian; fixes the dimension and the Gibbs state.

    Raises:
        ErgoswitchError: If the name is unknown or a required parameter is missing.
        ParameterRangeError: If a parameter is out of range.
    """
    builder = CHANNEL_BUILDERS.get(name)
    if builder is None:
        known = ", ".join(sorted(CHANNEL_BUILDERS))
        raise ErgoswitchError("build_channel", f"Unknown channel '{name}' (known: {known})")
    if name in _QUBIT_ONLY and hamiltonian.dim != 2:
        raise DimensionMismatchError("build_channel", 2, hamiltonian.dim)
    try:
        return builder(params, hamiltonian)
    except KeyError as e:
        raise ErgoswitchError("build_channel", f"Channel '{name}' needs parameter {e}") from e


__all__ = [
    "CPTP_TOL",
    "COMMUTE_TOL",
    "PAULI_I",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "KrausChannel",
    "Hamiltonian",
    "CptpReport",
    "CHANNEL_BUILDERS",
    "validate_cptp",
    "apply",
    "compose",
    "matrix_units",
    "maps_equal",
    "maps_commute",
    "weyl_basis",
    "identity",
    "unitary",
    "x_rotation",
    "depolarizing",
    "gibbs_state",
    "thermalizing",
    "gad",
    "phase_flip",
    "build_channel",
]
