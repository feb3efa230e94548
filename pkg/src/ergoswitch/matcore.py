"""Dense complex-matrix primitives.

Hermitian eigendecomposition with a reproducible ordering, tensor products
with the control qubit, and partial trace / projection over that qubit.

Joint system-control matrices use the Kronecker ordering S (x) Q with the
control qubit as the fast index, so joint index (m, j) maps to 2*m + j.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, TypeVar

import numpy as np
import numpy.typing as npt

from ergoswitch.errors import (
    DimensionMismatchError,
    NonHermitianError,
    OddDimensionError,
    ParameterRangeError,
)

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]
ComplexVector = npt.NDArray[np.complex128]
RealVector = npt.NDArray[np.float64]

# Entrywise max |M - M^dagger| accepted as Hermitian
HERMITIAN_TOL = 1e-10

# Eigenvalues closer than this are treated as one degenerate cluster
DEGENERACY_TOL = 1e-10

# Branch probabilities at or below this are flagged degenerate
P_FLOOR = 1e-12

# Magnitude slack when locating the leading component of an eigenvector
_LEAD_TOL = 1e-12


def as_matrix(value: npt.ArrayLike, operation: str) -> ComplexMatrix:
    """Coerce to a square complex128 matrix.

    Args:
        value: Anything numpy can turn into a 2-D array.
        operation: Name of the calling operation, used in error messages.

    Returns:
        A complex128 array of shape (d, d).

    Raises:
        DimensionMismatchError: If the array is not square.
    """
    matrix = np.asarray(value, dtype=np.complex128)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        rows = matrix.shape[0] if matrix.ndim >= 1 else 0
        cols = matrix.shape[1] if matrix.ndim == 2 else 0
        raise DimensionMismatchError(operation, rows, cols)
    return matrix


_ArrayT = TypeVar("_ArrayT", bound="npt.NDArray[Any]")


def frozen(array: _ArrayT) -> _ArrayT:
    """Return a read-only copy of an array."""
    out = array.copy()
    out.flags.writeable = False
    return out


def dagger(matrix: ComplexMatrix) -> ComplexMatrix:
    """Conjugate transpose."""
    return matrix.conj().T


def commutator(x: ComplexMatrix, y: ComplexMatrix) -> ComplexMatrix:
    """Return [x, y] = xy - yx."""
    return x @ y - y @ x


def hermiticity_deviation(matrix: ComplexMatrix) -> float:
    """Largest entrywise |M - M^dagger|."""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - dagger(matrix))))


def hermitian_part(matrix: ComplexMatrix) -> ComplexMatrix:
    """Return (M + M^dagger)/2."""
    return (matrix + dagger(matrix)) / 2


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-decomposition of a Hermitian matrix.

    Attributes:
        eigenvalues: Real eigenvalues sorted descending.
        eigenvectors: Orthonormal eigenvectors as columns, aligned with eigenvalues.
    """

    eigenvalues: RealVector = field(repr=False)
    eigenvectors: ComplexMatrix = field(repr=False)

    @property
    def dim(self) -> int:
        """Matrix dimension."""
        return int(self.eigenvalues.shape[0])

    def reconstruct(self) -> ComplexMatrix:
        """Rebuild sum_k r_k |r_k><r_k|."""
        vecs = self.eigenvectors
        return np.asarray((vecs * self.eigenvalues) @ dagger(vecs), dtype=np.complex128)

    def projector(self, k: int) -> ComplexMatrix:
        """Return |r_k><r_k| for the k-th eigenvector."""
        col = self.eigenvectors[:, k]
        return np.asarray(np.outer(col, col.conj()), dtype=np.complex128)


def _lead_index(column: ComplexVector) -> int:
    """Index of the largest-magnitude component (first one within slack)."""
    mags = np.abs(column)
    return int(np.flatnonzero(mags >= mags.max() - _LEAD_TOL)[0])


def _fix_phase(column: ComplexVector) -> ComplexVector:
    lead = column[_lead_index(column)]
    return np.asarray(column * (np.conj(lead) / abs(lead)), dtype=np.complex128)


def _degenerate_clusters(values: RealVector) -> list[tuple[int, int]]:
    """Split descending eigenvalues into [start, stop) runs of near-equal values."""
    clusters: list[tuple[int, int]] = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k - 1] - values[k] > DEGENERACY_TOL:
            clusters.append((start, k))
            start = k
    return clusters


def hermitian_eig(matrix: npt.ArrayLike) -> SpectralDecomposition:
    """Eigen-decompose a Hermitian matrix with deterministic ordering.

    Eigenvalues come out descending. Within a cluster of eigenvalues equal to
    DEGENERACY_TOL, eigenvectors are ordered by the index of their
    largest-magnitude component; every eigenvector is phased so that this
    component is real positive.

    Args:
        matrix: Hermitian matrix (within HERMITIAN_TOL entrywise).

    Returns:
        SpectralDecomposition with descending eigenvalues.

    Raises:
        NonHermitianError: If the matrix is not Hermitian.
    """
    m = as_matrix(matrix, "hermitian_eig")
    deviation = hermiticity_deviation(m)
    if deviation > HERMITIAN_TOL:
        raise NonHermitianError("hermitian_eig", deviation)

    values, vectors = np.linalg.eigh(hermitian_part(m))
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    columns = [_fix_phase(vectors[:, k]) for k in range(vectors.shape[1])]
    for start, stop in _degenerate_clusters(values):
        if stop - start > 1:
            block = sorted(columns[start:stop], key=_lead_index)
            columns[start:stop] = block

    eigvecs = np.column_stack(columns) if columns else np.zeros((0, 0), dtype=np.complex128)
    return SpectralDecomposition(
        eigenvalues=frozen(values.astype(np.float64)),
        eigenvectors=frozen(eigvecs.astype(np.complex128)),
    )


def tensor_with_qubit(system: npt.ArrayLike, qubit: npt.ArrayLike) -> ComplexMatrix:
    """Return S (x) Q with the qubit as the inner (fast) index.

    Raises:
        DimensionMismatchError: If Q is not 2x2.
    """
    s = as_matrix(system, "tensor_with_qubit")
    q = as_matrix(qubit, "tensor_with_qubit")
    if q.shape[0] != 2:
        raise DimensionMismatchError("tensor_with_qubit", 2, q.shape[0])
    return np.asarray(np.kron(s, q), dtype=np.complex128)


def _split_joint(joint: ComplexMatrix, operation: str) -> npt.NDArray[np.complex128]:
    n = joint.shape[0]
    if n % 2:
        raise OddDimensionError(operation, n)
    d = n // 2
    return joint.reshape(d, 2, d, 2)


def partial_trace_q(joint: npt.ArrayLike) -> ComplexMatrix:
    """Trace out the control qubit: out[m, n] = sum_j J[(m, j), (n, j)].

    Raises:
        OddDimensionError: If the joint matrix has odd dimension.
    """
    j4 = _split_joint(as_matrix(joint, "partial_trace_q"), "partial_trace_q")
    return np.asarray(np.einsum("mjnj->mn", j4), dtype=np.complex128)


@dataclass(frozen=True)
class Projection:
    """Outcome of projecting the control qubit onto a pure state.

    Attributes:
        probability: Tr[(1 (x) |v><v|) J].
        state: Normalized post-measurement system state, or None when the
            probability is at or below P_FLOOR (degenerate branch).
    """

    probability: float
    state: ComplexMatrix | None = field(default=None, repr=False)

    @property
    def is_degenerate(self) -> bool:
        """True when the branch carries no state."""
        return self.state is None

    def weighted_state(self) -> ComplexMatrix | None:
        """Return p * state (the un-normalized branch), or None if degenerate."""
        if self.state is None:
            return None
        return np.asarray(self.probability * self.state, dtype=np.complex128)


def project_q(
    joint: npt.ArrayLike,
    vector: npt.ArrayLike,
    p_floor: float = P_FLOOR,
) -> Projection:
    """Project the control qubit onto |v> and return the conditional system state.

    Args:
        joint: Joint system-control density matrix of dimension 2d.
        vector: Normalized control-qubit state |v> (length 2).
        p_floor: Probabilities at or below this are flagged degenerate.

    Returns:
        Projection with p = Tr[(1 (x) |v><v|) J] and Tr_Q[(1 (x) |v><v|) J] / p.

    Raises:
        ParameterRangeError: If |v| differs from 1 by more than 1e-10.
        OddDimensionError: If the joint matrix has odd dimension.
    """
    v = np.asarray(vector, dtype=np.complex128).reshape(-1)
    if v.shape[0] != 2:
        raise DimensionMismatchError("project_q", 2, v.shape[0])
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-10:
        raise ParameterRangeError("project_q", "|v|", norm, (1.0, 1.0))

    j4 = _split_joint(as_matrix(joint, "project_q"), "project_q")
    proj = np.outer(v, v.conj())
    reduced = np.einsum("jl,mlnj->mn", proj, j4)
    probability = max(float(np.trace(reduced).real), 0.0)
    if probability <= p_floor:
        logger.debug("Degenerate control projection (p=%.3e)", probability)
        return Projection(probability=probability)
    state = hermitian_part(np.asarray(reduced, dtype=np.complex128)) / probability
    return Projection(probability=probability, state=frozen(state))


__all__ = [
    "ComplexMatrix",
    "ComplexVector",
    "RealVector",
    "HERMITIAN_TOL",
    "DEGENERACY_TOL",
    "P_FLOOR",
    "SpectralDecomposition",
    "Projection",
    "as_matrix",
    "frozen",
    "dagger",
    "commutator",
    "hermiticity_deviation",
    "hermitian_part",
    "hermitian_eig",
    "tensor_with_qubit",
    "partial_trace_q",
    "project_q",
]
