"""Seeded random instances for verification suites and property tests.

Every sampler takes a numpy Generator so a single seed fixes a whole run.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ergoswitch.channels import (
    Hamiltonian,
    KrausChannel,
    depolarizing,
    gad,
    identity,
    phase_flip,
    thermalizing,
    x_rotation,
)
from ergoswitch.matcore import ComplexMatrix, ComplexVector
from ergoswitch.models import TWO_PI, ControlSpec, MeasureSpec

logger = logging.getLogger(__name__)

QUBIT_ZOO = ("identity", "depolarizing", "thermalizing", "gad", "phase_flip", "x_rotation")


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> ComplexMatrix:
    return np.asarray(
        rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols)),
        dtype=np.complex128,
    )


def random_hermitian(rng: np.random.Generator, dim: int) -> ComplexMatrix:
    """Hermitian matrix with Gaussian entries."""
    g = _ginibre(rng, dim, dim)
    return np.asarray((g + g.conj().T) / 2, dtype=np.complex128)


def random_pure_state(rng: np.random.Generator, dim: int) -> ComplexMatrix:
    """Haar-random pure density matrix |psi><psi|."""
    psi: ComplexVector = _ginibre(rng, dim, 1)[:, 0]
    psi /= np.linalg.norm(psi)
    return np.asarray(np.outer(psi, psi.conj()), dtype=np.complex128)


def random_density_matrix(
    rng: np.random.Generator, dim: int, rank: int | None = None
) -> ComplexMatrix:
    """Mixed state G G^dagger / Tr from a dim x rank Ginibre matrix (full rank by default)."""
    g = _ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return np.asarray(rho / np.trace(rho).real, dtype=np.complex128)


def random_control(rng: np.random.Generator) -> ControlSpec:
    """Control preparation with phi uniform in [0, 1] and alpha uniform in [0, 2*pi)."""
    return ControlSpec(phi=float(rng.uniform(0.0, 1.0)), alpha=float(rng.uniform(0.0, TWO_PI)))


def random_measure(rng: np.random.Generator) -> MeasureSpec:
    """Measurement basis with phi' uniform in [0, 1] and alpha' uniform in [0, 2*pi)."""
    return MeasureSpec(
        phi_m=float(rng.uniform(0.0, 1.0)), alpha_m=float(rng.uniform(0.0, TWO_PI))
    )


def random_zoo_channel(
    rng: np.random.Generator, hamiltonian: Hamiltonian | None = None
) -> KrausChannel:
    """A zoo channel with random parameters.

    Qubit Hamiltonians draw from the whole zoo; larger dimensions draw from
    the dimension-generic channels (identity, depolarizing, thermalizing).
    """
    hamiltonian = hamiltonian or Hamiltonian.qubit()
    names = QUBIT_ZOO if hamiltonian.dim == 2 else QUBIT_ZOO[:3]
    name = names[int(rng.integers(len(names)))]
    if name == "identity":
        return identity(hamiltonian.dim)
    if name == "depolarizing":
        return depolarizing(hamiltonian.dim)
    if name == "thermalizing":
        return thermalizing(hamiltonian, float(rng.uniform(0.0, 3.0)))
    if name == "gad":
        return gad(float(rng.uniform(0.0, 1.0)), float(rng.uniform(0.0, 1.0)))
    if name == "phase_flip":
        return phase_flip(float(rng.uniform(0.0, 1.0)))
    return x_rotation(float(rng.uniform(0.0, math.pi)))


__all__ = [
    "QUBIT_ZOO",
    "random_hermitian",
    "random_pure_state",
    "random_density_matrix",
    "random_control",
    "random_measure",
    "random_zoo_channel",
]
