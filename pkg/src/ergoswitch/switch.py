"""The quantum switch of two channels and everything derived from it.

The switch runs A o B when the control qubit is |0> and B o A when it is
|1>. With the control prepared in |phi, alpha>, the joint output has blocks

    (0,0): phi (A o B)[rho]
    (1,1): (1 - phi) (B o A)[rho]
    (0,1): e^{-i alpha} sqrt(phi (1 - phi)) chi[rho]

where chi[rho] = sum_ij A_i B_j rho A_i^dagger B_j^dagger is the cross-map.
Measuring the control in the basis of a MeasureSpec leaves the system in one
of two conditional states.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from ergoswitch.channels import KrausChannel, apply
from ergoswitch.errors import DimensionMismatchError, ParameterRangeError
from ergoswitch.matcore import (
    ComplexMatrix,
    ComplexVector,
    as_matrix,
    dagger,
    project_q,
    tensor_with_qubit,
)
from ergoswitch.models import ControlSpec, MeasureSpec

logger = logging.getLogger(__name__)

CommutatorSign = Literal["minus", "plus"]

KET_0 = np.array([1.0, 0.0], dtype=np.complex128)
KET_1 = np.array([0.0, 1.0], dtype=np.complex128)
PROJ_0 = np.outer(KET_0, KET_0)
PROJ_1 = np.outer(KET_1, KET_1)


@dataclass(frozen=True)
class ConditionalPair:
    """Post-measurement system states and their probabilities.

    A state is None when its branch probability is at or below the
    projection floor; such a branch contributes nothing to daemonic sums.
    """

    p_plus: float
    p_minus: float
    rho_plus: ComplexMatrix | None = field(default=None, repr=False)
    rho_minus: ComplexMatrix | None = field(default=None, repr=False)

    def branches(self) -> list[tuple[float, ComplexMatrix | None]]:
        """(probability, state) for the + and - outcomes, in that order."""
        return [(self.p_plus, self.rho_plus), (self.p_minus, self.rho_minus)]


def _check_pair(operation: str, a: KrausChannel, b: KrausChannel) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(operation, a.dim, b.dim)


def _check_state(operation: str, a: KrausChannel, rho: npt.ArrayLike) -> ComplexMatrix:
    r = as_matrix(rho, operation)
    if r.shape[0] != a.dim:
        raise DimensionMismatchError(operation, a.dim, r.shape[0])
    return r


def control_ket(control: ControlSpec) -> ComplexVector:
    """|phi, alpha> = sqrt(phi)|0> + e^{i alpha} sqrt(1 - phi)|1>."""
    return np.array(
        [math.sqrt(control.phi), cmath.exp(1j * control.alpha) * math.sqrt(1.0 - control.phi)],
        dtype=np.complex128,
    )


def measurement_basis(measure: MeasureSpec) -> tuple[ComplexVector, ComplexVector]:
    """Orthonormal pair (|phi', alpha'>_+, |phi', alpha'>_-)."""
    phi, alpha = measure.phi_m, measure.alpha_m
    plus = np.array(
        [math.sqrt(phi), cmath.exp(1j * alpha) * math.sqrt(1.0 - phi)], dtype=np.complex128
    )
    minus = np.array(
        [-cmath.exp(-1j * alpha) * math.sqrt(1.0 - phi), math.sqrt(phi)], dtype=np.complex128
    )
    return plus, minus


def switch_kraus(a: KrausChannel, b: KrausChannel) -> list[ComplexMatrix]:
    """Kraus operators K_ij = A_i B_j (x) |0><0| + B_j A_i (x) |1><1|, row-major in (i, j).

    Raises:
        DimensionMismatchError: If the channels act on different dimensions.
    """
    _check_pair("switch_kraus", a, b)
    return [
        tensor_with_qubit(ai @ bj, PROJ_0) + tensor_with_qubit(bj @ ai, PROJ_1)
        for ai in a.kraus
        for bj in b.kraus
    ]


def _apply_switch(a: KrausChannel, b: KrausChannel, joint_in: ComplexMatrix) -> ComplexMatrix:
    ks = np.stack(switch_kraus(a, b))
    return np.asarray(
        np.einsum("kab,bc,kdc->ad", ks, joint_in, ks.conj()), dtype=np.complex128
    )


def switch_apply(
    a: KrausChannel, b: KrausChannel, rho_in: npt.ArrayLike, control: ControlSpec
) -> ComplexMatrix:
    """Joint system-control output of the switch for a pure control state.

    Raises:
        DimensionMismatchError: If dimensions disagree.
    """
    _check_pair("switch_apply", a, b)
    rho = _check_state("switch_apply", a, rho_in)
    ket = control_ket(control)
    return _apply_switch(a, b, tensor_with_qubit(rho, np.outer(ket, ket.conj())))


def classical_switch_apply(
    a: KrausChannel, b: KrausChannel, rho_in: npt.ArrayLike, phi: float
) -> ComplexMatrix:
    """Switch output for the incoherent control diag(phi, 1 - phi).

    The result is the separable mixture phi (A o B)[rho] (x) |0><0| +
    (1 - phi) (B o A)[rho] (x) |1><1|.
    """
    if not 0.0 <= phi <= 1.0:
        raise ParameterRangeError("classical_switch_apply", "phi", phi, (0.0, 1.0))
    _check_pair("classical_switch_apply", a, b)
    rho = _check_state("classical_switch_apply", a, rho_in)
    control = np.diag([phi, 1.0 - phi]).astype(np.complex128)
    return _apply_switch(a, b, tensor_with_qubit(rho, control))


def cross_map(a: KrausChannel, b: KrausChannel, rho_in: npt.ArrayLike) -> ComplexMatrix:
    """chi[rho] = sum_ij A_i B_j rho A_i^dagger B_j^dagger.

    chi is generally neither unit-trace nor positive.
    """
    _check_pair("cross_map", a, b)
    rho = _check_state("cross_map", a, rho_in)
    ka, kb = a.stacked(), b.stacked()
    # (A_i B_j) rho (B_j A_i)^dagger
    left = np.einsum("iab,jbc->ijac", ka, kb)
    right = np.einsum("jab,ibc->ijac", kb, ka)
    return np.asarray(
        np.einsum("ijab,bc,ijdc->ad", left, rho, right.conj()), dtype=np.complex128
    )


def composed_outputs(
    a: KrausChannel, b: KrausChannel, rho_in: npt.ArrayLike
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Return ((A o B)[rho], (B o A)[rho])."""
    _check_pair("composed_outputs", a, b)
    rho = _check_state("composed_outputs", a, rho_in)
    return apply(a, apply(b, rho)), apply(b, apply(a, rho))


def classical_output(
    a: KrausChannel, b: KrausChannel, rho_in: npt.ArrayLike, phi: float
) -> ComplexMatrix:
    """phi (A o B)[rho] + (1 - phi) (B o A)[rho]: the switch output with the control discarded."""
    if not 0.0 <= phi <= 1.0:
        raise ParameterRangeError("classical_output", "phi", phi, (0.0, 1.0))
    ab, ba = composed_outputs(a, b, rho_in)
    return phi * ab + (1.0 - phi) * ba


def conditional_states(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
) -> ConditionalPair:
    """Measure the control of the switch output and return both conditional states."""
    joint = switch_apply(a, b, rho_in, control)
    plus, minus = measurement_basis(measure)
    proj_plus = project_q(joint, plus)
    proj_minus = project_q(joint, minus)
    return ConditionalPair(
        p_plus=proj_plus.probability,
        p_minus=proj_minus.probability,
        rho_plus=proj_plus.state,
        rho_minus=proj_minus.state,
    )


def _interference(
    chi: ComplexMatrix, control: ControlSpec, measure: MeasureSpec
) -> ComplexMatrix:
    """sqrt(phi phi' (1-phi)(1-phi')) (e^{-i(alpha - alpha')} chi + h.c.)."""
    weight = math.sqrt(
        control.phi * measure.phi_m * (1.0 - control.phi) * (1.0 - measure.phi_m)
    )
    term = cmath.exp(-1j * (control.alpha - measure.alpha_m)) * chi
    return np.asarray(weight * (term + dagger(term)), dtype=np.complex128)


def unnormalized_conditional_states(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
) -> tuple[ComplexMatrix, ComplexMatrix]:
    """Closed-form p_+ rho_+ and p_- rho_- built from the composed maps and chi."""
    ab, ba = composed_outputs(a, b, rho_in)
    inter = _interference(cross_map(a, b, rho_in), control, measure)
    phi, phi_m = control.phi, measure.phi_m
    plus = phi * phi_m * ab + (1 - phi) * (1 - phi_m) * ba + inter
    minus = phi * (1 - phi_m) * ab + (1 - phi) * phi_m * ba - inter
    return plus, minus


def gain_operator(
    a: KrausChannel,
    b: KrausChannel,
    rho_in: npt.ArrayLike,
    control: ControlSpec,
    measure: MeasureSpec,
) -> ComplexMatrix:
    """G such that p_+ rho_+ = rho_class/2 + G and p_- rho_- = rho_class/2 - G.

    G = (phi' - 1/2)(phi (A o B) - (1 - phi)(B o A))[rho] + interference term,
    with rho_class the classical output at the control's weight phi.
    """
    ab, ba = composed_outputs(a, b, rho_in)
    inter = _interference(cross_map(a, b, rho_in), control, measure)
    phi = control.phi
    return np.asarray(
        (measure.phi_m - 0.5) * (phi * ab - (1 - phi) * ba) + inter, dtype=np.complex128
    )


def chi_nc(
    a: KrausChannel, b: KrausChannel, rho_in: npt.ArrayLike, sign: CommutatorSign
) -> ComplexMatrix:
    """Non-commutative part of the cross-map.

    chi_nc = 2 sum_ij A_i B_j rho ([B_j, A_i]_-/+)^dagger, normalized so that
    chi = +(A o B)[rho] + chi_nc_minus / 2 = -(A o B)[rho] + chi_nc_plus / 2.
    It vanishes when every Kraus pair commutes (minus) or anticommutes (plus).
    """
    _check_pair("chi_nc", a, b)
    rho = _check_state("chi_nc", a, rho_in)
    parity = -1.0 if sign == "minus" else 1.0
    total = np.zeros_like(rho)
    for ai in a.kraus:
        for bj in b.kraus:
            ab = ai @ bj
            bracket = bj @ ai + parity * ab
            total += ab @ rho @ dagger(bracket)
    return np.asarray(2.0 * total, dtype=np.complex128)


def kraus_commuting(a: KrausChannel, b: KrausChannel, tol: float = 1e-10) -> int | None:
    """+1 if every A_i B_j = B_j A_i, -1 if every pair anticommutes, else None."""
    _check_pair("kraus_commuting", a, b)
    for sign in (1, -1):
        if all(
            np.max(np.abs(ai @ bj - sign * (bj @ ai))) <= tol
            for ai in a.kraus
            for bj in b.kraus
        ):
            return sign
    return None


__all__ = [
    "CommutatorSign",
    "ConditionalPair",
    "control_ket",
    "measurement_basis",
    "switch_kraus",
    "switch_apply",
    "classical_switch_apply",
    "cross_map",
    "composed_outputs",
    "classical_output",
    "conditional_states",
    "unnormalized_conditional_states",
    "gain_operator",
    "chi_nc",
    "kraus_commuting",
]
