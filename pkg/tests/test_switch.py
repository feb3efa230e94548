"""Tests for the quantum switch and its derived operators."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ergoswitch.channels import (
    PAULI_X,
    PAULI_Z,
    Hamiltonian,
    KrausChannel,
    apply,
    compose,
    depolarizing,
    gad,
    gibbs_state,
    identity,
    phase_flip,
    thermalizing,
    unitary,
    x_rotation,
)
from ergoswitch.errors import DimensionMismatchError, ParameterRangeError
from ergoswitch.matcore import partial_trace_q
from ergoswitch.models import ControlSpec, MeasureSpec
from ergoswitch.sampling import random_control, random_density_matrix, random_measure
from ergoswitch.switch import (
    chi_nc,
    classical_output,
    classical_switch_apply,
    composed_outputs,
    conditional_states,
    control_ket,
    cross_map,
    gain_operator,
    kraus_commuting,
    measurement_basis,
    switch_apply,
    switch_kraus,
    unnormalized_conditional_states,
)

HALF = ControlSpec(phi=0.5, alpha=0.0)
HALF_MEASURE = MeasureSpec(phi_m=0.5, alpha_m=0.0)

PAIRS = [
    (gad(0.3, 0.6), phase_flip(0.2)),
    (gad(0.7, 0.4), x_rotation(1.3)),
    (depolarizing(2), depolarizing(2)),
    (thermalizing(Hamiltonian.qubit(), 0.8), x_rotation(0.5)),
]
PAIR_IDS = ["gad-flip", "gad-rotation", "depol-depol", "thermal-rotation"]


def _blocks(joint: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return joint[0::2, 0::2], joint[1::2, 1::2], joint[0::2, 1::2]


class TestControlStates:
    """Tests for control preparation and measurement kets."""

    def test_control_ket(self) -> None:
        """|phi, alpha> = sqrt(phi)|0> + e^{i alpha} sqrt(1 - phi)|1>."""
        ket = control_ket(ControlSpec(phi=0.25, alpha=math.pi / 2))

        assert_allclose(ket, [0.5, 1j * math.sqrt(0.75)], atol=1e-15)

    def test_measurement_basis_orthonormal(self, rng: np.random.Generator) -> None:
        """The measurement pair is orthonormal for any phi', alpha'."""
        plus, minus = measurement_basis(random_measure(rng))

        assert np.vdot(plus, plus).real == pytest.approx(1.0)
        assert np.vdot(minus, minus).real == pytest.approx(1.0)
        assert abs(np.vdot(plus, minus)) == pytest.approx(0.0, abs=1e-15)


class TestSwitchKraus:
    """Tests for the switch Kraus operators."""

    def test_identity_pair(self) -> None:
        """Two identity channels give a single identity operator."""
        ops = switch_kraus(identity(2), identity(2))

        assert len(ops) == 1
        assert_allclose(ops[0], np.eye(4))

    @pytest.mark.parametrize(("a", "b"), PAIRS, ids=PAIR_IDS)
    def test_completeness(self, a: KrausChannel, b: KrausChannel) -> None:
        """sum K^dagger K = 1 on the joint space."""
        ops = switch_kraus(a, b)
        total = sum(k.conj().T @ k for k in ops)

        assert len(ops) == len(a) * len(b)
        assert_allclose(total, np.eye(2 * a.dim), atol=1e-9)

    def test_dimension_mismatch(self) -> None:
        """Both channels must act on the same space."""
        with pytest.raises(DimensionMismatchError):
            switch_kraus(identity(2), identity(3))


class TestSwitchApply:
    """Tests for the joint switch output."""

    @pytest.mark.parametrize(("a", "b"), PAIRS, ids=PAIR_IDS)
    def test_block_structure(
        self, a: KrausChannel, b: KrausChannel, rng: np.random.Generator
    ) -> None:
        """Blocks are phi AB, (1 - phi) BA and e^{-i alpha} sqrt(phi (1 - phi)) chi."""
        rho = random_density_matrix(rng, 2)
        control = random_control(rng)
        joint = switch_apply(a, b, rho, control)
        ab, ba = composed_outputs(a, b, rho)
        top, bottom, off = _blocks(joint)
        phi = control.phi

        assert_allclose(top, phi * ab, atol=1e-10)
        assert_allclose(bottom, (1 - phi) * ba, atol=1e-10)
        weight = np.exp(-1j * control.alpha) * math.sqrt(phi * (1 - phi))
        expected_off = weight * cross_map(a, b, rho)
        assert_allclose(off, expected_off, atol=1e-10)
        assert np.trace(joint).real == pytest.approx(1.0, abs=1e-12)

    def test_definite_orders(self, rng: np.random.Generator) -> None:
        """phi = 1 runs A o B, phi = 0 runs B o A."""
        a, b = gad(0.2, 0.5), x_rotation(0.9)
        rho = random_density_matrix(rng, 2)
        ab, ba = composed_outputs(a, b, rho)

        first = switch_apply(a, b, rho, ControlSpec(phi=1.0))
        second = switch_apply(a, b, rho, ControlSpec(phi=0.0))

        assert_allclose(first, np.kron(ab, np.diag([1.0, 0.0])), atol=1e-12)
        assert_allclose(second, np.kron(ba, np.diag([0.0, 1.0])), atol=1e-12)

    def test_partial_trace_is_classical_output(self, rng: np.random.Generator) -> None:
        """Discarding the control leaves phi AB + (1 - phi) BA."""
        a, b = gad(0.6, 0.3), x_rotation(0.4)
        rho = random_density_matrix(rng, 2)
        control = ControlSpec(phi=0.3, alpha=1.0)

        reduced = partial_trace_q(switch_apply(a, b, rho, control))

        assert_allclose(reduced, classical_output(a, b, rho, 0.3), atol=1e-10)

    def test_classical_control_is_separable(self, rng: np.random.Generator) -> None:
        """An incoherent control gives a block-diagonal mixture."""
        a, b = gad(0.6, 0.3), x_rotation(0.4)
        rho = random_density_matrix(rng, 2)
        ab, ba = composed_outputs(a, b, rho)

        joint = classical_switch_apply(a, b, rho, 0.4)
        top, bottom, off = _blocks(joint)

        assert_allclose(top, 0.4 * ab, atol=1e-12)
        assert_allclose(bottom, 0.6 * ba, atol=1e-12)
        assert_allclose(off, 0.0, atol=1e-15)

    def test_state_dimension_checked(self) -> None:
        """The input state must match the channels."""
        with pytest.raises(DimensionMismatchError):
            switch_apply(identity(2), identity(2), np.eye(3) / 3, HALF)

    @pytest.mark.parametrize("phi", [-0.1, 1.1])
    def test_classical_phi_range(self, phi: float) -> None:
        """The classical weight must lie in [0, 1]."""
        with pytest.raises(ParameterRangeError):
            classical_output(identity(2), identity(2), np.eye(2) / 2, phi)
        with pytest.raises(ParameterRangeError):
            classical_switch_apply(identity(2), identity(2), np.eye(2) / 2, phi)


class TestCrossMap:
    """Tests for the cross-map."""

    def test_depolarizing_pair(self, rng: np.random.Generator) -> None:
        """Two depolarizing maps give chi = rho / 4."""
        rho = random_density_matrix(rng, 2)

        assert_allclose(cross_map(depolarizing(2), depolarizing(2), rho), rho / 4, atol=1e-12)

    @pytest.mark.parametrize("dim", [2, 3])
    def test_thermalizing_pair(self, rng: np.random.Generator, dim: int) -> None:
        """Two thermalizing maps give chi = G rho G."""
        h = Hamiltonian.diagonal(list(range(dim)))
        channel = thermalizing(h, 0.9)
        rho = random_density_matrix(rng, dim)
        g = gibbs_state(h, 0.9)

        assert_allclose(cross_map(channel, channel, rho), g @ rho @ g, atol=1e-10)

    def test_gad_phase_flip(self, rng: np.random.Generator) -> None:
        """chi = AB - 2 gamma (1 - q) diag(p rho_11, (1 - p) rho_00)."""
        p, gamma, q = 0.3, 0.6, 0.2
        a, b = gad(p, gamma), phase_flip(q)
        rho = random_density_matrix(rng, 2)
        ab, _ = composed_outputs(a, b, rho)
        correction = np.diag([p * rho[1, 1].real, (1 - p) * rho[0, 0].real])

        expected = ab - 2 * gamma * (1 - q) * correction
        assert_allclose(cross_map(a, b, rho), expected, atol=1e-12)

    def test_not_a_state_in_general(self, rng: np.random.Generator) -> None:
        """chi need not have unit trace."""
        rho = random_density_matrix(rng, 2)

        assert np.trace(cross_map(depolarizing(2), depolarizing(2), rho)).real == pytest.approx(
            0.25
        )


class TestClassicalOutput:
    """Tests for the control-discarded output."""

    def test_commuting_maps(self, rng: np.random.Generator) -> None:
        """Commuting maps give A o B for any phi."""
        a, b = gad(0.3, 0.5), phase_flip(0.4)
        rho = random_density_matrix(rng, 2)

        assert_allclose(classical_output(a, b, rho, 0.2), apply(compose(a, b), rho), atol=1e-12)

    def test_thermalizing_pair_is_gibbs(self, rng: np.random.Generator) -> None:
        """Two thermalizing maps output the Gibbs state."""
        channel = thermalizing(Hamiltonian.qubit(), 1.0)
        e = math.exp(-1.0)

        out = classical_output(channel, channel, random_density_matrix(rng, 2), 0.5)

        assert_allclose(out, np.diag([1.0, e]) / (1 + e), atol=1e-12)

    def test_half_is_mean_of_orders(self, rng: np.random.Generator) -> None:
        """phi = 1/2 averages the two orders."""
        a, b = gad(0.2, 0.7), x_rotation(1.0)
        rho = random_density_matrix(rng, 2)
        ab, ba = composed_outputs(a, b, rho)

        assert_allclose(classical_output(a, b, rho, 0.5), (ab + ba) / 2, atol=1e-15)


class TestConditionalStates:
    """Tests for post-measurement conditional states."""

    @pytest.mark.parametrize(("a", "b"), PAIRS, ids=PAIR_IDS)
    def test_matches_closed_form(
        self, a: KrausChannel, b: KrausChannel, rng: np.random.Generator
    ) -> None:
        """Projection of the joint state agrees with the algebraic forms."""
        rho = random_density_matrix(rng, 2)
        control, measure = random_control(rng), random_measure(rng)

        pair = conditional_states(a, b, rho, control, measure)
        plus, minus = unnormalized_conditional_states(a, b, rho, control, measure)

        assert pair.p_plus + pair.p_minus == pytest.approx(1.0, abs=1e-10)
        assert pair.p_plus == pytest.approx(np.trace(plus).real, abs=1e-10)
        assert pair.p_minus == pytest.approx(np.trace(minus).real, abs=1e-10)
        for probability, state, weighted in (
            (pair.p_plus, pair.rho_plus, plus),
            (pair.p_minus, pair.rho_minus, minus),
        ):
            if state is not None:
                assert_allclose(probability * state, weighted, atol=1e-10)

    def test_computational_measurement(self, rng: np.random.Generator) -> None:
        """phi' = 1 finds A o B with probability phi."""
        a, b = gad(0.2, 0.5), x_rotation(0.9)
        rho = random_density_matrix(rng, 2)
        control = ControlSpec(phi=0.3, alpha=0.4)

        pair = conditional_states(a, b, rho, control, MeasureSpec(phi_m=1.0, alpha_m=2.0))

        assert pair.p_plus == pytest.approx(0.3)
        assert pair.rho_plus is not None
        assert_allclose(pair.rho_plus, composed_outputs(a, b, rho)[0], atol=1e-10)

    def test_depolarizing_pair(self, rng: np.random.Generator) -> None:
        """Depolarizing maps at (1/2, 0) give p_+- rho_+- = 1/4 +- rho/8."""
        rho = random_density_matrix(rng, 2)
        channel = depolarizing(2)

        pair = conditional_states(channel, channel, rho, HALF, HALF_MEASURE)

        assert pair.p_plus == pytest.approx(5 / 8)
        assert pair.p_minus == pytest.approx(3 / 8)
        assert pair.rho_plus is not None and pair.rho_minus is not None
        assert_allclose(5 / 8 * pair.rho_plus, np.eye(2) / 4 + rho / 8, atol=1e-12)
        assert_allclose(3 / 8 * pair.rho_minus, np.eye(2) / 4 - rho / 8, atol=1e-12)

    def test_degenerate_branch(self, rng: np.random.Generator) -> None:
        """A branch of zero probability carries no state."""
        rho = random_density_matrix(rng, 2)

        pair = conditional_states(
            identity(2), identity(2), rho, ControlSpec(phi=1.0), MeasureSpec(phi_m=1.0)
        )

        assert pair.p_plus == pytest.approx(1.0)
        assert pair.rho_minus is None
        assert pair.branches()[1] == (pair.p_minus, None)

    @pytest.mark.parametrize(
        ("a", "b"),
        [
            (identity(2), gad(0.3, 0.4)),
            (phase_flip(0.3), phase_flip(0.8)),
            (unitary(PAULI_X, "X"), unitary(PAULI_Z, "Z")),
        ],
        ids=["identity", "flips", "anticommuting"],
    )
    def test_kraus_commuting_collapse(
        self, a: KrausChannel, b: KrausChannel, rng: np.random.Generator
    ) -> None:
        """Kraus-(anti)commuting pairs leave both branches in A o B."""
        rho = random_density_matrix(rng, 2)
        pair = conditional_states(a, b, rho, random_control(rng), random_measure(rng))
        ab, _ = composed_outputs(a, b, rho)

        for _, state in pair.branches():
            if state is not None:
                assert_allclose(state, ab, atol=1e-10)


class TestGainOperator:
    """Tests for the gain operator G."""

    @pytest.mark.parametrize(("a", "b"), PAIRS, ids=PAIR_IDS)
    def test_reconstructs_conditional_states(
        self, a: KrausChannel, b: KrausChannel, rng: np.random.Generator
    ) -> None:
        """p_+- rho_+- = rho_class / 2 +- G."""
        rho = random_density_matrix(rng, 2)
        control, measure = random_control(rng), random_measure(rng)

        g = gain_operator(a, b, rho, control, measure)
        plus, minus = unnormalized_conditional_states(a, b, rho, control, measure)
        half_class = classical_output(a, b, rho, control.phi) / 2

        assert_allclose(plus, half_class + g, atol=1e-10)
        assert_allclose(minus, half_class - g, atol=1e-10)

    def test_depolarizing_pair(self, rng: np.random.Generator) -> None:
        """Depolarizing maps at (1/2, 0) give G = rho / 8."""
        rho = random_density_matrix(rng, 2)

        g = gain_operator(depolarizing(2), depolarizing(2), rho, HALF, HALF_MEASURE)

        assert_allclose(g, rho / 8, atol=1e-12)

    def test_computational_measurement_drops_coherence(self, rng: np.random.Generator) -> None:
        """phi' = 1 leaves only the population term."""
        a, b = gad(0.2, 0.5), x_rotation(0.9)
        rho = random_density_matrix(rng, 2)
        ab, ba = composed_outputs(a, b, rho)

        g = gain_operator(a, b, rho, ControlSpec(phi=0.3), MeasureSpec(phi_m=1.0))

        assert_allclose(g, 0.5 * (0.3 * ab - 0.7 * ba), atol=1e-12)


class TestChiNc:
    """Tests for the non-commutative part of the cross-map."""

    @pytest.mark.parametrize(("a", "b"), PAIRS, ids=PAIR_IDS)
    def test_decomposition_both_signs(
        self, a: KrausChannel, b: KrausChannel, rng: np.random.Generator
    ) -> None:
        """chi = AB + chi_nc_minus / 2 = -AB + chi_nc_plus / 2."""
        rho = random_density_matrix(rng, 2)
        chi = cross_map(a, b, rho)
        ab, _ = composed_outputs(a, b, rho)

        assert_allclose(chi, ab + chi_nc(a, b, rho, "minus") / 2, atol=1e-10)
        assert_allclose(chi, -ab + chi_nc(a, b, rho, "plus") / 2, atol=1e-10)

    def test_vanishes_for_commuting_kraus(self, rng: np.random.Generator) -> None:
        """Identity against anything has no non-commutative part."""
        rho = random_density_matrix(rng, 2)

        assert_allclose(chi_nc(identity(2), gad(0.3, 0.4), rho, "minus"), 0.0, atol=1e-15)

    def test_depolarizing_pair(self, rng: np.random.Generator) -> None:
        """chi_nc_minus = 2 (rho / 4 - 1/2) for two depolarizing maps."""
        rho = random_density_matrix(rng, 2)

        result = chi_nc(depolarizing(2), depolarizing(2), rho, "minus")

        assert_allclose(result, 2 * (rho / 4 - np.eye(2) / 2), atol=1e-12)

    def test_adpf_trivial_state_is_scalar(self) -> None:
        """For delta = 1 - 2p the damping/flip pair leaves only a multiple of 1."""
        p, gamma, q = 0.3, 0.6, 0.2
        # delta = rho_excited - rho_ground = 1 - 2p
        rho = np.diag([p, 1 - p]).astype(np.complex128)
        rho[0, 1] = rho[1, 0] = 0.2

        result = chi_nc(gad(p, gamma), phase_flip(q), rho, "minus")

        expected = -4 * gamma * (1 - q) * p * (1 - p) * np.eye(2)
        assert_allclose(result, expected, atol=1e-12)


class TestKrausCommuting:
    """Tests for the Kraus-level commutation classifier."""

    def test_commuting(self) -> None:
        """Two phase flips commute operator by operator."""
        assert kraus_commuting(phase_flip(0.2), phase_flip(0.7)) == 1

    def test_anticommuting(self) -> None:
        """X and Z anticommute."""
        assert kraus_commuting(unitary(PAULI_X), unitary(PAULI_Z)) == -1

    def test_mixed(self) -> None:
        """Damping and dephasing commute as maps but not Kraus by Kraus."""
        assert kraus_commuting(gad(0.3, 0.5), phase_flip(0.4)) is None
