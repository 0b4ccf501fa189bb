import numpy as np
import pytest

from tnqc import statevector as sv
from tnqc.gates import (
    CNOT_CTRL_HI,
    PARAM_COUNT,
    BlockKind,
    Gate,
    GateOp,
    block_matrix,
    expand_block,
    ry,
    rz,
)

from conftest import random_state

ALL_KINDS = list(BlockKind)


def cnot_count(ops):
    return sum(op.gate is Gate.CNOT for op in ops)


def slot_set(ops):
    return {op.param_slot for op in ops if op.trainable}


class TestRotations:
    def test_ry_is_real_rotation(self):
        mat = ry(0.7)
        assert np.allclose(mat.imag, 0)
        assert np.allclose(mat @ mat.conj().T, np.eye(2), atol=1e-15)

    def test_rz_is_diagonal_phase(self):
        mat = rz(1.3)
        assert mat[0, 1] == 0 and mat[1, 0] == 0
        assert np.isclose(mat[0, 0], np.exp(-0.65j))

    def test_batched_angles(self):
        thetas = np.array([0.1, 0.2, 0.3])
        assert ry(thetas).shape == (3, 2, 2)
        assert np.allclose(ry(thetas)[1], ry(0.2))


class TestGateOpValidation:
    def test_rotation_needs_slot_or_angle(self):
        with pytest.raises(ValueError):
            GateOp(Gate.RY, (0,))
        with pytest.raises(ValueError):
            GateOp(Gate.RY, (0,), param_slot=0, angle=1.0)

    def test_cnot_carries_neither(self):
        with pytest.raises(ValueError):
            GateOp(Gate.CNOT, (0, 1), param_slot=0)
        GateOp(Gate.CNOT, (0, 1))  # fine


class TestExpandBlock:
    def test_param_counts(self):
        assert PARAM_COUNT[BlockKind.SIMPLE_REAL] == 2
        assert PARAM_COUNT[BlockKind.SIMPLE_SU2] == 6
        assert PARAM_COUNT[BlockKind.GENERAL_SO4] == 6
        assert PARAM_COUNT[BlockKind.GENERAL_SU4] == 15

    def test_su4_uses_15_slots_and_3_cnots(self):
        ops = expand_block(BlockKind.GENERAL_SU4, 0, 1, range(15))
        assert slot_set(ops) == set(range(15))
        assert cnot_count(ops) == 3

    def test_simple_real_uses_2_slots_and_1_cnot(self):
        ops = expand_block(BlockKind.SIMPLE_REAL, 0, 1, range(2))
        assert slot_set(ops) == {0, 1}
        assert cnot_count(ops) == 1

    def test_so4_uses_2_cnots_and_fixed_quarter_turns(self):
        ops = expand_block(BlockKind.GENERAL_SO4, 0, 1, range(6))
        assert cnot_count(ops) == 2
        fixed = [op for op in ops if not op.trainable and op.gate is not Gate.CNOT]
        assert len(fixed) == 6
        assert all(abs(op.angle) == pytest.approx(np.pi / 2) for op in fixed)

    def test_cnot_target_selects_orientation(self):
        for target, expected in ((1, (0, 1)), (0, (1, 0))):
            ops = expand_block(BlockKind.SIMPLE_REAL, 0, 1, range(2), cnot_target=target)
            cnot = [op for op in ops if op.gate is Gate.CNOT][0]
            assert cnot.wires == expected

    def test_slot_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            expand_block(BlockKind.GENERAL_SU4, 0, 1, range(14))

    def test_bad_cnot_target_rejected(self):
        with pytest.raises(ValueError):
            expand_block(BlockKind.SIMPLE_REAL, 0, 1, range(2), cnot_target=5)


class TestBlockMatrix:
    @pytest.mark.parametrize("kind", ALL_KINDS)
    def test_unitary_for_random_parameters(self, kind):
        rng = np.random.default_rng(11)
        for _ in range(100):
            params = rng.uniform(0, 2 * np.pi, PARAM_COUNT[kind])
            u = block_matrix(kind, params)
            assert np.abs(u.conj().T @ u - np.eye(4)).max() < 1e-12

    def test_simple_real_zero_params_is_cnot(self):
        assert np.allclose(block_matrix(BlockKind.SIMPLE_REAL, [0, 0]), CNOT_CTRL_HI)

    def test_so4_zero_params_is_special_orthogonal(self):
        u = block_matrix(BlockKind.GENERAL_SO4, np.zeros(6))
        u = _strip_global_phase(u)
        assert np.abs(u.imag).max() < 1e-12
        r = u.real
        assert np.abs(r.T @ r - np.eye(4)).max() < 1e-12
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)

    def test_so4_random_params_real_up_to_phase(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            params = rng.uniform(0, 2 * np.pi, 6)
            u = _strip_global_phase(block_matrix(BlockKind.GENERAL_SO4, params))
            assert np.abs(u.imag).max() < 1e-12
            assert np.linalg.det(u.real) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("kind", ALL_KINDS)
    @pytest.mark.parametrize("target", [0, 1])
    def test_expand_matches_matrix_on_states(self, kind, target, rng):
        params = rng.uniform(0, 2 * np.pi, PARAM_COUNT[kind])
        state = random_state(2, rng)
        via_matrix = block_matrix(kind, params, cnot_target=target) @ state
        via_gates = state
        for op in expand_block(kind, 0, 1, range(len(params)), cnot_target=target):
            via_gates = _apply_op(via_gates, op, params)
        assert np.allclose(via_gates, via_matrix, atol=1e-12)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            block_matrix(BlockKind.SIMPLE_SU2, [0.0] * 5)

    def test_su4_generates_entanglement_generically(self):
        rng = np.random.default_rng(3)
        entangled = 0
        for _ in range(100):
            params = rng.uniform(0, 2 * np.pi, 15)
            state = block_matrix(BlockKind.GENERAL_SU4, params) @ sv.zero_state(2)
            psi = state.reshape(2, 2)
            rho = psi @ psi.conj().T
            purity = np.trace(rho @ rho).real
            entangled += purity < 1 - 1e-6
        assert entangled > 50


def _strip_global_phase(u):
    pivot = u.flat[np.argmax(np.abs(u))]
    return u * (abs(pivot) / pivot)


def _apply_op(state, op, params):
    if op.gate is Gate.CNOT:
        control, target = op.wires
        mat = CNOT_CTRL_HI if control < target else np.array(
            [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=complex
        )
        return sv.apply_2q(state, mat, min(op.wires), max(op.wires))
    angle = params[op.param_slot] if op.trainable else op.angle
    mat = ry(angle) if op.gate is Gate.RY else rz(angle)
    return sv.apply_1q(state, mat, op.wires[0])
