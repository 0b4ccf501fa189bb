"""Gradients of circuit expectations and losses with respect to the angles.

Three routes are provided:

* ``grad_param_shift`` - the exact two-point rule f(t + pi/2) - f(t - pi/2)
  over 2, valid because every trainable gate is a Pauli-half rotation;
* ``grad_adjoint``     - reverse sweep with two statevector passes total,
  independent of the parameter count; the production path;
* ``grad_finite_diff`` - central differences, kept as a dumb test oracle.

Observables are either a real diagonal (1-D array over basis states) or a
dense Hermitian matrix (2-D).  The loss heads in this module fold the
classical chain rule (MSE on readout bits, or softmax + cross entropy on the
readout marginal) into a single effective diagonal observable, so a whole
loss gradient still costs two passes.
"""
from __future__ import annotations

import numpy as np

from .circuits import CircuitTemplate, run, run_many, run_states
from .encoding import binary_code, softmax
from .gates import Gate
from .statevector import (
    _apply_cnot_inplace,
    _apply_ry_inplace,
    _apply_rz_inplace,
    _pair_overlap_y,
    _pair_overlap_z,
    _qubit_view,
    probabilities,
)

HALF_PI = np.pi / 2


# ---------------------------------------------------------------------------
# observables

def diag_z_half(n_qubits: int, qubit: int) -> np.ndarray:
    """Diagonal of (I + sigma_z)/2 on one qubit: 1 where its bit is 0."""
    idx = np.arange(1 << n_qubits)
    bit = (idx >> (n_qubits - 1 - qubit)) & 1
    return (1 - bit).astype(float)


def diag_readout_projector(n_qubits: int, readout, outcome: int) -> np.ndarray:
    """Diagonal of the projector onto one joint outcome of the readout wires."""
    readout = list(readout)
    idx = np.arange(1 << n_qubits)
    value = np.zeros_like(idx)
    for q in readout:
        value = (value << 1) | ((idx >> (n_qubits - 1 - q)) & 1)
    return (value == outcome).astype(float)


def expectation(state: np.ndarray, obs: np.ndarray) -> float:
    """<psi|M|psi> for a diagonal (1-D) or dense Hermitian (2-D) observable."""
    obs = np.asarray(obs)
    if obs.ndim == 1:
        return float(probabilities(state) @ obs)
    return float(np.real(np.vdot(state, obs @ state)))


def _batch_expectations(kets: np.ndarray, obs: np.ndarray) -> np.ndarray:
    obs = np.asarray(obs)
    if obs.ndim == 1:
        return probabilities(kets) @ obs
    return np.einsum("bi,bi->b", kets.conj(), kets @ obs.T).real


def _apply_obs(obs: np.ndarray, kets: np.ndarray) -> np.ndarray:
    obs = np.asarray(obs)
    if obs.ndim == 1:
        return kets * obs
    return kets @ obs.T  # row-vector form of M |k> per row


# ---------------------------------------------------------------------------
# expectation-level gradients

def _shifted_rows(params: np.ndarray, delta: float) -> np.ndarray:
    """Rows [k + delta e_0, k - delta e_0, k + delta e_1, ...]."""
    p = params.size
    rows = np.repeat(params[None, :], 2 * p, axis=0)
    k = np.arange(p)
    rows[2 * k, k] += delta
    rows[2 * k + 1, k] -= delta
    return rows


def grad_param_shift(template: CircuitTemplate, params, input_state, obs) -> np.ndarray:
    """Exact gradient of <M> via the +-pi/2 shift rule (2 runs per parameter)."""
    params = np.asarray(params, dtype=float)
    _require_rotations_only(template)
    kets = run_many(template, _shifted_rows(params, HALF_PI), input_state)
    f = _batch_expectations(kets, obs)
    return (f[0::2] - f[1::2]) / 2


def grad_finite_diff(template: CircuitTemplate, params, input_state, obs, step: float = 1e-4) -> np.ndarray:
    """Central-difference gradient of <M>; test oracle only."""
    if step <= 0:
        raise ValueError("step must be positive")
    params = np.asarray(params, dtype=float)
    kets = run_many(template, _shifted_rows(params, step), input_state)
    f = _batch_expectations(kets, obs)
    return (f[0::2] - f[1::2]) / (2 * step)


def _require_rotations_only(template: CircuitTemplate) -> None:
    for op in template.ops:
        if op.trainable and op.gate not in (Gate.RY, Gate.RZ):
            raise ValueError(f"trainable op is not a Pauli rotation: {op}")


def _adjoint_sweep(template: CircuitTemplate, kets, bras, params=None, param_rows=None) -> np.ndarray:
    """Reverse pass computing d<bra|ket>/d theta_k for all slots at once.

    ``kets`` must hold the forward output states and ``bras`` the observable
    already applied to them (possibly weighted); both are consumed.  Angles
    come from ``params`` (shared) or ``param_rows`` (one vector per row).
    """
    n = template.n_qubits
    grads = np.zeros((kets.shape[0], template.n_params))
    for op in reversed(template.ops):
        if op.gate is Gate.CNOT:
            _apply_cnot_inplace(kets, n, *op.wires)
            _apply_cnot_inplace(bras, n, *op.wires)
            continue
        kview = _qubit_view(kets, n, op.wires[0])
        bview = _qubit_view(bras, n, op.wires[0])
        if op.trainable:
            # d/dt exp(-i t G/2) applied to the pre-gate ket equals
            # (-i/2) G |k_after>; the 2 Re(...) of the bra-ket pairing then
            # collapses to Im <bra| G |k_after>, evaluated before undoing U.
            overlap = _pair_overlap_y if op.gate is Gate.RY else _pair_overlap_z
            grads[:, op.param_slot] = overlap(bview, kview)
            if param_rows is not None:
                angle = param_rows[:, op.param_slot, None, None]
            else:
                angle = params[op.param_slot]
        else:
            angle = op.angle
        if op.gate is Gate.RY:
            c, s = np.cos(angle / 2), np.sin(-angle / 2)
            _apply_ry_inplace(kview, c, s)
            _apply_ry_inplace(bview, c, s)
        else:
            phase = np.exp(0.5j * angle)
            _apply_rz_inplace(kview, phase)
            _apply_rz_inplace(bview, phase)
    return grads


def grad_adjoint(template: CircuitTemplate, params, input_state, obs):
    """(value, gradient) of <M> in two passes, independent of parameter count."""
    params = np.asarray(params, dtype=float)
    _require_rotations_only(template)
    ket = run(template, params, input_state)
    bra = _apply_obs(obs, ket[None, :])
    value = float(np.vdot(ket, bra[0]).real)
    grads = _adjoint_sweep(template, ket[None, :].copy(), bra, params=params)
    return value, grads[0]


# ---------------------------------------------------------------------------
# loss heads

class QubitBinaryHead:
    """MSE on per-qubit |0>-probabilities read as a binary class code."""

    loss_name = "mse_binary"

    def __init__(self, template: CircuitTemplate, n_classes: int):
        if not template.readout:
            raise ValueError("template has no readout wires")
        self.template = template
        self.n_classes = n_classes
        self.n_bits = len(template.readout)
        self.masks = np.stack(
            [diag_z_half(template.n_qubits, q) for q in template.readout]
        )
        self.codes = np.stack([binary_code(c, self.n_bits) for c in range(n_classes)])

    def outputs(self, kets: np.ndarray) -> np.ndarray:
        return probabilities(kets) @ self.masks.T

    def losses(self, outputs: np.ndarray, labels: np.ndarray) -> np.ndarray:
        return ((outputs - self.codes[labels]) ** 2).mean(axis=1)

    def output_weights(self, outputs: np.ndarray, labels: np.ndarray) -> np.ndarray:
        return 2.0 * (outputs - self.codes[labels]) / self.n_bits

    def predict(self, outputs: np.ndarray) -> np.ndarray:
        d2 = ((outputs[:, None, :] - self.codes[None, :, :]) ** 2).sum(axis=2)
        return np.argmin(d2, axis=1)


class AmplitudeSoftmaxHead:
    """Cross entropy on the softmaxed, truncated readout marginal."""

    loss_name = "ce_amplitude"

    def __init__(self, template: CircuitTemplate, n_classes: int):
        if not template.readout:
            raise ValueError("template has no readout wires")
        n_outcomes = 1 << len(template.readout)
        if n_classes > n_outcomes:
            raise ValueError(f"{n_classes} classes exceed {n_outcomes} readout outcomes")
        self.template = template
        self.n_classes = n_classes
        self.masks = np.stack(
            [
                diag_readout_projector(template.n_qubits, template.readout, j)
                for j in range(n_outcomes)
            ]
        )

    def outputs(self, kets: np.ndarray) -> np.ndarray:
        return probabilities(kets) @ self.masks.T

    def class_probs(self, outputs: np.ndarray) -> np.ndarray:
        return softmax(outputs[:, : self.n_classes])

    def losses(self, outputs: np.ndarray, labels: np.ndarray) -> np.ndarray:
        p = self.class_probs(outputs)
        picked = np.maximum(p[np.arange(len(labels)), labels], 1e-12)
        return -np.log(picked)

    def output_weights(self, outputs: np.ndarray, labels: np.ndarray) -> np.ndarray:
        # d(-log softmax(m)_y)/dm = p - onehot on the kept entries, 0 beyond
        w = np.zeros_like(outputs)
        p = self.class_probs(outputs)
        p[np.arange(len(labels)), labels] -= 1.0
        w[:, : self.n_classes] = p
        return w

    def predict(self, outputs: np.ndarray) -> np.ndarray:
        return np.argmax(outputs[:, : self.n_classes], axis=1)


def make_head(loss: str, template: CircuitTemplate, n_classes: int):
    if loss == "mse_binary":
        return QubitBinaryHead(template, n_classes)
    if loss == "ce_amplitude":
        return AmplitudeSoftmaxHead(template, n_classes)
    raise ValueError(f"unknown loss {loss!r}; expected mse_binary or ce_amplitude")


def batch_loss_grad(head, params, states, labels):
    """Adjoint route over a batch: losses (B,), gradients (B, P), outputs (B, m)."""
    params = np.asarray(params, dtype=float)
    labels = np.asarray(labels)
    _require_rotations_only(head.template)
    kets = run_states(head.template, params, states)
    outs = head.outputs(kets)
    losses = head.losses(outs, labels)
    weights = head.output_weights(outs, labels)
    bras = kets * (weights @ head.masks)
    grads = _adjoint_sweep(head.template, kets, bras, params=params)
    return losses, grads, outs


def loss_and_grad_adjoint(head, params, state, label):
    """Loss and gradient for one example via the adjoint route."""
    losses, grads, _ = batch_loss_grad(head, params, np.asarray(state)[None, :], [label])
    return float(losses[0]), grads[0]


def loss_and_grad_shift(head, params, state, label):
    """Loss and gradient for one example: shift rule + analytic chain rule."""
    params = np.asarray(params, dtype=float)
    kets = run_many(head.template, _shifted_rows(params, HALF_PI), state)
    shifted_outs = probabilities(kets) @ head.masks.T  # (2P, n_obs)
    grad_outs = (shifted_outs[0::2] - shifted_outs[1::2]) / 2  # (P, n_obs)
    out = head.outputs(run_states(head.template, params, state[None, :]))
    labels = np.asarray([label])
    loss = float(head.losses(out, labels)[0])
    weights = head.output_weights(out, labels)[0]
    return loss, grad_outs @ weights


def loss_and_grad_fd(head, params, state, label, step: float = 1e-4):
    """Loss and gradient for one example by finite-differencing the full loss."""
    params = np.asarray(params, dtype=float)
    kets = run_many(head.template, _shifted_rows(params, step), state)
    labels = np.full(kets.shape[0], label)
    f = head.losses(head.outputs(kets), labels)
    out = head.outputs(run_states(head.template, params, state[None, :]))
    loss = float(head.losses(out, np.asarray([label]))[0])
    return loss, (f[0::2] - f[1::2]) / (2 * step)


def energy_and_grad_adjoint(template: CircuitTemplate, params, input_state, hamiltonian):
    """(energy, gradient of energy) for a dense Hermitian Hamiltonian."""
    return grad_adjoint(template, params, input_state, hamiltonian)


def batch_energy_and_grad(template: CircuitTemplate, param_rows, input_state, hamiltonians):
    """Energies (B,) and gradients (B, P) for per-row parameters and Hamiltonians.

    ``hamiltonians`` is a (B, dim, dim) stack; used to advance several
    optimizations in lockstep.
    """
    param_rows = np.asarray(param_rows, dtype=float)
    _require_rotations_only(template)
    kets = run_many(template, param_rows, input_state)
    bras = np.einsum("bij,bj->bi", hamiltonians, kets)
    energies = np.einsum("bi,bi->b", kets.conj(), bras).real
    grads = _adjoint_sweep(template, kets, bras, param_rows=param_rows)
    return energies, grads
