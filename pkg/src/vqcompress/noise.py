"""Shot-based depolarizing-noise evaluation of transpiled circuits.

After every physical gate, each qubit the gate touched suffers, with
probability p, a Pauli drawn uniformly from {I, X, Y, Z}; at p = 1 this fully
depolarizes the qubit.  Expectations are the average of exact per-trajectory
readouts over a fixed shot count, so results are deterministic given the seed.
"""

import numpy as np

from .circuit import Circuit, MeasurementSpec
from .data import EncodeScheme, EncoderSpec, amplitude_state, stack
from .errors import ConfigError
from .simulator import measure_outputs_batch, zero_state
from .training import softmax
from .transpile import BasisGateSet, DEFAULT_BASIS, TranspiledCircuit, transpile_circuit


def _apply_fixed_gate(states: np.ndarray, matrix: np.ndarray, qubits: tuple[int, ...]):
    from .simulator import _batched_1q, _batched_2q
    if len(qubits) == 1:
        return _batched_1q(states, matrix, qubits[0])
    return _batched_2q(states, matrix, qubits[0], qubits[1])


def _apply_pauli_rows(states: np.ndarray, rows: np.ndarray, q: int, which: int):
    """In-place X/Y/Z on one qubit for a subset of trajectory rows."""
    dim = states.shape[1]
    low = 1 << q
    sub = states[rows].reshape(len(rows), dim // (2 * low), 2, low)
    if which == 1:    # X
        sub = sub[:, :, ::-1, :]
    elif which == 2:  # Y
        sub = sub[:, :, ::-1, :].copy()
        sub[:, :, 0, :] *= -1j
        sub[:, :, 1, :] *= 1j
    else:             # Z
        sub = sub.copy()
        sub[:, :, 1, :] *= -1
    states[rows] = sub.reshape(len(rows), dim)


def noisy_outputs(tc: TranspiledCircuit, input_state: np.ndarray, spec: MeasurementSpec,
                  p: float, shots: int, seed: int) -> np.ndarray:
    """Shot-averaged measurement outputs of a physical circuit under noise."""
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"depolarizing probability {p} outside [0, 1]")
    rng = np.random.default_rng(seed)
    states = np.broadcast_to(input_state, (shots, input_state.shape[0])).astype(complex).copy()
    for pg in tc.gates:
        states = _apply_fixed_gate(states, pg.matrix(), pg.qubits)
        for q in pg.qubits:
            hit = rng.random(shots) < p
            paulis = rng.integers(0, 4, size=shots)
            for which in (1, 2, 3):
                rows = np.flatnonzero(hit & (paulis == which))
                if rows.size:
                    _apply_pauli_rows(states, rows, q, which)
    return measure_outputs_batch(states, spec).mean(axis=0)


def noisy_accuracy(circuit: Circuit, params, samples, p: float, shots: int, seed: int,
                   encoding: EncoderSpec | None = None,
                   basis: BasisGateSet = DEFAULT_BASIS) -> float:
    """Classification accuracy when every physical gate is followed by noise.

    Each sample gets its own transpilation (angle-encoded inputs change the
    physical circuit) and its own derived noise seed.
    """
    feats, labels = stack(samples)
    correct = 0
    for i, (f, label) in enumerate(zip(feats, labels)):
        if encoding is not None and encoding.scheme is EncodeScheme.AMPLITUDE:
            init = amplitude_state(f, circuit.n_qubits)
            tc = transpile_circuit(circuit, np.atleast_2d(params), basis)
        else:
            init = zero_state(circuit.n_qubits)
            tc = transpile_circuit(circuit, np.atleast_2d(params), basis, feats=f[None, :])
        outs = noisy_outputs(tc, init, circuit.measurement, p, shots, seed + i)
        if int(np.argmax(softmax(outs[None, :])[0])) == label:
            correct += 1
    return correct / len(labels)
