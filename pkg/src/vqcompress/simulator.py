"""Exact dense state-vector simulation.

States are complex128 arrays of 2^n amplitudes; qubit 0 is the least
significant bit of the basis-state index.  Everything is batched: a state
batch has shape (rows, 2^n) and each row may carry its own gate angles, which
is what makes parameter-shift training cheap.
"""

from functools import lru_cache

import numpy as np

from .circuit import BindKind, Circuit, Gate, MeasureScheme, MeasurementSpec
from .errors import SpecError
from .gates import ARITY, GateKind, gate_matrix

NORM_TOL = 1e-9
AMP_TOL = 1e-10


def zero_state(n_qubits: int, rows: int | None = None) -> np.ndarray:
    """|0...0> as a single state or a batch of identical rows."""
    dim = 2 ** n_qubits
    if rows is None:
        s = np.zeros(dim, dtype=complex)
        s[0] = 1.0
        return s
    s = np.zeros((rows, dim), dtype=complex)
    s[:, 0] = 1.0
    return s


@lru_cache(maxsize=None)
def _pair_indices(n_qubits: int, qa: int, qb: int):
    """Index groups for a two-qubit gate; qa is the high bit of the 4-dim block."""
    i = np.arange(2 ** n_qubits)
    ma, mb = 1 << qa, 1 << qb
    base = i[(i & (ma | mb)) == 0]
    idx = np.stack([base, base | mb, base | ma, base | ma | mb])
    idx.setflags(write=False)
    return idx


def _batched_1q(states: np.ndarray, mats: np.ndarray, q: int) -> np.ndarray:
    rows, dim = states.shape
    low = 1 << q
    high = dim // (2 * low)
    t = states.reshape(rows, high, 2, low)
    if mats.ndim == 2:
        out = np.einsum("ab,rhbl->rhal", mats, t)
    else:
        out = np.einsum("rab,rhbl->rhal", mats, t)
    return np.ascontiguousarray(out.reshape(rows, dim))


def _batched_2q(states: np.ndarray, mats: np.ndarray, qa: int, qb: int) -> np.ndarray:
    n = states.shape[1].bit_length() - 1
    idx = _pair_indices(n, qa, qb)
    cols = states[:, idx]                      # (rows, 4, dim/4)
    if mats.ndim == 2:
        new = np.einsum("jk,rkg->rjg", mats, cols)
    else:
        new = np.einsum("rjk,rkg->rjg", mats, cols)
    out = states.copy()
    out[:, idx] = new
    return out


def _rotation_mats(kind: GateKind, angles: np.ndarray) -> np.ndarray:
    """Per-row 2x2 blocks for RX/RY/RZ given an (R,) angle array."""
    c, s = np.cos(angles / 2), np.sin(angles / 2)
    r = angles.shape[0]
    m = np.zeros((r, 2, 2), dtype=complex)
    if kind is GateKind.RX:
        m[:, 0, 0] = c
        m[:, 1, 1] = c
        m[:, 0, 1] = -1j * s
        m[:, 1, 0] = -1j * s
    elif kind is GateKind.RY:
        m[:, 0, 0] = c
        m[:, 1, 1] = c
        m[:, 0, 1] = -s
        m[:, 1, 0] = s
    else:
        m[:, 0, 0] = np.exp(-0.5j * angles)
        m[:, 1, 1] = np.exp(0.5j * angles)
    return m


def _u3_mats(angles: np.ndarray) -> np.ndarray:
    """(R,3) Euler angles -> (R,2,2)."""
    th, ph, lm = angles[:, 0], angles[:, 1], angles[:, 2]
    c, s = np.cos(th / 2), np.sin(th / 2)
    m = np.zeros((angles.shape[0], 2, 2), dtype=complex)
    m[:, 0, 0] = c
    m[:, 0, 1] = -np.exp(1j * lm) * s
    m[:, 1, 0] = np.exp(1j * ph) * s
    m[:, 1, 1] = np.exp(1j * (ph + lm)) * c
    return m


def _controlled_mats(blocks: np.ndarray) -> np.ndarray:
    r = blocks.shape[0]
    m = np.zeros((r, 4, 4), dtype=complex)
    m[:, 0, 0] = 1.0
    m[:, 1, 1] = 1.0
    m[:, 2:, 2:] = blocks
    return m


_BASE_KIND = {GateKind.CRX: GateKind.RX, GateKind.CRY: GateKind.RY, GateKind.CRZ: GateKind.RZ}


def gate_mats_batch(kind: GateKind, angles: np.ndarray | None) -> np.ndarray:
    """Per-row gate matrices; `angles` is (R,) for rotations, (R,3) for U3/CU3."""
    if ARITY[kind] == 0:
        return gate_matrix(kind, [])
    if kind in _BASE_KIND:
        return _controlled_mats(_rotation_mats(_BASE_KIND[kind], angles))
    if kind is GateKind.CU3:
        return _controlled_mats(_u3_mats(angles))
    if kind is GateKind.U3:
        return _u3_mats(angles)
    return _rotation_mats(kind, angles)


def resolve_angles(gate: Gate, thetas: np.ndarray, feats: np.ndarray | None) -> np.ndarray | None:
    """Per-row angle array for a gate: (R,) or (R, 3), or None for fixed kinds.

    Trainable slots read from `thetas` (R, P); data slots read pi * feature
    from `feats` (R, F); constants broadcast.
    """
    if ARITY[gate.kind] == 0:
        return None
    rows = thetas.shape[0]
    cols = []
    for b in gate.bindings:
        if b.kind is BindKind.CONST:
            cols.append(np.full(rows, b.value))
        elif b.kind is BindKind.THETA:
            cols.append(thetas[:, b.slot])
        else:
            if feats is None:
                raise SpecError("circuit has data-bound gates but no features were given")
            cols.append(np.pi * feats[:, b.slot])
    if len(cols) == 1:
        return cols[0]
    return np.stack(cols, axis=1)


def apply_gate_batch(states: np.ndarray, gate: Gate, thetas: np.ndarray,
                     feats: np.ndarray | None = None) -> np.ndarray:
    mats = gate_mats_batch(gate.kind, resolve_angles(gate, thetas, feats))
    if len(gate.qubits) == 1:
        return _batched_1q(states, mats, gate.qubits[0])
    return _batched_2q(states, mats, gate.qubits[0], gate.qubits[1])


def run_batch(circuit: Circuit, thetas: np.ndarray, feats: np.ndarray | None = None,
              states: np.ndarray | None = None) -> np.ndarray:
    """Apply encoder then layers to a batch; returns final states (R, 2^n).

    Single-row `thetas` or `feats` broadcast against the other inputs, so one
    parameter vector can be evaluated on many samples and vice versa.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    rows = thetas.shape[0]
    if feats is not None:
        feats = np.atleast_2d(np.asarray(feats, dtype=float))
        rows = max(rows, feats.shape[0])
    if states is not None:
        states = np.array(states, dtype=complex, copy=True)
        if states.ndim == 2:
            rows = max(rows, states.shape[0])
    if thetas.shape[0] == 1 and rows > 1:
        thetas = np.broadcast_to(thetas, (rows, thetas.shape[1]))
    if feats is not None and feats.shape[0] == 1 and rows > 1:
        feats = np.broadcast_to(feats, (rows, feats.shape[1]))
    if states is None:
        states = zero_state(circuit.n_qubits, rows=rows)
    elif states.ndim == 1:
        states = np.broadcast_to(states, (rows, states.shape[0])).copy()
    for gate in circuit.all_gates:
        states = apply_gate_batch(states, gate, thetas, feats)
    return states


def apply_gate(state: np.ndarray, gate: Gate, params) -> np.ndarray:
    """Single-state gate application; params is the flat trainable vector."""
    state = np.asarray(state, dtype=complex)
    for q in gate.qubits:
        if not 0 <= q < state.shape[0].bit_length() - 1:
            raise IndexError(f"qubit {q} out of range")
    thetas = np.atleast_2d(np.asarray(params, dtype=float))
    if thetas.size == 0:
        thetas = np.zeros((1, 0))
    return apply_gate_batch(state[None, :], gate, thetas)[0]


def run_circuit(circuit: Circuit, params, input_state: np.ndarray | None = None,
                feats=None) -> np.ndarray:
    """Run a circuit on one input state with one parameter vector."""
    thetas = np.atleast_2d(np.asarray(params, dtype=float))
    f = None if feats is None else np.atleast_2d(np.asarray(feats, dtype=float))
    return run_batch(circuit, thetas, f, states=input_state)[0]


@lru_cache(maxsize=None)
def _z_signs(n_qubits: int) -> np.ndarray:
    """(n, 2^n) table of Pauli-Z eigenvalues per qubit per basis state."""
    i = np.arange(2 ** n_qubits)
    signs = np.stack([1.0 - 2.0 * ((i >> q) & 1) for q in range(n_qubits)])
    signs.setflags(write=False)
    return signs


def measure_outputs_batch(states: np.ndarray, spec: MeasurementSpec) -> np.ndarray:
    n_qubits = states.shape[1].bit_length() - 1
    spec = spec.validated(n_qubits)
    probs = np.abs(states) ** 2
    if spec.scheme is MeasureScheme.PER_QUBIT_Z:
        signs = _z_signs(n_qubits)[: spec.n_classes]
        return probs @ signs.T
    out = np.empty((states.shape[0], spec.n_classes))
    for k, group in enumerate(spec.groups):
        out[:, k] = probs[:, list(group)].sum(axis=1)
    return out


def measure_outputs(state: np.ndarray, spec: MeasurementSpec) -> np.ndarray:
    """Classifier readout: per-qubit <Z> values or basis-state group weights."""
    return measure_outputs_batch(np.asarray(state, dtype=complex)[None, :], spec)[0]
