"""Forward pass, cross-entropy loss, parameter-shift gradients, and SGD.

Gradients are exact for rotation gates.  Plain RX/RY/RZ use the two-point
rule at shifts of +-pi/2.  Controlled rotations generate three frequencies
(0, 1/2, 1), so the two-point rule is not exact for them; they use the
four-point rule at +-pi/2 and +-3pi/2.  Three-angle gates (U3/CU3) fall back
to central finite differences.

All shifted evaluations for one gradient are packed into a single batched
circuit run, which is what keeps training fast.
"""

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .data import EncodeScheme, EncoderSpec, amplitude_state, stack
from .errors import DataError
from .gates import GateKind, circ_residual, wrap_params
from .simulator import measure_outputs_batch, run_batch

HALF_PI = math.pi / 2

# Four-point shift coefficients for controlled rotations.
_C1 = (math.sqrt(2) + 1) / (4 * math.sqrt(2))
_C2 = (math.sqrt(2) - 1) / (4 * math.sqrt(2))
_FD_STEP = 1e-5

_TWO_POINT = (GateKind.RX, GateKind.RY, GateKind.RZ)
_FOUR_POINT = (GateKind.CRX, GateKind.CRY, GateKind.CRZ)


@dataclass
class TrainConfig:
    learning_rate: float = 0.05
    epochs: int = 200
    batch_size: int = 10
    seed: int = 0
    momentum: float = 0.0
    init_scheme: str = "uniform2pi"

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs <= 0:
            raise ValueError("learning_rate and epochs must be positive")


def init_params(circuit: Circuit, config: TrainConfig) -> np.ndarray:
    """Seeded uniform [0, 2pi) initialization of all trainable slots."""
    rng = np.random.default_rng(config.seed)
    if config.init_scheme != "uniform2pi":
        raise ValueError(f"unknown init scheme {config.init_scheme!r}")
    return rng.uniform(0.0, 2 * math.pi, size=circuit.n_thetas)


def _initial_states(circuit: Circuit, feats: np.ndarray | None, encoding: EncoderSpec | None):
    if encoding is not None and encoding.scheme is EncodeScheme.AMPLITUDE:
        states = np.stack([amplitude_state(f, circuit.n_qubits) for f in feats])
        return states, None
    return None, feats


def outputs_batch(circuit: Circuit, thetas: np.ndarray, feats: np.ndarray | None,
                  encoding: EncoderSpec | None = None) -> np.ndarray:
    """Measurement outputs (R, C), one row per parameter-vector/sample pair."""
    states, gate_feats = _initial_states(circuit, feats, encoding)
    final = run_batch(circuit, thetas, gate_feats, states=states)
    return measure_outputs_batch(final, circuit.measurement)


def softmax(outputs: np.ndarray) -> np.ndarray:
    e = np.exp(outputs - outputs.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def forward(circuit: Circuit, params, sample_or_feats, encoding: EncoderSpec | None = None):
    """Class probabilities for one sample."""
    feats = getattr(sample_or_feats, "features", sample_or_feats)
    feats = np.atleast_2d(np.asarray(feats, dtype=float))
    out = outputs_batch(circuit, np.atleast_2d(np.asarray(params, dtype=float)), feats, encoding)
    return softmax(out)[0]


def loss_and_accuracy(circuit: Circuit, params, samples,
                      encoding: EncoderSpec | None = None) -> tuple[float, float]:
    """Mean cross-entropy and argmax accuracy over a sample list."""
    feats, labels = stack(samples)
    probs = softmax(outputs_batch(circuit, np.atleast_2d(params), feats, encoding))
    n = len(labels)
    loss = float(-np.log(np.maximum(probs[np.arange(n), labels], 1e-300)).mean())
    acc = float((probs.argmax(axis=1) == labels).mean())
    return loss, acc


def accuracy(circuit: Circuit, params, samples, encoding=None) -> float:
    return loss_and_accuracy(circuit, params, samples, encoding)[1]


def _slot_shift_rules(circuit: Circuit):
    """Per trainable slot: list of (shift, coefficient) pairs for d/dtheta."""
    kinds: dict[int, GateKind] = {}
    for g in circuit.layers:
        for s in g.theta_slots:
            if s in kinds and kinds[s] is not g.kind:
                raise ValueError(f"slot {s} shared across gate kinds; shift rule undefined")
            kinds[s] = g.kind
    rules = {}
    for s in range(circuit.n_thetas):
        kind = kinds.get(s)
        if kind in _TWO_POINT:
            rules[s] = [(HALF_PI, 0.5), (-HALF_PI, -0.5)]
        elif kind in _FOUR_POINT:
            rules[s] = [(HALF_PI, _C1), (-HALF_PI, -_C1),
                        (3 * HALF_PI, -_C2), (-3 * HALF_PI, _C2)]
        else:  # U3/CU3 slots (or unused slots): central finite differences
            rules[s] = [(_FD_STEP, 0.5 / _FD_STEP), (-_FD_STEP, -0.5 / _FD_STEP)]
    return rules


def _loss_grad_wrt_outputs(probs: np.ndarray, labels: np.ndarray) -> np.ndarray:
    g = probs.copy()
    g[np.arange(len(labels)), labels] -= 1.0
    return g


def batch_loss_and_gradient(circuit: Circuit, params: np.ndarray, feats: np.ndarray,
                            labels: np.ndarray, encoding: EncoderSpec | None = None
                            ) -> tuple[float, np.ndarray]:
    """Mean cross-entropy over the batch and its gradient w.r.t. all slots."""
    params = np.asarray(params, dtype=float)
    n_batch, n_params = feats.shape[0], params.size
    rules = _slot_shift_rules(circuit)

    base_out = outputs_batch(circuit, params[None, :], feats, encoding)
    probs = softmax(base_out)
    loss = float(-np.log(np.maximum(probs[np.arange(n_batch), labels], 1e-300)).mean())
    dl_dout = _loss_grad_wrt_outputs(probs, labels)

    shift_rows = []
    for s in range(n_params):
        for shift, _ in rules[s]:
            row = params.copy()
            row[s] += shift
            shift_rows.append(row)
    if not shift_rows:
        return loss, np.zeros(0)

    thetas = np.repeat(np.stack(shift_rows), n_batch, axis=0)
    feats_big = np.tile(feats, (len(shift_rows), 1))
    outs = outputs_batch(circuit, thetas, feats_big, encoding)
    outs = outs.reshape(len(shift_rows), n_batch, -1)

    grad = np.zeros(n_params)
    row = 0
    for s in range(n_params):
        d_out = np.zeros_like(base_out)
        for _, coeff in rules[s]:
            d_out += coeff * outs[row]
            row += 1
        grad[s] = float((dl_dout * d_out).sum() / n_batch)
    return loss, grad


def param_shift_gradient(circuit: Circuit, params, samples,
                         encoding: EncoderSpec | None = None) -> np.ndarray:
    """Gradient of the mean cross-entropy over `samples` w.r.t. the parameters."""
    feats, labels = stack(samples)
    return batch_loss_and_gradient(circuit, np.asarray(params, dtype=float),
                                   feats, labels, encoding)[1]


def sgd_train(circuit: Circuit, params0, samples, config: TrainConfig,
              encoding: EncoderSpec | None = None,
              proximal: tuple | None = None,
              frozen: np.ndarray | None = None,
              loss_log: list | None = None) -> np.ndarray:
    """Minibatch SGD on cross-entropy, optionally plus a proximal anchor term.

    `proximal` is (z, lam, rho); its gradient contribution is
    rho * (theta - z) + lam with the difference taken on the angle circle.
    Frozen slots receive zero gradient and keep their initial values.
    Parameters are wrapped to [0, 4pi) after every step; two runs with the
    same seed produce bit-identical results.
    """
    if not samples:
        raise DataError("cannot train on an empty sample list")
    rng = np.random.default_rng(config.seed)
    theta = wrap_params(np.asarray(params0, dtype=float).copy())
    feats, labels = stack(samples)
    n = len(labels)
    velocity = np.zeros_like(theta)
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_losses = []
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            loss, grad = batch_loss_and_gradient(circuit, theta, feats[idx], labels[idx],
                                                 encoding)
            if proximal is not None:
                z, lam, rho = proximal
                grad = grad + rho * circ_residual(theta, z) + lam
            if frozen is not None:
                grad[frozen] = 0.0
            if config.momentum:
                velocity = config.momentum * velocity + grad
                step = velocity
            else:
                step = grad
            theta = wrap_params(theta - config.learning_rate * step)
            epoch_losses.append(loss)
        if loss_log is not None:
            loss_log.append(float(np.mean(epoch_losses)))
    return theta
