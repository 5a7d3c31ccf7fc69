"""LUT reconstruction: pick one compression level per gate by accuracy x depth.

For gate i and candidate level v, the metric is the accuracy of the circuit
with only parameter i moved to v, times a depth factor.  The depth factor
defaults to the speedup orientation TCD(theta) / TCD(theta^{i,v}), under which
depth reductions raise the metric; the inverse "ratio" orientation is
selectable for comparison.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .data import EncoderSpec, stack
from .lut import CompressionLUT, CompressionLevel
from .training import outputs_batch, softmax
from .transpile import BasisGateSet, DEFAULT_BASIS, tcd

SPEEDUP = "speedup"
RATIO = "ratio"


@dataclass
class ReconstructedLUT:
    """One chosen level per trainable gate (keyed by index into circuit.layers)."""

    levels: dict = field(default_factory=dict)   # layer index -> CompressionLevel
    metrics: dict = field(default_factory=dict)  # layer index -> achieved metric

    def __len__(self):
        return len(self.levels)


def _substituted(theta: np.ndarray, circuit: Circuit, gate_index: int,
                 level_value: tuple[float, ...]) -> np.ndarray:
    new = np.array(theta, dtype=float, copy=True)
    slots = circuit.layers[gate_index].theta_slots
    for slot, val in zip(slots, level_value):
        new[slot] = val
    return new


def _depth_factor(base_tcd: int, new_tcd: int, orientation: str) -> float:
    if new_tcd == 0:
        warnings.warn("substituted circuit has zero depth; treating TCD as 1")
        new_tcd = 1
    b = base_tcd if base_tcd > 0 else 1
    return b / new_tcd if orientation == SPEEDUP else new_tcd / b


def level_metric(circuit: Circuit, theta, gate_index: int, level: CompressionLevel,
                 eval_samples, encoding: EncoderSpec | None = None,
                 basis: BasisGateSet = DEFAULT_BASIS, orientation: str = SPEEDUP,
                 base_tcd: int | None = None) -> float:
    """Accuracy x depth-factor of moving one gate's parameter to a level."""
    theta = np.asarray(theta, dtype=float)
    if base_tcd is None:
        base_tcd = tcd(circuit, theta, basis)
    new_theta = _substituted(theta, circuit, gate_index, level.value)
    feats, labels = stack(eval_samples)
    probs = softmax(outputs_batch(circuit, new_theta[None, :], feats, encoding))
    acc = float((probs.argmax(axis=1) == labels).mean())
    return acc * _depth_factor(base_tcd, tcd(circuit, new_theta, basis), orientation)


def reconstruct_lut(circuit: Circuit, theta, lut: CompressionLUT, eval_samples,
                    encoding: EncoderSpec | None = None,
                    basis: BasisGateSet = DEFAULT_BASIS,
                    orientation: str = SPEEDUP) -> ReconstructedLUT:
    """Per-gate argmax of the level metric, one gate perturbed at a time.

    Every evaluation starts from the unmodified trained theta.  Ties pick the
    level with smaller depth, then smaller value.  Gates whose kind has no
    levels in (a possibly filtered) LUT get no entry.
    """
    theta = np.asarray(theta, dtype=float)
    base_tcd = tcd(circuit, theta, basis)
    recon = ReconstructedLUT()
    for gi in circuit.trainable_indices():
        candidates = lut.entries.get(circuit.layers[gi].kind, [])
        best = None
        for level in candidates:
            m = level_metric(circuit, theta, gi, level, eval_samples, encoding,
                             basis, orientation, base_tcd=base_tcd)
            key = (-m, level.depth, level.value)
            if best is None or key < best[0]:
                best = (key, level, m)
        if best is not None:
            recon.levels[gi] = best[1]
            recon.metrics[gi] = best[2]
    return recon
