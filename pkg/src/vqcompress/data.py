"""Datasets (synthetic two-class generator, CSV ingestion) and feature encoders."""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Gate, data as data_binding
from .errors import ConfigError, DataError, EncodeError, ParseError
from .gates import GateKind


@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    label: int


@dataclass
class Dataset:
    train: list
    test: list
    n_classes: int
    seed: int

    @property
    def n_features(self) -> int:
        return len(self.train[0].features)


def stack(samples) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix (N, F) and label vector for a list of samples."""
    if not samples:
        raise DataError("empty sample list")
    feats = np.stack([s.features for s in samples])
    labels = np.array([s.label for s in samples], dtype=int)
    return feats, labels


def _split(samples: list, seed: int) -> tuple[list, list]:
    """Seeded shuffle, then 90% train / 10% test."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(samples))
    cut = int(round(0.9 * len(samples)))
    return [samples[i] for i in order[:cut]], [samples[i] for i in order[cut:]]


# Feature distributions for the two synthetic classes: class 0 draws the front
# half of its features from LOW and the tail half from HIGH; class 1 swaps them.
SYN_LOW = (0.25, 0.1)
SYN_HIGH = (0.75, 0.1)


def generate_synthetic(n_features: int, n_samples: int = 100, seed: int = 0) -> Dataset:
    if n_features not in (4, 16):
        raise ConfigError(f"synthetic datasets have 4 or 16 features, not {n_features}")
    rng = np.random.default_rng(seed)
    half = n_features // 2
    samples = []
    for i in range(n_samples):
        label = i % 2
        lo = np.clip(rng.normal(*SYN_LOW, size=half), 0.0, 1.0)
        hi = np.clip(rng.normal(*SYN_HIGH, size=half), 0.0, 1.0)
        feats = np.concatenate([lo, hi] if label == 0 else [hi, lo])
        samples.append(Sample(feats, label))
    train, test = _split(samples, seed)
    return Dataset(train, test, n_classes=2, seed=seed)


def pool_image(features: np.ndarray, side: int = 28, out_side: int = 4) -> np.ndarray:
    """Average-pool a flattened side x side image down to out_side x out_side."""
    if features.size != side * side:
        raise DataError(f"expected {side * side} pixels, got {features.size}")
    block = side // out_side
    img = features.reshape(side, side)[: out_side * block, : out_side * block]
    return img.reshape(out_side, block, out_side, block).mean(axis=(1, 3)).ravel()


def load_csv(path, n_classes: int, seed: int = 0, pool: bool = False) -> Dataset:
    """Rows are `label,f1,...,fk` with features already scaled to [0, 1]."""
    samples = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                label = int(parts[0])
                feats = np.array([float(p) for p in parts[1:]])
            except ValueError as exc:
                raise ParseError(f"bad row ({exc})", lineno) from None
            if not 0 <= label < n_classes:
                raise ParseError(f"label {label} out of range for {n_classes} classes", lineno)
            if pool:
                feats = pool_image(feats)
            if width is None:
                width = feats.size
            elif feats.size != width:
                raise ParseError(f"row has {feats.size} features, expected {width}", lineno)
            samples.append(Sample(feats, label))
    if not samples:
        raise DataError(f"no samples in {path}")
    train, test = _split(samples, seed)
    return Dataset(train, test, n_classes=n_classes, seed=seed)


class EncodeScheme(enum.Enum):
    ANGLE = "angle"
    AMPLITUDE = "amplitude"


@dataclass(frozen=True)
class EncoderSpec:
    scheme: EncodeScheme
    gate_plan: tuple = ()  # (GateKind, qubit) pairs for angle encoding

    def __post_init__(self):
        object.__setattr__(self, "gate_plan", tuple(self.gate_plan))


def angle_plan(n_features: int) -> EncoderSpec:
    """The reference angle-encoding plans: 2RY+2RZ for 4 features on 2 qubits,
    4RY+4RZ+4RX+4RY for 16 features on 4 qubits, round-robin over qubits."""
    if n_features == 4:
        kinds = [GateKind.RY] * 2 + [GateKind.RZ] * 2
        n_qubits = 2
    elif n_features == 16:
        kinds = [GateKind.RY] * 4 + [GateKind.RZ] * 4 + [GateKind.RX] * 4 + [GateKind.RY] * 4
        n_qubits = 4
    else:
        raise ConfigError(f"no reference angle plan for {n_features} features")
    plan = [(k, i % n_qubits) for i, k in enumerate(kinds)]
    return EncoderSpec(EncodeScheme.ANGLE, plan)


def encoder_gates(spec: EncoderSpec) -> list[Gate]:
    """Data-bound encoder gates realizing an angle plan (slot k reads feature k)."""
    if spec.scheme is not EncodeScheme.ANGLE:
        return []
    return [Gate(kind, (q,), (data_binding(slot),))
            for slot, (kind, q) in enumerate(spec.gate_plan)]


def amplitude_state(features: np.ndarray, n_qubits: int) -> np.ndarray:
    """L2-normalized features as the initial state vector."""
    features = np.asarray(features, dtype=float)
    if features.size != 2 ** n_qubits:
        raise EncodeError(f"amplitude encoding needs {2 ** n_qubits} features, "
                          f"got {features.size}")
    norm = float(np.linalg.norm(features))
    if norm < 1e-300 or not math.isfinite(norm):
        raise EncodeError("cannot amplitude-encode a zero-norm feature vector")
    return features.astype(complex) / norm


def encode(sample: Sample, spec: EncoderSpec, n_qubits: int):
    """Angle scheme: encoder gates with fixed angles pi*feature.
    Amplitude scheme: the initial state vector."""
    if spec.scheme is EncodeScheme.AMPLITUDE:
        return amplitude_state(sample.features, n_qubits)
    if len(spec.gate_plan) != sample.features.size:
        raise EncodeError(f"plan encodes {len(spec.gate_plan)} features, "
                          f"sample has {sample.features.size}")
    from .circuit import const
    return [Gate(kind, (q,), (const(math.pi * f),))
            for (kind, q), f in zip(spec.gate_plan, sample.features)]
