"""Alternating-direction compression: loss step, projection step, multipliers.

Each iteration trains theta against a proximal anchor, rebuilds the mask of
gates to compress, projects the masked entries of the auxiliary vector Z onto
their reconstructed levels, and updates the multipliers with the signed
circular residual.  After the loop stops (squared step norms of both theta
and Z under zeta, or the iteration cap), masked parameters are frozen at
their levels and the free ones are retrained.
"""

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import Circuit
from .data import Dataset, EncoderSpec
from .errors import ConfigError
from .gates import circ_residual, wrap_params
from .lut import CompressionLUT, LevelTag, level_distance
from .recl import SPEEDUP, ReconstructedLUT, reconstruct_lut
from .training import TrainConfig, init_params, loss_and_accuracy, sgd_train
from .transpile import BasisGateSet, DEFAULT_BASIS, build_depth_table, tcd

TWO_PI = 2 * np.pi


@dataclass
class ADMMConfig:
    """Tuned defaults for the bundled reference circuits: a small alpha ranks
    prune-target gates (compiled depth 0) ahead of quantize targets whatever
    their distance, which is what lets the expensive controlled gates into the
    mask; rho is large enough that the proximal anchor actually binds within
    the iteration budget (but keep learning_rate * rho < 2 or the inner SGD
    diverges on the quadratic term)."""

    target_ratio: float = 0.7
    rho: float = 2.0
    alpha: float = 0.05
    zeta: float = 1e-4
    max_iters: int = 15
    epochs_per_iter: int = 30
    retrain_epochs: int = 200
    scaled_lambda_distance: bool = False  # mask distances use theta + lam/rho

    def __post_init__(self):
        if not 0.0 <= self.target_ratio <= 1.0:
            raise ConfigError(f"target_ratio {self.target_ratio} outside [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha {self.alpha} outside (0, 1)")
        if self.rho <= 0 or self.zeta <= 0:
            raise ConfigError("rho and zeta must be positive")


@dataclass
class ADMMState:
    theta: np.ndarray
    z: np.ndarray
    lam: np.ndarray
    iteration: int = 0


@dataclass
class CompressionMask:
    bits: np.ndarray    # per trainable gate, True = compress
    scores: np.ndarray  # the importance scores the selection sorted on

    @property
    def count(self) -> int:
        return int(self.bits.sum())


@dataclass
class IterationRecord:
    r: int
    loss: float
    acc: float
    tcd: int
    theta_z_gap: float


@dataclass
class CompressionResult:
    params: np.ndarray
    mask: CompressionMask
    recon: ReconstructedLUT
    records: list = field(default_factory=list)
    converged: bool = True


def mask_size(target_ratio: float, n_trainable: int) -> int:
    return int(round(target_ratio * n_trainable))


def _gate_distance(theta: np.ndarray, lam: np.ndarray, slots, level_value,
                   config: ADMMConfig) -> float:
    shift = lam[list(slots)] / config.rho if config.scaled_lambda_distance else lam[list(slots)]
    moved = wrap_params(theta[list(slots)] + shift)
    # normalized so a single angle at the far side of the circle scores 1
    return level_distance(level_value, moved) / (TWO_PI * np.sqrt(len(slots)))


def build_mask(theta_next: np.ndarray, lam: np.ndarray, recon: ReconstructedLUT,
               circuit: Circuit, config: ADMMConfig, max_table_depth: int) -> CompressionMask:
    """Score = alpha * distance-to-level + (1 - alpha) * compiled-level depth,
    both normalized to [0, 1]; the lowest-scoring ratio * |G| gates are masked."""
    trainable = circuit.trainable_indices()
    n = len(trainable)
    scores = np.full(n, np.inf)
    for pos, gi in enumerate(trainable):
        level = recon.levels.get(gi)
        if level is None:
            continue  # kind had no usable levels (filtered LUT); never masked
        d = _gate_distance(theta_next, lam, circuit.layers[gi].theta_slots,
                           level.value, config)
        depth_term = level.depth / max_table_depth if max_table_depth else 0.0
        scores[pos] = config.alpha * d + (1.0 - config.alpha) * depth_term
    want = mask_size(config.target_ratio, n)
    eligible = int(np.isfinite(scores).sum())
    bits = np.zeros(n, dtype=bool)
    order = sorted(range(n), key=lambda p: (scores[p], p))
    for p in order[: min(want, eligible)]:
        bits[p] = True
    return CompressionMask(bits, scores)


def project_z(state: ADMMState, mask: CompressionMask, recon: ReconstructedLUT,
              circuit: Circuit) -> np.ndarray:
    """Masked entries jump to their reconstructed level; others keep prior Z."""
    z = np.array(state.z, copy=True)
    for pos, gi in enumerate(circuit.trainable_indices()):
        if not mask.bits[pos]:
            continue
        for slot, val in zip(circuit.layers[gi].theta_slots, recon.levels[gi].value):
            z[slot] = val
    return z


def update_lambda(state: ADMMState, rho: float) -> np.ndarray:
    return state.lam + rho * circ_residual(state.theta, state.z)


def check_stop(prev_state: ADMMState, state: ADMMState, zeta: float) -> bool:
    """Both consecutive squared step norms strictly under zeta."""
    d_theta = float(np.sum(circ_residual(state.theta, prev_state.theta) ** 2))
    d_z = float(np.sum(circ_residual(state.z, prev_state.z) ** 2))
    return d_theta < zeta and d_z < zeta


def compose_params(theta: np.ndarray, mask: CompressionMask, recon: ReconstructedLUT,
                   circuit: Circuit) -> np.ndarray:
    """theta with every masked gate's slots set exactly to its level."""
    out = np.array(theta, copy=True)
    for pos, gi in enumerate(circuit.trainable_indices()):
        if not mask.bits[pos]:
            continue
        for slot, val in zip(circuit.layers[gi].theta_slots, recon.levels[gi].value):
            out[slot] = val
    return out


def frozen_slots(mask: CompressionMask, circuit: Circuit) -> np.ndarray:
    frozen = np.zeros(circuit.n_thetas, dtype=bool)
    for pos, gi in enumerate(circuit.trainable_indices()):
        if mask.bits[pos]:
            for slot in circuit.layers[gi].theta_slots:
                frozen[slot] = True
    return frozen


def _empty_result(circuit: Circuit, params: np.ndarray) -> CompressionResult:
    n = len(circuit.trainable_indices())
    mask = CompressionMask(np.zeros(n, dtype=bool), np.full(n, np.inf))
    return CompressionResult(np.array(params, copy=True), mask, ReconstructedLUT())


def vanilla_train(circuit: Circuit, dataset: Dataset, train_cfg: TrainConfig,
                  encoding: EncoderSpec | None = None) -> np.ndarray:
    return sgd_train(circuit, init_params(circuit, train_cfg), dataset.train,
                     train_cfg, encoding)


def run_cqcp_admm(circuit: Circuit, dataset: Dataset, lut: CompressionLUT,
                  admm_cfg: ADMMConfig, train_cfg: TrainConfig,
                  encoding: EncoderSpec | None = None,
                  basis: BasisGateSet = DEFAULT_BASIS,
                  warm_theta: np.ndarray | None = None,
                  orientation: str = SPEEDUP) -> CompressionResult:
    """Full compression run: warm start, ReCL, ADMM loop, mask-frozen retrain.

    A target ratio of zero degenerates to the plain training result, returned
    unchanged so the pipeline is bit-for-bit identical to vanilla training.
    """
    warm = (vanilla_train(circuit, dataset, train_cfg, encoding)
            if warm_theta is None else np.array(warm_theta, dtype=float, copy=True))
    if admm_cfg.target_ratio == 0.0:
        return _empty_result(circuit, warm)

    recon = reconstruct_lut(circuit, warm, lut, dataset.train, encoding, basis, orientation)
    max_td = build_depth_table(basis).max_depth()
    state = ADMMState(theta=warm.copy(), z=warm.copy(),
                      lam=np.zeros_like(warm), iteration=0)
    mask = build_mask(state.theta, state.lam, recon, circuit, admm_cfg, max_td)
    records: list[IterationRecord] = []
    converged = False
    prev = None
    for r in range(admm_cfg.max_iters):
        inner = replace(train_cfg, epochs=admm_cfg.epochs_per_iter,
                        seed=train_cfg.seed + 1000 * (r + 1))
        state.theta = sgd_train(circuit, state.theta, dataset.train, inner, encoding,
                                proximal=(state.z, state.lam, admm_cfg.rho))
        mask = build_mask(state.theta, state.lam, recon, circuit, admm_cfg, max_td)
        state.z = project_z(state, mask, recon, circuit)
        state.lam = update_lambda(state, admm_cfg.rho)
        state.iteration = r + 1

        loss, acc = loss_and_accuracy(circuit, state.theta, dataset.train, encoding)
        composed = compose_params(state.theta, mask, recon, circuit)
        gap = float(np.sqrt(np.sum(circ_residual(state.theta, state.z) ** 2)))
        records.append(IterationRecord(r, loss, acc, tcd(circuit, composed, basis), gap))

        current = ADMMState(state.theta.copy(), state.z.copy(), state.lam.copy(), r + 1)
        if prev is not None and check_stop(prev, current, admm_cfg.zeta):
            converged = True
            break
        prev = current

    final = compose_params(state.theta, mask, recon, circuit)
    retrain = replace(train_cfg, epochs=admm_cfg.retrain_epochs,
                      seed=train_cfg.seed + 999_983)
    params = sgd_train(circuit, final, dataset.train, retrain, encoding,
                       frozen=frozen_slots(mask, circuit))
    return CompressionResult(params, mask, recon, records, converged)


class BaselineMode(enum.Enum):
    ZERO_ONLY_PRUNING = "ZeroOnlyPruning"
    PRUNE_ONLY = "PruneOnly"
    QUANT_ONLY = "QuantOnly"


def baseline_compress(mode: BaselineMode, circuit: Circuit, dataset: Dataset,
                      lut: CompressionLUT, admm_cfg: ADMMConfig, train_cfg: TrainConfig,
                      encoding: EncoderSpec | None = None,
                      basis: BasisGateSet = DEFAULT_BASIS,
                      warm_theta: np.ndarray | None = None,
                      orientation: str = SPEEDUP) -> CompressionResult:
    """Competitor pipelines sharing the warm start and retraining protocol.

    ZeroOnlyPruning is compilation-agnostic: it zeroes the gates whose angles
    sit closest to 0 on the circle.  PruneOnly / QuantOnly rerun the full
    pipeline with the LUT filtered to one level family; gates of a kind with
    no surviving levels are never masked.
    """
    if mode is BaselineMode.PRUNE_ONLY:
        return run_cqcp_admm(circuit, dataset, lut.filtered(LevelTag.PRUNE), admm_cfg,
                             train_cfg, encoding, basis, warm_theta, orientation)
    if mode is BaselineMode.QUANT_ONLY:
        return run_cqcp_admm(circuit, dataset, lut.filtered(LevelTag.QUANTIZE), admm_cfg,
                             train_cfg, encoding, basis, warm_theta, orientation)

    warm = (vanilla_train(circuit, dataset, train_cfg, encoding)
            if warm_theta is None else np.array(warm_theta, dtype=float, copy=True))
    if admm_cfg.target_ratio == 0.0:
        return _empty_result(circuit, warm)
    trainable = circuit.trainable_indices()
    dists = []
    for gi in trainable:
        slots = list(circuit.layers[gi].theta_slots)
        zero = tuple(0.0 for _ in slots)
        dists.append(level_distance(zero, wrap_params(warm[slots])))
    n_mask = mask_size(admm_cfg.target_ratio, len(trainable))
    order = sorted(range(len(trainable)), key=lambda p: (dists[p], p))
    bits = np.zeros(len(trainable), dtype=bool)
    for p in order[:n_mask]:
        bits[p] = True
    mask = CompressionMask(bits, np.array(dists))
    recon = ReconstructedLUT()
    final = warm.copy()
    for pos, gi in enumerate(trainable):
        if bits[pos]:
            for slot in circuit.layers[gi].theta_slots:
                final[slot] = 0.0
    retrain = replace(train_cfg, epochs=admm_cfg.retrain_epochs,
                      seed=train_cfg.seed + 999_983)
    frozen = np.zeros(circuit.n_thetas, dtype=bool)
    for pos, gi in enumerate(trainable):
        if bits[pos]:
            for slot in circuit.layers[gi].theta_slots:
                frozen[slot] = True
    params = sgd_train(circuit, final, dataset.train, retrain, encoding, frozen=frozen)
    return CompressionResult(params, mask, recon, [])
