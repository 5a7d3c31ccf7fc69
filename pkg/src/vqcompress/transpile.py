"""Decomposition to basis gates, peephole optimization, and circuit depth.

The target (default) basis is {CX, ID, RZ, SX, X}.  Single-qubit rotations are
lowered to RZ/SX/X sandwiches; controlled rotations to CX-conjugated
single-qubit pieces.  Angles within SNAP_TOL of a multiple of pi/2 select
shorter special-case templates; the snap exists to absorb float noise from
projections that produce exact table values, not to approximate.

Depth is the longest path through the dependency DAG where two physical gates
conflict iff they share a qubit; appending gates in list order and keeping a
per-qubit watermark computes it exactly.
"""

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .circuit import Circuit, Gate
from .errors import ConfigError, UnsupportedGateError
from .gates import (ARITY, GateKind, gate_matrix, phase_identity_factor,
                    wrap_param)
from .simulator import resolve_angles

HALF_PI = math.pi / 2
PI = math.pi
SNAP_TOL = 1e-9
EQUIV_TOL = 1e-10

# Angle guaranteed to hit the generic ("others") template of every gate kind.
GENERIC_ANGLE = 1.2345

DEFAULT_BASIS_KINDS = frozenset({GateKind.CX, GateKind.ID, GateKind.RZ,
                                 GateKind.SX, GateKind.X})


@dataclass(frozen=True)
class BasisGateSet:
    kinds: frozenset = DEFAULT_BASIS_KINDS

    def __post_init__(self):
        object.__setattr__(self, "kinds", frozenset(self.kinds))
        if GateKind.CX not in self.kinds:
            raise ConfigError("basis needs an entangling gate (CX)")
        if not {GateKind.RZ, GateKind.SX, GateKind.X} <= self.kinds:
            raise ConfigError("basis needs the universal single-qubit family RZ/SX/X")

    def __contains__(self, kind: GateKind) -> bool:
        return kind in self.kinds


DEFAULT_BASIS = BasisGateSet()


@dataclass(frozen=True)
class PhysicalGate:
    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.params)


@dataclass
class TranspiledCircuit:
    n_qubits: int
    gates: list[PhysicalGate] = field(default_factory=list)
    source_map: list[int] = field(default_factory=list)
    global_phase: float = 0.0  # source unitary == exp(i*phase) * product(gates)


def snap_class(angle: float) -> int | None:
    """Index k in 0..7 if the wrapped angle is within SNAP_TOL of k*pi/2."""
    w = wrap_param(angle)
    k = round(w / HALF_PI)
    if abs(w - k * HALF_PI) <= SNAP_TOL:
        return k % 8
    return None


def _is_zero_mod_2pi(angle: float) -> bool:
    k = snap_class(angle)
    return k is not None and k % 4 == 0


def _rz(q: int, angle: float) -> PhysicalGate:
    return PhysicalGate(GateKind.RZ, (q,), (angle,))


def _emit(q: int, *spec) -> list[PhysicalGate]:
    """Build a single-qubit chain, dropping RZ angles that are 0 mod 2pi."""
    out = []
    for item in spec:
        if item is GateKind.SX or item is GateKind.X:
            out.append(PhysicalGate(item, (q,)))
        elif not _is_zero_mod_2pi(item):
            out.append(_rz(q, item))
    return out


def _rx_gates(theta: float, q: int) -> list[PhysicalGate]:
    th = wrap_param(theta)
    k = snap_class(th)
    if k is None:
        return _emit(q, HALF_PI, GateKind.SX, th + PI, GateKind.SX, 5 * HALF_PI)
    if k % 4 == 0:
        return []
    if k in (2, 6):
        return [PhysicalGate(GateKind.X, (q,))]
    if k in (1, 5):
        return [PhysicalGate(GateKind.SX, (q,))]
    return _emit(q, -PI, GateKind.SX, -PI)  # 3pi/2 family


def _ry_gates(theta: float, q: int) -> list[PhysicalGate]:
    th = wrap_param(theta)
    k = snap_class(th)
    if k is None:
        return _emit(q, GateKind.SX, th + PI, GateKind.SX, PI)
    if k % 4 == 0:
        return []
    if k in (2, 6):
        return _emit(q, PI, GateKind.X)
    if k in (1, 5):
        return _emit(q, -HALF_PI, GateKind.SX, HALF_PI)
    return _emit(q, HALF_PI, GateKind.SX, -HALF_PI)  # 3pi/2 family


def _u3_gates(theta: float, phi: float, lam: float, q: int) -> list[PhysicalGate]:
    th = wrap_param(theta)
    k = snap_class(th)
    if k is None:
        return _emit(q, lam, GateKind.SX, th + PI, GateKind.SX, phi + PI)
    if k % 4 == 0:
        return _emit(q, phi + lam)
    if k in (1, 5):
        return _emit(q, lam - HALF_PI, GateKind.SX, phi + HALF_PI)
    if k in (2, 6):
        return _emit(q, lam + PI, GateKind.X, phi)
    return _emit(q, lam + HALF_PI, GateKind.SX, phi - HALF_PI)  # 3pi/2 family


def _crx_gates(theta: float, c: int, t: int) -> list[PhysicalGate]:
    th = wrap_param(theta)
    cx = PhysicalGate(GateKind.CX, (c, t))
    if snap_class(th) == 4:
        # CRX(2pi) == Z on the control: RZ conjugated through the CX pair.
        return [_rz(t, HALF_PI), cx, _rz(t, PI), cx, _rz(t, -3 * HALF_PI)]
    return ([_rz(t, HALF_PI), cx] + _ry_gates(-th / 2, t) + [cx]
            + _u3_gates(th / 2, -HALF_PI, 0.0, t))


def _cry_gates(theta: float, c: int, t: int) -> list[PhysicalGate]:
    th = wrap_param(theta)
    cx = PhysicalGate(GateKind.CX, (c, t))
    return _ry_gates(th / 2, t) + [cx] + _ry_gates(-th / 2, t) + [cx]


def _crz_gates(theta: float, c: int, t: int) -> list[PhysicalGate]:
    th = wrap_param(theta)
    cx = PhysicalGate(GateKind.CX, (c, t))
    return _emit(t, th / 2) + [cx] + _emit(t, -th / 2) + [cx]


def _cu3_gates(theta: float, phi: float, lam: float, c: int, t: int) -> list[PhysicalGate]:
    th = wrap_param(theta)
    cx = PhysicalGate(GateKind.CX, (c, t))
    return (_emit(c, (lam + phi) / 2) + _emit(t, (lam - phi) / 2) + [cx]
            + _u3_gates(-th / 2, 0.0, -(phi + lam) / 2, t) + [cx]
            + _u3_gates(th / 2, phi, 0.0, t))


def _snapped(angles: tuple[float, ...]) -> list[float]:
    out = []
    for a in angles:
        k = snap_class(a)
        out.append(k * HALF_PI if k is not None else wrap_param(a))
    return out


def decompose_kind(kind: GateKind, qubits: tuple[int, ...], angles: tuple[float, ...],
                   basis: BasisGateSet) -> list[PhysicalGate]:
    """Lower one logical gate (resolved angles) to physical basis gates."""
    if kind not in ARITY:
        raise UnsupportedGateError(f"unsupported gate kind {kind!r}")
    angles = tuple(wrap_param(a) for a in angles)
    if ARITY[kind] > 0 and phase_identity_factor(gate_matrix(kind, _snapped(angles))) is not None:
        return []
    if kind is GateKind.ID:
        return []
    if kind in basis:
        return [PhysicalGate(kind, qubits, angles)]
    if kind is GateKind.RX:
        return _rx_gates(angles[0], qubits[0])
    if kind is GateKind.RY:
        return _ry_gates(angles[0], qubits[0])
    if kind is GateKind.RZ:
        return _emit(qubits[0], angles[0])
    if kind is GateKind.U3:
        return _u3_gates(angles[0], angles[1], angles[2], qubits[0])
    if kind is GateKind.CRX:
        return _crx_gates(angles[0], qubits[0], qubits[1])
    if kind is GateKind.CRY:
        return _cry_gates(angles[0], qubits[0], qubits[1])
    if kind is GateKind.CRZ:
        return _crz_gates(angles[0], qubits[0], qubits[1])
    if kind is GateKind.CU3:
        return _cu3_gates(angles[0], angles[1], angles[2], qubits[0], qubits[1])
    raise UnsupportedGateError(f"no decomposition for {kind.value} into {sorted(k.value for k in basis.kinds)}")


def decompose_gate(gate: Gate, params, basis: BasisGateSet = DEFAULT_BASIS,
                   feats=None) -> list[PhysicalGate]:
    """Decompose a logical gate after resolving its parameter bindings."""
    thetas = np.atleast_2d(np.asarray(params, dtype=float))
    f = None if feats is None else np.atleast_2d(np.asarray(feats, dtype=float))
    angles = resolve_angles(gate, thetas, f)
    if angles is None:
        tup = ()
    elif ARITY[gate.kind] == 1:
        tup = (float(np.asarray(angles)[0]),)
    else:
        tup = tuple(float(v) for v in np.asarray(angles)[0])
    return decompose_kind(gate.kind, gate.qubits, tup, basis)


def _local_matrix(pg: PhysicalGate, qubits: tuple[int, ...]) -> np.ndarray:
    """Embed a physical gate into the local space of the logical gate's qubits."""
    m = pg.matrix()
    if len(qubits) == 1:
        return m
    if len(pg.qubits) == 2:
        return m  # template CXs always use (control, target) == qubits order
    eye = np.eye(2, dtype=complex)
    if pg.qubits[0] == qubits[0]:
        return np.kron(m, eye)  # acts on the control (high) bit
    return np.kron(eye, m)


def _template_phase(kind: GateKind, angles: tuple[float, ...],
                    physical: list[PhysicalGate], qubits: tuple[int, ...]) -> float:
    """Phase delta with source == exp(i*delta) * product(template)."""
    dim = 2 ** len(qubits)
    prod = np.eye(dim, dtype=complex)
    for pg in physical:
        prod = _local_matrix(pg, qubits) @ prod
    source = gate_matrix(kind, angles)
    c = np.trace(prod.conj().T @ source) / dim
    return float(np.angle(c))


def transpile_circuit(circuit: Circuit, params, basis: BasisGateSet = DEFAULT_BASIS,
                      feats=None) -> TranspiledCircuit:
    """Decompose every gate (encoder first, then layers) and peephole-optimize.

    Data-bound encoder angles default to generic probe values so the depth of
    an angle-encoded circuit does not depend on one particular sample.
    """
    thetas = np.atleast_2d(np.asarray(params, dtype=float))
    if feats is None and circuit.n_data:
        feats = probe_features(circuit.n_data)
    f = None if feats is None else np.atleast_2d(np.asarray(feats, dtype=float))
    tc = TranspiledCircuit(circuit.n_qubits)
    for idx, gate in enumerate(circuit.all_gates):
        angles = resolve_angles(gate, thetas, f)
        if angles is None:
            tup = ()
        elif angles.ndim == 1:
            tup = (wrap_param(float(angles[0])),)
        else:
            tup = tuple(wrap_param(float(v)) for v in angles[0])
        physical = decompose_kind(gate.kind, gate.qubits, tup, basis)
        tc.gates.extend(physical)
        tc.source_map.extend([idx] * len(physical))
        tc.global_phase += _template_phase(gate.kind, tup, physical, gate.qubits)
    return peephole_optimize(tc)


def probe_features(n: int) -> np.ndarray:
    """Low-discrepancy feature probes in (0, 1), generic under pi-scaling."""
    return np.array([(0.17 + 0.61803398875 * k) % 1.0 for k in range(n)])[None, :]


def peephole_optimize(tc: TranspiledCircuit) -> TranspiledCircuit:
    """Merge adjacent same-qubit RZs; drop ID and RZ(0 mod 2pi) gates."""
    gates, src, phase = list(tc.gates), list(tc.source_map), tc.global_phase
    changed = True
    while changed:
        changed = False
        kept, ksrc = [], []
        for g, s in zip(gates, src):
            if g.kind is GateKind.ID:
                changed = True
                continue
            if g.kind is GateKind.RZ and _is_zero_mod_2pi(g.params[0]):
                phase -= g.params[0] / 2  # removed gate equals exp(-i*angle/2) * I
                changed = True
                continue
            kept.append(g)
            ksrc.append(s)
        gates, src = kept, ksrc
        merged, msrc = [], []
        last_on: dict[int, int] = {}
        for g, s in zip(gates, src):
            if g.kind is GateKind.RZ:
                j = last_on.get(g.qubits[0])
                if j is not None and merged[j].kind is GateKind.RZ:
                    merged[j] = _rz(g.qubits[0], merged[j].params[0] + g.params[0])
                    changed = True
                    continue
            merged.append(g)
            msrc.append(s)
            for q in g.qubits:
                last_on[q] = len(merged) - 1
        gates, src = merged, msrc
    return TranspiledCircuit(tc.n_qubits, gates, src, phase)


def circuit_depth(tc: TranspiledCircuit) -> int:
    """Longest path through the shared-qubit dependency DAG."""
    level = [0] * tc.n_qubits
    for g in tc.gates:
        d = 1 + max(level[q] for q in g.qubits)
        for q in g.qubits:
            level[q] = d
    return max(level, default=0) if tc.n_qubits else 0


def tcd(circuit: Circuit, params, basis: BasisGateSet = DEFAULT_BASIS, feats=None) -> int:
    """Transpiled circuit depth of a logical circuit at given parameters."""
    return circuit_depth(transpile_circuit(circuit, params, basis, feats))


def standalone_gate_depth(kind: GateKind, params, basis: BasisGateSet = DEFAULT_BASIS) -> int:
    """Depth of a single-gate circuit after transpile + peephole."""
    angles = tuple(float(p) for p in np.atleast_1d(np.asarray(params, dtype=float))) \
        if ARITY[kind] else ()
    return _standalone_depth_cached(kind, tuple(_snapped(angles)) if angles else (), basis)


@lru_cache(maxsize=4096)
def _standalone_depth_cached(kind: GateKind, angles: tuple, basis: BasisGateSet) -> int:
    qubits = (0,) if kind in (GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.SX,
                              GateKind.X, GateKind.ID, GateKind.U3) else (0, 1)
    gates = decompose_kind(kind, qubits, angles, basis)
    tc = peephole_optimize(TranspiledCircuit(len(qubits), gates, [0] * len(gates)))
    return circuit_depth(tc)


# Parameter-class columns of the standalone depth table, printing order.
PARAM_CLASSES = ("0", "pi", "2pi", "3pi", "4pi", "pi/2", "3pi/2", "5pi/2", "7pi/2", "others")
_CLASS_ANGLE = {"0": 0.0, "pi": PI, "2pi": 2 * PI, "3pi": 3 * PI, "4pi": 4 * PI,
                "pi/2": HALF_PI, "3pi/2": 3 * HALF_PI, "5pi/2": 5 * HALF_PI,
                "7pi/2": 7 * HALF_PI, "others": GENERIC_ANGLE}

TABLE_KINDS = (GateKind.RX, GateKind.RY, GateKind.RZ,
               GateKind.CRX, GateKind.CRY, GateKind.CRZ)
FIXED_KINDS = (GateKind.X, GateKind.SX, GateKind.CX, GateKind.ID)


@dataclass
class DepthTable:
    """Standalone transpiled depth per (gate kind, parameter class)."""

    entries: dict

    def depth(self, kind: GateKind, param_class: str) -> int:
        return self.entries[(kind, param_class)]

    def max_depth(self) -> int:
        return max(self.entries.values())

    def rows(self):
        for kind in TABLE_KINDS:
            yield kind.value, [self.entries[(kind, c)] for c in PARAM_CLASSES]
        for kind in FIXED_KINDS:
            yield kind.value, [self.entries[(kind, "-")]]

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gate", "param_class", "depth"])
            for kind in TABLE_KINDS:
                for c in PARAM_CLASSES:
                    w.writerow([kind.value, c, self.entries[(kind, c)]])
            for kind in FIXED_KINDS:
                w.writerow([kind.value, "-", self.entries[(kind, "-")]])

    @staticmethod
    def from_csv(path) -> "DepthTable":
        entries = {}
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                entries[(GateKind(row["gate"]), row["param_class"])] = int(row["depth"])
        return DepthTable(entries)


def build_depth_table(basis: BasisGateSet = DEFAULT_BASIS) -> DepthTable:
    entries = {}
    for kind in TABLE_KINDS:
        for cls in PARAM_CLASSES:
            entries[(kind, cls)] = standalone_gate_depth(kind, [_CLASS_ANGLE[cls]], basis)
    for kind in FIXED_KINDS:
        entries[(kind, "-")] = standalone_gate_depth(kind, [], basis)
    return DepthTable(entries)
