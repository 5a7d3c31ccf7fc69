"""Compression levels: angles where a gate prunes away or compiles shorter.

A pruning level makes the gate's matrix a global phase times identity, so the
gate can be deleted outright.  A quantization level compiles to strictly fewer
physical layers than a generic angle.  Levels are searched on the grid of
pi/2 multiples in [0, 4pi), which is where all of them live for the supported
gate kinds; a finer grid can be passed in for oracle scans.
"""

import csv
import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit
from .errors import LUTError
from .gates import (ARITY, GateKind, circ_dist, gate_matrix,
                    phase_identity_factor, wrap_param)
from .transpile import BasisGateSet, DEFAULT_BASIS, GENERIC_ANGLE, standalone_gate_depth

HALF_PI = math.pi / 2


class LevelTag(enum.Enum):
    PRUNE = "prune"
    QUANTIZE = "quantize"


@dataclass(frozen=True, order=True)
class CompressionLevel:
    depth: int
    value: tuple[float, ...]
    tag: LevelTag = field(compare=False)

    def __str__(self):
        vals = ";".join(f"{v:.10g}" for v in self.value)
        return f"{vals} [{self.tag.value}, depth {self.depth}]"


def default_candidates(kind: GateKind) -> list[tuple[float, ...]]:
    """All pi/2 multiples in [0, 4pi), as tuples matching the gate's arity."""
    grid = [k * HALF_PI for k in range(8)]
    return [tuple(t) for t in itertools.product(grid, repeat=ARITY[kind])]


def find_pruning_levels(kind: GateKind, candidates=None,
                        basis: BasisGateSet = DEFAULT_BASIS) -> list[CompressionLevel]:
    """Candidates whose gate matrix is c*I with |c| = 1 (identity up to phase)."""
    if candidates is None:
        candidates = default_candidates(kind)
    found = []
    for cand in candidates:
        cand = tuple(wrap_param(a) for a in cand)
        if phase_identity_factor(gate_matrix(kind, cand)) is not None:
            found.append(CompressionLevel(standalone_gate_depth(kind, cand, basis),
                                          cand, LevelTag.PRUNE))
    return sorted(set(found))


def generic_depth(kind: GateKind, basis: BasisGateSet = DEFAULT_BASIS) -> int:
    """Depth at a fully generic angle tuple; the maximum over all parameters."""
    probe = tuple(GENERIC_ANGLE + 0.1 * i for i in range(ARITY[kind]))
    return standalone_gate_depth(kind, probe, basis)


def find_quantization_levels(kind: GateKind, basis: BasisGateSet = DEFAULT_BASIS,
                             candidates=None) -> list[CompressionLevel]:
    """Non-pruning candidates compiling strictly below the generic depth."""
    if candidates is None:
        candidates = default_candidates(kind)
    ceiling = generic_depth(kind, basis)
    found = set()
    for cand in candidates:
        cand = tuple(wrap_param(a) for a in cand)
        if phase_identity_factor(gate_matrix(kind, cand)) is not None:
            continue
        d = standalone_gate_depth(kind, cand, basis)
        if d < ceiling:
            found.add(CompressionLevel(d, cand, LevelTag.QUANTIZE))
    return sorted(found)


@dataclass
class CompressionLUT:
    """Per gate kind: all compression levels, sorted by depth then value."""

    entries: dict  # GateKind -> list[CompressionLevel]

    def levels(self, kind: GateKind) -> list[CompressionLevel]:
        try:
            return self.entries[kind]
        except KeyError:
            raise LUTError(f"no compression levels recorded for {kind.value}") from None

    def filtered(self, tag: LevelTag) -> "CompressionLUT":
        """Restrict every entry to one tag; entries may become empty."""
        return CompressionLUT({k: [lv for lv in v if lv.tag is tag]
                               for k, v in self.entries.items()})

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gate", "values", "tag", "depth"])
            for kind in sorted(self.entries, key=lambda k: k.value):
                for lv in self.entries[kind]:
                    w.writerow([kind.value, ";".join(f"{v:.10g}" for v in lv.value),
                                lv.tag.value, lv.depth])

    def write_csv_text(self) -> str:
        lines = ["gate,values,tag,depth"]
        for kind in sorted(self.entries, key=lambda k: k.value):
            for lv in self.entries[kind]:
                vals = ";".join(f"{v:.10g}" for v in lv.value)
                lines.append(f"{kind.value},{vals},{lv.tag.value},{lv.depth}")
        return "\n".join(lines) + "\n"


def build_lut(circuit: Circuit, basis: BasisGateSet = DEFAULT_BASIS,
              candidates_by_kind=None) -> CompressionLUT:
    """Union of pruning and quantization levels for every trainable kind used."""
    kinds = sorted({g.kind for g in circuit.layers if g.trainable}, key=lambda k: k.value)
    entries = {}
    for kind in kinds:
        cands = None if candidates_by_kind is None else candidates_by_kind.get(kind)
        levels = (find_pruning_levels(kind, cands, basis)
                  + find_quantization_levels(kind, basis, cands))
        entries[kind] = sorted(levels)
    return CompressionLUT(entries)


def level_distance(value: tuple[float, ...], angles) -> float:
    """Euclidean circular distance between an angle tuple and a level value."""
    angles = np.atleast_1d(np.asarray(angles, dtype=float))
    return float(math.sqrt(sum(circ_dist(a, v) ** 2 for a, v in zip(angles, value))))


def nearest_level(levels: list[CompressionLevel], angles) -> CompressionLevel:
    """Closest level on the [0, 4pi) circle; ties go to smaller depth, then value."""
    if not levels:
        raise LUTError("empty compression-level list")
    return min(levels, key=lambda lv: (level_distance(lv.value, angles), lv.depth, lv.value))
