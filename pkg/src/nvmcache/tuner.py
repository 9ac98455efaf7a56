"""EDAP-optimal cache tuning.

For a memory kind and capacity, sweep every optimization target and access
type, evaluate the energy-delay-area product of each candidate, and keep the
minimum. Each kind tunes independently of the others.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .cachemodel import (
    ACCESS_TYPES,
    DEFAULT_BOUNDS,
    OPT_TARGETS,
    AccessType,
    CachePPA,
    OptTarget,
    OrgBounds,
    optimize,
)
from .errors import InfeasibleCapacity
from .techlib import BitcellParams, MemoryKind, TechConfig, builtin_bitcell

MB = 1 << 20
DEFAULT_CAPACITIES_MB = (1, 2, 4, 8, 16, 32)


@dataclass(frozen=True)
class TunedConfig:
    """The EDAP-optimal design for one (kind, capacity) cell."""

    kind: MemoryKind
    capacity: int            # bytes
    chosen_target: OptTarget
    chosen_access: AccessType
    ppa: CachePPA
    edap: float              # nJ*ns*mm^2
    read_cycles: int
    write_cycles: int


def calculate_edap(ppa: CachePPA) -> float:
    """Energy-delay-area product of a design: the per-access read EDP plus
    write EDP, scaled by area (nJ*ns*mm^2).

    Leakage is deliberately not part of this objective; it has its own
    optimization target in the sweep.
    """
    return (ppa.read_energy * ppa.read_latency + ppa.write_energy * ppa.write_latency) * ppa.area


def _cycles(latency_ns: float, clock_mhz: float) -> int:
    return max(1, math.ceil(latency_ns * clock_mhz * 1e-3))


def tune(kind: MemoryKind, capacity: int, tech: TechConfig,
         bounds: OrgBounds = DEFAULT_BOUNDS, bitcell: BitcellParams = None,
         line_size: int = 128, associativity: int = 16) -> TunedConfig:
    """Pick the EDAP-minimal design over all 8 targets x 3 access types.

    Ties break toward the earliest (target, access) in declaration order;
    the running minimum starts at +inf and only a strictly smaller EDAP
    replaces it.
    """
    kind = MemoryKind.parse(kind)
    if bitcell is None:
        bitcell = builtin_bitcell(kind)
    best = None
    best_q = math.inf
    for target in OPT_TARGETS:
        for acc in ACCESS_TYPES:
            ppa = optimize(bitcell, capacity, target, acc, tech,
                           bounds=bounds, line_size=line_size, associativity=associativity)
            q = calculate_edap(ppa)
            if q < best_q:
                best_q = q
                best = (target, acc, ppa)
    target, acc, ppa = best
    return TunedConfig(
        kind=kind,
        capacity=capacity,
        chosen_target=target,
        chosen_access=acc,
        ppa=ppa,
        edap=best_q,
        read_cycles=_cycles(ppa.read_latency, tech.clock_frequency),
        write_cycles=_cycles(ppa.write_latency, tech.clock_frequency),
    )


def tune_all(kinds, capacities=None, tech: TechConfig = None,
             bounds: OrgBounds = DEFAULT_BOUNDS):
    """Tune every (kind, capacity) pair; capacities default to the standard
    1..32 MB grid.

    Returns (configs, failures). Failures are collected per pair instead of
    aborting the sweep; each entry is (kind, capacity, exception).
    """
    if tech is None:
        tech = TechConfig()
    if capacities is None:
        capacities = [c * MB for c in DEFAULT_CAPACITIES_MB]
    kinds = [MemoryKind.parse(k) for k in kinds]
    configs = []
    failures = []
    for kind in kinds:
        for capacity in sorted(capacities):
            try:
                configs.append(tune(kind, capacity, tech, bounds=bounds))
            except InfeasibleCapacity as e:
                failures.append((kind, capacity, e))
    return configs, failures


TUNED_CSV_COLUMNS = (
    "kind", "capacity_bytes", "capacity_mb", "chosen_target", "chosen_access",
    "read_latency_ns", "write_latency_ns", "read_energy_nj", "write_energy_nj",
    "leakage_power_mw", "area_mm2", "edap", "read_cycles", "write_cycles",
    "banks", "mats_per_bank", "rows", "cols", "senseamp_mux", "line_size", "associativity",
)


def tuned_to_row(cfg: TunedConfig) -> dict:
    org = cfg.ppa.organization
    return {
        "kind": cfg.kind.value,
        "capacity_bytes": cfg.capacity,
        "capacity_mb": cfg.capacity / MB,
        "chosen_target": cfg.chosen_target.value,
        "chosen_access": cfg.chosen_access.value,
        "read_latency_ns": cfg.ppa.read_latency,
        "write_latency_ns": cfg.ppa.write_latency,
        "read_energy_nj": cfg.ppa.read_energy,
        "write_energy_nj": cfg.ppa.write_energy,
        "leakage_power_mw": cfg.ppa.leakage_power,
        "area_mm2": cfg.ppa.area,
        "edap": cfg.edap,
        "read_cycles": cfg.read_cycles,
        "write_cycles": cfg.write_cycles,
        "banks": org.banks,
        "mats_per_bank": org.mats_per_bank,
        "rows": org.rows,
        "cols": org.cols,
        "senseamp_mux": org.senseamp_mux,
        "line_size": org.line_size,
        "associativity": org.associativity,
    }


def tuned_to_csv(configs) -> str:
    out = io.StringIO()
    writer = csv.DictWriter(out, fieldnames=TUNED_CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for cfg in configs:
        writer.writerow(tuned_to_row(cfg))
    return out.getvalue()


def tuned_to_json(configs) -> str:
    return json.dumps([tuned_to_row(cfg) for cfg in configs], indent=2) + "\n"
