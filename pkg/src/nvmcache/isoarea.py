"""Iso-area analysis: capacity solving, L2 simulation, DRAM-traffic impact.

Solves for the largest cache capacity whose tuned design fits an area budget,
simulates set-associative write-back/write-allocate LRU caches over address
traces to count DRAM transactions (line fills plus dirty writebacks), and
reports energy-delay products with and without DRAM costs for designs of
different capacities occupying the same silicon area.
"""

from __future__ import annotations

import csv
import io
import json
from collections import OrderedDict
from dataclasses import dataclass, replace

from .cachemodel import DEFAULT_BOUNDS, AccessType, OptTarget, OrgBounds, optimize
from .errors import (
    EmptyTrace,
    InvalidFieldValue,
    NoBaseTraffic,
    NoFeasibleCapacity,
    NonPositiveValue,
)
from .isocap import AnalysisEntry, EnergyBreakdown, RATIO_FIELDS, _ratio, raw_metrics
from .techlib import MemoryKind, TechConfig, builtin_bitcell
from .tuner import TunedConfig, tune
from .workloads import MemoryTrace, WorkloadProfile

MB = 1 << 20
WRITE_POLICY = "write-back+write-allocate"
_OP_WRITE = ord("W")


@dataclass(frozen=True)
class CacheConfig:
    """Geometry of one simulated cache. Write policy is fixed."""

    capacity: int       # bytes
    line_size: int = 128
    associativity: int = 16
    write_policy: str = WRITE_POLICY

    def __post_init__(self):
        if self.write_policy != WRITE_POLICY:
            raise InvalidFieldValue("write_policy", f"fixed at {WRITE_POLICY!r}")
        for name in ("capacity", "line_size", "associativity"):
            if getattr(self, name) < 1:
                raise NonPositiveValue(name, getattr(self, name))
        if self.capacity % (self.line_size * self.associativity) != 0:
            raise InvalidFieldValue(
                "capacity", f"{self.capacity} B is not sets x associativity x line_size exactly")

    @property
    def sets(self) -> int:
        return self.capacity // (self.line_size * self.associativity)

    def fully_associative(self) -> "CacheConfig":
        return CacheConfig(self.capacity, self.line_size, self.capacity // self.line_size)


@dataclass(frozen=True)
class CacheStats:
    """Counters from one simulation; dram_tx = misses (fills) + dirty writebacks."""

    accesses: int
    hits: int
    misses: int
    dirty_evictions: int
    dram_tx: int

    def __post_init__(self):
        for name in ("accesses", "hits", "misses", "dirty_evictions", "dram_tx"):
            if getattr(self, name) < 0:
                raise InvalidFieldValue(name, "counters must be non-negative")
        if self.accesses != self.hits + self.misses:
            raise InvalidFieldValue("accesses", "must equal hits + misses")
        if self.dram_tx != self.misses + self.dirty_evictions:
            raise InvalidFieldValue("dram_tx", "must equal misses + dirty_evictions")

    @classmethod
    def make(cls, hits, misses, dirty_evictions) -> "CacheStats":
        return cls(hits + misses, hits, misses, dirty_evictions, misses + dirty_evictions)


def simulate_cache(trace: MemoryTrace, cfg: CacheConfig) -> CacheStats:
    """Exact set-associative LRU simulation; deterministic.

    line = addr // line_size, set = line mod sets. Read and write misses both
    allocate; evicting a dirty line counts one writeback toward dram_tx.
    """
    if len(trace) == 0:
        raise EmptyTrace("cannot simulate an empty trace")
    nsets = cfg.sets
    line_size = cfg.line_size
    assoc = cfg.associativity
    cache = [OrderedDict() for _ in range(nsets)]
    hits = misses = dirty_evictions = 0
    for addr, op in zip(trace.addresses, trace.ops):
        line = addr // line_size
        s = cache[line % nsets]
        if line in s:
            hits += 1
            s.move_to_end(line)
            if op == _OP_WRITE:
                s[line] = True
        else:
            misses += 1
            s[line] = op == _OP_WRITE
            if len(s) > assoc:
                _, dirty = s.popitem(last=False)
                if dirty:
                    dirty_evictions += 1
    return CacheStats.make(hits, misses, dirty_evictions)


def simulate_cache_reference(trace: MemoryTrace, cfg: CacheConfig) -> CacheStats:
    """Independent brute-force LRU reference (list scans, no ordered maps)."""
    if len(trace) == 0:
        raise EmptyTrace("cannot simulate an empty trace")
    nsets = cfg.sets
    line_size = cfg.line_size
    assoc = cfg.associativity
    cache = [[] for _ in range(nsets)]  # per set: [line, dirty], LRU first
    hits = misses = dirty_evictions = 0
    for addr, op in zip(trace.addresses, trace.ops):
        line = addr // line_size
        lst = cache[line % nsets]
        found = None
        for i in range(len(lst)):
            if lst[i][0] == line:
                found = i
                break
        if found is not None:
            hits += 1
            entry = lst.pop(found)
            if op == _OP_WRITE:
                entry[1] = True
            lst.append(entry)
        else:
            misses += 1
            lst.append([line, op == _OP_WRITE])
            if len(lst) > assoc:
                victim = lst.pop(0)
                if victim[1]:
                    dirty_evictions += 1
    return CacheStats.make(hits, misses, dirty_evictions)


def dram_reduction_from_stats(base: CacheStats, big: CacheStats) -> float:
    """Percent reduction in DRAM transactions between two simulations."""
    if base.dram_tx == 0:
        raise NoBaseTraffic("baseline produced no DRAM transactions")
    return 100.0 * (1.0 - big.dram_tx / base.dram_tx)


def dram_reduction(trace: MemoryTrace, base_cfg: CacheConfig, big_cfg: CacheConfig) -> float:
    """Percent reduction in DRAM transactions from base_cfg to big_cfg.

    The configs may differ only in capacity: sets scale at fixed
    associativity, except for fully-associative caches where ways scale.
    """
    if base_cfg.line_size != big_cfg.line_size:
        raise InvalidFieldValue("big_cfg", "configs must share the line size")
    fully_assoc = base_cfg.sets == 1 and big_cfg.sets == 1
    if not fully_assoc and base_cfg.associativity != big_cfg.associativity:
        raise InvalidFieldValue("big_cfg", "configs may differ only in capacity/sets")
    return dram_reduction_from_stats(simulate_cache(trace, base_cfg), simulate_cache(trace, big_cfg))


def iso_area_capacity(kind: MemoryKind, area_budget: float, tech: TechConfig,
                      granularity: int = MB, slack: float = 0.025,
                      bounds: OrgBounds = DEFAULT_BOUNDS, max_steps: int = 256):
    """Largest capacity (multiple of granularity) whose EDAP-tuned design fits
    area_budget * (1 + slack). Returns (capacity_bytes, TunedConfig).

    The floor area over all organizations is non-decreasing in capacity, but
    the EDAP-tuned design's area is not (the winning candidate family can
    change between adjacent capacities), so the scan keeps the largest
    feasible step and stops only once the area floor itself exceeds the
    budget.
    """
    if not area_budget > 0:
        raise NonPositiveValue("area_budget", area_budget)
    if slack < 0:
        raise InvalidFieldValue("slack", "must be non-negative")
    kind = MemoryKind.parse(kind)
    limit = area_budget * (1.0 + slack)
    best = None
    bitcell = builtin_bitcell(kind)
    for n in range(1, max_steps + 1):
        capacity = n * granularity
        floor = optimize(bitcell, capacity, OptTarget.Area, AccessType.Normal, tech, bounds=bounds)
        if floor.area > limit:
            break
        cfg = tune(kind, capacity, tech, bounds=bounds)
        if cfg.ppa.area <= limit:
            best = (capacity, cfg)
    if best is None:
        raise NoFeasibleCapacity(
            f"minimum capacity {granularity} B exceeds area budget {area_budget} mm^2 (+{slack:.1%})")
    return best


def profile_with_simulated_dram(p: WorkloadProfile, stats: CacheStats) -> WorkloadProfile:
    """Substitute simulated DRAM counters (fills as reads, writebacks as writes)."""
    return replace(p, dram_read_tx=stats.misses, dram_write_tx=stats.dirty_evictions)


def isoarea_report(p: WorkloadProfile, stats_base: CacheStats, stats_big: CacheStats,
                   c_base: TunedConfig, c_big: TunedConfig, tech: TechConfig,
                   include_dram: bool = True) -> AnalysisEntry:
    """Energy/delay/EDP of a larger same-area design against the baseline.

    Reuses the iso-capacity arithmetic with simulated DRAM counters standing
    in for profiled ones; both EDP variants are emitted.
    """
    p_base = profile_with_simulated_dram(p, stats_base)
    p_big = profile_with_simulated_dram(p, stats_big)
    mine = raw_metrics(p_big, c_big, tech)
    base = raw_metrics(p_base, c_base, tech)
    ratios = {name: _ratio(mine[name], base[name]) for name in RATIO_FIELDS}
    if include_dram:
        ratios["total_energy"] = _ratio(mine["total_energy_with_dram"], base["total_energy_with_dram"])
        ratios["delay"] = _ratio(mine["delay_with_dram"], base["delay_with_dram"])
    breakdown = EnergyBreakdown.make(
        mine["dynamic_read"], mine["dynamic_write"], mine["leakage"],
        mine["dram"] if include_dram else 0.0,
    )
    return AnalysisEntry(
        dnn=p.dnn,
        stage=p.stage.value,
        kind=c_big.kind.value,
        baseline_kind=c_base.kind.value,
        breakdown=breakdown,
        delay_ns=mine["delay_with_dram"] if include_dram else mine["delay"],
        edp=mine["edp"],
        edp_with_dram=mine["edp_with_dram"],
        ratios=ratios,
    )


# --- report emission -----------------------------------------------------------

def stats_to_csv(rows) -> str:
    """rows: iterable of (label, CacheConfig, CacheStats)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["label", "capacity_mb", "sets", "associativity", "line_size",
                     "accesses", "hits", "misses", "dirty_evictions", "dram_tx"])
    for label, cfg, stats in rows:
        writer.writerow([label, cfg.capacity / MB, cfg.sets, cfg.associativity, cfg.line_size,
                         stats.accesses, stats.hits, stats.misses, stats.dirty_evictions, stats.dram_tx])
    return out.getvalue()


def stats_to_json(rows) -> str:
    payload = []
    for label, cfg, stats in rows:
        payload.append({
            "label": label,
            "capacity_bytes": cfg.capacity,
            "sets": cfg.sets,
            "associativity": cfg.associativity,
            "line_size": cfg.line_size,
            "accesses": stats.accesses,
            "hits": stats.hits,
            "misses": stats.misses,
            "dirty_evictions": stats.dirty_evictions,
            "dram_tx": stats.dram_tx,
        })
    return json.dumps(payload, indent=2) + "\n"


def reduction_series_csv(points) -> str:
    """points: iterable of (capacity_bytes, reduction_percent)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["capacity_mb", "dram_reduction_pct"])
    for capacity, pct in points:
        writer.writerow([capacity / MB, repr(float(pct))])
    return out.getvalue()
