"""Iso-capacity analysis: workload energy/delay/EDP for equal-capacity caches.

Combines a tuned cache design with a workload profile. Dynamic energy is
transactions times per-access energy; leakage energy is leakage power times
the measured execution time when the profile has one, else times a supplied
fallback delay; delay is the serialized-transaction model. Two EDP variants
are always reported: cache-only, and with DRAM energy and latency added.

Units: energies in mJ, delays in ns (converted to ms inside EDP), EDP in
mJ*ms.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .errors import CapacityMismatch, InvalidFieldValue, NonPositiveValue
from .techlib import TechConfig
from .tuner import TunedConfig
from .workloads import WorkloadProfile

NS_TO_MS = 1e-6
MW_NS_TO_MJ = 1e-9
MW_MS_TO_MJ = 1e-3
NJ_TO_MJ = 1e-6


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy components of one workload on one cache design (mJ)."""

    dynamic_read: float
    dynamic_write: float
    leakage: float
    dram: float
    total: float

    def __post_init__(self):
        for name in ("dynamic_read", "dynamic_write", "leakage", "dram"):
            if getattr(self, name) < 0:
                raise InvalidFieldValue(name, "energy components must be non-negative")
        if self.total != self.dynamic_read + self.dynamic_write + self.leakage + self.dram:
            raise InvalidFieldValue("total", "must equal the exact sum of components")

    @classmethod
    def make(cls, dynamic_read, dynamic_write, leakage, dram) -> "EnergyBreakdown":
        return cls(dynamic_read, dynamic_write, leakage, dram,
                   dynamic_read + dynamic_write + leakage + dram)


def dynamic_energy(p: WorkloadProfile, c: TunedConfig) -> tuple[float, float]:
    """(read, write) dynamic energy in mJ: transactions times access energy."""
    read = p.l2_read_tx * c.ppa.read_energy * NJ_TO_MJ
    write = p.l2_write_tx * c.ppa.write_energy * NJ_TO_MJ
    return read, write


def leakage_energy(p: WorkloadProfile, c: TunedConfig, delay_fallback_ns: float = None) -> float:
    """Leakage energy in mJ over the profile's exposure time.

    Uses the measured exec_time_ms when the profile carries one; otherwise
    delay_fallback_ns must be supplied (> 0).
    """
    if p.exec_time_ms is not None:
        return c.ppa.leakage_power * p.exec_time_ms * MW_MS_TO_MJ
    if delay_fallback_ns is None or not delay_fallback_ns > 0:
        raise NonPositiveValue("delay_fallback_ns", delay_fallback_ns)
    return c.ppa.leakage_power * delay_fallback_ns * MW_NS_TO_MJ


def memory_delay(p: WorkloadProfile, c: TunedConfig, tech: TechConfig,
                 include_dram: bool = False) -> float:
    """Serialized-transaction delay in ns."""
    delay = p.l2_read_tx * c.ppa.read_latency + p.l2_write_tx * c.ppa.write_latency
    if include_dram:
        delay += (p.dram_read_tx + p.dram_write_tx) * tech.dram_access_latency
    return delay


def dram_energy(p: WorkloadProfile, tech: TechConfig) -> float:
    """DRAM transaction energy in mJ."""
    return (p.dram_read_tx + p.dram_write_tx) * tech.dram_access_energy * NJ_TO_MJ


RATIO_FIELDS = ("dynamic_read", "dynamic_write", "dynamic", "leakage", "dram",
                "total_energy", "delay", "edp", "edp_with_dram")


def _ratio(value: float, base: float) -> float:
    if base == 0.0:
        return 1.0 if value == 0.0 else float("inf")
    return value / base


@dataclass(frozen=True)
class AnalysisEntry:
    """One (workload, design) analysis with ratios against a baseline design."""

    dnn: str
    stage: str
    kind: str
    baseline_kind: str
    breakdown: EnergyBreakdown
    delay_ns: float
    edp: float             # mJ*ms, cache-only
    edp_with_dram: float   # mJ*ms, DRAM energy and latency included
    ratios: dict           # RATIO_FIELDS -> value vs. baseline


def raw_metrics(p: WorkloadProfile, c: TunedConfig, tech: TechConfig):
    dyn_r, dyn_w = dynamic_energy(p, c)
    delay_nodram = memory_delay(p, c, tech, include_dram=False)
    delay_dram = memory_delay(p, c, tech, include_dram=True)
    if p.exec_time_ms is not None:
        leak = leakage_energy(p, c)
    elif delay_nodram > 0:
        leak = leakage_energy(p, c, delay_fallback_ns=delay_nodram)
    else:
        leak = 0.0  # zero transactions and no measured time: no exposure
    dram_e = dram_energy(p, tech)
    energy_nodram = dyn_r + dyn_w + leak
    energy_dram = energy_nodram + dram_e
    edp = energy_nodram * delay_nodram * NS_TO_MS
    edp_dram = energy_dram * delay_dram * NS_TO_MS
    return {
        "dynamic_read": dyn_r,
        "dynamic_write": dyn_w,
        "dynamic": dyn_r + dyn_w,
        "leakage": leak,
        "dram": dram_e,
        "total_energy": energy_nodram,
        "total_energy_with_dram": energy_dram,
        "delay": delay_nodram,
        "delay_with_dram": delay_dram,
        "edp": edp,
        "edp_with_dram": edp_dram,
    }


def analyze(p: WorkloadProfile, c: TunedConfig, baseline_c: TunedConfig,
            tech: TechConfig, include_dram: bool = False) -> AnalysisEntry:
    """Full energy/delay/EDP analysis of one profile at iso-capacity.

    include_dram selects the headline convention for the breakdown total and
    reported delay; both EDP variants are always computed. Raises
    CapacityMismatch when the designs differ in capacity.
    """
    if c.capacity != baseline_c.capacity:
        raise CapacityMismatch(c.capacity, baseline_c.capacity)
    mine = raw_metrics(p, c, tech)
    base = raw_metrics(p, baseline_c, tech)
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
        kind=c.kind.value,
        baseline_kind=baseline_c.kind.value,
        breakdown=breakdown,
        delay_ns=mine["delay_with_dram"] if include_dram else mine["delay"],
        edp=mine["edp"],
        edp_with_dram=mine["edp_with_dram"],
        ratios=ratios,
    )


def batch_sweep(profiles, c: TunedConfig, baseline_c: TunedConfig, tech: TechConfig,
                include_dram: bool = True) -> list[tuple[int, float]]:
    """EDP ratio versus batch size for profiles of one (network, stage).

    Returns (batch_size, edp_ratio) points sorted by batch size; the ratio is
    the with-DRAM variant by default. Requires at least two distinct batch
    sizes and a homogeneous profile group.
    """
    profiles = list(profiles)
    if len({(p.dnn, p.stage) for p in profiles}) > 1:
        raise InvalidFieldValue("profiles", "batch sweep requires one (dnn, stage) group")
    if len({p.batch_size for p in profiles}) < 2:
        raise InvalidFieldValue("profiles", "batch sweep requires >= 2 distinct batch sizes")
    points = []
    for p in sorted(profiles, key=lambda q: q.batch_size):
        entry = analyze(p, c, baseline_c, tech, include_dram=include_dram)
        points.append((p.batch_size, entry.edp_with_dram if include_dram else entry.edp))
    base_points = []
    for p in sorted(profiles, key=lambda q: q.batch_size):
        entry = analyze(p, baseline_c, baseline_c, tech, include_dram=include_dram)
        base_points.append(entry.edp_with_dram if include_dram else entry.edp)
    return [(batch, edp / base if base != 0 else 1.0)
            for (batch, edp), base in zip(points, base_points)]


# --- report emission -----------------------------------------------------------

def entries_to_csv(entries) -> str:
    """Long-format report: dnn,stage,kind,metric,value."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["dnn", "stage", "kind", "metric", "value"])
    for e in entries:
        rows = [
            ("dynamic_read_mj", e.breakdown.dynamic_read),
            ("dynamic_write_mj", e.breakdown.dynamic_write),
            ("leakage_mj", e.breakdown.leakage),
            ("dram_mj", e.breakdown.dram),
            ("total_mj", e.breakdown.total),
            ("delay_ns", e.delay_ns),
            ("edp_mj_ms", e.edp),
            ("edp_with_dram_mj_ms", e.edp_with_dram),
        ]
        rows.extend((f"ratio_{name}", e.ratios[name]) for name in RATIO_FIELDS)
        for metric, value in rows:
            writer.writerow([e.dnn, e.stage, e.kind, metric, repr(float(value))])
    return out.getvalue()


def entries_to_json(entries) -> str:
    payload = []
    for e in entries:
        payload.append({
            "dnn": e.dnn,
            "stage": e.stage,
            "kind": e.kind,
            "baseline_kind": e.baseline_kind,
            "breakdown_mj": {
                "dynamic_read": e.breakdown.dynamic_read,
                "dynamic_write": e.breakdown.dynamic_write,
                "leakage": e.breakdown.leakage,
                "dram": e.breakdown.dram,
                "total": e.breakdown.total,
            },
            "delay_ns": e.delay_ns,
            "edp_mj_ms": e.edp,
            "edp_with_dram_mj_ms": e.edp_with_dram,
            "ratios": {name: e.ratios[name] for name in RATIO_FIELDS},
        })
    return json.dumps(payload, indent=2) + "\n"


def figure_energy_csv(entries) -> str:
    """Plot data, normalized dynamic and leakage energy per workload and kind."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["dnn", "stage", "kind", "dynamic_ratio", "leakage_ratio"])
    for e in entries:
        writer.writerow([e.dnn, e.stage, e.kind,
                         repr(float(e.ratios["dynamic"])), repr(float(e.ratios["leakage"]))])
    return out.getvalue()


def figure_edp_csv(entries) -> str:
    """Plot data, normalized total energy and both EDP variants."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["dnn", "stage", "kind", "energy_ratio", "edp_ratio", "edp_with_dram_ratio"])
    for e in entries:
        writer.writerow([e.dnn, e.stage, e.kind, repr(float(e.ratios["total_energy"])),
                         repr(float(e.ratios["edp"])), repr(float(e.ratios["edp_with_dram"]))])
    return out.getvalue()


def figure_batch_csv(series_by_kind: dict) -> str:
    """Plot data, EDP ratio versus batch size per kind."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["batch_size", "kind", "edp_ratio"])
    for kind in sorted(series_by_kind):
        for batch, ratio in series_by_kind[kind]:
            writer.writerow([batch, kind, repr(float(ratio))])
    return out.getvalue()
