"""Scalability analysis across the capacity grid.

Runs the tuner at every (kind, capacity) cell and emits per-metric series:
six cache metrics straight from the tuned designs, plus three workload
metrics (energy, latency, EDP) averaged over a profile suite with standard
deviation across workloads. Crossovers between two series are reported as
grid brackets, never interpolated.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import dataclass

from .cachemodel import DEFAULT_BOUNDS, OrgBounds
from .errors import InvalidFieldValue
from .isocap import raw_metrics
from .techlib import MemoryKind, TechConfig
from .tuner import tune
from .workloads import WorkloadProfile

MB = 1 << 20

CACHE_METRICS = ("area", "read_latency", "write_latency", "read_energy", "write_energy", "leakage_power")
WORKLOAD_METRICS = ("workload_energy", "workload_latency", "workload_edp")
SWEEP_METRICS = CACHE_METRICS + WORKLOAD_METRICS


@dataclass(frozen=True)
class ScalabilitySeries:
    """One metric for one kind over the capacity grid.

    points are (capacity_bytes, value, stdev) with stdev None for cache
    metrics and >= 0 for workload metrics (dispersion across profiles).
    """

    metric: str
    kind: MemoryKind
    points: tuple

    def __post_init__(self):
        caps = [p[0] for p in self.points]
        if caps != sorted(caps) or len(set(caps)) != len(caps):
            raise InvalidFieldValue("points", "capacities must be strictly ascending")
        for cap, value, stdev in self.points:
            if not value > 0:
                raise InvalidFieldValue("points", f"values must be positive ({self.metric} at {cap})")
            if stdev is not None and stdev < 0:
                raise InvalidFieldValue("points", "stdev must be >= 0 when present")

    @property
    def capacities(self) -> tuple:
        return tuple(p[0] for p in self.points)

    @property
    def values(self) -> tuple:
        return tuple(p[1] for p in self.points)


@dataclass(frozen=True)
class Crossover:
    """A sign change of (a - b) between two adjacent grid capacities."""

    metric: str
    kind_a: MemoryKind
    kind_b: MemoryKind
    capacity_low: int
    capacity_high: int


def _workload_numbers(profile: WorkloadProfile, cfg, tech: TechConfig,
                      include_dram: bool) -> dict:
    m = raw_metrics(profile, cfg, tech)
    if include_dram:
        return {"workload_energy": m["total_energy_with_dram"],
                "workload_latency": m["delay_with_dram"],
                "workload_edp": m["edp_with_dram"]}
    return {"workload_energy": m["total_energy"],
            "workload_latency": m["delay"],
            "workload_edp": m["edp"]}


def scalability_sweep(kinds, capacities, profiles, tech: TechConfig,
                      bounds: OrgBounds = DEFAULT_BOUNDS,
                      include_dram: bool = False) -> list[ScalabilitySeries]:
    """One series per (kind, metric) over the capacity grid.

    Workload metrics are the mean across profiles with population standard
    deviation; cache metrics carry no dispersion. Each kind is tuned at each
    capacity independently. Output order is fixed: kinds as given, metrics in
    SWEEP_METRICS order.
    """
    kinds = [MemoryKind.parse(k) for k in kinds]
    capacities = sorted(capacities)
    profiles = list(profiles)
    series = []
    for kind in kinds:
        per_metric = {name: [] for name in SWEEP_METRICS}
        for capacity in capacities:
            cfg = tune(kind, capacity, tech, bounds=bounds)
            for name in CACHE_METRICS:
                per_metric[name].append((capacity, cfg.ppa.metric(name), None))
            if profiles:
                samples = {name: [] for name in WORKLOAD_METRICS}
                for p in profiles:
                    numbers = _workload_numbers(p, cfg, tech, include_dram)
                    for name in WORKLOAD_METRICS:
                        samples[name].append(numbers[name])
                for name in WORKLOAD_METRICS:
                    mean = statistics.fmean(samples[name])
                    stdev = statistics.pstdev(samples[name])
                    per_metric[name].append((capacity, mean, stdev))
        for name in SWEEP_METRICS:
            if per_metric[name]:
                series.append(ScalabilitySeries(metric=name, kind=kind, points=tuple(per_metric[name])))
    return series


def find_crossover(a: ScalabilitySeries, b: ScalabilitySeries) -> list[Crossover]:
    """Brackets where sign(a - b) flips between adjacent grid points.

    Exact ties (sign zero) are not flips; grids must match exactly.
    """
    if a.capacities != b.capacities:
        raise InvalidFieldValue("b", "series must share the capacity grid")
    if a.metric != b.metric:
        raise InvalidFieldValue("b", "series must carry the same metric")
    out = []
    deltas = [av - bv for av, bv in zip(a.values, b.values)]
    signs = [(d > 0) - (d < 0) for d in deltas]
    for i in range(len(signs) - 1):
        if signs[i] * signs[i + 1] < 0:
            out.append(Crossover(
                metric=a.metric, kind_a=a.kind, kind_b=b.kind,
                capacity_low=a.capacities[i], capacity_high=a.capacities[i + 1],
            ))
    return out


def normalized_series(series: ScalabilitySeries, baseline: ScalabilitySeries) -> ScalabilitySeries:
    """Pointwise division by a baseline series on the same grid."""
    if series.capacities != baseline.capacities:
        raise InvalidFieldValue("baseline", "series must share the capacity grid")
    if series.metric != baseline.metric:
        raise InvalidFieldValue("baseline", "series must carry the same metric")
    points = []
    for (cap, value, stdev), (_, base, _) in zip(series.points, baseline.points):
        points.append((cap, value / base, None if stdev is None else stdev / base))
    return ScalabilitySeries(metric=series.metric, kind=series.kind, points=tuple(points))


def normalize_all(series_list, baseline_kind) -> list[ScalabilitySeries]:
    """Normalize every series against the same-metric series of baseline_kind."""
    baseline_kind = MemoryKind.parse(baseline_kind)
    baselines = {s.metric: s for s in series_list if s.kind is baseline_kind}
    out = []
    for s in series_list:
        if s.metric not in baselines:
            raise InvalidFieldValue("baseline_kind", f"no baseline series for metric {s.metric}")
        out.append(normalized_series(s, baselines[s.metric]))
    return out


# --- report emission -----------------------------------------------------------

def series_to_csv(series_list) -> str:
    """Tidy series table: metric,kind,capacity_mb,value,stdev."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["metric", "kind", "capacity_mb", "value", "stdev"])
    ordered = sorted(series_list, key=lambda s: (s.metric, s.kind.value))
    for s in ordered:
        for cap, value, stdev in s.points:
            writer.writerow([s.metric, s.kind.value, cap / MB, repr(float(value)),
                             "" if stdev is None else repr(float(stdev))])
    return out.getvalue()


def series_to_json(series_list) -> str:
    payload = []
    for s in sorted(series_list, key=lambda x: (x.metric, x.kind.value)):
        payload.append({
            "metric": s.metric,
            "kind": s.kind.value,
            "points": [
                {"capacity_mb": cap / MB, "value": value, "stdev": stdev}
                for cap, value, stdev in s.points
            ],
        })
    return json.dumps(payload, indent=2) + "\n"


def crossovers_to_csv(crossovers) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["metric", "kind_a", "kind_b", "cap_low_mb", "cap_high_mb"])
    ordered = sorted(crossovers, key=lambda c: (c.metric, c.kind_a.value, c.kind_b.value, c.capacity_low))
    for c in ordered:
        writer.writerow([c.metric, c.kind_a.value, c.kind_b.value,
                         c.capacity_low / MB, c.capacity_high / MB])
    return out.getvalue()
