"""Command-line front end.

One declarative JSON config drives every pipeline stage; flags only override
selected fields. Subcommands: calibrate, tune, isocap, isoarea, sweep,
gen-trace, gen-profile. All file writes are atomic (temp file + rename) and
every run is deterministic given the same config and seed.

Exit codes: 0 ok, 1 runtime error, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field, fields
from pathlib import Path

from . import cachemodel, isoarea, isocap, sweep as sweepmod, tuner, workloads
from .cachemodel import AnchorSpec, DEFAULT_ANCHORS, calibrate, model_ledger
from .errors import ConfigError, NvmCacheError
from .techlib import MemoryKind, TechConfig, load_bitcell, load_tech, save_tech, builtin_bitcell
from .workloads import Stage, TraceSpec

MB = 1 << 20


@dataclass
class RunConfig:
    """Validated run configuration (see configs/pipeline.json for a template)."""

    tech: str | None = None                 # technology config path; None = shipped defaults
    bitcells: dict = field(default_factory=dict)  # kind -> path or "builtin"
    kinds: list = field(default_factory=lambda: ["SRAM", "STT_MRAM", "SOT_MRAM"])
    baseline_kind: str = "SRAM"
    capacities_mb: list = field(default_factory=lambda: [1, 2, 4, 8, 16, 32])
    analysis_capacity_mb: int = 3
    profiles: object = field(default_factory=lambda: {"generator": "suite", "seed": 7})
    batch_profiles: object = field(default_factory=lambda: {
        "generator": "batch_series", "dnn": "AlexNet", "stage": "Training",
        "batches": [4, 8, 16, 32, 64], "seed": 7})
    trace: object = field(default_factory=lambda: {"generator": "reuse_pools"})
    anchors: str = "builtin"
    include_dram: bool = True
    area_slack: float = 0.025
    area_granularity_mb: int = 1
    reduction_capacities_mb: list = field(default_factory=lambda: [6, 12, 24])
    delay_convention: str = "transactions"
    output_dir: str = "out"
    seed: int = 7
    line_size: int = 128
    associativity: int = 16

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        if path is None:
            return cls()
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"FileNotFound: config file {p}")
        try:
            raw = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**raw)
        cfg._base_dir = p.parent
        return cfg

    _base_dir: Path = field(default_factory=Path, repr=False)

    def resolve(self, path_text: str) -> Path:
        p = Path(path_text)
        return p if p.is_absolute() else self._base_dir / p

    def validate(self):
        if not self.kinds:
            raise ConfigError("kinds must be non-empty")
        kinds = [MemoryKind.parse(k) for k in self.kinds]
        if MemoryKind.parse(self.baseline_kind) not in kinds:
            raise ConfigError(f"baseline_kind {self.baseline_kind} not in kinds {self.kinds}")
        if not self.capacities_mb:
            raise ConfigError("capacities_mb grid must be non-empty")
        if any(c <= 0 for c in self.capacities_mb):
            raise ConfigError("capacities_mb entries must be positive")
        if self.analysis_capacity_mb <= 0:
            raise ConfigError("analysis_capacity_mb must be positive")
        if self.area_slack < 0:
            raise ConfigError("area_slack must be non-negative")
        if self.delay_convention not in ("transactions",):
            raise ConfigError(f"unknown delay_convention {self.delay_convention!r}")
        for text in (self.tech,) if self.tech else ():
            if not self.resolve(text).exists():
                raise ConfigError(f"FileNotFound: tech config {text}")
        for kind, sel in sorted(self.bitcells.items()):
            MemoryKind.parse(kind)
            if sel != "builtin" and not self.resolve(sel).exists():
                raise ConfigError(f"FileNotFound: bitcell file {sel}")
        if self.anchors != "builtin" and not self.resolve(self.anchors).exists():
            raise ConfigError(f"FileNotFound: anchors file {self.anchors}")
        if isinstance(self.profiles, str) and not self.resolve(self.profiles).exists():
            raise ConfigError(f"FileNotFound: profile CSV {self.profiles}")
        if isinstance(self.trace, str) and not self.resolve(self.trace).exists():
            raise ConfigError(f"FileNotFound: trace file {self.trace}")

    # --- loaded artifacts ---

    def load_tech_config(self) -> TechConfig:
        if self.tech is None:
            return TechConfig()
        return load_tech(self.resolve(self.tech).read_text(encoding="utf-8"))

    def load_bitcell_for(self, kind: MemoryKind):
        sel = self.bitcells.get(kind.value, "builtin")
        if sel == "builtin":
            return builtin_bitcell(kind)
        return load_bitcell(self.resolve(sel).read_text(encoding="utf-8"))

    def load_anchors(self):
        if self.anchors == "builtin":
            return DEFAULT_ANCHORS
        raw = json.loads(self.resolve(self.anchors).read_text(encoding="utf-8"))
        return tuple(
            AnchorSpec.of(a["kind"], int(a["capacity_mb"] * MB), **a["metrics"]) for a in raw
        )

    def load_profiles(self, seed=None):
        spec = self.profiles
        if isinstance(spec, str):
            return workloads.load_profiles(self.resolve(spec))
        gen = spec.get("generator")
        if gen == "suite":
            return workloads.generate_profile_suite(seed=seed if seed is not None else spec.get("seed", self.seed))
        raise ConfigError(f"unknown profile generator {gen!r}")

    def load_batch_profiles(self, seed=None):
        spec = self.batch_profiles
        if isinstance(spec, str):
            return workloads.load_profiles(self.resolve(spec))
        if spec.get("generator") != "batch_series":
            raise ConfigError("batch_profiles generator must be 'batch_series' or a CSV path")
        return workloads.generate_batch_series(
            dnn_name=spec.get("dnn", "AlexNet"),
            stage=Stage.parse(spec.get("stage", "Training")),
            batches=spec.get("batches", (4, 8, 16, 32, 64)),
            seed=seed if seed is not None else spec.get("seed", self.seed),
        )

    def trace_spec(self, seed=None) -> TraceSpec:
        spec = self.trace
        if not isinstance(spec, dict) or spec.get("generator") != "reuse_pools":
            raise ConfigError("trace generator spec must have generator='reuse_pools'")
        kwargs = {k: v for k, v in spec.items() if k != "generator"}
        if "pools" in kwargs:
            kwargs["pools"] = tuple((int(n), float(w)) for n, w in kwargs["pools"])
        if seed is not None:
            kwargs["seed"] = seed
        base = workloads.GOLDEN_TRACE_SPEC
        return TraceSpec(**{**{f.name: getattr(base, f.name) for f in fields(TraceSpec)}, **kwargs})

    def load_trace(self, seed=None):
        if isinstance(self.trace, str):
            return workloads.load_trace(self.resolve(self.trace))
        return workloads.generate_trace(self.trace_spec(seed))


def _atomic_write(path: Path, data: str | bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    with tempfile.NamedTemporaryFile(mode, dir=path.parent, prefix=path.name + ".", delete=False) as tmp:
        tmp.write(data)
        tmp_path = tmp.name
    os.replace(tmp_path, path)


class _Runner:
    def __init__(self, args):
        self.args = args
        self.config = RunConfig.load(args.config)
        if args.seed is not None:
            self.config.seed = args.seed
        if args.output is not None:
            self.config.output_dir = args.output
        self.config.validate()
        self.out_dir = Path(self.config.output_dir)
        self.dry_run = args.dry_run
        self.keep_going = args.keep_going

    def write(self, name: str, data: str | bytes):
        if self.dry_run:
            print(f"dry-run: would write {self.out_dir / name}")
            return
        _atomic_write(self.out_dir / name, data)
        print(f"wrote {self.out_dir / name}")

    def kinds(self):
        return [MemoryKind.parse(k) for k in self.config.kinds]

    def baseline(self):
        return MemoryKind.parse(self.config.baseline_kind)

    def tech(self) -> TechConfig:
        return self.config.load_tech_config()

    def tune_at(self, tech, kind, capacity):
        return tuner.tune(kind, capacity, tech,
                          bitcell=self.config.load_bitcell_for(kind),
                          line_size=self.config.line_size,
                          associativity=self.config.associativity)


def cmd_calibrate(run: _Runner) -> int:
    anchors = run.config.load_anchors()
    tech = run.tech()
    if run.dry_run:
        print("dry-run: config valid; calibration not executed")
        return 0
    result = calibrate(anchors, tech)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["kind", "capacity_mb", "metric", "target", "achieved", "rel_error"])
    for kind, capacity, metric, target, achieved, rel in result.residuals:
        writer.writerow([kind.value, capacity / MB, metric, repr(float(target)),
                         repr(float(achieved)), repr(float(rel))])
        print(f"{kind.value:9s} {capacity // MB:3d}MB {metric:14s} "
              f"target={target:10.3f} achieved={achieved:10.3f} err={rel:+.2%}")
    print(f"max relative error: {result.max_error:.2%}")
    run.write("calibrated_tech.json", save_tech(result.tech))
    run.write("calibration_report.csv", out.getvalue())
    run.write("model_ledger.md", model_ledger())
    return 0


def cmd_tune(run: _Runner) -> int:
    tech = run.tech()
    if run.dry_run:
        print("dry-run: config valid; tuning not executed")
        return 0
    configs = []
    failures = []
    for kind in run.kinds():
        for cap_mb in sorted(run.config.capacities_mb):
            try:
                configs.append(run.tune_at(tech, kind, int(cap_mb * MB)))
            except NvmCacheError as e:
                failures.append((kind, cap_mb, e))
                if not run.keep_going:
                    raise
    run.write("tuned.csv", tuner.tuned_to_csv(configs))
    run.write("tuned.json", tuner.tuned_to_json(configs))
    for kind, cap_mb, e in failures:
        print(f"warning: {kind.value} @ {cap_mb} MB failed: {e}", file=sys.stderr)
    return 0


def cmd_isocap(run: _Runner) -> int:
    tech = run.tech()
    if run.dry_run:
        print("dry-run: config valid; analysis not executed")
        return 0
    capacity = int(run.config.analysis_capacity_mb * MB)
    tuned = {kind: run.tune_at(tech, kind, capacity) for kind in run.kinds()}
    base = tuned[run.baseline()]
    profiles = run.config.load_profiles()
    entries = []
    for p in profiles:
        for kind in run.kinds():
            try:
                entries.append(isocap.analyze(p, tuned[kind], base, tech,
                                              include_dram=run.config.include_dram))
            except NvmCacheError as e:
                if not run.keep_going:
                    raise
                print(f"warning: {p.dnn}/{p.stage.value}/{kind.value} skipped: {e}", file=sys.stderr)
    run.write("isocap_report.csv", isocap.entries_to_csv(entries))
    run.write("isocap_report.json", isocap.entries_to_json(entries))
    run.write("fig_isocap_energy.csv", isocap.figure_energy_csv(entries))
    run.write("fig_isocap_edp.csv", isocap.figure_edp_csv(entries))
    batch_profiles = run.config.load_batch_profiles()
    series_by_kind = {}
    for kind in run.kinds():
        if kind is run.baseline():
            continue
        series_by_kind[kind.value] = isocap.batch_sweep(
            batch_profiles, tuned[kind], base, tech, include_dram=run.config.include_dram)
    run.write("fig_isocap_batch.csv", isocap.figure_batch_csv(series_by_kind))
    return 0


def cmd_isoarea(run: _Runner) -> int:
    tech = run.tech()
    if run.dry_run:
        print("dry-run: config valid; analysis not executed")
        return 0
    capacity = int(run.config.analysis_capacity_mb * MB)
    base_cfg = run.tune_at(tech, run.baseline(), capacity)
    budget = base_cfg.ppa.area
    granularity = int(run.config.area_granularity_mb * MB)
    trace = run.config.load_trace(seed=run.config.seed)
    cache_base = isoarea.CacheConfig(capacity, run.config.line_size, run.config.associativity)
    stats_base = isoarea.simulate_cache(trace, cache_base)
    profiles = run.config.load_profiles()

    capacity_rows = []
    stats_rows = [("baseline", cache_base, stats_base)]
    reduction_points = []
    entries = []
    for kind in run.kinds():
        if kind is run.baseline():
            continue
        try:
            cap_big, cfg_big = isoarea.iso_area_capacity(
                kind, budget, tech, granularity=granularity, slack=run.config.area_slack)
        except NvmCacheError as e:
            if not run.keep_going:
                raise
            print(f"warning: {kind.value} skipped: {e}", file=sys.stderr)
            continue
        cache_big = isoarea.CacheConfig(cap_big, run.config.line_size, run.config.associativity)
        stats_big = isoarea.simulate_cache(trace, cache_big)
        reduction = 100.0 * (1.0 - stats_big.dram_tx / stats_base.dram_tx)
        capacity_rows.append([kind.value, cap_big / MB, repr(float(cfg_big.ppa.area)),
                              repr(float(budget)), repr(float(reduction))])
        stats_rows.append((kind.value, cache_big, stats_big))
        reduction_points.append((cap_big, reduction))
        for p in profiles:
            entries.append(isoarea.isoarea_report(
                p, stats_base, stats_big, base_cfg, cfg_big, tech,
                include_dram=run.config.include_dram))
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["kind", "capacity_mb", "area_mm2", "budget_mm2", "dram_reduction_pct"])
    writer.writerows(capacity_rows)
    run.write("isoarea_capacities.csv", out.getvalue())

    for cap_mb in sorted(run.config.reduction_capacities_mb):
        cfg = isoarea.CacheConfig(int(cap_mb * MB), run.config.line_size, run.config.associativity)
        stats = isoarea.simulate_cache(trace, cfg)
        reduction_points.append((int(cap_mb * MB), 100.0 * (1.0 - stats.dram_tx / stats_base.dram_tx)))
        stats_rows.append((f"{cap_mb}MB", cfg, stats))
    reduction_points.sort()
    run.write("cache_stats.csv", isoarea.stats_to_csv(stats_rows))
    run.write("cache_stats.json", isoarea.stats_to_json(stats_rows))
    run.write("fig_dram_reduction.csv", isoarea.reduction_series_csv(reduction_points))
    run.write("isoarea_report.csv", isocap.entries_to_csv(entries))
    run.write("isoarea_report.json", isocap.entries_to_json(entries))
    return 0


def cmd_sweep(run: _Runner) -> int:
    tech = run.tech()
    if run.dry_run:
        print("dry-run: config valid; sweep not executed")
        return 0
    capacities = [int(c * MB) for c in sorted(run.config.capacities_mb)]
    profiles = run.config.load_profiles()
    series = sweepmod.scalability_sweep(run.kinds(), capacities, profiles, tech)
    normalized = sweepmod.normalize_all(series, run.baseline())
    crossovers = []
    baseline = run.baseline()
    by_metric_kind = {(s.metric, s.kind): s for s in series}
    for s in series:
        if s.kind is baseline:
            continue
        crossovers.extend(sweepmod.find_crossover(s, by_metric_kind[(s.metric, baseline)]))
    run.write("sweep_series.csv", sweepmod.series_to_csv(series))
    run.write("sweep_series.json", sweepmod.series_to_json(series))
    run.write("sweep_normalized.csv", sweepmod.series_to_csv(normalized))
    run.write("sweep_crossovers.csv", sweepmod.crossovers_to_csv(crossovers))
    return 0


def cmd_gen_trace(run: _Runner) -> int:
    spec = run.config.trace_spec(seed=run.config.seed)
    if run.dry_run:
        print(f"dry-run: config valid; would generate {spec.accesses} accesses")
        return 0
    trace = workloads.generate_trace(spec)
    path = run.out_dir / ("trace.nvmt" if run.args.format == "binary" else "trace.txt")
    path.parent.mkdir(parents=True, exist_ok=True)
    workloads.save_trace(trace, path, binary=run.args.format == "binary")
    print(f"wrote {path} ({len(trace)} records)")
    return 0


def cmd_gen_profile(run: _Runner) -> int:
    if run.dry_run:
        print("dry-run: config valid; generation not executed")
        return 0
    profiles = run.config.load_profiles(seed=run.config.seed)
    run.write("profiles.csv", workloads.save_profiles(profiles))
    batch = run.config.load_batch_profiles(seed=run.config.seed)
    run.write("batch_profiles.csv", workloads.save_profiles(batch))
    return 0


_COMMANDS = {
    "calibrate": cmd_calibrate,
    "tune": cmd_tune,
    "isocap": cmd_isocap,
    "isoarea": cmd_isoarea,
    "sweep": cmd_sweep,
    "gen-trace": cmd_gen_trace,
    "gen-profile": cmd_gen_profile,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", default=None,
                        help="run configuration JSON (defaults apply without it)")
    common.add_argument("--output", metavar="DIR", default=None,
                        help="output directory (overrides config output_dir)")
    common.add_argument("--seed", type=int, default=None, help="override the config seed")
    common.add_argument("--keep-going", action="store_true",
                        help="continue past per-item errors where supported")
    common.add_argument("--dry-run", action="store_true",
                        help="validate the configuration and write nothing")
    parser = argparse.ArgumentParser(
        prog="nvmcache",
        description="Cache technology modeling and design-space exploration pipelines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("calibrate", "tune", "isocap", "isoarea", "sweep", "gen-profile"):
        sub.add_parser(name, parents=[common])
    p_trace = sub.add_parser("gen-trace", parents=[common])
    p_trace.add_argument("--format", choices=("text", "binary"), default="binary")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        run = _Runner(args)
        return _COMMANDS[args.command](run)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except NvmCacheError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"io error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
