"""Cross-layer modeling and design-space exploration for SRAM, STT-MRAM and
SOT-MRAM last-level caches under deep-learning workloads.

Submodules:
  techlib    - memory kinds, bitcell parameters, technology constants
  cachemodel - analytical cache PPA model, organization search, calibration
  tuner      - EDAP-optimal design selection per (kind, capacity)
  workloads  - DNN registry, profiler statistics, traces, synthetic generators
  isocap     - equal-capacity energy/delay/EDP analysis
  isoarea    - equal-area capacity solving and trace-driven L2 simulation
  sweep      - capacity-scalability series and crossover detection
  cli        - command-line pipelines over a declarative run config
"""

from .techlib import BitcellParams, MemoryKind, TechConfig, builtin_bitcell
from .cachemodel import (
    AccessType,
    CachePPA,
    OptTarget,
    Organization,
    calibrate,
    enumerate_organizations,
    evaluate_design,
    optimize,
)
from .tuner import TunedConfig, calculate_edap, tune, tune_all
from .workloads import (
    DnnSpec,
    MemoryTrace,
    Stage,
    WorkloadProfile,
    builtin_dnns,
    generate_trace,
    load_profiles,
    load_trace,
    synth_profile,
)
from .isocap import EnergyBreakdown, analyze, batch_sweep, dynamic_energy, leakage_energy, memory_delay
from .isoarea import (
    CacheConfig,
    CacheStats,
    dram_reduction,
    iso_area_capacity,
    isoarea_report,
    simulate_cache,
)
from .sweep import Crossover, ScalabilitySeries, find_crossover, normalized_series, scalability_sweep

__version__ = "0.1.0"

__all__ = [
    "AccessType",
    "BitcellParams",
    "CacheConfig",
    "CachePPA",
    "CacheStats",
    "Crossover",
    "DnnSpec",
    "EnergyBreakdown",
    "MemoryKind",
    "MemoryTrace",
    "OptTarget",
    "Organization",
    "ScalabilitySeries",
    "Stage",
    "TechConfig",
    "TunedConfig",
    "WorkloadProfile",
    "analyze",
    "batch_sweep",
    "builtin_bitcell",
    "builtin_dnns",
    "calculate_edap",
    "calibrate",
    "dram_reduction",
    "dynamic_energy",
    "enumerate_organizations",
    "evaluate_design",
    "find_crossover",
    "generate_trace",
    "iso_area_capacity",
    "isoarea_report",
    "leakage_energy",
    "load_profiles",
    "load_trace",
    "memory_delay",
    "normalized_series",
    "optimize",
    "scalability_sweep",
    "simulate_cache",
    "synth_profile",
    "tune",
    "tune_all",
]
