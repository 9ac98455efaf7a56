import random
from dataclasses import replace

import pytest

from conftest import make_tuned
from nvmcache.errors import CapacityMismatch, InvalidFieldValue
from nvmcache.isocap import (
    EnergyBreakdown,
    analyze,
    batch_sweep,
    dynamic_energy,
    dram_energy,
    leakage_energy,
    memory_delay,
    raw_metrics,
)
from nvmcache.techlib import MemoryKind, TechConfig
from nvmcache.workloads import Stage, WorkloadProfile, synth_profile

MB = 1 << 20


def profile(reads=0, writes=0, dram_r=0, dram_w=0, exec_ms=None, batch=4,
            dnn="net", stage=Stage.Inference):
    return WorkloadProfile(dnn=dnn, stage=stage, batch_size=batch, l2_read_tx=reads,
                           l2_write_tx=writes, dram_read_tx=dram_r, dram_write_tx=dram_w,
                           exec_time_ms=exec_ms)


class TestDynamicEnergy:
    def test_zero_transactions(self):
        r, w = dynamic_energy(profile(), make_tuned())
        assert (r, w) == (0.0, 0.0)

    def test_reference_billion_reads(self):
        # 1e9 reads at 0.35 nJ = 0.35 J = 350 mJ, by hand
        cfg = make_tuned(read_energy=0.35)
        r, _ = dynamic_energy(profile(reads=10 ** 9), cfg)
        assert r == pytest.approx(350.0, rel=1e-12)

    def test_read_dominant_share(self):
        # synth(0.83): share = 0.83*0.35 / (0.83*0.35 + 0.17*0.32) = 0.84227...
        p = synth_profile(0.83, 1_000_000, seed=5)
        cfg = make_tuned(read_energy=0.35, write_energy=0.32)
        r, w = dynamic_energy(p, cfg)
        assert r / (r + w) == pytest.approx(0.8422731, abs=1e-4)


class TestLeakageEnergy:
    def test_reference_exposure(self):
        # 6442 mW for 10 ms = 64.42 mJ, by hand
        cfg = make_tuned(leakage_power=6442.0)
        assert leakage_energy(profile(exec_ms=10.0), cfg) == pytest.approx(64.42, rel=1e-12)

    def test_kind_ratio(self):
        p = profile(exec_ms=10.0)
        sram = make_tuned(leakage_power=6442.0)
        stt = make_tuned(kind=MemoryKind.STT_MRAM, leakage_power=748.0)
        ratio = leakage_energy(p, stt) / leakage_energy(p, sram)
        assert ratio == pytest.approx(748 / 6442, rel=1e-12)

    def test_zero_exposure(self):
        assert leakage_energy(profile(exec_ms=0.0), make_tuned()) == 0.0

    def test_fallback_required_without_exec_time(self):
        with pytest.raises(Exception):
            leakage_energy(profile(reads=1), make_tuned())

    def test_fallback_used(self):
        cfg = make_tuned(leakage_power=1000.0)
        # 1000 mW over 1e6 ns = 1 mJ
        assert leakage_energy(profile(reads=1), cfg, delay_fallback_ns=1e6) == pytest.approx(1.0)


class TestMemoryDelay:
    def test_zero(self, tech):
        assert memory_delay(profile(), make_tuned(), tech) == 0.0

    def test_reference_100_reads(self, tech):
        cfg = make_tuned(read_latency=2.91)
        assert memory_delay(profile(reads=100), cfg, tech) == pytest.approx(291.0, rel=1e-12)

    def test_dram_strictly_larger(self, tech):
        p = profile(reads=10, dram_r=5)
        cfg = make_tuned()
        assert memory_delay(p, cfg, tech, include_dram=True) > memory_delay(p, cfg, tech)


class TestBreakdown:
    def test_conservation_exact_randomized(self):
        rng = random.Random(11)
        for _ in range(300):
            parts = [rng.uniform(0, 1e4) for _ in range(4)]
            b = EnergyBreakdown.make(*parts)
            assert b.total == b.dynamic_read + b.dynamic_write + b.leakage + b.dram

    def test_rejects_inconsistent_total(self):
        with pytest.raises(InvalidFieldValue):
            EnergyBreakdown(1.0, 1.0, 1.0, 0.0, 4.0)


class TestAnalyze:
    def test_self_ratios_exactly_one(self, tech):
        p = profile(reads=1000, writes=300, dram_r=50, dram_w=20, exec_ms=2.0)
        cfg = make_tuned()
        entry = analyze(p, cfg, cfg, tech, include_dram=True)
        assert all(v == 1.0 for v in entry.ratios.values())

    def test_capacity_mismatch(self, tech):
        a = make_tuned(capacity=3 * MB)
        b = make_tuned(capacity=6 * MB)
        with pytest.raises(CapacityMismatch):
            analyze(profile(reads=1), a, b, tech)

    def test_linearity_in_transactions(self, tech):
        cfg = make_tuned()
        p1 = profile(reads=1000, writes=300, dram_r=64, dram_w=16)
        for k in (2, 4, 8):  # power-of-two scaling keeps float products exact
            pk = profile(reads=1000 * k, writes=300 * k, dram_r=64 * k, dram_w=16 * k)
            m1, mk = raw_metrics(p1, cfg, tech), raw_metrics(pk, cfg, tech)
            assert mk["dynamic"] == k * m1["dynamic"]
            assert mk["delay"] == k * m1["delay"]
            assert mk["delay_with_dram"] == k * m1["delay_with_dram"]

    def test_ratio_transitivity(self, tech):
        p = profile(reads=5000, writes=1200, dram_r=700, dram_w=100, exec_ms=3.0)
        a = make_tuned(read_energy=0.8, leakage_power=700.0)
        b = make_tuned(read_energy=0.5, leakage_power=500.0)
        c = make_tuned()
        r_ab = analyze(p, a, b, tech).ratios
        r_bc = analyze(p, b, c, tech).ratios
        r_ac = analyze(p, a, c, tech).ratios
        for name in r_ab:
            assert r_ab[name] * r_bc[name] == pytest.approx(r_ac[name], rel=1e-12)

    def test_edp_ordering_invariant_to_baseline(self, tech, tuned3, profile_suite):
        p = profile_suite[0]
        kinds = list(MemoryKind)
        orders = []
        for baseline in kinds:
            ratios = {
                k: analyze(p, tuned3[k], tuned3[baseline], tech).ratios["edp"] for k in kinds
            }
            orders.append(tuple(sorted(kinds, key=lambda k: ratios[k])))
        assert len(set(orders)) == 1

    def test_dram_in_breakdown_only_when_included(self, tech):
        p = profile(reads=10, dram_r=100, exec_ms=1.0)
        cfg = make_tuned()
        without = analyze(p, cfg, cfg, tech, include_dram=False)
        with_dram = analyze(p, cfg, cfg, tech, include_dram=True)
        assert without.breakdown.dram == 0.0
        assert with_dram.breakdown.dram > 0.0
        assert with_dram.breakdown.total > without.breakdown.total

    def test_leakage_dominated_ratio_approaches_power_ratio(self, tech):
        # measured exec time dominating: total-energy ratio -> leakage-power ratio
        p = profile(reads=10, writes=5, exec_ms=1e4)
        sram = make_tuned(leakage_power=6442.0)
        stt = make_tuned(kind=MemoryKind.STT_MRAM, leakage_power=748.0)
        entry = analyze(p, stt, sram, tech)
        assert entry.ratios["total_energy"] == pytest.approx(748 / 6442, rel=1e-3)


class TestBatchSweep:
    def test_shape_sorted(self, tech):
        profiles = [profile(reads=100 * b, writes=50, batch=b, exec_ms=1.0) for b in (8, 2, 4, 16)]
        pts = batch_sweep(profiles, make_tuned(), make_tuned(), tech)
        assert [b for b, _ in pts] == [2, 4, 8, 16]

    def test_identical_profiles_flat(self, tech):
        profiles = [replace(profile(reads=100, writes=50, exec_ms=1.0), batch_size=b) for b in (2, 4)]
        pts = batch_sweep(profiles, make_tuned(read_energy=0.9), make_tuned(), tech)
        assert pts[0][1] == pytest.approx(pts[1][1], rel=1e-12)

    def test_requires_two_batches(self, tech):
        with pytest.raises(InvalidFieldValue):
            batch_sweep([profile(reads=1, batch=4)], make_tuned(), make_tuned(), tech)

    def test_requires_homogeneous_group(self, tech):
        a = profile(reads=1, batch=2, dnn="a")
        b = profile(reads=1, batch=4, dnn="b")
        with pytest.raises(InvalidFieldValue):
            batch_sweep([a, b], make_tuned(), make_tuned(), tech)

    def test_rising_read_fraction_improves_mram_ratio(self, tech, tuned3):
        # read share grows with batch size; writes are what hurt the
        # write-limited technology, so its EDP ratio must fall
        profiles = []
        total = 1_000_000
        for batch, rf in ((4, 0.70), (16, 0.80), (64, 0.90)):
            reads = int(rf * total)
            profiles.append(profile(reads=reads, writes=total - reads, batch=batch,
                                    exec_ms=2.0, stage=Stage.Training))
        stt = tuned3[MemoryKind.STT_MRAM]
        sram = tuned3[MemoryKind.SRAM]
        pts = batch_sweep(profiles, stt, sram, tech, include_dram=False)
        ratios = [r for _, r in pts]
        assert ratios[0] > ratios[1] > ratios[2]
