import random

import pytest

from nvmcache.errors import (
    InvalidFieldValue,
    MissingField,
    NonPositiveValue,
    UnknownMemoryKind,
)
from nvmcache.techlib import (
    BitcellParams,
    KindCoeffs,
    MemoryKind,
    TechConfig,
    builtin_bitcell,
    load_bitcell,
    load_tech,
    save_bitcell,
    save_tech,
)


class TestBuiltinBitcells:
    def test_stt_golden_values(self):
        p = builtin_bitcell(MemoryKind.STT_MRAM)
        assert p.sense_latency == 650.0
        assert p.sense_energy == 0.076
        assert p.write_latency_set == 8400.0
        assert p.write_latency_reset == 7780.0
        assert p.write_energy_set == 1.1
        assert p.write_energy_reset == 2.2
        assert (p.fin_count_read, p.fin_count_write) == (4, 4)
        assert p.area_norm == 0.34

    def test_sot_golden_values(self):
        p = builtin_bitcell(MemoryKind.SOT_MRAM)
        assert p.sense_latency == 650.0
        assert p.sense_energy == 0.020
        assert p.write_latency_set == 313.0
        assert p.write_latency_reset == 243.0
        assert p.write_energy_set == 0.08
        assert p.write_energy_reset == 0.08
        assert (p.fin_count_read, p.fin_count_write) == (1, 3)
        assert p.area_norm == 0.29

    def test_sram_is_normalized_and_symmetric(self):
        p = builtin_bitcell(MemoryKind.SRAM)
        assert p.area_norm == 1.0
        assert p.write_latency_set == p.write_latency_reset
        assert p.write_energy_set == p.write_energy_reset

    def test_kind_aliases(self):
        assert MemoryKind.parse("STT") is MemoryKind.STT_MRAM
        assert MemoryKind.parse("sot-mram") is MemoryKind.SOT_MRAM
        with pytest.raises(UnknownMemoryKind):
            MemoryKind.parse("EDRAM")


class TestBitcellDocuments:
    def test_round_trip_equals_builtin(self):
        for kind in MemoryKind:
            p = builtin_bitcell(kind)
            assert load_bitcell(save_bitcell(p)) == p

    def test_document_matches_builtin_values(self):
        doc = save_bitcell(builtin_bitcell(MemoryKind.STT_MRAM))
        p = load_bitcell(doc)
        assert p.sense_latency == 650.0

    def test_missing_field(self):
        import json

        raw = json.loads(save_bitcell(builtin_bitcell(MemoryKind.STT_MRAM)))
        del raw["area_norm"]
        with pytest.raises(MissingField) as e:
            load_bitcell(json.dumps(raw))
        assert e.value.field == "area_norm"

    def test_negative_value(self):
        import json

        raw = json.loads(save_bitcell(builtin_bitcell(MemoryKind.STT_MRAM)))
        raw["write_energy_set"] = -1
        with pytest.raises(NonPositiveValue) as e:
            load_bitcell(json.dumps(raw))
        assert e.value.field == "write_energy_set"

    def test_unknown_kind(self):
        import json

        raw = json.loads(save_bitcell(builtin_bitcell(MemoryKind.STT_MRAM)))
        raw["kind"] = "FLASH"
        with pytest.raises(UnknownMemoryKind):
            load_bitcell(json.dumps(raw))

    def test_randomized_documents_respect_invariants(self):
        # any document load_bitcell accepts satisfies the type invariants
        rng = random.Random(42)
        accepted = 0
        for _ in range(300):
            kind = rng.choice(["SRAM", "STT_MRAM", "SOT_MRAM"])
            w_lat = rng.uniform(-10, 9000)
            w_en = rng.uniform(-1, 3)
            doc = {
                "kind": kind,
                "sense_latency": rng.uniform(-100, 1000),
                "sense_energy": rng.uniform(-0.1, 0.2),
                "write_latency_set": w_lat,
                "write_latency_reset": w_lat if kind == "SRAM" else rng.uniform(-10, 9000),
                "write_energy_set": w_en,
                "write_energy_reset": w_en if kind == "SRAM" else rng.uniform(-1, 3),
                "fin_count_read": rng.randint(-1, 5),
                "fin_count_write": rng.randint(-1, 5),
                "area_norm": 1.0 if kind == "SRAM" else rng.uniform(-0.5, 1.5),
            }
            import json

            try:
                p = load_bitcell(json.dumps(doc))
            except (NonPositiveValue, InvalidFieldValue):
                continue
            accepted += 1
            assert p.sense_latency > 0 and p.sense_energy > 0
            assert p.write_latency_set > 0 and p.write_energy_set > 0
            assert 0 < p.area_norm <= 1.0 or p.kind is MemoryKind.SRAM
            if p.kind is MemoryKind.SRAM:
                assert p.area_norm == 1.0
                assert p.write_latency_set == p.write_latency_reset
        assert accepted > 0  # the generator does produce valid documents

    def test_mram_area_norm_bounds(self):
        with pytest.raises(InvalidFieldValue):
            BitcellParams(MemoryKind.STT_MRAM, 650, 0.076, 8400, 7780, 1.1, 2.2, 4, 4, 1.2)


class TestTechConfig:
    def test_defaults(self):
        t = TechConfig()
        assert t.node == 16.0
        assert t.clock_frequency == 1481.0

    def test_round_trip(self):
        t = TechConfig()
        assert load_tech(save_tech(t)) == t

    def test_round_trip_with_custom_coeffs(self):
        t = TechConfig(dram_access_latency=80.0, stt=KindCoeffs(bl_scale=1.5))
        assert load_tech(save_tech(t)) == t

    def test_rejects_unknown_field(self):
        with pytest.raises(InvalidFieldValue):
            load_tech('{"not_a_field": 1}')

    def test_rejects_nonpositive_node(self):
        with pytest.raises(NonPositiveValue):
            TechConfig(node=0)

    def test_rejects_negative_coefficient(self):
        with pytest.raises(InvalidFieldValue):
            TechConfig(route_ns_per_mm=-0.1)

    def test_coeffs_lookup(self):
        t = TechConfig()
        assert t.coeffs(MemoryKind.STT_MRAM) is t.stt
        t2 = t.replace_coeffs(MemoryKind.SOT_MRAM, KindCoeffs())
        assert t2.sot == KindCoeffs()
        assert t2.stt is t.stt
