"""Technology registry: memory kinds, bitcell parameters, technology constants.

Bitcell parameters are the *outputs* of device-level characterization (SPICE
work happens elsewhere); this module only stores, validates and serializes
them. All values are immutable after construction and safe to share across
threads.

Units are fixed by the file format and never rescaled on disk:
bitcell latencies in ps, bitcell energies in pJ, node in nm, clock in MHz,
DRAM energy in nJ, DRAM latency in ns.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, fields, asdict

from .errors import (
    InvalidFieldValue,
    MissingField,
    NonPositiveValue,
    UnknownMemoryKind,
)


class MemoryKind(enum.Enum):
    """The three cache technologies the framework compares."""

    SRAM = "SRAM"
    STT_MRAM = "STT_MRAM"
    SOT_MRAM = "SOT_MRAM"

    @property
    def volatile(self) -> bool:
        return self is MemoryKind.SRAM

    @classmethod
    def parse(cls, name: str) -> "MemoryKind":
        """Parse a kind name, accepting a few common aliases (STT, SOT)."""
        if isinstance(name, MemoryKind):
            return name
        key = str(name).strip().upper().replace("-", "_")
        aliases = {
            "SRAM": cls.SRAM,
            "STT": cls.STT_MRAM,
            "STT_MRAM": cls.STT_MRAM,
            "SOT": cls.SOT_MRAM,
            "SOT_MRAM": cls.SOT_MRAM,
        }
        if key not in aliases:
            raise UnknownMemoryKind(name)
        return aliases[key]


@dataclass(frozen=True)
class BitcellParams:
    """Device-level bitcell characterization results for one technology.

    Fin counts are provenance metadata from access-device sizing; they do not
    enter any cache-level equation downstream.
    """

    kind: MemoryKind
    sense_latency: float  # ps
    sense_energy: float  # pJ
    write_latency_set: float  # ps
    write_latency_reset: float  # ps
    write_energy_set: float  # pJ
    write_energy_reset: float  # pJ
    fin_count_read: int
    fin_count_write: int
    area_norm: float  # relative to the foundry SRAM bitcell

    def __post_init__(self):
        positive = (
            "sense_latency",
            "sense_energy",
            "write_latency_set",
            "write_latency_reset",
            "write_energy_set",
            "write_energy_reset",
            "area_norm",
        )
        for name in positive:
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or not v > 0:
                raise NonPositiveValue(name, v)
        for name in ("fin_count_read", "fin_count_write"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise InvalidFieldValue(name, f"must be a count >= 1, got {v}")
        if self.kind is MemoryKind.SRAM:
            if self.area_norm != 1.0:
                raise InvalidFieldValue("area_norm", "must be 1.0 for SRAM (normalization reference)")
            if self.write_latency_set != self.write_latency_reset:
                raise InvalidFieldValue("write_latency_set", "SRAM writes are symmetric (set == reset)")
            if self.write_energy_set != self.write_energy_reset:
                raise InvalidFieldValue("write_energy_set", "SRAM writes are symmetric (set == reset)")
        else:
            if not self.area_norm <= 1.0:
                raise InvalidFieldValue("area_norm", f"must be in (0, 1] for MRAM kinds, got {self.area_norm}")


# MRAM rows come from device-level characterization of the respective bitcells
# at 16 nm. The SRAM row is a *synthetic* cell: foundry SRAM numbers are
# proprietary, so these values are calibration artifacts back-solved so the
# calibrated 3 MB SRAM cache reproduces the published reference results; they
# are not foundry data.
_BUILTIN = {
    MemoryKind.SRAM: BitcellParams(
        kind=MemoryKind.SRAM,
        sense_latency=150.0,
        sense_energy=0.048,
        write_latency_set=60.0,
        write_latency_reset=60.0,
        write_energy_set=0.075,
        write_energy_reset=0.075,
        fin_count_read=1,
        fin_count_write=1,
        area_norm=1.0,
    ),
    MemoryKind.STT_MRAM: BitcellParams(
        kind=MemoryKind.STT_MRAM,
        sense_latency=650.0,
        sense_energy=0.076,
        write_latency_set=8400.0,
        write_latency_reset=7780.0,
        write_energy_set=1.1,
        write_energy_reset=2.2,
        fin_count_read=4,
        fin_count_write=4,
        area_norm=0.34,
    ),
    MemoryKind.SOT_MRAM: BitcellParams(
        kind=MemoryKind.SOT_MRAM,
        sense_latency=650.0,
        sense_energy=0.020,
        write_latency_set=313.0,
        write_latency_reset=243.0,
        write_energy_set=0.08,
        write_energy_reset=0.08,
        fin_count_read=1,
        fin_count_write=3,
        area_norm=0.29,
    ),
}


def builtin_bitcell(kind: MemoryKind) -> BitcellParams:
    """Return the built-in bitcell parameter set for a memory kind."""
    return _BUILTIN[MemoryKind.parse(kind)]


_BITCELL_FIELDS = [f.name for f in fields(BitcellParams)]


def load_bitcell(document: str) -> BitcellParams:
    """Parse a bitcell parameter document (JSON object, field names as-is).

    Raises MissingField / NonPositiveValue / UnknownMemoryKind naming the
    offending field.
    """
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as e:
        raise InvalidFieldValue("<document>", f"not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise InvalidFieldValue("<document>", "expected a JSON object")
    for name in _BITCELL_FIELDS:
        if name not in raw:
            raise MissingField(name)
    kind = MemoryKind.parse(raw["kind"])
    kwargs = {name: raw[name] for name in _BITCELL_FIELDS if name != "kind"}
    for name in ("fin_count_read", "fin_count_write"):
        kwargs[name] = int(kwargs[name])
    return BitcellParams(kind=kind, **kwargs)


def save_bitcell(params: BitcellParams) -> str:
    """Serialize a bitcell parameter set to the document format load_bitcell reads."""
    raw = asdict(params)
    raw["kind"] = params.kind.value
    return json.dumps(raw, indent=2) + "\n"


@dataclass(frozen=True)
class KindCoeffs:
    """Per-technology free coefficients of the analytical cache model.

    These absorb technology-specific periphery effects (driver sizing for the
    required write currents, sensing scheme, layout overheads) that the shared
    structural formulas cannot express. They are set by calibration; see
    docs/model.md for the role of each.
    """

    dec_scale: float = 1.0         # scales decode/wordline drive delay
    bl_scale: float = 1.0          # scales bitline development time (read-current dependent)
    wdrv_scale: float = 1.0        # scales write-driver delay
    route_scale: float = 1.0       # scales global-route delay (both distance terms)
    htree_scale: float = 1.0       # scales per-level hierarchy traversal delay
    escale_read: float = 1.0       # scales in-array read energy
    escale_write: float = 1.0      # scales in-array write energy
    eroute_scale: float = 1.0      # scales global-route (bus) energy on reads
    eroute_wscale: float = 1.0     # scales the quadratic write-bus/driver energy
    area_scale: float = 1.0        # final layout-overhead factor on cache area
    periph_area_scale: float = 1.0 # scales decoder/senseamp strip dimensions
    pleak_base_mw: float = 0.0     # capacity-independent peripheral leakage floor
    pleak_scale: float = 1.0       # scales organization-dependent peripheral leakage

    def __post_init__(self):
        for name in (
            "dec_scale",
            "bl_scale",
            "wdrv_scale",
            "route_scale",
            "htree_scale",
            "escale_read",
            "escale_write",
            "eroute_scale",
            "eroute_wscale",
            "area_scale",
            "periph_area_scale",
            "pleak_scale",
        ):
            if not getattr(self, name) > 0:
                raise NonPositiveValue(name, getattr(self, name))
        if self.pleak_base_mw < 0:
            raise InvalidFieldValue("pleak_base_mw", "must be non-negative")


@dataclass(frozen=True)
class TechConfig:
    """Technology constants plus the free coefficients of the cache model.

    The first block holds physical constants; the second block holds model
    coefficients tuned by calibration. Coefficient defaults ship calibrated
    against the built-in anchor set (see cachemodel.calibrate).
    """

    node: float = 16.0                 # nm
    clock_frequency: float = 1481.0    # MHz (graphics core clock)
    wire_res_per_mm: float = 2.2       # kOhm/mm
    wire_cap_per_mm: float = 0.24      # pF/mm
    leakage_per_bitcell: float = 0.0002544391571044922  # mW per volatile bitcell
    dram_access_energy: float = 11.7   # nJ per DRAM transaction
    dram_access_latency: float = 100.0  # ns per DRAM transaction
    mac_energy: float = 58.0           # pJ; compute-op gauge (L2 access ~6x, DRAM ~200x)

    # geometry
    sram_cell_area_um2: float = 0.085
    cell_aspect: float = 1.4
    dec_strip_mm: float = 0.006412612856998159
    sa_strip_mm: float = 0.01723808620240241
    route_area_frac: float = 0.041903492342048106
    route_dist_factor: float = 0.75

    # latency coefficients
    dec_base_ns: float = 0.35454010002671016
    dec_per_bit_ns: float = 0.0024000000000000002
    wl_cell_ps: float = 0.06
    bl_cell_ps: float = 4.125483942907923
    wl_rc_factor: float = 1.0
    bl_rc_factor: float = 1.0
    senseamp_delay_ns: float = 0.7135930619287971
    mux_delay_ns: float = 0.05
    way_select_delay_ns: float = 0.05
    write_driver_delay_ns: float = 0.2851846957982882
    tag_latency_frac: float = 0.55
    tag_cmp_delay_ns: float = 0.12
    route_ns_per_mm: float = 0.05
    route_ns_per_mm2: float = 0.042086102474288865
    route_ns_per_mm3: float = 0.028287703633050002
    htree_ns_per_level: float = 0.11802576339

    # energy coefficients
    edec_pj: float = 3.7221133462747074
    ewl_pj_per_mm: float = 19.948237825786794
    ebl_fj_per_cell: float = 0.01395113134597879
    ebl_write_fj_per_cell: float = 0.22810120397551129
    esa_pj_per_bit: float = 0.028815220477955948
    ewire_pj_per_mm_bit: float = 0.1521883077426731
    ewire2_pj_per_mm2_bit: float = 0.776
    ewdrv_pj_per_bit: float = 0.5492320045349761
    write_word_bits: int = 64
    tag_e_base_pj: float = 6.0
    tag_cmp_pj_per_way: float = 0.3

    # leakage coefficients. Peripheral leakage is charged per bit of the
    # active window only: periphery serving capacity beyond the window is
    # power-gated when idle (non-volatile arrays tolerate gating; the SRAM
    # cell-retention term is never gated).
    pl_mat_mw: float = 0.05
    pl_sa_uw: float = 0.5
    pl_bit_nw: float = 28.0
    pgate_window_bits: int = 117867397  # 12 MB worth of bits

    # per-technology coefficients
    sram: KindCoeffs = field(default_factory=lambda: KindCoeffs(
        dec_scale=0.25, bl_scale=0.6411093041332472, wdrv_scale=0.25, route_scale=3.171392278912153,
        htree_scale=0.3376816290476584, escale_read=0.27172991443683897, escale_write=1.3148190569746168,
        eroute_scale=1.1608341438099041, eroute_wscale=1.0630424, area_scale=1.6783707921665805,
        periph_area_scale=0.4949922532351174, pleak_base_mw=0.0, pleak_scale=0.05))
    stt: KindCoeffs = field(default_factory=lambda: KindCoeffs(
        dec_scale=0.6862469814768989, bl_scale=0.8673927108567888, wdrv_scale=0.2962799534111281,
        route_scale=2.4978199494765096, htree_scale=0.5488311658058822, escale_read=3.6017658201540885,
        escale_write=1.3050302461512773, eroute_scale=0.9987849052574217, eroute_wscale=0.5100280236958835,
        area_scale=2.152106229674215, periph_area_scale=0.25, pleak_base_mw=0.0,
        pleak_scale=0.9784116149002512))
    sot: KindCoeffs = field(default_factory=lambda: KindCoeffs(
        dec_scale=0.309, bl_scale=1.7739563490303614, wdrv_scale=0.3011373728157844,
        route_scale=2.7553965634007955, htree_scale=2.29042266473863, escale_read=2.6775523184116183,
        escale_write=2.3542938383722904, eroute_scale=0.7932530069523851, eroute_wscale=0.5870322694746716,
        area_scale=1.672714356692136, periph_area_scale=0.34591470813792013, pleak_base_mw=58.91914710220027,
        pleak_scale=0.55164706950285))

    def __post_init__(self):
        if not self.node > 0:
            raise NonPositiveValue("node", self.node)
        if not self.clock_frequency > 0:
            raise NonPositiveValue("clock_frequency", self.clock_frequency)
        for f in fields(self):
            if f.name in ("sram", "stt", "sot", "node", "clock_frequency"):
                continue
            v = getattr(self, f.name)
            if v < 0:
                raise InvalidFieldValue(f.name, "coefficients must be non-negative")
        if int(self.write_word_bits) != self.write_word_bits or self.write_word_bits < 1:
            raise InvalidFieldValue("write_word_bits", "must be a count >= 1")

    def coeffs(self, kind: MemoryKind) -> KindCoeffs:
        return {
            MemoryKind.SRAM: self.sram,
            MemoryKind.STT_MRAM: self.stt,
            MemoryKind.SOT_MRAM: self.sot,
        }[kind]

    def replace_coeffs(self, kind: MemoryKind, coeffs: KindCoeffs) -> "TechConfig":
        from dataclasses import replace

        slot = {MemoryKind.SRAM: "sram", MemoryKind.STT_MRAM: "stt", MemoryKind.SOT_MRAM: "sot"}[kind]
        return replace(self, **{slot: coeffs})


_KIND_SLOTS = {"sram": MemoryKind.SRAM, "stt": MemoryKind.STT_MRAM, "sot": MemoryKind.SOT_MRAM}


def load_tech(document: str) -> TechConfig:
    """Parse a technology config document (JSON, same shape save_tech writes)."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as e:
        raise InvalidFieldValue("<document>", f"not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise InvalidFieldValue("<document>", "expected a JSON object")
    known = {f.name for f in fields(TechConfig)}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise InvalidFieldValue(key, "unknown technology config field")
        if key in _KIND_SLOTS:
            kind_known = {f.name for f in fields(KindCoeffs)}
            bad = set(value) - kind_known
            if bad:
                raise InvalidFieldValue(f"{key}.{sorted(bad)[0]}", "unknown coefficient")
            kwargs[key] = KindCoeffs(**value)
        else:
            kwargs[key] = value
    return TechConfig(**kwargs)


def save_tech(tech: TechConfig) -> str:
    """Serialize a TechConfig to the document format load_tech reads."""
    raw = {}
    for f in fields(TechConfig):
        v = getattr(tech, f.name)
        raw[f.name] = asdict(v) if isinstance(v, KindCoeffs) else v
    return json.dumps(raw, indent=2) + "\n"
