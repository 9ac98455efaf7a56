import pytest

from nvmcache.cachemodel import AccessType, CachePPA, Organization
from nvmcache.techlib import MemoryKind, TechConfig
from nvmcache.tuner import TunedConfig, tune
from nvmcache.workloads import GOLDEN_TRACE_SPEC, generate_profile_suite, generate_trace

MB = 1 << 20


@pytest.fixture(scope="session")
def tech():
    # shipped defaults are the calibrated coefficients
    return TechConfig()


@pytest.fixture(scope="session")
def tuned3(tech):
    return {kind: tune(kind, 3 * MB, tech) for kind in MemoryKind}


@pytest.fixture(scope="session")
def profile_suite():
    return generate_profile_suite(seed=7)


@pytest.fixture(scope="session")
def golden_trace():
    return generate_trace(GOLDEN_TRACE_SPEC)


def make_ppa(kind=MemoryKind.SRAM, capacity=3 * MB, read_latency=2.91, write_latency=1.53,
             read_energy=0.35, write_energy=0.32, leakage_power=6442.0, area=5.53):
    """A CachePPA with hand-set metrics (for arithmetic oracles)."""
    org = Organization(banks=2, mats_per_bank=64, rows=192, cols=1024, senseamp_mux=1)
    return CachePPA(
        kind=kind, capacity=capacity, read_latency=read_latency, write_latency=write_latency,
        read_energy=read_energy, write_energy=write_energy, leakage_power=leakage_power,
        area=area, organization=org, access_type=AccessType.Normal,
    )


def make_tuned(**kwargs):
    from nvmcache.cachemodel import OptTarget
    from nvmcache.tuner import calculate_edap

    ppa = make_ppa(**kwargs)
    return TunedConfig(
        kind=ppa.kind, capacity=ppa.capacity, chosen_target=OptTarget.ReadEDP,
        chosen_access=AccessType.Normal, ppa=ppa, edap=calculate_edap(ppa),
        read_cycles=5, write_cycles=3,
    )
