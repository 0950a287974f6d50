import os

import pytest
from hypothesis import HealthCheck, settings

from rrcrn import CRC, CRD, CRN, compile_mod
from rrcrn.specs import ModSpec

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def trap_crn() -> CRN:
    # 2X -> Y, Z -> Y, Z -> 0
    return CRN.from_names(["X", "Y", "Z"], [({"X": 2}, {"Y": 1}), ({"Z": 1}, {"Y": 1}), ({"Z": 1}, {})])


def trap_device() -> CRC:
    return CRC(crn=trap_crn(), inputs=(0,), output_species=1, oracle=lambda x: x[0] // 2)


@pytest.fixture
def trap():
    return trap_device()


@pytest.fixture
def parity() -> CRD:
    return compile_mod(ModSpec((1,), 0, 2))
