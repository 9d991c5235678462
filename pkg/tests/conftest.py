import pytest

from chromadapt.screening import Battery, create_battery

BATTERY_SEED = 777


@pytest.fixture(scope="session")
def battery() -> Battery:
    """One shared battery; generation costs ~1.3s so build it once."""
    return create_battery(BATTERY_SEED)
