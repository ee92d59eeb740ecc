"""
Shared fixtures: the benchmark signal and shortened-step preset runs.

Preset runs are session-scoped; the default suite uses the preset
parameters at a coarser step (1e-5 s for SD/HGO) so the whole suite stays
interactive. Full-step runs live behind the `slow` marker.
"""
import pytest

from core.experiments import run_simulation
from core.models import SignalTerm, TestSignal
from utils.config_loader import ConfigLoader

COARSE_DT = 1e-5


@pytest.fixture
def benchmark_signal():
    """a(t) = 2 sin t + 3 cos 3t."""
    return TestSignal.benchmark()


@pytest.fixture
def single_sine():
    return TestSignal((SignalTerm(1.0, 1.0, "sine"),), name="sin")


def coarse(preset: str, dt: float = COARSE_DT):
    return ConfigLoader.with_overrides(ConfigLoader.load(preset), dt=dt, stride=int(round(1e-4 / dt)))


@pytest.fixture(scope="session")
def sd1_config():
    return coarse("sd-paper-1")


@pytest.fixture(scope="session")
def sd1_traj(sd1_config):
    return run_simulation(sd1_config)


@pytest.fixture(scope="session")
def sd2_traj():
    return run_simulation(coarse("sd-paper-2"))


@pytest.fixture(scope="session")
def hgo_traj():
    return run_simulation(coarse("hgo-paper"))
