import sys
import numpy as np
import pytest

from elmpi.series import synthesize, make_supervised, split, SplitSpec


@pytest.fixture(scope="session")
def synth_series():
    return synthesize(60, seed=7)


@pytest.fixture(scope="session")
def synth_split(synth_series):
    ds = make_supervised(synth_series)
    return split(ds, SplitSpec(586, 300))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[key])
