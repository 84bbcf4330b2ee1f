import numpy as np
import pytest

from freqact.gen import default_corpus, synthesize


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def clean_corpus():
    return [(s, *synthesize(s)) for s in default_corpus(17, 0.0)]


@pytest.fixture(scope="session")
def noisy_corpus():
    return [(s, *synthesize(s)) for s in default_corpus(17, 0.05)]


def single_activity_mask(script, n_blocks, block_size=64, fs=50.0):
    """True for blocks that lie entirely inside one script segment."""
    bounds = np.cumsum([0] + [int(round(seg.duration_s * fs)) for seg in script.segments])
    inner = bounds[1:-1]
    out = []
    for i in range(n_blocks):
        a, b = i * block_size, (i + 1) * block_size
        out.append(not any(a < x < b for x in inner))
    return np.array(out)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
