import numpy as np
import pytest

from hscale import generators as gen


def pytest_configure(config):
    config._acceptance_lines = {}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config._acceptance_lines
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(lines):
        terminalreporter.write_line(lines[k])


@pytest.fixture
def record_acceptance(request):
    def record(k, ok, detail):
        line = f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        request.config._acceptance_lines[k] = line
        print(line)
        return ok
    return record


@pytest.fixture
def e1():
    return gen.gen_e1()


@pytest.fixture
def diamond():
    return gen.gen_diamond()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def fuzz_corpus(count=50, max_nodes=6, max_dim=8):
    """(seed, system) pairs: random directed posets with 2..max_nodes nodes."""
    out = []
    for seed in range(count):
        poset = gen.gen_random_poset(seed, 2 + seed % (max_nodes - 1))
        dims = gen.random_dims(seed, poset, max_dim, equal=seed % 3 == 0)
        out.append((seed, gen.gen_random_system(seed, dims, poset)))
    return out
