import numpy as np
import pytest
from hypothesis import settings

from cachemec.scenario import Scenario, TaskSpec, reference_scenario, state_space

# solver calls vary a lot in run time; only the example count should bound a property test
settings.register_profile("cachemec", deadline=None)
settings.load_profile("cachemec")


def random_small_scenario(rng: np.random.Generator, max_mobiles: int = 2, max_tasks: int = 4) -> Scenario:
    """Desk-size instance with two channel states and random sizes, laws, deadline and cache."""
    K = int(rng.integers(1, max_mobiles + 1))
    N = int(rng.integers(1, max_tasks + 1))
    tasks = [TaskSpec(1e4 * int(rng.integers(1, 10)), 1e4 * int(rng.integers(1, 10)),
                      1e4 * int(rng.integers(1, 6))) for _ in range(N)]
    lo = 10 ** rng.uniform(-7, -6.3)
    channels = (lo, lo * rng.uniform(1.5, 5.0))
    channel_pmf = rng.dirichlet(np.ones(2))
    task_pmf = rng.dirichlet(np.ones(N))
    total = sum(t.result_bits for t in tasks)
    return Scenario.build(K, tasks, channels, channel_pmf, task_pmf=task_pmf,
                          deadline=float(rng.uniform(0.03, 0.15)),
                          cache_size=float(np.round(rng.uniform(0, 1) * total, -4)))


@pytest.fixture(scope="session")
def base_case():
    s = reference_scenario()
    return s, state_space(s)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
