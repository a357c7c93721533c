import pytest

from nashflow.engine import TerminationPolicy, alpha_is_feasible, compute_nash_flow
from nashflow.fixtures import n1_network, random_network, rng_for
from nashflow.pwl import INF

CORPUS_SIZE = 50
CORPUS_SEED = 2024

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    rep = (yield).get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n, title = mark.args
    ok = rep.passed if rep.when == "call" else not rep.failed
    prev = _outcomes.get(n, (title, True))
    _outcomes[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        title, ok = _outcomes[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")


class Run:
    """A solved network plus what the observer saw at each phase."""

    def __init__(self, name, net, policy=None):
        self.name = name
        self.net = net
        self.alphas = []
        self.maximal = []
        self.traj = compute_nash_flow(net, policy, self._observe)

    def _observe(self, state, tf, alpha):
        self.alphas.append(alpha)
        if alpha != INF:
            self.maximal.append((state.phi, alpha_is_feasible(state, tf, alpha),
                                 alpha_is_feasible(state, tf, alpha + alpha / 1000)))


@pytest.fixture(scope="session")
def n1_left():
    return Run("N1-left", n1_network(1))


@pytest.fixture(scope="session")
def n1_right():
    return Run("N1-right", n1_network(2))


@pytest.fixture(scope="session")
def n1_lifted():
    return Run("N1-left lifted", n1_network(1, lifted=True)), \
        Run("N1-right lifted", n1_network(2, lifted=True))


@pytest.fixture(scope="session")
def corpus():
    rng = rng_for(CORPUS_SEED)
    policy = TerminationPolicy(phase_cap=40)
    return [Run(f"random-{i}", random_network(rng, max_nodes=5), policy)
            for i in range(CORPUS_SIZE)]


@pytest.fixture(scope="session")
def all_runs(n1_left, n1_right, n1_lifted, corpus):
    return [n1_left, n1_right, *n1_lifted, *corpus]
