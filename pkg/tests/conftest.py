import numpy as np
import pytest

from mmcmax import QueueParams

PAPER_C = (1, 2, 3, 4, 5)


def paper_params(c):
    return QueueParams(c, 1 / 3, 1 / (2 * c))


@pytest.fixture(params=PAPER_C, ids=lambda c: f"c{c}")
def paper_config(request):
    return paper_params(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_stable(rng, c, rho_max=0.95):
    """Random (lam, mu) with lam < c*mu."""
    mu = float(rng.uniform(0.05, 3.0))
    rho = float(rng.uniform(0.02, rho_max))
    return QueueParams(c, rho * c * mu, mu)


ACCEPTANCE_LINES = []


def record_acceptance(label, passed, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}")
    print(ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
