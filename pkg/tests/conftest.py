import pytest

from ovnn.builtins import builtin_example1, builtin_example2, tanh_activation
from ovnn.network import DelayProfile, NetworkSpec

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def ex1():
    return builtin_example1()


@pytest.fixture(scope="session")
def ex2():
    return builtin_example2()


def random_network(rng, n=2, delays=None, scale=0.5):
    """Smooth tanh network with random weights; constant delays by default."""
    act = tanh_activation()
    if delays is None:
        delays = DelayProfile.constant(rng.choice([0.1, 0.2, 0.3, 0.5], size=(n, n)))
    return NetworkSpec(
        rng.uniform(0.5, 2.0, n),
        rng.normal(0, scale, (n, n, 8)),
        rng.normal(0, scale, (n, n, 8)),
        rng.normal(0, 1, (n, 8)),
        (act,) * n,
        delays,
    )


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}")
