import pytest

from mmkpsched.io import bundled, load_case, load_profiles
from mmkpsched.model import Job

RHO_T1 = 1 - 1 / 5.3  # lambda1 after one second on 2L1B


@pytest.fixture(scope="session")
def motiv():
    return load_profiles(bundled("motiv_example.json"))


@pytest.fixture(scope="session")
def xu4():
    return load_profiles(bundled("xu4_synthetic.json"))


@pytest.fixture
def s1(motiv):
    return load_case(bundled("s1_t1.json"), motiv[1])


@pytest.fixture
def s2(motiv):
    return load_case(bundled("s2_t1.json"), motiv[1])


def point_by_name(platform, app, name):
    for k, p in enumerate(app.points):
        if platform.config_name(p.resources) == name:
            return k
    raise KeyError(name)


def motiv_jobs(motiv, d2=5.0, rho1=RHO_T1):
    _, apps = motiv
    return [Job(1, 0.0, 9.0, apps["lambda1"], rho1), Job(2, 1.0, d2, apps["lambda2"], 1.0)]


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
