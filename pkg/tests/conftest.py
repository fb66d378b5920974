import pytest

from poissonkit.exprcore import Chart
from poissonkit.manifest import load_fixture
from poissonkit.multivec import bivector
from poissonkit.plgroup import GroupChart
from poissonkit.poisson import PoissonChart


@pytest.fixture(scope="session")
def gstar_chart():
    return Chart("gstar", ("a", "b"), (("a", "positive"),))


@pytest.fixture(scope="session")
def gstar(gstar_chart):
    return PoissonChart(gstar_chart, bivector(gstar_chart, [("a", "b", "a*b")]))


@pytest.fixture(scope="session")
def gstar_group(gstar):
    return GroupChart.from_text(gstar, ["a1*a2", "a1*b2 + b1"], [1, 0], ["1/a", "-b/a"])


@pytest.fixture(scope="session")
def so3_chart():
    return Chart("so3", ("x", "y", "z"))


@pytest.fixture(scope="session")
def so3(so3_chart):
    return PoissonChart(so3_chart, bivector(so3_chart, [("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")]))


@pytest.fixture(scope="session")
def product():
    return load_fixture("product")


@pytest.fixture(scope="session")
def gstar_manifest():
    return load_fixture("gstar")


def pytest_terminal_summary(terminalreporter):
    from criteria import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        verdict, title = RESULTS[n]
        terminalreporter.write_line(f"{n:2d} {verdict}  {title}")
