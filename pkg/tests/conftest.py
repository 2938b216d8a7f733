import pytest

from glueform import shipped_space
from glueform.diffeology import Plot, PullbackChart, Retraction, SpacePresentation, SymmetryGenerators
from glueform.presentation import load_presentation
from glueform.ratpoly import PolyMap, VarContext, parse_poly

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): an exit criterion of the build")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        number, title = marker.args
        _ACCEPTANCE.append((number, title, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome in sorted(_ACCEPTANCE):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")


def load_space(name):
    return load_presentation(shipped_space(name)).to_space()


@pytest.fixture(scope="session")
def cross():
    return load_space("cross")


@pytest.fixture(scope="session")
def one_point():
    return load_space("one-point")


@pytest.fixture(scope="session")
def parabola():
    return load_space("parabola")


def parabola_plot(name="alpha", var="s"):
    dom = VarContext.of(var)
    w = VarContext.of("w1")
    pair = (PolyMap.parse(w, ["w1"]), PolyMap.parse(w, ["-w1"]))
    return Plot(name, PolyMap.parse(dom, [f"{var}^2"]), SymmetryGenerators(w, (pair,)))


def cross_with(chart_alpha="0", chart_beta="0", alpha_components=("s", "0")):
    amb = VarContext.of("x y")
    s, t, pt = VarContext.of("s"), VarContext.of("t"), VarContext(())
    alpha = Plot("alpha", PolyMap.parse(s, alpha_components), Retraction(PolyMap.parse(amb, ["x"])))
    beta = Plot("beta", PolyMap.parse(t, ["0", "t"]), Retraction(PolyMap.parse(amb, ["y"])))
    chart = PullbackChart("origin", pt, PolyMap.parse(pt, [chart_alpha]), PolyMap.parse(pt, [chart_beta]))
    return SpacePresentation(amb, (parse_poly("x*y", amb),), alpha, beta, (chart,))
