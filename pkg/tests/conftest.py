import pytest

from gencs.families import parse_family

BASE_FAMILIES = [
    "canonical",
    "mittag_leffler(alpha=2,beta=1)",
    "mittag_leffler(alpha=0.5,beta=1.5)",
    "hypergeometric(alphas=[1],betas=[2])",
    "hypergeometric(alphas=[],betas=[2])",
    "hypergeometric(alphas=[1,2],betas=[3])",
    "tricomi1(p=0.5)",
    "tricomi2(lambda=0.5,beta=2)",
    "penson_solomon(q=0.8)",
    "bg(kappa=1)",
    "bg(kappa=1.5)",
    "gp(kappa=1)",
    "gp(kappa=1.5)",
    "landau_level(m=1,alpha=0.5)",
    "gk_spectrum(e=[0,1,2.5,4,7,9])",
    "poschl_teller(nu=3)",
    "infinite_well",
    "hydrogen_like",
    "morse(M=3)",
    "morse(M=8)",
]
ALL_FAMILIES = BASE_FAMILIES + [f"dual({f})" for f in BASE_FAMILIES if f != "canonical"]


@pytest.fixture(params=ALL_FAMILIES)
def any_family(request):
    return parse_family(request.param)


# ---------------------------------------------------------------------------
# acceptance summary: one line per criterion

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion id")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    num, title = crit
    entry = _ACCEPTANCE.setdefault(num, {"title": title, "ok": True})
    entry["ok"] = entry["ok"] and report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion = (marker.args[0], marker.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if e['ok'] else 'FAIL'}  {e['title']}")
