import numpy as np
import pytest

CRITERIA = [f"A{i}" for i in range(1, 12)]
_outcomes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(id): ties a test to acceptance criterion id")
    config.addinivalue_line("markers", "slow: takes more than a few seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes.setdefault(marker.args[0], []).append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid in CRITERIA:
        results = _outcomes.get(cid)
        if not results:
            tr.write_line(f"ACCEPTANCE {cid}: NOT RUN")
            continue
        failed = [name for name, ok in results if not ok]
        verdict = "PASS" if not failed else "FAIL"
        detail = f"{len(results) - len(failed)}/{len(results)} checks"
        if failed:
            detail += "; failing: " + ", ".join(failed)
        tr.write_line(f"ACCEPTANCE {cid}: {verdict} ({detail})")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_pt_profile(rng, n, lo=0.4, hi=1.6):
    """Mirror-symmetric positive bonds ``t_k = t_{n-k}``."""
    half = rng.uniform(lo, hi, size=n // 2)
    t = np.empty(n - 1)
    for k in range(n - 1):
        t[k] = half[min(k, n - 2 - k)]
    return tuple(float(v) for v in t)
