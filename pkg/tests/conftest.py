import os

import pytest
from hypothesis import settings

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture
def square_geom():
    from foldpam import make_geometry

    return make_geometry(0.050, 0.050, 0.0, 0.005)


# ---------------------------------------------------------------- acceptance

ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, title, elapsed, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if passed else "FAIL"
        line = f"criterion {number}: {status}  {title}  [{elapsed:.2f} s]"
        if detail:
            line += f"  {detail}"
        terminalreporter.write_line(line)
