import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from evalsub.synthetic import generate_corpus

DATA = Path(__file__).parent / "data"

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# the two example sentences used throughout the docs
FIG_REF = ("the car has just left Paris <eol> for its destination London <eob> "
           "where it will arrive next Sunday <eol> if all goes well . <eob>")
FIG_HYP = ("the car has just left Paris <eol> for his destination : London <eob> "
           "where he arrives <eol> next Sunday if <eol> all goes well . <eob>")


@pytest.fixture(scope="session")
def parity():
    return json.loads((DATA / "parity.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def corpus():
    return generate_corpus()


@pytest.fixture(scope="session")
def small_corpus():
    return generate_corpus(60, seed=7, identifier="small")


# acceptance verdicts, echoed after the run so they survive output capture
VERDICTS: dict[int, str] = {}


@pytest.fixture
def verdict():
    def record(n: int, ok: bool, detail: str) -> None:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
        VERDICTS[n] = line
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
