from pathlib import Path

import pytest

from ghostcartan.modelfile import load_model

MODELS = Path(__file__).resolve().parents[1] / "models"

_acceptance = []


@pytest.fixture
def models_dir() -> Path:
    return MODELS


@pytest.fixture
def oscillator():
    return load_model(MODELS / "oscillator.model")


@pytest.fixture
def quartic():
    return load_model(MODELS / "quartic.model")


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    props = dict(report.user_properties)
    if "criterion" in props:
        _acceptance.append((props["criterion"], report.outcome, props.get("detail", ""), report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail, duration in sorted(_acceptance, key=lambda r: int(r[0].split()[0])):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {name}  ({duration:.2f} s)  {detail}")
