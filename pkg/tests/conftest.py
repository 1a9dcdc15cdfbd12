import functools

import pytest

from beamloc.scenario import NoiseModel, load_preset
from beamloc.simharness import run_campaign, run_tracking

# fixed before any acceptance numbers were looked at
ACCEPTANCE_SEED = 1

_criteria: list[str] = []


def record(number: int, text: str, passed: bool, detail: str = "") -> bool:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {text}"
    if detail:
        line += f"  ({detail})"
    _criteria.append(line)
    print(line)
    return passed


@functools.lru_cache(maxsize=None)
def campaign(preset: str, n: int, seed: int = ACCEPTANCE_SEED, mode: str = "measured",
             codebook: str = "bfr", noise_dbm: float | None = None):
    """Session-wide cache so several tests can share one Monte-Carlo run."""
    sc = load_preset(preset).replace(codebook=codebook, noise=NoiseModel.from_dbm(noise_dbm))
    return run_campaign(sc, n, seed, mode=mode)


@functools.lru_cache(maxsize=None)
def tracking(preset: str, n: int, seed: int = ACCEPTANCE_SEED):
    return run_tracking(load_preset(preset), n, seed)


@pytest.fixture(scope="session")
def scenario1():
    return load_preset("scenario1")


@pytest.fixture(scope="session")
def scenario2():
    return load_preset("scenario2")


def pytest_terminal_summary(terminalreporter):
    if _criteria:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_criteria, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
