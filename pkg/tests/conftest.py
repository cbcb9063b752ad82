import random

import pytest
from hypothesis import HealthCheck, settings

from stopsearch.tanner import SparseParityCheck

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.differing_executors])
settings.load_profile("repo")

ACCEPTANCE: dict = {}


def random_code(n: int, m: int, seed: int, density: float = 0.35) -> SparseParityCheck:
    """Small random parity-check matrix; every column touches at least one check."""
    rng = random.Random(seed)
    rows = [[i for i in range(n) if rng.random() < density] for _ in range(m)]
    for i in range(n):
        if not any(i in r for r in rows):
            rows[rng.randrange(m)].append(i)
    return SparseParityCheck.from_rows([sorted(r) for r in rows], n)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0]), k)):
        ok, note = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {note}")


@pytest.fixture
def record():
    def _rec(key: str, ok: bool, note: str = ""):
        ACCEPTANCE[key] = (bool(ok), note)
        print(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {note}")
        return ok
    return _rec
