import random
from pathlib import Path

import pytest
from hypothesis import settings

from symwebs import FieldSpec, SymWeb

DATA = Path(__file__).parent / "data"

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def rand_sym(rng, F, size, lo=-3, hi=3):
    mat = [[0] * size for _ in range(size)]
    for r in range(size):
        for c in range(r, size):
            mat[r][c] = mat[c][r] = F.coerce(rng.randint(lo, hi))
    return mat


def rand_web(rng, F, m, n, **kw):
    return SymWeb(F, [rand_sym(rng, F, n + 1, **kw) for _ in range(m + 1)])


def rand_invertible(rng, F, size, lo=-3, hi=3):
    from symwebs import linalg

    while True:
        A = [[F.coerce(rng.randint(lo, hi)) for _ in range(size)] for _ in range(size)]
        if linalg.det(F, A):
            return A


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def data_dir():
    return DATA


FIELDS = [FieldSpec.prime(2), FieldSpec.prime(3), FieldSpec.prime(5), FieldSpec.rationals()]


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
