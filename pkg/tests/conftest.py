import random

import pytest
import sympy as sp
from hypothesis import HealthCheck, settings

settings.register_profile(
    "exact",
    max_examples=20,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("exact")


def to_sympy(x):
    """Package ring element -> sympy expression, via its printed form."""
    return sp.sympify(str(x).replace("^", "**"))


def mat_to_sympy(m):
    return sp.Matrix(m.rows, m.cols, lambda i, j: to_sympy(m[i, j]))


def sympy_equal(a, b):
    return sp.simplify(sp.Matrix(a) - sp.Matrix(b)) == sp.zeros(*sp.Matrix(a).shape)


@pytest.fixture
def rng():
    return random.Random(12345)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, secs, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  ({secs:.1f} s)  {detail}")
