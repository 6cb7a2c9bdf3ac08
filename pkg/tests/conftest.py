from __future__ import annotations

import numpy as np
import pytest

from tanhclass.core import Parameter, Shape, plant_redundancy, random_parameter


def P(units, d=0.0, n=None) -> Parameter:
    """Shorthand: P([(a, b, c), ...], d)."""
    return Parameter.from_units(units, d, n=n)


def planted(shape: Shape, seed: int, plants: int) -> Parameter:
    """Random parameter with ``plants`` randomly chosen redundancies planted."""
    rng = np.random.default_rng(seed)
    w = random_parameter(shape, seed)
    for _ in range(plants):
        if shape.h == 0:
            break
        cond = str(rng.choice(["i", "ii", "iii", "iv"] if shape.h >= 2 else ["i", "ii"]))
        if cond in ("i", "ii"):
            w = plant_redundancy(w, cond, [int(rng.integers(shape.h))])
        else:
            i, j = rng.choice(shape.h, size=2, replace=False)
            w = plant_redundancy(w, cond, [int(i), int(j)])
    return w


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
