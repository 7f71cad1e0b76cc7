import math

import numpy as np
import pytest

from fieldreur.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    QuadratureError,
    integrate,
)


def test_rule_weights():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_exact_to_degree_22(deg):
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert float(NODES**deg @ KRONROD_WEIGHTS) == pytest.approx(exact, abs=1e-14)
    if deg <= 13:
        assert float(NODES**deg @ GAUSS_WEIGHTS) == pytest.approx(exact, abs=1e-14)


def test_integrates_gaussian():
    res = integrate(lambda x: np.exp(-0.5 * x * x), -12, 12)
    assert res.value == pytest.approx(math.sqrt(2 * math.pi), rel=1e-13)
    assert res.error < 1e-11


def test_breakpoints_help_kinks():
    res = integrate(np.abs, -1.0, 2.0, points=[0.0])
    assert res.value == pytest.approx(2.5, abs=1e-14)
    assert res.intervals == 2


def test_budget_exhaustion_is_an_error():
    with pytest.raises(QuadratureError):
        integrate(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3)), 0.0, 1.0, max_intervals=20)


def test_nonfinite_integrand_is_an_error():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.full_like(x, np.nan), 0.0, 1.0)
