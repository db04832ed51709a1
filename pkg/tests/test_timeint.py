import math

import numpy as np
import pytest

from src.errors import SchemeError
from src.timeint import (
    RK_SCHEMES,
    advance,
    get_rk,
    rk_table,
    stability_coefficients,
    stability_polynomial,
    step,
)


def test_euler_step():
    assert step(get_rk("euler"), lambda u: -u, 1.0, 0.1) == pytest.approx(0.9)
    u = advance(get_rk("euler"), lambda u: -u, np.array([1.0]), 0.1, 10)
    assert u[0] == pytest.approx(0.9 ** 10, rel=1e-14)


def test_stability_coefficients():
    assert np.allclose(stability_coefficients(get_rk("euler")), [1.0, 1.0])
    assert np.allclose(stability_coefficients(get_rk("rk33")), [1.0, 1.0, 0.5, 1.0 / 6.0])
    assert np.allclose(stability_coefficients(get_rk("rk44")), [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0])
    ls = stability_coefficients(get_rk("ls-rk45"))
    assert ls.size == 6
    assert np.allclose(ls[:5], [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0], atol=1e-9)


def test_rk44_real_axis_boundary():
    rk44 = get_rk("rk44")
    assert stability_polynomial(rk44, 0.0) == pytest.approx(1.0)
    assert abs(stability_polynomial(rk44, -2.785)) <= 1.0
    assert abs(stability_polynomial(rk44, -2.8)) > 1.0


@pytest.mark.parametrize("name", list(RK_SCHEMES))
def test_step_matches_stability_polynomial(name):
    scheme = get_rk(name)
    lam = np.array([-1.0, 2.0j, -0.5 + 1.5j, -3.0])
    dt = 0.3
    u0 = np.array([1.0, 0.5 - 0.2j, 2.0, -1.0], dtype=complex)
    stepped = step(scheme, lambda u: lam * u, u0, dt)
    assert np.allclose(stepped, stability_polynomial(scheme, dt * lam) * u0, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("name", list(RK_SCHEMES))
@pytest.mark.parametrize("lam", [-1.0, 1.0j])
def test_observed_order(name, lam):
    scheme = get_rk(name)
    errors = []
    for dt in (0.05, 0.025):
        n = int(round(1.0 / dt))
        u = advance(scheme, lambda v: lam * v, np.array([1.0 + 0j]), dt, n)
        errors.append(abs(u[0] - np.exp(lam)))
    order = math.log2(errors[0] / errors[1])
    assert scheme.order - 0.35 < order < scheme.order + 0.5


def test_advance_stops_on_non_finite_state():
    calls = []

    def rhs(u):
        calls.append(1)
        return u * 1e200

    u = advance(get_rk("euler"), rhs, np.array([1e200]), 1.0, 50, check_every=1)
    assert not np.all(np.isfinite(u))
    assert len(calls) < 50


def test_rk_table_shapes():
    table = rk_table(get_rk("rk44"))
    assert len(table) == 4
    assert {"stage", "c", "b", "a1", "a4"} <= set(table.columns)
    assert table["b"].sum() == pytest.approx(1.0)
    ls = rk_table(get_rk("ls-rk45"))
    assert list(ls.columns) == ["stage", "A", "B", "C"]
    assert len(ls) == 5


def test_unknown_scheme():
    with pytest.raises(SchemeError, match="unknown Runge-Kutta scheme"):
        get_rk("rk99")
