import math

import numpy as np
import pytest

from src.errors import DomainError, QuadratureError
from src.jacobi import (
    LEGENDRE,
    JacobiBasis,
    ModalSeries,
    derivative_expansion,
    differentiate,
    doha_D,
    eval_jacobi,
    eval_jacobi_derivative,
    eval_modal,
    gauss_jacobi,
    gauss_lobatto,
    leading_derivative_b,
    orthogonality_q,
    vandermonde,
)
from src.specfun import pochhammer

WEIGHTS = [-0.5, 0.0, 0.5, 2.0]


def test_degree_zero_is_one():
    z = np.linspace(-1, 1, 7)
    assert np.allclose(eval_jacobi(JacobiBasis(0.3, -0.4), 0, z), 1.0)


def test_legendre_values():
    for n in range(11):
        assert eval_jacobi(LEGENDRE, n, 1.0) == pytest.approx(1.0, rel=1e-13)
    assert eval_jacobi(LEGENDRE, 2, 0.0) == pytest.approx(-0.5, abs=1e-15)
    assert eval_jacobi(LEGENDRE, 3, 0.5) == pytest.approx(-0.4375, abs=1e-15)


def test_endpoint_normalisation():
    basis = JacobiBasis(0.3, -0.4)
    for n in range(9):
        expected = pochhammer(1.3, n) / math.factorial(n)
        assert eval_jacobi(basis, n, 1.0) == pytest.approx(expected, rel=1e-12)


def test_symmetric_weight_parity():
    basis = JacobiBasis(0.7, 0.7)
    z = np.linspace(-0.9, 0.9, 11)
    for n in range(7):
        assert np.allclose(eval_jacobi(basis, n, -z), (-1) ** n * eval_jacobi(basis, n, z), atol=1e-13)


def test_orthogonality_constants():
    assert orthogonality_q(LEGENDRE, 0) == pytest.approx(2.0)
    for n in range(1, 8):
        assert orthogonality_q(LEGENDRE, n) == pytest.approx(2.0 / (2 * n + 1), rel=1e-13)
    assert orthogonality_q(JacobiBasis(1.0, 1.0), 1) == pytest.approx(16.0 / 15.0, rel=1e-13)


@pytest.mark.parametrize("alpha", WEIGHTS)
@pytest.mark.parametrize("beta", WEIGHTS)
def test_orthogonality_by_quadrature(alpha, beta):
    basis = JacobiBasis(alpha, beta)
    rule = gauss_jacobi(basis, 10)
    values = [np.asarray(eval_jacobi(basis, n, rule.nodes)) for n in range(9)]
    for m in range(9):
        for n in range(9):
            integral = rule.integrate(values[m] * values[n])
            scale = max(1.0, math.sqrt(orthogonality_q(basis, m) * orthogonality_q(basis, n)))
            expected = orthogonality_q(basis, n) if m == n else 0.0
            assert abs(integral - expected) < 1e-10 * scale


def test_leading_derivative():
    assert leading_derivative_b(LEGENDRE, 0) == 1.0
    assert leading_derivative_b(LEGENDRE, 1) == pytest.approx(1.0)
    assert leading_derivative_b(LEGENDRE, 2) == pytest.approx(3.0)
    assert leading_derivative_b(JacobiBasis(1.0, 0.0), 1) == pytest.approx(1.5)


def test_doha_examples():
    assert doha_D(1, 1, 1.0, 1.0, 0.0, 0.0) == pytest.approx(2.0)
    assert doha_D(1, 0, 1.0, 1.0, 0.0, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert doha_D(0, 0, 1.5, 0.5, 0.2, 0.1) == pytest.approx(1.0)


@pytest.mark.parametrize("p", [1, 2, 3, 5])
def test_doha_top_coefficient(p):
    alpha, beta = 0.3, -0.2
    s = alpha + beta
    expected = (2 * p + s - 1) * (2 * p + s) / ((p + s) * (p + s + 1))
    assert doha_D(p - 1, p - 1, alpha + 1, beta + 1, alpha, beta) == pytest.approx(expected, rel=1e-12)
    series = derivative_expansion(JacobiBasis(alpha, beta), p, 1)
    assert series.coeffs[p - 1] == pytest.approx(0.5 * (p + s + 1) * expected, rel=1e-12)


def test_doha_index_check():
    with pytest.raises(DomainError):
        doha_D(1, 2, 1.0, 1.0, 0.0, 0.0)


def test_derivative_expansion_examples():
    assert np.allclose(derivative_expansion(LEGENDRE, 2, 1).as_array(), [0.0, 3.0])
    assert np.allclose(derivative_expansion(LEGENDRE, 3, 0).as_array(), [0.0, 0.0, 0.0, 1.0])
    basis = JacobiBasis(0.5, 0.5)
    top = derivative_expansion(basis, 4, 4)
    assert top.degree == 0
    assert top.coeffs[0] == pytest.approx(leading_derivative_b(basis, 4), rel=1e-12)
    assert derivative_expansion(basis, 2, 3).degree == -1


@pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (0.5, -0.3), (1.0, 1.0)])
@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_derivative_matches_finite_difference(alpha, beta, n):
    basis = JacobiBasis(alpha, beta)
    z = np.linspace(-0.95, 0.95, 20)
    h = 1e-5
    coeffs = [0.0] * n + [1.0]
    for m in (1, 2, 3):
        upper = np.asarray(eval_modal(differentiate(ModalSeries(basis, coeffs), m - 1), z + h))
        lower = np.asarray(eval_modal(differentiate(ModalSeries(basis, coeffs), m - 1), z - h))
        fd = (upper - lower) / (2 * h)
        exact = np.asarray(eval_modal(derivative_expansion(basis, n, m), z))
        assert np.all(np.abs(exact - fd) <= 1e-6 * (1.0 + np.abs(exact)))
        direct = np.asarray(eval_jacobi_derivative(basis, n, m, z))
        assert np.allclose(direct, exact, rtol=1e-10, atol=1e-9)


def test_modal_evaluation():
    assert eval_modal(ModalSeries(LEGENDRE, [0.0, 1.0]), 0.5) == pytest.approx(0.5)
    assert eval_modal(ModalSeries(LEGENDRE, [1.0, 0.0, 2.0]), 0.0) == pytest.approx(0.0)
    assert np.allclose(eval_modal(ModalSeries(LEGENDRE, []), [0.1, 0.2]), 0.0)


def test_vandermonde_columns():
    basis = JacobiBasis(0.5, 0.0)
    z = np.linspace(-1, 1, 5)
    V = vandermonde(basis, 3, z)
    assert V.shape == (5, 4)
    for n in range(4):
        assert np.allclose(V[:, n], eval_jacobi(basis, n, z))


def test_gauss_legendre_two_points():
    rule = gauss_jacobi(LEGENDRE, 2)
    assert np.allclose(rule.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
    assert np.allclose(rule.weights, [1.0, 1.0], atol=1e-14)
    assert rule.integrate(rule.nodes ** 2) == pytest.approx(2.0 / 3.0)


@pytest.mark.parametrize("alpha,beta", [(0.0, 0.0), (-0.9, -0.9), (2.0, 2.0), (1.5, -0.5)])
def test_gauss_jacobi_rule(alpha, beta):
    basis = JacobiBasis(alpha, beta)
    rule = gauss_jacobi(basis, 6)
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.all(rule.weights > 0)
    assert rule.weights.sum() == pytest.approx(orthogonality_q(basis, 0), rel=1e-12)
    # exact up to degree 2n - 1
    for n in range(12):
        assert rule.integrate(eval_jacobi(basis, n, rule.nodes)) == pytest.approx(
            orthogonality_q(basis, 0) if n == 0 else 0.0, abs=1e-11
        )
    if alpha == beta:
        assert np.allclose(rule.nodes, -rule.nodes[::-1], atol=1e-14)


def test_gauss_jacobi_single_point():
    rule = gauss_jacobi(JacobiBasis(1.0, 0.0), 1)
    assert rule.nodes[0] == pytest.approx(-1.0 / 3.0)
    assert rule.weights[0] == pytest.approx(2.0)


def test_gauss_jacobi_rejects_empty_rule():
    with pytest.raises(QuadratureError):
        gauss_jacobi(LEGENDRE, 0)


def test_gauss_lobatto_three_points():
    rule = gauss_lobatto(3)
    assert np.allclose(rule.nodes, [-1.0, 0.0, 1.0], atol=1e-15)
    assert np.allclose(rule.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-14)


def test_gauss_lobatto_exactness():
    rule = gauss_lobatto(5)
    for n in range(8):
        assert rule.integrate(eval_jacobi(LEGENDRE, n, rule.nodes)) == pytest.approx(
            2.0 if n == 0 else 0.0, abs=1e-13
        )


def test_invalid_weight():
    with pytest.raises(DomainError, match="alpha > -1"):
        JacobiBasis(-1.0, 0.0)
