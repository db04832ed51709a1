"""
Jacobi Module.

Handles the Jacobi polynomial basis J_n^(a,b) on [-1, 1]: evaluation,
orthogonality constants, derivative re-expansion in the same basis and
Gauss-type quadrature.

Normalisation is J_n(1) = <a+1>_n / n! throughout.
"""
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from src.errors import DomainError, QuadratureError
from src.specfun import hyp3f2_terminating, ln_gamma, pochhammer

ArrayLike = Union[float, Sequence[float], np.ndarray]


@dataclass(frozen=True)
class JacobiBasis:
    """Weight exponents of w(z) = (1-z)^alpha (1+z)^beta."""
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise DomainError(
                f"Jacobi weight requires alpha > -1 and beta > -1, "
                f"got alpha={self.alpha}, beta={self.beta}",
                module="jacobi",
            )

    @property
    def s(self) -> float:
        """alpha + beta"""
        return self.alpha + self.beta

    def weight(self, zeta: ArrayLike) -> np.ndarray:
        """Evaluates the weight function."""
        z = np.asarray(zeta, dtype=float)
        return (1.0 - z) ** self.alpha * (1.0 + z) ** self.beta


LEGENDRE = JacobiBasis(0.0, 0.0)


@dataclass(frozen=True)
class ModalSeries:
    """Sum of c_i J_i over the coefficients of one basis."""
    basis: JacobiBasis
    coeffs: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        """Index of the last nonzero coefficient, -1 for the zero series."""
        for i in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[i] != 0.0:
                return i
        return -1

    def __call__(self, zeta: ArrayLike):
        return eval_modal(self, zeta)

    def as_array(self, length: int = None) -> np.ndarray:
        """Coefficients as an array, zero padded to `length`."""
        c = np.asarray(self.coeffs, dtype=float)
        if length is not None and length > c.size:
            c = np.concatenate([c, np.zeros(length - c.size)])
        return c


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes in increasing order with positive weights."""
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values: ArrayLike) -> float:
        """Weighted sum of values sampled at the nodes."""
        return float(np.dot(self.weights, np.asarray(values)))


def eval_jacobi(basis: JacobiBasis, n: int, zeta: ArrayLike):
    """
    Evaluates J_n^(alpha,beta) by the three-term recurrence.

    Args:
        basis: Weight exponents.
        n: Degree (>= 0).
        zeta: Scalar or array of points.

    Returns:
        float or np.ndarray matching the shape of zeta.
    """
    z = np.asarray(zeta, dtype=float)
    a, b, s = basis.alpha, basis.beta, basis.s

    p_prev = np.ones_like(z)
    if n == 0:
        return _unwrap(p_prev)
    # J_1 は漸化式の 0/0 を避けるため直接与える
    p_curr = 0.5 * ((s + 2.0) * z + a - b)
    for k in range(1, n):
        c = 2.0 * k + s
        a1 = 2.0 * (k + 1) * (k + s + 1) * c
        a2 = (c + 1) * (a * a - b * b)
        a3 = (c + 1) * (c + 2) * c
        a4 = 2.0 * (k + a) * (k + b) * (c + 2)
        p_prev, p_curr = p_curr, ((a2 + a3 * z) * p_curr - a4 * p_prev) / a1
    return _unwrap(p_curr)


def eval_jacobi_derivative(basis: JacobiBasis, n: int, m: int, zeta: ArrayLike):
    """m-th derivative of J_n through d^m J_n = 2^-m <n+s+1>_m J_{n-m}^(a+m,b+m)."""
    z = np.asarray(zeta, dtype=float)
    if m > n:
        return _unwrap(np.zeros_like(z))
    if m == 0:
        return eval_jacobi(basis, n, z)
    shifted = JacobiBasis(basis.alpha + m, basis.beta + m)
    scale = 2.0 ** (-m) * pochhammer(n + basis.s + 1, m)
    return _unwrap(scale * np.asarray(eval_jacobi(shifted, n - m, z)))


def orthogonality_q(basis: JacobiBasis, n: int) -> float:
    """Squared weighted norm q_n of J_n."""
    a, b, s = basis.alpha, basis.beta, basis.s
    if n == 0:
        # Gamma(s+1) may have a non-positive argument; fold it into Gamma(s+2)
        return math.exp(
            (s + 1) * math.log(2.0) + ln_gamma(a + 1) + ln_gamma(b + 1) - ln_gamma(s + 2)
        )
    log_q = (
        (s + 1) * math.log(2.0)
        - math.log(2 * n + s + 1)
        + ln_gamma(n + a + 1)
        + ln_gamma(n + b + 1)
        - ln_gamma(n + 1)
        - ln_gamma(n + s + 1)
    )
    return math.exp(log_q)


def leading_derivative_b(basis: JacobiBasis, p: int) -> float:
    """b_p = d^p J_p / dz^p = 2^-p <p+s+1>_p."""
    return 2.0 ** (-p) * pochhammer(p + basis.s + 1, p)


def doha_D(j: int, i: int, gamma: float, delta: float, alpha: float, beta: float) -> float:
    """
    Connection coefficient of J_i^(alpha,beta) in the expansion of
    J_j^(gamma,delta).
    """
    if not 0 <= i <= j:
        raise DomainError(f"doha_D requires 0 <= i <= j, got i={i}, j={j}", module="jacobi")
    s = alpha + beta
    if i == 0:
        gamma_ratio = 1.0
    else:
        gamma_ratio = math.exp(ln_gamma(i + s + 1) - ln_gamma(2 * i + s + 1))
    prefactor = (
        pochhammer(j + gamma + delta + 1, i)
        * pochhammer(i + gamma + 1, j - i)
        * gamma_ratio
        / math.factorial(j - i)
    )
    return prefactor * hyp3f2_terminating(
        i - j, j + i + gamma + delta + 1, i + alpha + 1, i + gamma + 1, 2 * i + s + 2
    )


def derivative_expansion(basis: JacobiBasis, n: int, m: int) -> ModalSeries:
    """Coefficients of d^m J_n / dz^m in the same basis."""
    if m > n:
        return ModalSeries(basis, ())
    a, b = basis.alpha, basis.beta
    scale = 2.0 ** (-m) * pochhammer(n + basis.s + 1, m)
    coeffs = [scale * doha_D(n - m, i, a + m, b + m, a, b) for i in range(n - m + 1)]
    return ModalSeries(basis, coeffs)


def differentiate(series: ModalSeries, m: int = 1) -> ModalSeries:
    """m-th derivative of a modal series, expressed in its own basis."""
    n_max = len(series.coeffs) - 1
    if m > n_max:
        return ModalSeries(series.basis, (0.0,))
    out = np.zeros(n_max - m + 1)
    for n, c in enumerate(series.coeffs):
        if c == 0.0 or n < m:
            continue
        d = derivative_expansion(series.basis, n, m).as_array()
        out[: d.size] += c * d
    return ModalSeries(series.basis, out)


def eval_modal(series: ModalSeries, zeta: ArrayLike):
    """Evaluates the series at zeta."""
    z = np.asarray(zeta, dtype=float)
    total = np.zeros_like(z)
    for n, c in enumerate(series.coeffs):
        if c != 0.0:
            total = total + c * np.asarray(eval_jacobi(series.basis, n, z))
    return _unwrap(total)


def vandermonde(basis: JacobiBasis, n: int, zeta: ArrayLike) -> np.ndarray:
    """V[i, j] = J_j(zeta_i) for j = 0..n."""
    z = np.atleast_1d(np.asarray(zeta, dtype=float))
    return np.column_stack([np.asarray(eval_jacobi(basis, j, z)) for j in range(n + 1)])


def gauss_jacobi(basis: JacobiBasis, n: int) -> QuadratureRule:
    """
    n-point Gauss-Jacobi rule by Golub-Welsch.

    The nodes are the roots of J_n^(alpha,beta); the rule is exact for
    polynomials of degree 2n-1 against the weight.
    """
    if n < 1:
        raise QuadratureError(f"gauss_jacobi requires n >= 1, got {n}")
    a, b, s = basis.alpha, basis.beta, basis.s
    q0 = orthogonality_q(basis, 0)

    diag = np.empty(n)
    diag[0] = (b - a) / (s + 2.0)
    k = np.arange(1, n, dtype=float)
    c = 2.0 * k + s
    diag[1:] = (b * b - a * a) / (c * (c + 2.0))
    if n == 1:
        return QuadratureRule(nodes=np.array(diag), weights=np.array([q0]))

    off = np.empty(n - 1)
    off[0] = math.sqrt(4.0 * (1 + a) * (1 + b) / ((s + 2.0) ** 2 * (s + 3.0)))
    k = np.arange(2, n, dtype=float)
    c = 2.0 * k + s
    off[1:] = np.sqrt(4.0 * k * (k + a) * (k + b) * (k + s) / (c * c * (c + 1.0) * (c - 1.0)))

    try:
        nodes, vecs = eigh_tridiagonal(diag, off)
    except Exception as e:  # pylint: disable=broad-exception-caught
        raise QuadratureError(f"Golub-Welsch eigensolve failed for n={n}: {e}") from e
    weights = q0 * vecs[0, :] ** 2
    if not np.all(np.isfinite(nodes)) or np.any(weights <= 0):
        raise QuadratureError(f"Golub-Welsch produced invalid nodes or weights for n={n}")
    return QuadratureRule(nodes=nodes, weights=weights)


def gauss_lobatto(n: int) -> QuadratureRule:
    """Legendre-Gauss-Lobatto rule with n >= 2 points including the endpoints."""
    if n < 2:
        raise QuadratureError(f"gauss_lobatto requires n >= 2, got {n}")
    interior = gauss_jacobi(JacobiBasis(1.0, 1.0), n - 2).nodes if n > 2 else np.array([])
    nodes = np.concatenate([[-1.0], interior, [1.0]])
    p_n1 = np.asarray(eval_jacobi(LEGENDRE, n - 1, nodes))
    weights = 2.0 / (n * (n - 1) * p_n1 ** 2)
    return QuadratureRule(nodes=nodes, weights=weights)


def _unwrap(value: np.ndarray):
    return float(value) if np.ndim(value) == 0 else value
