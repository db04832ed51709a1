"""
Corrections Module.

Builds the correction function pairs (h_L, h_R) used by flux
reconstruction: the generalised Jacobi family, the original energy stable
family, Jacobi spectral difference and qDG. All pairs are stored modally in
their own Jacobi basis.
"""
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from src.errors import SchemeError
from src.jacobi import (
    JacobiBasis,
    LEGENDRE,
    ModalSeries,
    differentiate,
    eval_jacobi,
    eval_modal,
    gauss_jacobi,
    leading_derivative_b,
    orthogonality_q,
)
from src.specfun import pochhammer


def iota_crit(p: int, alpha: float, beta: float) -> float:
    """Positivity limit of the weighted Sobolev norm: q_p / (b_p^2 q_0)."""
    basis = JacobiBasis(alpha, beta)
    b_p = leading_derivative_b(basis, p)
    return orthogonality_q(basis, p) / (b_p * b_p * orthogonality_q(basis, 0))


def iota_crit_closed_form(p: int, alpha: float, beta: float) -> float:
    """Same limit written with Pochhammer symbols only."""
    s = alpha + beta
    # (s+1)/<s+1>_p == 1/<s+2>_{p-1}, which stays finite at s = -1
    ratio = 1.0 / pochhammer(s + 2, p - 1)
    scale = pochhammer(alpha + 1, p) * pochhammer(beta + 1, p) / math.factorial(p)
    tail = (2.0 ** p / pochhammer(p + s + 1, p)) ** 2
    return ratio * scale * tail / (2 * p + s + 1)


@dataclass(frozen=True)
class SchemeParams:
    """
    One member (p, alpha, beta, iota) of the correction family.

    iota must lie strictly above -iota_crit(p, alpha, beta).
    """
    p: int
    alpha: float = 0.0
    beta: float = 0.0
    iota: float = 0.0

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise SchemeError(f"p must be an integer >= 1, got {self.p}")
        if not (self.alpha > -1 and self.beta > -1):
            raise SchemeError(
                f"alpha and beta must exceed -1, got alpha={self.alpha}, beta={self.beta}"
            )
        bound = -iota_crit(self.p, self.alpha, self.beta)
        if not self.iota > bound:
            raise SchemeError(
                f"iota={self.iota} violates the norm positivity bound iota > {bound:.12g}"
            )

    @property
    def basis(self) -> JacobiBasis:
        """Jacobi basis of the weighted norm."""
        return JacobiBasis(self.alpha, self.beta)


@dataclass(frozen=True)
class CorrectionPair:
    """Left and right correction functions of degree p+1."""
    h_left: ModalSeries
    h_right: ModalSeries
    params: SchemeParams

    def derivatives(self, m: int = 1):
        """m-th derivatives of (h_L, h_R) as modal series."""
        return differentiate(self.h_left, m), differentiate(self.h_right, m)


def coefficient_A(p: int, alpha: float, beta: float) -> float:
    """
    Ratio constant A_p linking iota to h_{p-1}/h_{p+1}.

    Args:
        p: Solution degree (>= 1).
        alpha, beta: Weight exponents.

    Returns:
        float: A_p.
    """
    basis = JacobiBasis(alpha, beta)
    s = basis.s
    numer = (p + s + 1) * pochhammer(p + s + 2, p - 1) * orthogonality_q(basis, p - 1)
    denom = (
        2.0
        * pochhammer(p + s, p - 1)
        * leading_derivative_b(basis, p)
        * leading_derivative_b(basis, p + 1)
        * orthogonality_q(basis, 0)
    )
    return numer / denom


def _n_factor(params: SchemeParams, a_p: float, e: float) -> float:
    """iota p(p+1) + (p+e)(p+e+1) A_p"""
    p = params.p
    return params.iota * p * (p + 1) + (p + e) * (p + e + 1) * a_p


def kappa(p: int, alpha: float, beta: float, iota: float) -> float:
    """Normalising constant of h_L."""
    params = SchemeParams(p, alpha, beta, iota)
    a_p = coefficient_A(p, alpha, beta)
    n_alpha = _n_factor(params, a_p, alpha)
    n_beta = _n_factor(params, a_p, beta)
    if n_alpha == 0:
        raise SchemeError(f"singular denominator in kappa for {params}")
    return (pochhammer(beta + 1, p) / math.factorial(p)) * (
        ((p + alpha) / (p + beta)) * n_beta / n_alpha + 1.0
    )


def build_gjfr(params: SchemeParams) -> CorrectionPair:
    """
    Generalised Jacobi correction pair for (p, alpha, beta, iota).

    Both functions carry only J_{p-1}, J_p, J_{p+1} with
    h_{p-1}/h_{p+1} = iota / A_p, which is the stability condition.
    """
    p, a, b, iota = params.p, params.alpha, params.beta, params.iota
    a_p = coefficient_A(p, a, b)
    n_alpha = _n_factor(params, a_p, a)
    n_beta = _n_factor(params, a_p, b)
    if abs(n_alpha) < 1e-300:
        raise SchemeError(f"singular denominator iota p(p+1) + (p+a+1)(p+a)A_p = 0 for {params}")

    k_p = (pochhammer(b + 1, p) / math.factorial(p)) * ((p + a) / (p + b) * n_beta / n_alpha + 1.0)
    if k_p == 0:
        raise SchemeError(f"singular kappa for {params}")
    sign = (-1.0) ** p
    left = np.zeros(p + 2)
    left[p - 1] = -sign * iota * (p + 1) * (p + a) / (n_alpha * k_p)
    left[p] = sign / k_p
    left[p + 1] = -sign * (p + 1) * (p + a) * a_p / (n_alpha * k_p)

    # h_R: 同じ比 iota/A_p を保ち、端点条件から J_p の係数と規格化を決める
    d_alpha = n_alpha / ((p + 1) * (p + a))
    d_beta = n_beta / ((p + 1) * (p + b))
    at_one = (pochhammer(a + 1, p) / math.factorial(p)) * (d_alpha + d_beta)
    if abs(at_one) < 1e-300:
        raise SchemeError(f"singular right correction normalisation for {params}")
    right = np.zeros(p + 2)
    right[p - 1] = iota / at_one
    right[p] = d_beta / at_one
    right[p + 1] = a_p / at_one

    basis = params.basis
    return CorrectionPair(ModalSeries(basis, left), ModalSeries(basis, right), params)


def osfr_c_bound(p: int) -> float:
    """Lower bound on c for the original energy stable family."""
    a_p = math.factorial(2 * p) / (2 ** p * math.factorial(p) ** 2)
    return -2.0 / ((2 * p + 1) * (a_p * math.factorial(p)) ** 2)


def build_osfr(p: int, c: float) -> CorrectionPair:
    """Energy stable correction pair in the Legendre basis, parameter c."""
    bound = osfr_c_bound(p)
    if not c > bound:
        raise SchemeError(f"c={c} out of range for p={p}; require c > {bound:.12g}")
    a_p = math.factorial(2 * p) / (2 ** p * math.factorial(p) ** 2)
    eta = c * (2 * p + 1) * (a_p * math.factorial(p)) ** 2 / 2.0
    sign = (-1.0) ** p

    right = np.zeros(p + 2)
    right[p - 1] = 0.5 * eta / (1 + eta)
    right[p] = 0.5
    right[p + 1] = 0.5 / (1 + eta)
    left = sign * right * np.array([1.0 if i == p else -1.0 for i in range(p + 2)])

    params = SchemeParams(p, 0.0, 0.0, c / 2.0)
    return CorrectionPair(ModalSeries(LEGENDRE, left), ModalSeries(LEGENDRE, right), params)


def iota_of_sd(p: int, alpha: float, beta: float) -> float:
    """iota of the Jacobi spectral difference scheme, p/(p+1) of iota_crit."""
    return iota_crit(p, alpha, beta) * p / (p + 1.0)


def build_sd(p: int, alpha: float, beta: float) -> CorrectionPair:
    """
    Jacobi spectral difference pair.

    h_L = (1-z)/2 J_p(z)/J_p(-1), expanded with the three-term recurrence
    z J_p = c+ J_{p+1} + c0 J_p + c- J_{p-1}.
    """
    basis = JacobiBasis(alpha, beta)
    s = basis.s
    den = (2 * p + s) * (2 * p + s + 1) * (2 * p + s + 2)
    up = 2.0 * (p + 1) * (p + s + 1) * (2 * p + s) / den
    mid = -(2 * p + s + 1) * (alpha * alpha - beta * beta) / den
    down = 2.0 * (p + alpha) * (p + beta) * (2 * p + s + 2) / den

    j_minus = float(eval_jacobi(basis, p, -1.0))
    j_plus = float(eval_jacobi(basis, p, 1.0))

    left = np.zeros(p + 2)
    left[p - 1] = -down
    left[p] = 1.0 - mid
    left[p + 1] = -up
    right = np.zeros(p + 2)
    right[p - 1] = down
    right[p] = 1.0 + mid
    right[p + 1] = up

    params = SchemeParams(p, alpha, beta, iota_of_sd(p, alpha, beta))
    return CorrectionPair(
        ModalSeries(basis, left / (2.0 * j_minus)),
        ModalSeries(basis, right / (2.0 * j_plus)),
        params,
    )


def extract_iota(pair: CorrectionPair) -> float:
    """Recovers iota from the modal coefficients of h_L."""
    p = pair.params.p
    c = pair.h_left.as_array(p + 2)
    if c[p + 1] == 0:
        raise SchemeError("h_L has no degree p+1 term; iota is undefined")
    return coefficient_A(p, pair.params.alpha, pair.params.beta) * c[p - 1] / c[p + 1]


def stability_residual(pair: CorrectionPair) -> float:
    """
    Largest residual of the left and right energy stability conditions
    with u = J_p, integrated by 2(p+2)-point Gauss-Jacobi quadrature.
    """
    params = pair.params
    p, basis = params.p, params.basis
    rule = gauss_jacobi(basis, 2 * (p + 2))
    q0 = orthogonality_q(basis, 0)
    dp_u = leading_derivative_b(basis, p)
    du = differentiate(ModalSeries(basis, [0.0] * p + [1.0]), 1)
    du_nodes = np.asarray(eval_modal(du, rule.nodes))

    residuals = []
    for h in (pair.h_left, pair.h_right):
        h_nodes = np.asarray(eval_modal(h, rule.nodes))
        top = differentiate(h, p + 1)
        top_value = float(eval_modal(top, 0.0))
        integral = rule.integrate(h_nodes * du_nodes)
        residuals.append(abs(integral - params.iota * dp_u * top_value * q0))
    return max(residuals)


def sobolev_form(params: SchemeParams, u_tilde: Sequence[float]) -> float:
    """Weighted Sobolev norm squared of sum u_i J_i (degree p)."""
    basis = params.basis
    p = params.p
    u = np.asarray(u_tilde, dtype=float)
    if u.size != p + 1:
        raise SchemeError(f"expected {p + 1} modal coefficients, got {u.size}")
    total = sum(u[i] ** 2 * orthogonality_q(basis, i) for i in range(p))
    b_p = leading_derivative_b(basis, p)
    top = orthogonality_q(basis, p) + params.iota * b_p * b_p * orthogonality_q(basis, 0)
    return float(total + top * u[p] ** 2)


def correction_table(pair: CorrectionPair, zeta: Sequence[float]) -> pd.DataFrame:
    """Samples h_L, h_R and their first derivatives on a grid."""
    z = np.asarray(zeta, dtype=float)
    dh_left, dh_right = pair.derivatives(1)
    return pd.DataFrame({
        "zeta": z,
        "h_left": eval_modal(pair.h_left, z),
        "h_right": eval_modal(pair.h_right, z),
        "dh_left": eval_modal(dh_left, z),
        "dh_right": eval_modal(dh_right, z),
    })
