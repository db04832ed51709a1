"""
FR1D Module.

Handles the one-dimensional flux reconstruction discretisation on periodic
meshes: reference element operators, linear advection and viscous Burgers
right-hand sides, projection and diagnostics.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from src.corrections import CorrectionPair, SchemeParams, build_gjfr, sobolev_form
from src.errors import OperatorError
from src.jacobi import (
    LEGENDRE,
    eval_modal,
    gauss_jacobi,
    gauss_lobatto,
    vandermonde,
)

POINT_RULES = ("gauss-legendre", "gauss-jacobi", "gauss-lobatto")


@dataclass(frozen=True, eq=False)
class Mesh1D:
    """Periodic mesh given by its element boundaries."""
    boundaries: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.boundaries, dtype=float)
        if x.ndim != 1 or x.size < 2 or np.any(np.diff(x) <= 0):
            raise OperatorError("mesh boundaries must be strictly increasing with at least one element")
        object.__setattr__(self, "boundaries", x)

    @classmethod
    def uniform(cls, n_elements: int, x0: float = 0.0, x1: float = 2.0 * math.pi) -> "Mesh1D":
        """Uniform mesh of n_elements on [x0, x1]."""
        return cls(np.linspace(x0, x1, n_elements + 1))

    @property
    def n_elements(self) -> int:
        """Number of elements."""
        return self.boundaries.size - 1

    @property
    def left(self) -> np.ndarray:
        """Left boundary of each element."""
        return self.boundaries[:-1]

    @property
    def jacobians(self) -> np.ndarray:
        """J_n = (x_{n+1} - x_n) / 2"""
        return 0.5 * np.diff(self.boundaries)

    @property
    def length(self) -> float:
        """Domain length."""
        return float(self.boundaries[-1] - self.boundaries[0])


@dataclass(frozen=True)
class LinearAdvection:
    """f(u) = a u"""
    speed: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.speed):
            raise OperatorError(f"advection speed must be finite, got {self.speed}")


@dataclass(frozen=True)
class ViscousBurgers:
    """f(u) = u^2/2 - mu du/dx; `convective=False` leaves the heat equation."""
    diffusivity: float = 0.0
    convective: bool = True

    def __post_init__(self):
        if not self.diffusivity >= 0:
            raise OperatorError(f"diffusivity must be >= 0, got {self.diffusivity}")


FluxModel = Union[LinearAdvection, ViscousBurgers]


@dataclass(frozen=True, eq=False)
class FrOperators:
    """Nodal operators of the reference element [-1, 1]."""
    points: np.ndarray
    D: np.ndarray
    ell_left: np.ndarray
    ell_right: np.ndarray
    g_left: np.ndarray
    g_right: np.ndarray
    weights: Optional[np.ndarray] = None
    params: Optional[SchemeParams] = None

    @property
    def n_points(self) -> int:
        """Solution points per element."""
        return self.points.size

    @classmethod
    def first_order(cls) -> "FrOperators":
        """Single mid-point with the degree-1 Radau corrections (finite volume)."""
        return cls(
            points=np.array([0.0]),
            D=np.zeros((1, 1)),
            ell_left=np.array([1.0]),
            ell_right=np.array([1.0]),
            g_left=np.array([-0.5]),
            g_right=np.array([0.5]),
            weights=np.array([2.0]),
        )


def solution_points(params: SchemeParams, point_rule: str = "gauss-legendre"):
    """
    Solution points and, where the rule has them, Legendre weights.

    Returns:
        tuple: (points, weights or None)
    """
    n = params.p + 1
    if point_rule == "gauss-legendre":
        rule = gauss_jacobi(LEGENDRE, n)
        return rule.nodes, rule.weights
    if point_rule == "gauss-jacobi":
        return gauss_jacobi(params.basis, n).nodes, None
    if point_rule == "gauss-lobatto":
        rule = gauss_lobatto(n)
        return rule.nodes, rule.weights
    raise OperatorError(f"unknown point rule '{point_rule}'; choose from {', '.join(POINT_RULES)}")


def barycentric_weights(points: np.ndarray) -> np.ndarray:
    """Barycentric weights 1 / prod_{k != j} (x_j - x_k)."""
    diff = points[:, None] - points[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def interpolation_matrix(points: np.ndarray, zeta) -> np.ndarray:
    """M[m, j] = l_j(zeta_m) for the Lagrange basis on `points`."""
    z = np.atleast_1d(np.asarray(zeta, dtype=float))
    w = barycentric_weights(points)
    diff = z[:, None] - points[None, :]
    exact = diff == 0.0
    diff[exact] = 1.0
    terms = w[None, :] / diff
    mat = terms / terms.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    if np.any(hit):
        mat[hit] = exact[hit].astype(float)
    return mat


def differentiation_matrix(points: np.ndarray) -> np.ndarray:
    """D[i, j] = dl_j/dz at z_i, diagonal from the negative row sum."""
    w = barycentric_weights(points)
    diff = points[:, None] - points[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def build_operators(
    params: SchemeParams,
    point_rule: str = "gauss-legendre",
    pair: Optional[CorrectionPair] = None,
) -> FrOperators:
    """
    Assembles the reference element operators for a scheme.

    Args:
        params: Correction scheme (p, alpha, beta, iota).
        point_rule: One of POINT_RULES.
        pair: Correction pair to use instead of build_gjfr(params).

    Returns:
        FrOperators
    """
    points, weights = solution_points(params, point_rule)
    if points.size != params.p + 1:
        raise OperatorError(f"expected {params.p + 1} solution points, got {points.size}")
    if np.min(np.diff(np.sort(points))) < 1e-14:
        raise OperatorError("duplicate solution points")
    if pair is None:
        pair = build_gjfr(params)
    dh_left, dh_right = pair.derivatives(1)
    edges = interpolation_matrix(points, [-1.0, 1.0])
    return FrOperators(
        points=points,
        D=differentiation_matrix(points),
        ell_left=edges[0],
        ell_right=edges[1],
        g_left=np.asarray(eval_modal(dh_left, points)),
        g_right=np.asarray(eval_modal(dh_right, points)),
        weights=weights,
        params=params,
    )


def physical_points(mesh: Mesh1D, ops: FrOperators) -> np.ndarray:
    """x[n, i] of every solution point."""
    return mesh.left[:, None] + mesh.jacobians[:, None] * (ops.points[None, :] + 1.0)


def _interface_values(u_left, u_right, upwind: float, theta: float):
    """Common values at the left and right face of each element."""
    minus = np.roll(u_right, 1)
    plus = u_left
    face = 0.5 * (minus + plus) + upwind * 0.5 * theta * (minus - plus)
    return face, np.roll(face, -1)


def _corrected_divergence(f, f_face_left, f_face_right, mesh: Mesh1D, ops: FrOperators):
    """(1/J)[D f + (f^I_L - f_L) gL + (f^I_R - f_R) gR]"""
    f_left = f @ ops.ell_left
    f_right = f @ ops.ell_right
    div = (
        f @ ops.D.T
        + (f_face_left - f_left)[:, None] * ops.g_left[None, :]
        + (f_face_right - f_right)[:, None] * ops.g_right[None, :]
    )
    return div / mesh.jacobians[:, None]


def rhs_advection(
    state: np.ndarray,
    mesh: Mesh1D,
    ops: FrOperators,
    flux: LinearAdvection = LinearAdvection(),
    theta: float = 1.0,
) -> np.ndarray:
    """
    du/dt for linear advection.

    theta blends the interface value between central (0) and upwind (1).
    Works for complex states.
    """
    if not 0.0 <= theta <= 1.0:
        raise OperatorError(f"theta must lie in [0, 1], got {theta}")
    a = flux.speed
    u_face_left, u_face_right = _interface_values(
        state @ ops.ell_left, state @ ops.ell_right, float(np.sign(a)), theta
    )
    return -a * _corrected_divergence(state, u_face_left, u_face_right, mesh, ops)


def rhs_burgers(
    state: np.ndarray,
    mesh: Mesh1D,
    ops: FrOperators,
    flux: ViscousBurgers = ViscousBurgers(),
) -> np.ndarray:
    """
    du/dt for viscous Burgers with BR1 gradients and a Rusanov flux.
    """
    u_left = state @ ops.ell_left
    u_right = state @ ops.ell_right
    mu = flux.diffusivity

    # 1) 補助変数 q = du/dx（BR1: 界面は平均）
    u_face_left, u_face_right = _interface_values(u_left, u_right, 0.0, 0.0)
    q = _corrected_divergence(state, u_face_left, u_face_right, mesh, ops)

    # 2) f = u^2/2 - mu q
    f = -mu * q
    q_face_left, q_face_right = _interface_values(q @ ops.ell_left, q @ ops.ell_right, 0.0, 0.0)
    f_face_left = -mu * q_face_left
    if flux.convective:
        f = f + 0.5 * state * state
        minus = np.roll(u_right, 1)
        plus = u_left
        speed = np.maximum(np.abs(minus), np.abs(plus))
        rusanov = 0.25 * (minus * minus + plus * plus) - 0.5 * speed * (plus - minus)
        f_face_left = f_face_left + rusanov
    f_face_right = np.roll(f_face_left, -1)
    return -_corrected_divergence(f, f_face_left, f_face_right, mesh, ops)


def project_initial(fn: Callable, mesh: Mesh1D, ops: FrOperators) -> np.ndarray:
    """Collocation of fn(x) at the solution points."""
    x = physical_points(mesh, ops)
    values = np.asarray(fn(x), dtype=float)
    return np.array(np.broadcast_to(values, x.shape), dtype=float)


def total_integral(state: np.ndarray, mesh: Mesh1D, ops: FrOperators) -> float:
    """Quadrature of the solution over the domain."""
    if ops.weights is None:
        raise OperatorError("point rule has no quadrature weights; total_integral unavailable")
    return float(np.sum(mesh.jacobians * (state @ ops.weights)))


def sample_solution(state: np.ndarray, mesh: Mesh1D, ops: FrOperators, x) -> np.ndarray:
    """Evaluates the piecewise polynomial solution at physical points x."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    x0 = mesh.boundaries[0]
    wrapped = x0 + np.mod(xs - x0, mesh.length)
    elem = np.clip(np.searchsorted(mesh.boundaries, wrapped, side="right") - 1, 0, mesh.n_elements - 1)
    zeta = (wrapped - mesh.left[elem]) / mesh.jacobians[elem] - 1.0
    interp = interpolation_matrix(ops.points, zeta)
    return np.einsum("mj,mj->m", interp, state[elem])


def l2_error(state: np.ndarray, mesh: Mesh1D, ops: FrOperators, exact: Callable) -> float:
    """L2 error against exact(x) with (p+3)-point Gauss quadrature per element."""
    rule = gauss_jacobi(LEGENDRE, ops.n_points + 2)
    interp = interpolation_matrix(ops.points, rule.nodes)
    u_q = state @ interp.T
    x_q = mesh.left[:, None] + mesh.jacobians[:, None] * (rule.nodes[None, :] + 1.0)
    err = (u_q - exact(x_q)) ** 2
    return math.sqrt(float(np.sum(mesh.jacobians * (err @ rule.weights))))


def modal_coefficients(state: np.ndarray, ops: FrOperators, params: SchemeParams) -> np.ndarray:
    """Per element coefficients in the scheme's Jacobi basis."""
    V = vandermonde(params.basis, params.p, ops.points)
    return np.linalg.solve(V, state.T).T


def broken_sobolev_norm(
    state: np.ndarray, mesh: Mesh1D, ops: FrOperators, params: SchemeParams
) -> float:
    """Sum over elements of J_n times the weighted Sobolev norm squared."""
    modal = modal_coefficients(state, ops, params)
    return float(sum(j * sobolev_form(params, c) for j, c in zip(mesh.jacobians, modal)))
