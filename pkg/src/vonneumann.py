"""
Von Neumann Module.

Bloch wave analysis of the flux reconstruction advection operator: the
element operator Q(k), its eigendecomposition, the semi-discrete error and
grid convergence rate, explicit CFL limits and dispersion/dissipation.

Eigenvalues are normalised as Q = ik W diag(lambda) W^-1, so exact
propagation corresponds to lambda = 1.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.polynomial import polynomial as P

from src.corrections import SchemeParams
from src.errors import DefectiveOperatorError, GjfrError, OperatorError, RateUnavailableError
from src.fr1d import FrOperators, build_operators
from src.job_manager import parallel_map
from src.timeint import RkScheme, stability_coefficients

logger = logging.getLogger(__name__)

SchemeLike = Union[SchemeParams, FrOperators]

COND_LIMIT = 1e10
UNDERFLOW = 1e-300
SATURATION = 0.5
ERROR_MODES = ("primary", "all")


@dataclass(frozen=True, eq=False)
class OperatorQ:
    """Element operator for one Bloch wavenumber."""
    matrix: np.ndarray
    k: float
    theta: float
    delta: float
    points: np.ndarray


@dataclass(frozen=True, eq=False)
class OperatorSpectrum:
    """Q = ik W diag(eigenvalues) W^-1 and the initial modal weights v0."""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    v0: np.ndarray
    k: float
    delta: float


def _operators(scheme: SchemeLike, point_rule: str) -> FrOperators:
    if isinstance(scheme, FrOperators):
        return scheme
    return build_operators(scheme, point_rule)


def assemble_q(
    scheme: SchemeLike,
    point_rule: str = "gauss-legendre",
    k: float = 1.0,
    theta: float = 1.0,
    delta: float = 1.0,
) -> OperatorQ:
    """
    Bloch operator of unit speed advection on elements of width delta.

    Args:
        scheme: SchemeParams, or prebuilt FrOperators (e.g. first order).
        point_rule: Solution point rule when scheme is SchemeParams.
        k: Wavenumber.
        theta: Upwind fraction, 0 central and 1 upwind.
        delta: Element width.

    Returns:
        OperatorQ
    """
    ops = _operators(scheme, point_rule)
    jac = 0.5 * delta
    back = np.exp(-1j * k * delta)
    ahead = np.exp(1j * k * delta)
    row_left = (0.5 * (back * ops.ell_right + ops.ell_left)
                + 0.5 * theta * (back * ops.ell_right - ops.ell_left))
    row_right = (0.5 * (ops.ell_right + ahead * ops.ell_left)
                 + 0.5 * theta * (ops.ell_right - ahead * ops.ell_left))
    matrix = (
        ops.D.astype(complex)
        + np.outer(ops.g_left, row_left - ops.ell_left)
        + np.outer(ops.g_right, row_right - ops.ell_right)
    ) / jac
    return OperatorQ(matrix=matrix, k=k, theta=theta, delta=delta, points=ops.points)


def initial_trace(q: OperatorQ) -> np.ndarray:
    """u0_i = exp(ik J (zeta_i + 1))"""
    return np.exp(1j * q.k * 0.5 * q.delta * (q.points + 1.0))


def diagonalize(q: OperatorQ, u0: Optional[np.ndarray] = None) -> OperatorSpectrum:
    """Eigendecomposition of Q with the initial condition projected on W."""
    values, vectors = np.linalg.eig(q.matrix)
    cond = np.linalg.cond(vectors)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DefectiveOperatorError(
            f"eigenvector matrix is near defective (cond={cond:.3e}) at k={q.k}"
        )
    if u0 is None:
        u0 = initial_trace(q)
    v0 = np.linalg.solve(vectors, u0)
    return OperatorSpectrum(
        eigenvalues=values / (1j * q.k),
        eigenvectors=vectors,
        v0=v0,
        k=q.k,
        delta=q.delta,
    )


def spectrum_at(
    ops: FrOperators, k: float, theta: float, delta: float, retries: int = 2
) -> OperatorSpectrum:
    """diagonalize(assemble_q(...)) with a 1e-9 relative nudge of k on defective matrices."""
    k_try = k
    for attempt in range(retries + 1):
        try:
            return diagonalize(assemble_q(ops, k=k_try, theta=theta, delta=delta))
        except DefectiveOperatorError:
            if attempt == retries:
                raise
            k_try = k_try * (1.0 + 1e-9)
            logger.info("near defective operator at k=%g; retrying with k=%.12g", k, k_try)
    raise AssertionError("unreachable")


def mode_weights(spectrum: OperatorSpectrum) -> np.ndarray:
    """|v0_n| ||w_n||, the share of the initial state carried by each mode."""
    return np.abs(spectrum.v0) * np.linalg.norm(spectrum.eigenvectors, axis=0)


def primary_mode(spectrum: OperatorSpectrum) -> int:
    """Index of the mode carrying most of the initial state."""
    return int(np.argmax(mode_weights(spectrum)))


def semi_discrete_error(
    spectrum: OperatorSpectrum, t: float, x_j: float = 0.0, modes: str = "all"
) -> float:
    """
    l2 norm over the nodal components of the semi-discrete error at time t.

    modes="primary" keeps only the primary mode term. Its error grows with
    t while the secondary terms stay bounded, so it sets the long time rate.
    """
    if modes not in ERROR_MODES:
        raise OperatorError(f"unknown error modes '{modes}'; choose from {', '.join(ERROR_MODES)}")
    k = spectrum.k
    growth = np.exp(-1j * k * t * (spectrum.eigenvalues - 1.0)) - 1.0
    if modes == "primary":
        keep = np.zeros(growth.size)
        keep[primary_mode(spectrum)] = 1.0
        growth = growth * keep
    error = np.exp(1j * k * (x_j - t)) * (spectrum.eigenvectors @ (growth * spectrum.v0))
    return float(np.linalg.norm(error))


def wave_period(k: float) -> float:
    """T = 2 pi / k at unit speed."""
    return 2.0 * math.pi / k


def convergence_rate(
    scheme: SchemeLike,
    theta: float,
    k: float,
    t: Optional[float] = None,
    J1: float = 0.5,
    J2: float = 0.25,
    point_rule: str = "gauss-legendre",
    periods: float = 1000.0,
    modes: str = "primary",
) -> float:
    """
    Grid convergence rate between element Jacobians J1 > J2 at fixed k.

    t defaults to `periods` wave periods. A grid whose error has reached
    SATURATION of the initial state norm has lost the wave, and no rate is
    reported for it.
    """
    if not J2 < J1:
        raise RateUnavailableError(f"require J2 < J1, got J1={J1}, J2={J2}")
    if t is None:
        t = periods * wave_period(k)
    ops = _operators(scheme, point_rule)
    errors = []
    for jac in (J1, J2):
        spectrum = spectrum_at(ops, k, theta, 2.0 * jac)
        e = semi_discrete_error(spectrum, t, modes=modes)
        if not e > UNDERFLOW:
            raise RateUnavailableError(f"error norm underflowed (E={e:.3e}) at J={jac}")
        scale = float(np.linalg.norm(spectrum.eigenvectors @ spectrum.v0))
        if e >= SATURATION * scale:
            raise RateUnavailableError(
                f"error saturated at J={jac} (E={e:.3e}, |u0|={scale:.3e}); the wave is lost by t={t:.6g}"
            )
        errors.append(e)
    return (math.log(errors[0]) - math.log(errors[1])) / (math.log(J1) - math.log(J2))


def k_scan(p: int, n_k: int = 256) -> np.ndarray:
    """Equispaced k Delta values in (0, pi (p+1)]."""
    top = math.pi * (p + 1)
    return np.linspace(top / n_k, top, n_k)


def _scan_eigenvalues(ops: FrOperators, theta: float, n_k: int) -> np.ndarray:
    return np.concatenate([
        np.linalg.eigvals(assemble_q(ops, k=kd, theta=theta, delta=1.0).matrix)
        for kd in k_scan(ops.n_points - 1, n_k)
    ])


def growth_rate(
    scheme: SchemeLike, point_rule: str = "gauss-legendre", theta: float = 1.0, n_k: int = 256
) -> float:
    """
    Largest Re of the eigenvalues of -Q(k) over the k scan.

    Positive values mean the semi-discrete operator itself amplifies some
    mode, independently of the time integrator.
    """
    ops = _operators(scheme, point_rule)
    return float(np.max((-_scan_eigenvalues(ops, theta, n_k)).real))


def cfl_limit(
    scheme: SchemeLike,
    point_rule: str,
    rk: RkScheme,
    theta: float = 1.0,
    n_k: int = 256,
    tol: float = 1e-6,
    allow_growth: bool = True,
) -> float:
    """
    Largest stable tau for unit speed and unit element width.

    A step is stable when |R(-tau q)| <= 1 + 1e-10 for every scanned
    eigenvalue q of Q(k). With allow_growth the bound for each mode is its
    own semi-discrete amplification max(1, |exp(-tau q)|), i.e. the
    von Neumann condition rho <= 1 + O(tau); operators with slightly growing
    modes then keep the step size set by the integrator.

    Returns 0 when the update is already unstable at tau = 1e-8.
    """
    ops = _operators(scheme, point_rule)
    eigs = _scan_eigenvalues(ops, theta, n_k)
    coeffs = stability_coefficients(rk)
    growth = float(np.max((-eigs).real))
    if growth > 1e-12:
        logger.info("semi-discrete operator amplifies modes at rate %.3e", growth)

    def stable(tau: float) -> bool:
        z = -tau * eigs
        amplification = np.abs(P.polyval(z, coeffs))
        bound = np.maximum(1.0, np.exp(z.real)) if allow_growth else 1.0
        return bool(np.all(amplification <= bound * (1.0 + 1e-10)))

    lo = 1e-8
    if not stable(lo):
        logger.info("unstable at tau=%g; no usable explicit step", lo)
        return 0.0
    hi = 2.0 * lo
    while stable(hi):
        lo, hi = hi, 2.0 * hi
        if hi > 1e4:
            return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if stable(mid):
            lo = mid
        else:
            hi = mid
        logger.debug("cfl bracket [%.8f, %.8f]", lo, hi)
    return lo


def dispersion_dissipation(
    scheme: SchemeLike,
    point_rule: str,
    theta: float,
    k_hat: Iterable[float],
    delta: float = 1.0,
) -> pd.DataFrame:
    """
    Normalised numerical frequency of the tracked modes.

    The primary mode has the largest |v0_n| ||w_n||. With central interfaces
    the two strongest modes are reported.

    Returns:
        pd.DataFrame: k_hat, re_omega, im_omega, mode, projection, ambiguous
    """
    ops = _operators(scheme, point_rule)
    n = ops.n_points
    rows = []
    for kh in k_hat:
        k = kh * n / delta
        spectrum = spectrum_at(ops, k, theta, delta)
        weight = mode_weights(spectrum)
        order = np.argsort(-weight, kind="stable")
        ambiguous = n > 1 and weight[order[0]] - weight[order[1]] < 1e-8
        n_report = 2 if (theta == 0.0 or ambiguous) and n > 1 else 1
        for rank in range(n_report):
            idx = order[rank]
            omega_hat = k * spectrum.eigenvalues[idx] * delta / n
            rows.append({
                "k_hat": float(kh),
                "re_omega": float(omega_hat.real),
                "im_omega": float(omega_hat.imag),
                "mode": rank,
                "projection": float(weight[idx]),
                "ambiguous": bool(ambiguous),
            })
    return pd.DataFrame(rows)


def error_surface(
    scheme: SchemeLike,
    point_rule: str,
    theta: float,
    k_hat: Sequence[float],
    periods: Sequence[float],
    delta: float = 1.0,
) -> pd.DataFrame:
    """Semi-discrete error over a (k_hat, t/T) grid."""
    ops = _operators(scheme, point_rule)
    n = ops.n_points
    rows = []
    for kh in k_hat:
        k = kh * n / delta
        spectrum = spectrum_at(ops, k, theta, delta)
        for t_over_T in periods:
            rows.append({
                "k_hat": float(kh),
                "t_over_T": float(t_over_T),
                "error": semi_discrete_error(spectrum, t_over_T * wave_period(k)),
            })
    return pd.DataFrame(rows)


def sweep(
    grid: Sequence[Tuple[float, float]],
    evaluate: Callable[[float, float], float],
    column: str,
    jobs: int = 1,
    progress: bool = False,
) -> pd.DataFrame:
    """
    Evaluates a metric over (alpha, beta) points in parallel.

    Points where the metric is unavailable are kept with a NaN value and
    the reason in the `note` column.
    """
    results, failures = parallel_map(
        lambda ab: evaluate(*ab), grid, jobs=jobs, desc=f"{column} sweep", progress=progress
    )
    notes = [""] * len(grid)
    for index, error in failures:
        if not isinstance(error, GjfrError):
            raise error
        notes[index] = str(error)
    return pd.DataFrame({
        "alpha": [a for a, _ in grid],
        "beta": [b for _, b in grid],
        column: [np.nan if r is None else r for r in results],
        "note": notes,
    })
