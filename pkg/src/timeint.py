"""
Time Integration Module.

Explicit Runge-Kutta schemes for the solver and for the fully discrete
stability analysis. `step` only needs +, - and scalar * on the state, so
it also runs on numpy Polynomials to recover stability polynomials.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P
from tqdm import tqdm

from src.errors import SchemeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RkScheme:
    """
    Explicit Runge-Kutta scheme.

    kind "butcher" uses a, b, c as a tableau; kind "low-storage" uses them as
    the 2N coefficient lists A, B, C.
    """
    name: str
    order: int
    kind: str
    a: Tuple[Tuple[float, ...], ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]

    @property
    def stages(self) -> int:
        """Number of stages."""
        return len(self.b)


_LS_A = (
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
)
_LS_B = (
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
)
_LS_C = (
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
)

RK_SCHEMES: Dict[str, RkScheme] = {
    "euler": RkScheme("euler", 1, "butcher", ((0.0,),), (1.0,), (0.0,)),
    # SSP Shu-Osher
    "rk33": RkScheme(
        "rk33", 3, "butcher",
        ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.25, 0.25, 0.0)),
        (1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0),
        (0.0, 1.0, 0.5),
    ),
    "rk44": RkScheme(
        "rk44", 4, "butcher",
        ((0.0, 0.0, 0.0, 0.0), (0.5, 0.0, 0.0, 0.0), (0.0, 0.5, 0.0, 0.0), (0.0, 0.0, 1.0, 0.0)),
        (1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0),
        (0.0, 0.5, 0.5, 1.0),
    ),
    # Carpenter-Kennedy 5-stage, 4th order, 2N storage
    "ls-rk45": RkScheme("ls-rk45", 4, "low-storage", (_LS_A,), _LS_B, _LS_C),
}


def get_rk(name: str) -> RkScheme:
    """Looks up a scheme by its identifier."""
    try:
        return RK_SCHEMES[name]
    except KeyError:
        raise SchemeError(
            f"unknown Runge-Kutta scheme '{name}'; choose from {', '.join(RK_SCHEMES)}",
            module="timeint",
        ) from None


def step(scheme: RkScheme, rhs: Callable, state, dt: float):
    """One explicit step of u' = rhs(u)."""
    if scheme.kind == "low-storage":
        du = state * 0.0
        u = state
        for a_i, b_i in zip(scheme.a[0], scheme.b):
            du = a_i * du + dt * rhs(u)
            u = u + b_i * du
        return u

    stages = []
    for i in range(scheme.stages):
        u_i = state
        for j in range(i):
            if scheme.a[i][j] != 0.0:
                u_i = u_i + (dt * scheme.a[i][j]) * stages[j]
        stages.append(rhs(u_i))
    out = state
    for b_i, k_i in zip(scheme.b, stages):
        if b_i != 0.0:
            out = out + (dt * b_i) * k_i
    return out


def stability_coefficients(scheme: RkScheme) -> np.ndarray:
    """Coefficients of R(z) in increasing powers, from one step of u' = z u."""
    z = Polynomial([0.0, 1.0])
    result = step(scheme, lambda v: z * v, Polynomial([1.0]), 1.0)
    return np.trim_zeros(np.asarray(result.coef, dtype=float), "b")


def stability_polynomial(scheme: RkScheme, z):
    """R(z) for scalar or array z, real or complex."""
    return P.polyval(z, stability_coefficients(scheme))


def advance(
    scheme: RkScheme,
    rhs: Callable,
    state,
    dt: float,
    n_steps: int,
    progress: bool = False,
    desc: str = "time stepping",
    check_every: int = 0,
):
    """
    Runs n_steps steps.

    With check_every > 0 the loop stops early once the state stops being
    finite; the caller sees the non-finite state.
    """
    u = state
    for n in tqdm(range(n_steps), desc=desc, disable=not progress, leave=False):
        u = step(scheme, rhs, u, dt)
        if check_every and (n + 1) % check_every == 0 and not np.all(np.isfinite(u)):
            logger.info("state became non-finite at step %d", n + 1)
            break
    return u


def rk_table(scheme: RkScheme) -> pd.DataFrame:
    """Stage coefficients as a table."""
    if scheme.kind == "low-storage":
        return pd.DataFrame({
            "stage": range(1, scheme.stages + 1),
            "A": scheme.a[0],
            "B": scheme.b,
            "C": scheme.c,
        })
    rows = []
    for i in range(scheme.stages):
        row = {"stage": i + 1, "c": scheme.c[i], "b": scheme.b[i]}
        for j in range(scheme.stages):
            row[f"a{j + 1}"] = scheme.a[i][j]
        rows.append(row)
    return pd.DataFrame(rows)
