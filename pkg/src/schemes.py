"""
Scheme definitions for the correction family.
Named presets fix some of (alpha, beta, iota); the rest comes from the run.
"""
from typing import Optional

from src.corrections import (
    CorrectionPair,
    SchemeParams,
    build_gjfr,
    build_osfr,
    build_sd,
    iota_of_sd,
)
from src.errors import SchemeError

SCHEME_DEFINITIONS = {
    "dg": {
        "label": "Nodal DG",
        "description": "Radau corrections; alpha = beta = 0, iota = 0.",
        "fixed": {"alpha": 0.0, "beta": 0.0, "iota": 0.0},
        "sweepable": False,
    },
    "qdg": {
        "label": "Quasi-DG",
        "description": "Jacobi weighted family member with iota = 0.",
        "fixed": {"iota": 0.0},
        "sweepable": True,
    },
    "sd": {
        "label": "Jacobi Spectral Difference",
        "description": "Corrections vanishing at the Gauss-Jacobi points; iota = iota_SD.",
        "fixed": {},
        "sweepable": True,
    },
    "osfr": {
        "label": "Original Energy Stable FR",
        "description": "Legendre family with parameter c; iota = c/2.",
        "fixed": {"alpha": 0.0, "beta": 0.0},
        "sweepable": False,
    },
    "gjfr": {
        "label": "Generalised Jacobi FR",
        "description": "Explicit (alpha, beta, iota).",
        "fixed": {},
        "sweepable": True,
    },
}


def _check_fixed(name: str, key: str, given: Optional[float], value: float):
    if given is not None and given != value:
        raise SchemeError(f"scheme '{name}' fixes {key} = {value!r}, got {key} = {given!r}")


def resolve_scheme(
    name: str,
    p: int,
    alpha: Optional[float] = None,
    beta: Optional[float] = None,
    iota: Optional[float] = None,
    c: Optional[float] = None,
) -> SchemeParams:
    """
    Resolves a named scheme plus explicit values to SchemeParams.

    Explicit values that contradict the preset are rejected.
    """
    if name not in SCHEME_DEFINITIONS:
        raise SchemeError(f"unknown scheme '{name}'; choose from {', '.join(SCHEME_DEFINITIONS)}")
    for key, value in SCHEME_DEFINITIONS[name]["fixed"].items():
        _check_fixed(name, key, {"alpha": alpha, "beta": beta, "iota": iota}[key], value)
    if c is not None and name != "osfr":
        raise SchemeError(f"c only applies to the osfr scheme, not '{name}'")

    a = 0.0 if alpha is None else float(alpha)
    b = 0.0 if beta is None else float(beta)
    if name == "sd":
        resolved = iota_of_sd(p, a, b)
        _check_fixed(name, "iota", iota, resolved)
    elif name == "osfr":
        c_value = 0.0 if c is None else float(c)
        resolved = c_value / 2.0
        _check_fixed(name, "iota", iota, resolved)
    else:
        resolved = 0.0 if iota is None else float(iota)
    return SchemeParams(p, a, b, resolved)


def correction_pair(name: str, params: SchemeParams, c: Optional[float] = None) -> CorrectionPair:
    """Builds the pair the way the named scheme defines it."""
    if name == "osfr":
        return build_osfr(params.p, 2.0 * params.iota if c is None else c)
    if name == "sd":
        return build_sd(params.p, params.alpha, params.beta)
    return build_gjfr(params)
