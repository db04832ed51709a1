"""
Special Functions Module.

Log-gamma, rising Pochhammer symbol and the terminating 3F2 sum at unit
argument used by the Jacobi derivative coefficients.
"""
import math

from scipy.special import gammaln

from src.errors import DomainError


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return float(gammaln(x))


def pochhammer(x: float, n: int) -> float:
    """
    Rising factorial x(x+1)...(x+n-1).

    Computed as a direct product so that non-positive integer x gives an
    exact zero.
    """
    if n < 0:
        raise DomainError(f"pochhammer requires n >= 0, got {n}")
    result = 1.0
    for i in range(n):
        result *= x + i
    return result


def hyp3f2_terminating(a1: float, a2: float, a3: float, b1: float, b2: float) -> float:
    """
    Terminating generalised hypergeometric 3F2 at unit argument.

    a1 must be a non-positive integer -m; the sum then has m+1 terms.

    Args:
        a1: Terminating top parameter.
        a2, a3: Remaining top parameters.
        b1, b2: Bottom parameters.

    Returns:
        float: Sum of the series.
    """
    if a1 > 0 or a1 != math.floor(a1):
        raise DomainError(f"hyp3f2_terminating requires a non-positive integer a1, got {a1}")
    m = int(-a1)

    total = 1.0
    term = 1.0
    for i in range(m):
        denom = (b1 + i) * (b2 + i) * (i + 1)
        if denom == 0:
            raise DomainError(
                f"hyp3f2_terminating: zero denominator at term {i + 1} (b1={b1}, b2={b2})"
            )
        # 項比で更新してオーバーフローを避ける
        term *= (a1 + i) * (a2 + i) * (a3 + i) / denom
        total += term
    return total
