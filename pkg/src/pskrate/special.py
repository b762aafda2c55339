"""Special-function kernel: Gauss hypergeometric series and friends.

Everything downstream reduces to four ingredients: log-gamma, Pochhammer
symbols, the Gauss hypergeometric function F[alpha, beta; gamma, z] in its
terminating and non-terminating flavors, and the thermal entropy function
g(x) = (x+1)ln(x+1) - x ln x.  The evaluators here are deliberately plain
series summations: for the parameter patterns this package needs (upper
parameters either non-positive integers or positive reals, integer lower
parameter, z >= 0) every term of the series is non-negative, so compensated
accumulation is enough and no analytic continuation is required.

All logarithms are natural; rates and entropies are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, IterationLimitError

NONTERMINATING_RTOL = 1e-15
NONTERMINATING_MAX_TERMS = 10**6

# Above this partial sum the terminating series switches to log tracking to
# dodge float64 overflow (possible for z > 1 at large orders).
_RESCALE_THRESHOLD = 1e280


def log_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def pochhammer(x: float, n: int) -> float:
    """Rising factorial (x)_n = x (x+1) ... (x+n-1), with (x)_0 = 1."""
    if n < 0:
        raise DomainError(f"pochhammer requires n >= 0, got {n}")
    out = 1.0
    for k in range(n):
        out *= x + k
    return out


def _check_terminating_args(n1, n2, gamma, z):
    if n1 < 0 or n2 < 0 or int(n1) != n1 or int(n2) != n2:
        raise DomainError(f"terminating series needs natural orders, got ({n1}, {n2})")
    if gamma < 1 or int(gamma) != gamma:
        raise DomainError(f"lower parameter must be a positive integer, got {gamma}")
    if z < 0:
        raise DomainError(f"terminating evaluator requires z >= 0, got {z}")


def hyp2f1_terminating(n1: int, n2: int, gamma: int, z: float) -> float:
    """F[-n1, -n2; gamma, z] as the exact finite sum, z >= 0.

    Every summand is non-negative for this parameter pattern, so the sum is
    accumulated with Neumaier compensation and is >= 1.
    """
    _check_terminating_args(n1, n2, gamma, z)
    total = 0.0
    comp = 0.0
    term = 1.0
    for k in range(min(n1, n2) + 1):
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        term *= (n1 - k) * (n2 - k) * z / ((gamma + k) * (k + 1))
    return total + comp


def log_hyp2f1_terminating(n1: int, n2: int, gamma: int, z: float) -> float:
    """ln F[-n1, -n2; gamma, z], rescaled on the fly so huge sums never overflow."""
    _check_terminating_args(n1, n2, gamma, z)
    total = 0.0
    term = 1.0
    offset = 0.0
    for k in range(min(n1, n2) + 1):
        total += term
        term *= (n1 - k) * (n2 - k) * z / ((gamma + k) * (k + 1))
        if total > _RESCALE_THRESHOLD:
            offset += math.log(total)
            term /= total
            total = 1.0
    return offset + math.log(total)


def hyp2f1_nonterminating(alpha: float, beta: float, gamma: int, z: float,
                          rtol: float = NONTERMINATING_RTOL,
                          max_terms: int = NONTERMINATING_MAX_TERMS) -> float:
    """F[alpha, beta; gamma, z] for alpha, beta > 0, integer gamma >= 1, 0 <= z < 1.

    Terms are summed until the geometric tail estimate
    term * ratio / (1 - ratio) drops below rtol relative to the partial sum.
    Raises IterationLimitError (carrying the partial sum and last term) if the
    budget of max_terms is exhausted.
    """
    if alpha <= 0 or beta <= 0:
        raise DomainError(f"upper parameters must be positive, got ({alpha}, {beta})")
    if gamma < 1 or int(gamma) != gamma:
        raise DomainError(f"lower parameter must be a positive integer, got {gamma}")
    if not 0 <= z < 1:
        raise DomainError(f"non-terminating series requires 0 <= z < 1, got {z}")
    total = 0.0
    comp = 0.0
    term = 1.0
    for k in range(max_terms):
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
        ratio = (alpha + k) * (beta + k) * z / ((gamma + k) * (k + 1))
        term *= ratio
        if ratio < 1.0 and term / ((1.0 - ratio) * total) < rtol:
            return total + comp
    raise IterationLimitError(
        f"2F1[{alpha}, {beta}; {gamma}, {z}] did not converge in {max_terms} terms",
        partial_sum=total + comp, last_term=term)


@dataclass(frozen=True)
class HypArgs:
    """Argument bundle for the regularized evaluator.

    For the terminating route alpha and beta must be non-positive integers;
    for the non-terminating route they must be positive with |z| < 1.  gamma
    must be a positive integer either way.
    """
    alpha: float
    beta: float
    gamma: float
    z: float


def _is_nonpositive_integer(x) -> bool:
    return x <= 0 and float(x) == int(x)


def hyp2f1_regularized(args: HypArgs) -> float:
    """Regularized F[alpha, beta; gamma, z] / Gamma(gamma), integer gamma >= 1."""
    gamma = args.gamma
    if gamma < 1 or int(gamma) != gamma:
        raise DomainError(f"regularized form implemented for positive integer gamma, got {gamma}")
    if _is_nonpositive_integer(args.alpha) and _is_nonpositive_integer(args.beta):
        f = hyp2f1_terminating(int(-args.alpha), int(-args.beta), int(gamma), args.z)
    else:
        f = hyp2f1_nonterminating(args.alpha, args.beta, int(gamma), args.z)
    return f / math.gamma(gamma)


def g_entropy(x: float) -> float:
    """Thermal-state entropy g(x) = (x+1) ln(x+1) - x ln x in nats, g(0) = 0."""
    if x < 0:
        raise DomainError(f"g_entropy requires x >= 0, got {x}")
    if x == 0:
        return 0.0
    return (x + 1.0) * math.log1p(x) - x * math.log(x)


def chu_vandermonde(n: int, b: float, c: float) -> float:
    """F[-n, b; c, 1] = (c-b)_n / (c)_n, evaluated as a product of ratios."""
    if n < 0 or int(n) != n:
        raise DomainError(f"order must be a natural number, got {n}")
    out = 1.0
    for k in range(int(n)):
        den = c + k
        if den == 0:
            raise DomainError(f"(c)_n vanishes: c={c}, n={n}")
        out *= (c - b + k) / den
    return out


def f_ratio_bounds(alpha: int, beta: int, z: float) -> tuple[float, float]:
    """Two-sided bound on F[alpha+1, beta+1; 1, z] / F[alpha, beta; 1, z].

    Valid for integer alpha, beta >= 1 and 0 < z < 1; the lower bound is 1.
    """
    if alpha < 1 or beta < 1:
        raise DomainError("ratio bound needs alpha, beta >= 1")
    if not 0 < z < 1:
        raise DomainError(f"ratio bound needs 0 < z < 1, got {z}")
    upper = (2.0 + z * beta / alpha + alpha / beta - 1.0 / alpha - 1.0 / beta) / (1.0 - z) ** 2
    return 1.0, upper


def f_growth_bound(alpha: int, beta: int, z: float) -> float:
    """Upper bound on F[alpha+1, beta+1; 1, z] for integer alpha, beta >= 1, 0 < z < 1."""
    if alpha < 1 or beta < 1:
        raise DomainError("growth bound needs alpha, beta >= 1")
    if not 0 < z < 1:
        raise DomainError(f"growth bound needs 0 < z < 1, got {z}")
    lo, hi = (alpha, beta) if beta >= alpha else (beta, alpha)
    base = 3.0 + z + z * (hi - lo) - 1.0 / alpha - 1.0 / beta
    return base ** lo / (1.0 - z) ** (alpha + beta + 1)
