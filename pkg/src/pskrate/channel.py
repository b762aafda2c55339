"""Lossy thermal-noise bosonic channel: parameters, covariance, entropies.

The channel mixes the signal mode with a thermal environment of mean photon
number n_b on a beamsplitter of transmissivity eta; the effective output
noise is n_t = n_b (1 - eta).  A two-mode squeezed vacuum source of mean
photon number n_s feeds the signal arm while the idler is held losslessly.
Everything downstream of this module is a function of the triple
(eta, n_s, n_b) or of the derived dimensionless symbol set ReducedParams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError, SingularParameterError
from .special import g_entropy

# Discriminant round-off this small is treated as an exact zero.
_DISC_CLAMP = 1e-12


@dataclass(frozen=True)
class ChannelParams:
    """Physical channel/source triple with the derived output noise n_t."""
    eta: float
    n_s: float
    n_b: float
    n_t: float


def make_params(eta: float, n_s: float, n_b: float) -> ChannelParams:
    """Validate the physical inputs and derive n_t = n_b (1 - eta)."""
    for name, value in (("eta", eta), ("n_s", n_s), ("n_b", n_b)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite, got {value}")
    if not 0 < eta <= 1:
        raise DomainError(f"eta must lie in (0, 1], got {eta}")
    if not n_s > 0:
        raise DomainError(f"n_s must be positive, got {n_s}")
    if n_b < 0:
        raise DomainError(f"n_b must be non-negative, got {n_b}")
    return ChannelParams(eta=eta, n_s=n_s, n_b=n_b, n_t=n_b * (1.0 - eta))


@dataclass(frozen=True)
class ReducedParams:
    """Dimensionless symbols shared by all coefficient formulas.

    a and b are the geometric decay rates of the output/idler photon-number
    law, c the coherence amplitude per unit index shift, d the overall
    normalization, z the argument of every hypergeometric factor, and
    alpha_geo the composite ratio a b z / ((1-a)(1-b)).
    """
    a: float
    b: float
    c: float
    d: float
    z: float
    alpha_geo: float


def reduced(params: ChannelParams) -> ReducedParams:
    eta, n_s, n_t = params.eta, params.n_s, params.n_t
    if n_t <= 0:
        raise SingularParameterError(f"reduced symbols need n_t > 0, got n_t={n_t}")
    if n_t - eta + 1 <= 0:
        raise SingularParameterError(f"reduced symbols need n_t - eta + 1 > 0, got {n_t - eta + 1}")
    a = n_t / (1.0 + n_t)
    b = n_s * (n_t - eta + 1.0) / ((1.0 + n_s) * (1.0 + n_t))
    c = math.sqrt(eta) * math.sqrt(n_s / (1.0 + n_s)) / (1.0 + n_t)
    d = 1.0 / ((1.0 + n_t) * (1.0 + n_s))
    z = eta / ((n_t - eta + 1.0) * n_t)
    alpha_geo = (a / (1.0 - a)) * (b / (1.0 - b)) * z
    return ReducedParams(a=a, b=b, c=c, d=d, z=z, alpha_geo=alpha_geo)


@dataclass(frozen=True)
class CovarianceData:
    """Two-mode covariance matrix of the conditional Gaussian output state."""
    E: float
    C: float
    S: float
    theta: float
    matrix: np.ndarray


def covariance(params: ChannelParams, theta: float) -> CovarianceData:
    """Assemble the 4x4 covariance matrix for modulation phase theta.

    Block structure: E*I on the output mode, S*I on the idler, C*R_theta on
    the off-diagonal, with R_theta = [[cos t, sin t], [sin t, -cos t]].
    """
    E = 2.0 * (params.n_t + params.eta * params.n_s) + 1.0
    C = 2.0 * math.sqrt(params.eta * params.n_s * (params.n_s + 1.0))
    S = 2.0 * params.n_s + 1.0
    r = np.array([[math.cos(theta), math.sin(theta)],
                  [math.sin(theta), -math.cos(theta)]])
    ident = np.eye(2)
    mat = np.block([[E * ident, C * r], [C * r, S * ident]])
    return CovarianceData(E=E, C=C, S=S, theta=theta, matrix=mat)


class SymplecticMu(NamedTuple):
    mu_plus: float
    mu_minus: float
    clamped: bool


def symplectic_mu(params: ChannelParams) -> SymplecticMu:
    """Closed-form symplectic invariants of the conditional state, mu_plus >= mu_minus.

    A numerically negative discriminant of magnitude below 1e-12 is clamped
    to zero with the flag set; anything larger is a domain error.
    """
    eta, n_s, n_t = params.eta, params.n_s, params.n_t
    disc = (n_t + (1.0 + eta) * n_s + 1.0) ** 2 - 4.0 * eta * n_s * (n_s + 1.0)
    clamped = False
    if disc < 0:
        if disc < -_DISC_CLAMP:
            raise DomainError(f"symplectic discriminant negative beyond rounding: {disc}")
        disc = 0.0
        clamped = True
    root = math.sqrt(disc)
    shift = n_t + (eta - 1.0) * n_s
    mu_plus = 0.5 * (root + shift)
    mu_minus = 0.5 * (root - shift)
    if mu_plus < mu_minus:
        mu_plus, mu_minus = mu_minus, mu_plus
    return SymplecticMu(mu_plus=mu_plus, mu_minus=mu_minus, clamped=clamped)


def symplectic_mu_numeric(params: ChannelParams, theta: float = 0.0) -> tuple[float, float]:
    """Symplectic spectrum of the covariance matrix via |eig(i Omega Lambda)| / 2.

    Independent cross-check of symplectic_mu; the factor 2 converts between
    the vacuum-variance-1 convention of the covariance matrix and the
    mu >= 1/2 convention of the closed form.
    """
    omega = np.array([[0, 1, 0, 0],
                      [-1, 0, 0, 0],
                      [0, 0, 0, 1],
                      [0, 0, -1, 0]], dtype=float)
    lam = covariance(params, theta).matrix
    eigs = np.sort(np.abs(np.linalg.eigvals(1j * omega @ lam)))
    return float(eigs[0]) / 2.0, float(eigs[2]) / 2.0


def conditional_entropy(params: ChannelParams) -> float:
    """Entropy of the conditional (fixed-phase) Gaussian output state, in nats.

    Phase rotations are unitary, so this is the same for every modulation
    phase: g(mu_plus - 1/2) + g(mu_minus - 1/2).
    """
    mu = symplectic_mu(params)
    return g_entropy(_floor_tiny(mu.mu_plus - 0.5)) + g_entropy(_floor_tiny(mu.mu_minus - 0.5))


def _floor_tiny(x: float) -> float:
    # mu - 1/2 is non-negative analytically; absorb rounding dust only.
    if -1e-12 < x < 0:
        return 0.0
    return x


@dataclass(frozen=True)
class ValidityReport:
    """Where the convergence guarantees hold, plus the extra closed-form condition."""
    valid: bool
    margin: float
    nt_gt_eta: bool


def validity_threshold(params: ChannelParams) -> float:
    eta, n_s = params.eta, params.n_s
    branch = 0.5 * (-(1.0 + 2.0 * eta * n_s)
                    + math.sqrt(4.0 * eta * n_s * n_s + 4.0 * eta * n_s + 1.0))
    return max(eta * n_s - 1.0, branch)


def validity_check(params: ChannelParams) -> ValidityReport:
    """Test n_t against the convergence threshold; margin = n_t - threshold.

    nt_gt_eta flags the additional n_t > eta condition the closed-form rate
    needs for its logarithms to be real.
    """
    threshold = validity_threshold(params)
    margin = params.n_t - threshold
    return ValidityReport(valid=margin > 0, margin=margin, nt_gt_eta=params.n_t > params.eta)


class ReferenceCapacities(NamedTuple):
    c_ea: float
    c_classical: float


def reference_capacities(params: ChannelParams) -> ReferenceCapacities:
    """Standard entanglement-assisted and unassisted capacities of the channel.

    c_classical = g(eta n_s + n_t) - g(n_t) is the coherent-state Holevo
    capacity at mean photon number n_s; c_ea adds the source entropy and
    subtracts the conditional entropy.  Denominators for the advantage ratio.
    """
    eta, n_s, n_t = params.eta, params.n_s, params.n_t
    c_classical = g_entropy(eta * n_s + n_t) - g_entropy(n_t)
    c_ea = g_entropy(n_s) + g_entropy(eta * n_s + n_t) - conditional_entropy(params)
    return ReferenceCapacities(c_ea=c_ea, c_classical=c_classical)
