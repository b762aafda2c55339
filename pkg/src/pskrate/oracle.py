"""Independent brute-force verification path.

Simulates the physical channel with no reference to the coefficient
formulas: a truncated two-mode squeezed vacuum is phase rotated, mixed with
an explicit thermal mixture on a beamsplitter, and the discarded port is
traced out.  The result is a dense two-mode operator whose entries serve as
ground truth for the analytic matrix elements, entropies and distance
bounds at small cutoffs.

Also evaluates the leading-order perturbation sums (fidelity deficit and
entropy shift of the constellation state relative to the dephased one) by
direct truncated summation; these are the quantities the closed-form bounds
must dominate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams
from .errors import DomainError, ResourceLimitError
from .fockstate import coherence_ray_grid, diag_probability_grid, resolve_cutoff

DENSE_CUTOFF_GUARD = 24
SIGNAL_TAIL = 1e-14
ENV_TAIL = 1e-12
# Treat eigenvalue spacings below this relative size as degenerate when
# forming the logarithmic-mean factor.
LOG_MEAN_DEGENERACY = 1e-14


def tmsv_vector(n_s: float, cutoff: int) -> np.ndarray:
    """Schmidt coefficients sqrt(n_s^n / (n_s+1)^(n+1)) for n = 0..cutoff."""
    if not n_s > 0:
        raise DomainError(f"n_s must be positive, got {n_s}")
    n = np.arange(cutoff + 1, dtype=float)
    return np.exp(0.5 * (n * math.log(n_s) - (n + 1.0) * math.log(n_s + 1.0)))


def thermal_weights(n_b: float, tail: float = ENV_TAIL) -> np.ndarray:
    """Thermal photon-number weights, truncated once the kept mass reaches 1 - tail."""
    if n_b < 0:
        raise DomainError(f"n_b must be non-negative, got {n_b}")
    if n_b == 0:
        return np.array([1.0])
    # Geometric tail: kept mass after k terms is 1 - (n_b/(n_b+1))^k.
    ratio = n_b / (n_b + 1.0)
    count = max(1, int(math.ceil(math.log(tail) / math.log(ratio))) + 1)
    k = np.arange(count, dtype=float)
    return np.exp(k * math.log(n_b) - (k + 1.0) * math.log(n_b + 1.0))


def beamsplitter_element(eta: float, m1: int, m2: int, n1: int, n2: int) -> float:
    """<m1, m2| B(eta) |n1, n2> for the mixing b = sqrt(eta) a + sqrt(1-eta) e.

    Zero unless m1 + m2 = n1 + n2; the finite sum runs over the number of
    photons the first input contributes to the first output.
    """
    if min(m1, m2, n1, n2) < 0:
        raise DomainError("photon numbers must be non-negative")
    if m1 + m2 != n1 + n2:
        return 0.0
    t = math.sqrt(eta)
    r = math.sqrt(1.0 - eta)
    acc = 0.0
    for j in range(max(0, m1 - n2), min(n1, m1) + 1):
        # exponents are >= 0 over the whole j range
        power = t ** (n2 - m1 + 2 * j) * r ** (n1 + m1 - 2 * j)
        acc += math.comb(n1, j) * math.comb(n2, m1 - j) * (-1.0) ** (n1 - j) * power
    norm = 0.5 * (math.lgamma(m1 + 1) + math.lgamma(m2 + 1)
                  - math.lgamma(n1 + 1) - math.lgamma(n2 + 1))
    return acc * math.exp(norm)


@dataclass
class DenseTwoModeOperator:
    """Dense operator on the truncated two-mode space, flattened as n1*(cutoff+1)+n2."""
    cutoff: int
    entries: np.ndarray

    def element(self, n1: int, n2: int, nbar1: int, nbar2: int) -> complex:
        d = self.cutoff + 1
        return complex(self.entries[n1 * d + n2, nbar1 * d + nbar2])

    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def entropy(self) -> float:
        """-tr(rho ln rho) over the truncated box, small negatives discarded."""
        eigs = np.linalg.eigvalsh(self.entries)
        eigs = eigs[eigs > 0.0]
        return float(-(eigs * np.log(eigs)).sum())


def simulate_channel_output(params: ChannelParams, theta: float, cutoff: int,
                            signal_tail: float = SIGNAL_TAIL,
                            env_tail: float = ENV_TAIL) -> DenseTwoModeOperator:
    """Channel output on the [0, cutoff]^2 box by explicit physical simulation.

    The environment enters as a mixture over its Fock states (exact for the
    truncated thermal state); for each environment occupation the
    beamsplitter amplitudes are tabulated and the discarded-port sum is
    carried out ray by ray.  Entries are exact up to the source/environment
    truncation tails.
    """
    if cutoff > DENSE_CUTOFF_GUARD:
        raise ResourceLimitError(
            f"dense simulation capped at cutoff {DENSE_CUTOFF_GUARD}, got {cutoff}")
    n_s = params.n_s
    # Source truncation: kept squared mass 1 - (n_s/(n_s+1))^(nsig+1).
    nsig = max(cutoff, int(math.ceil(math.log(signal_tail)
                                     / math.log(n_s / (n_s + 1.0)))) + 1)
    amp = tmsv_vector(n_s, nsig)
    weights = thermal_weights(params.n_b, env_tail)
    dim = (cutoff + 1) ** 2
    rays = [np.zeros((cutoff + 1 - d, nsig + 1 - d)) for d in range(cutoff + 1)]
    for k, wk in enumerate(weights):
        table = np.zeros((nsig + 1, cutoff + 1))
        for n in range(nsig + 1):
            for b in range(0, min(cutoff, n + k) + 1):
                table[n, b] = amp[n] * beamsplitter_element(params.eta, b, n + k - b, n, k)
        for d in range(cutoff + 1):
            if d > nsig:
                break
            # sum over the discarded port: pairs (b, n) against (b-d, n-d)
            rays[d] += wk * (table[d:, d:cutoff + 1] * table[:nsig + 1 - d, :cutoff + 1 - d]).T
    out = np.zeros((dim, dim), dtype=complex)
    side = cutoff + 1
    for d in range(cutoff + 1):
        phase = complex(math.cos(theta * d), math.sin(theta * d))
        ray = rays[d]
        for b in range(d, cutoff + 1):
            for n in range(d, min(nsig, cutoff) + 1):
                val = ray[b - d, n - d]
                if val == 0.0:
                    continue
                i = b * side + n
                j = (b - d) * side + (n - d)
                out[i, j] = phase * val
                if d > 0:
                    out[j, i] = np.conj(phase) * val
    return DenseTwoModeOperator(cutoff=cutoff, entries=out)


def psk_average(params: ChannelParams, ell: int, cutoff: int,
                signal_tail: float = SIGNAL_TAIL,
                env_tail: float = ENV_TAIL) -> DenseTwoModeOperator:
    """Uniform average of the dense output over the 2**ell constellation phases."""
    count = 2 ** int(ell)
    dim = (cutoff + 1) ** 2
    acc = np.zeros((dim, dim), dtype=complex)
    for k in range(1, count + 1):
        theta = 2.0 * math.pi * k / count
        acc += simulate_channel_output(params, theta, cutoff, signal_tail, env_tail).entries
    return DenseTwoModeOperator(cutoff=cutoff, entries=acc / count)


def dephase(op: DenseTwoModeOperator) -> DenseTwoModeOperator:
    """Continuous phase average: zero every entry whose first-mode indices differ."""
    side = op.cutoff + 1
    n1 = (np.arange(side * side) // side)
    keep = (n1[:, None] == n1[None, :])
    return DenseTwoModeOperator(cutoff=op.cutoff, entries=np.where(keep, op.entries, 0.0))


def trace_norm_diff(a: DenseTwoModeOperator, b: DenseTwoModeOperator) -> float:
    """||A - B||_1 as the sum of absolute eigenvalues of the Hermitian difference."""
    eigs = np.linalg.eigvalsh(a.entries - b.entries)
    return float(np.abs(eigs).sum())


def direct_fidelity_series(params: ChannelParams, ell: int,
                           cutoff: int | None = None,
                           tail_tol: float = 1e-12) -> float:
    """Leading-order fidelity deficit of the constellation state, by direct summation.

    Sum over surviving rays Delta = L, 2L, ... of |element|^2 divided by the
    sum of the two diagonal weights it couples, truncated at the box edge.
    """
    cut = resolve_cutoff(params, cutoff, tail_tol)
    period = 2 ** int(ell)
    diag = diag_probability_grid(params, cut)
    total = 0.0
    for d in range(period, cut + 1, period):
        ray = coherence_ray_grid(params, d, cut)
        low = diag[: cut - d + 1, : cut - d + 1]
        high = diag[d:, d:]
        denom = low + high
        # cells where the diagonal law underflowed carry no ray weight either
        with np.errstate(divide="ignore", invalid="ignore"):
            quot = np.where(denom > 0.0, ray * ray / denom, 0.0)
        total += float(quot.sum())
    return total


def direct_entropy_series(params: ChannelParams, ell: int,
                          cutoff: int | None = None,
                          tail_tol: float = 1e-12) -> float:
    """Leading-order entropy gap S(dephased) - S(constellation), by direct summation.

    Each ray element is weighted by the reciprocal logarithmic mean
    (ln p' - ln p)/(p' - p) of the two diagonal weights it couples; the
    degenerate limit uses 1/p.
    """
    cut = resolve_cutoff(params, cutoff, tail_tol)
    period = 2 ** int(ell)
    diag = diag_probability_grid(params, cut)
    total = 0.0
    for d in range(period, cut + 1, period):
        ray = coherence_ray_grid(params, d, cut)
        low = diag[: cut - d + 1, : cut - d + 1]
        high = diag[d:, d:]
        gap = high - low
        with np.errstate(divide="ignore", invalid="ignore"):
            factor = (np.log(high) - np.log(low)) / gap
            degenerate = np.abs(gap) < LOG_MEAN_DEGENERACY * low
            factor = np.where(degenerate, 1.0 / low, factor)
            weighted = np.where(low > 0.0, ray * ray * factor, 0.0)
        total += float(weighted.sum())
    return total
