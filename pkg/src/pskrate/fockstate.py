"""Phase-modulated TMSV output states on a truncated two-mode Fock lattice.

A fixed-phase output state has matrix elements only between basis pairs
(n1, n2) and (nbar1, nbar2) with n1 - nbar1 = n2 - nbar2 = Delta (the state
shifts both modes together).  Averaging over an L-point phase constellation
keeps only rays with Delta a multiple of L = 2**ell, and the continuous
average keeps only the diagonal.  This module builds those states exactly on
an [0, cutoff]^2 box, organizes them into Hermitian blocks keyed by
(n1 - n2, n1 mod L) - the finest decomposition the selection rule allows -
and computes von Neumann entropies and Holevo information from per-block
eigendecompositions.

At theta = 0 the state is real symmetric; elements with Delta < 0 are
obtained by symmetry rather than re-deriving the coefficient formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelParams, conditional_entropy, reduced
from .errors import DomainError, NumericsError
from .special import log_hyp2f1_terminating

DEFAULT_TAIL_TOL = 1e-12
CUTOFF_CAP = 256
# Eigenvalues this far below zero indicate a construction bug, not rounding.
EIG_CLAMP = 1e-9
HERMITICITY_TOL = 1e-13


def envelopes(params: ChannelParams) -> tuple[float, float]:
    """Geometric decay envelopes (A, B) of the diagonal law: p <= d A^n1 B^n2."""
    rp = reduced(params)
    s = math.sqrt(rp.z)
    return rp.a * (1.0 + s), rp.b * (1.0 + s)


def tail_bound(params: ChannelParams, cutoff: int) -> float:
    """Upper bound on the diagonal probability mass outside the cutoff box."""
    env_a, env_b = envelopes(params)
    if env_a >= 1.0 or env_b >= 1.0:
        raise DomainError(
            "tail envelopes are not summable (a or b envelope >= 1); "
            "check validity_check(params) before truncating")
    return (env_a ** (cutoff + 1) + env_b ** (cutoff + 1)) / ((1.0 - env_a) * (1.0 - env_b))


def truncation_cutoff(params: ChannelParams, tail_tol: float) -> int:
    """Smallest per-mode cutoff whose envelope tail bound is <= tail_tol."""
    if not 0 < tail_tol < 1:
        raise DomainError(f"tail_tol must lie in (0, 1), got {tail_tol}")
    env_a, env_b = envelopes(params)
    if env_a >= 1.0 or env_b >= 1.0:
        raise DomainError(
            "tail envelopes are not summable (a or b envelope >= 1); "
            "check validity_check(params) before truncating")
    # Invert the dominant envelope for a starting guess, then settle exactly.
    env = max(env_a, env_b)
    prefac = 1.0 / ((1.0 - env_a) * (1.0 - env_b))
    guess = int(math.log(tail_tol / (2.0 * prefac)) / math.log(env)) if env > 0 else 1
    n = max(1, guess - 2)
    while tail_bound(params, n) > tail_tol:
        n += 1
    while n > 1 and tail_bound(params, n - 1) <= tail_tol:
        n -= 1
    return n


def resolve_cutoff(params: ChannelParams, cutoff: int | None = None,
                   tail_tol: float = DEFAULT_TAIL_TOL,
                   allow_large: bool = False) -> int:
    """Pick a box size: the caller's, or the tail-driven one capped at 256."""
    if cutoff is not None:
        if cutoff < 1:
            raise DomainError(f"cutoff must be >= 1, got {cutoff}")
        if cutoff > CUTOFF_CAP and not allow_large:
            raise DomainError(
                f"cutoff {cutoff} exceeds the per-mode cap {CUTOFF_CAP}; pass allow_large=True")
        return cutoff
    needed = truncation_cutoff(params, tail_tol)
    if needed > CUTOFF_CAP and not allow_large:
        return CUTOFF_CAP
    return needed


def lambda_element(params: ChannelParams, n1: int, n2: int, nbar1: int, nbar2: int) -> float:
    """Matrix element <n1, n2| rho_0 |nbar1, nbar2> of the fixed-phase output state.

    Zero unless both mode indices shift by the same Delta.  The factorial
    ratio, geometric factors and the 1/Delta! regularization are combined in
    log space so large indices cannot overflow.
    """
    for name, v in (("n1", n1), ("n2", n2), ("nbar1", nbar1), ("nbar2", nbar2)):
        if v < 0 or int(v) != v:
            raise DomainError(f"{name} must be a natural number, got {v}")
    if n1 - nbar1 != n2 - nbar2:
        return 0.0
    if n1 < nbar1:
        # Real symmetric state at theta = 0.
        n1, n2, nbar1, nbar2 = nbar1, nbar2, n1, n2
    delta = n1 - nbar1
    rp = reduced(params)
    log_f = log_hyp2f1_terminating(nbar1, nbar2, delta + 1, rp.z)
    log_pref = 0.5 * (math.lgamma(nbar1 + delta + 1) - math.lgamma(nbar1 + 1)
                      + math.lgamma(nbar2 + delta + 1) - math.lgamma(nbar2 + 1))
    log_pref += (nbar1 * math.log(rp.a) + nbar2 * math.log(rp.b)
                 + math.log(rp.d) - math.lgamma(delta + 1))
    if delta > 0:
        log_pref += delta * math.log(rp.c)
    return math.exp(log_pref + log_f)


def rotated_element(params: ChannelParams, theta: float,
                    n1: int, n2: int, nbar1: int, nbar2: int) -> complex:
    """Element of the phase-theta output state: e^{i theta (n1-nbar1)} times the theta=0 one."""
    base = lambda_element(params, n1, n2, nbar1, nbar2)
    if base == 0.0:
        return 0.0 + 0.0j
    return complex(math.cos(theta * (n1 - nbar1)), math.sin(theta * (n1 - nbar1))) * base


def p_diag(params: ChannelParams, n1: int, n2: int) -> float:
    """Diagonal probability p(n1, n2) of the dephased state (terminating form)."""
    return lambda_element(params, n1, n2, n1, n2)


def p_diag_nonterminating(params: ChannelParams, n1: int, n2: int) -> float:
    """Alternate printed form of p(n1, n2) via the non-terminating series.

    Positive only for n_t > eta; used as a cross-check of the terminating
    form, never as the construction path.
    """
    from .special import hyp2f1_nonterminating  # local import keeps module deps one-way

    eta, n_s, n_t = params.eta, params.n_s, params.n_t
    if n_t <= eta:
        raise DomainError("non-terminating diagonal form requires n_t > eta")
    rp = reduced(params)
    pref = (n_t - eta) / ((n_t - eta + 1.0) * n_t * (1.0 + n_s))
    r1 = (n_t - eta) / (n_t - eta + 1.0)
    r2 = n_s * (n_t - eta) / ((1.0 + n_s) * n_t)
    return pref * r1 ** n1 * r2 ** n2 * hyp2f1_nonterminating(n1 + 1, n2 + 1, 1, rp.z)


def _lgamma_table(n: int) -> np.ndarray:
    return np.array([math.lgamma(k + 1.0) for k in range(n + 1)])


def coherence_ray_grid(params: ChannelParams, delta: int, cutoff: int) -> np.ndarray:
    """All elements lambda(n1+delta, n2+delta; n1, n2) with n_i + delta <= cutoff.

    Returns a (cutoff-delta+1)^2 array indexed by the lower pair (n1, n2).
    delta = 0 reproduces the diagonal law.  Vectorized counterpart of
    lambda_element: the hypergeometric factors are built by one shared term
    recurrence over the whole grid.
    """
    if delta < 0 or delta > cutoff:
        raise DomainError(f"need 0 <= delta <= cutoff, got delta={delta}, cutoff={cutoff}")
    rp = reduced(params)
    m = cutoff - delta
    n = np.arange(m + 1, dtype=float)
    n1 = n[:, None]
    n2 = n[None, :]
    f = np.zeros((m + 1, m + 1))
    term = np.ones((m + 1, m + 1))
    for k in range(m + 1):
        f += term
        term = term * (n1 - k) * (n2 - k) * (rp.z / ((delta + 1.0 + k) * (k + 1.0)))
        np.maximum(term, 0.0, out=term)  # series terminates exactly at k = min(n1, n2)
    if not np.all(np.isfinite(f)):
        raise NumericsError(
            f"hypergeometric grid overflowed at delta={delta}, cutoff={cutoff}; reduce the cutoff")
    lg = _lgamma_table(cutoff + 1)
    idx = np.arange(m + 1)
    half = 0.5 * (lg[idx + delta] - lg[idx])
    log_pref = (half[:, None] + half[None, :]
                + n1 * math.log(rp.a) + n2 * math.log(rp.b)
                + math.log(rp.d) - lg[delta])
    if delta > 0:
        log_pref = log_pref + delta * math.log(rp.c)
    return np.exp(log_pref + np.log(f))


def diag_probability_grid(params: ChannelParams, cutoff: int) -> np.ndarray:
    """p(n1, n2) over the full box, as one vectorized evaluation."""
    return coherence_ray_grid(params, 0, cutoff)


@dataclass
class TruncatedState:
    """Block-sparse Hermitian operator on the truncated two-mode Fock lattice.

    period is the constellation size L = 2**ell; period = 0 marks the fully
    dephased (diagonal) limit.  blocks maps (n1 - n2, n1 mod period) to a
    real symmetric matrix over the basis pairs listed in basis under the
    same key, sorted by n1.  For period = 0 the residue key degenerates to
    n1 itself and every block is 1x1.
    """
    cutoff: int
    period: int
    blocks: dict = field(repr=False)
    basis: dict = field(repr=False)
    tail_bound: float = 0.0

    def trace(self) -> float:
        return float(sum(np.trace(m) for m in self.blocks.values()))

    def element(self, n1: int, n2: int, nbar1: int, nbar2: int) -> float:
        """Stored element, 0.0 for positions outside the block structure."""
        for v in (n1, n2, nbar1, nbar2):
            if v < 0 or v > self.cutoff:
                raise DomainError(f"index {v} outside the [0, {self.cutoff}] box")
        if n1 - n2 != nbar1 - nbar2:
            return 0.0
        key = (n1 - n2, n1 % self.period if self.period else n1)
        if key not in self.blocks or (self.period == 0 and n1 != nbar1):
            return 0.0
        rows = self.basis[key]
        try:
            i = rows.index((n1, n2))
            j = rows.index((nbar1, nbar2))
        except ValueError:
            return 0.0
        return float(self.blocks[key][i, j])

    def iter_entries(self):
        """Yield (n1, n2, nbar1, nbar2, value) for every stored entry."""
        for key in sorted(self.blocks):
            rows = self.basis[key]
            mat = self.blocks[key]
            for i, (n1, n2) in enumerate(rows):
                for j, (m1, m2) in enumerate(rows):
                    yield n1, n2, m1, m2, float(mat[i, j])


def _block_keys(cutoff: int, period: int):
    for dm in range(-cutoff, cutoff + 1):
        lo = max(0, dm)
        hi = min(cutoff, cutoff + dm)
        for r in range(period):
            start = lo + ((r - lo) % period)
            if start <= hi:
                yield (dm, r), start, hi


def build_psk_state(params: ChannelParams, ell: int, cutoff: int | None = None,
                    tail_tol: float = DEFAULT_TAIL_TOL,
                    allow_large: bool = False) -> TruncatedState:
    """Phase-averaged output state for a 2**ell-point constellation.

    Populates every ray with Delta a multiple of L = 2**ell inside the box
    and assembles the (n1 - n2, n1 mod L) blocks.  ell = 0 is the
    unmodulated Gaussian state (all rays); large ell degenerates to the
    diagonal state once L exceeds the cutoff.
    """
    if ell < 0 or int(ell) != ell:
        raise DomainError(f"ell must be a natural number, got {ell}")
    cut = resolve_cutoff(params, cutoff, tail_tol, allow_large)
    period = 2 ** int(ell)
    rays = {d: coherence_ray_grid(params, d, cut) for d in range(0, cut + 1, period)}

    blocks: dict = {}
    basis: dict = {}
    for key, start, hi in _block_keys(cut, period):
        dm = key[0]
        n1s = list(range(start, hi + 1, period))
        m = len(n1s)
        mat = np.zeros((m, m))
        for t in range(0, m):
            d = t * period
            ray = rays[d]
            lower = np.arange(start, start + (m - t) * period, period)
            vals = ray[lower, lower - dm]
            rows = np.arange(t, m)
            cols = np.arange(0, m - t)
            mat[rows, cols] = vals
            if t > 0:
                mat[cols, rows] = vals
        blocks[key] = mat
        basis[key] = [(n1, n1 - dm) for n1 in n1s]
    return TruncatedState(cutoff=cut, period=period, blocks=blocks, basis=basis,
                          tail_bound=tail_bound(params, cut))


def build_dephased_state(params: ChannelParams, cutoff: int | None = None,
                         tail_tol: float = DEFAULT_TAIL_TOL,
                         allow_large: bool = False) -> TruncatedState:
    """Continuous-phase average: diagonal state with the p(n1, n2) law."""
    cut = resolve_cutoff(params, cutoff, tail_tol, allow_large)
    grid = diag_probability_grid(params, cut)
    blocks: dict = {}
    basis: dict = {}
    for n1 in range(cut + 1):
        for n2 in range(cut + 1):
            key = (n1 - n2, n1)
            blocks[key] = np.array([[grid[n1, n2]]])
            basis[key] = [(n1, n2)]
    return TruncatedState(cutoff=cut, period=0, blocks=blocks, basis=basis,
                          tail_bound=tail_bound(params, cut))


@dataclass(frozen=True)
class EntropyResult:
    """Entropy in nats plus the truncation and clamping diagnostics."""
    entropy: float
    truncation_tail: float
    negative_eig_floor: float


def von_neumann_entropy(state: TruncatedState) -> EntropyResult:
    """-tr(rho ln rho) from dense eigendecomposition of each block.

    Eigenvalues in (-1e-9, 0) are clamped to zero (recorded in
    negative_eig_floor); anything more negative means the construction is
    broken and raises.  Summation order is fixed by sorted block keys and
    exact (fsum), so the result is schedule-independent.
    """
    terms = []
    floor = 0.0
    for key in sorted(state.blocks):
        mat = state.blocks[key]
        if mat.shape[0] == 1:
            eigs = mat[0]
        else:
            skew = float(np.max(np.abs(mat - mat.T)))
            if skew > HERMITICITY_TOL:
                raise NumericsError(f"block {key} deviates from symmetry by {skew}")
            eigs = np.linalg.eigvalsh(mat)
        for lam in eigs:
            lam = float(lam)
            if lam < 0.0:
                if lam <= -EIG_CLAMP:
                    raise NumericsError(f"block {key} eigenvalue {lam} below the clamp threshold")
                floor = min(floor, lam)
                continue
            if lam > 0.0:
                terms.append(-lam * math.log(lam))
    entropy = math.fsum(terms)
    if entropy < 0.0:
        raise NumericsError(f"negative entropy {entropy}")
    return EntropyResult(entropy=entropy, truncation_tail=state.tail_bound,
                         negative_eig_floor=floor)


def holevo_psk(params: ChannelParams, ell: int, cutoff: int | None = None,
               tail_tol: float = DEFAULT_TAIL_TOL, allow_large: bool = False) -> float:
    """Holevo information of the 2**ell-point constellation, in nats.

    S(averaged state) - S(conditional state); slightly negative values
    (>= -1e-6) can appear through truncation alone and are reported as-is.
    """
    state = build_psk_state(params, ell, cutoff, tail_tol, allow_large)
    return von_neumann_entropy(state).entropy - conditional_entropy(params)


def holevo_continuous(params: ChannelParams, cutoff: int | None = None,
                      tail_tol: float = DEFAULT_TAIL_TOL, allow_large: bool = False) -> float:
    """Holevo information of the continuously phase-modulated source, in nats."""
    cut = resolve_cutoff(params, cutoff, tail_tol, allow_large)
    grid = diag_probability_grid(params, cut)
    positive = grid[grid > 0.0]
    entropy = float(-(positive * np.log(positive)).sum())
    return entropy - conditional_entropy(params)


def hs_perturbation_norm_sq(params: ChannelParams, ell: int,
                            cutoff: int | None = None,
                            tail_tol: float = DEFAULT_TAIL_TOL,
                            allow_large: bool = False) -> float:
    """Squared Hilbert-Schmidt norm of the off-ray part of the constellation state.

    2 * sum over Delta = L, 2L, ... of the squared coherences inside the box;
    zero once L exceeds the cutoff.
    """
    cut = resolve_cutoff(params, cutoff, tail_tol, allow_large)
    period = 2 ** int(ell)
    total = 0.0
    for d in range(period, cut + 1, period):
        ray = coherence_ray_grid(params, d, cut)
        total += 2.0 * float((ray * ray).sum())
    return total


def dump_state_csv(state: TruncatedState, fh) -> None:
    """Write (n1, n2, nbar1, nbar2, value) rows in lexicographic order."""
    rows = sorted(state.iter_entries())
    fh.write("n1,n2,nbar1,nbar2,value\n")
    for n1, n2, m1, m2, v in rows:
        fh.write(f"{n1},{n2},{m1},{m2},{v:.17g}\n")
