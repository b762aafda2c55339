"""Self-verification harness behind the `verify` CLI subcommand.

Every check pits an analytic path against an independent one: coefficient
formulas against the dense channel simulation, closed-form bounds against
directly summed perturbation series, entropies against the Gaussian
formula, and the long closed-form transcription against its structural
duplicate.  Checks report PASS/FAIL with their worst residual; consistency
statements that carry an unquantified higher-order remainder (the
continuity-penalty dominance and the monotonicity of the constellation
Holevo information) report WARN instead of FAIL.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import bounds, fockstate, oracle, special
from .channel import (conditional_entropy, make_params, symplectic_mu,
                      symplectic_mu_numeric, validity_check)

QUICK_POINTS = [(0.1, 0.5, 2.0), (0.3, 0.2, 1.0), (0.05, 1.0, 4.0)]
PASS, FAIL, WARN = "PASS", "FAIL", "WARN"


@dataclass
class CheckResult:
    name: str
    status: str
    residual: float
    detail: str = ""

    def line(self) -> str:
        return f"[{self.status}] {self.name:34s} residual={self.residual:.3e} {self.detail}"


def _result(name, ok, residual, detail="", warn_only=False):
    if ok:
        status = PASS
    else:
        status = WARN if warn_only else FAIL
    return CheckResult(name=name, status=status, residual=float(residual), detail=detail)


def check_oracle_elements(points=QUICK_POINTS, cutoff=6, tol=1e-8, element_fn=None):
    """Analytic matrix elements vs the dense channel simulation, all indices in the box.

    element_fn is injectable so a corrupted formula demonstrably fails.
    """
    element_fn = element_fn or fockstate.lambda_element
    worst = 0.0
    where = ""
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        sim = oracle.simulate_channel_output(params, 0.0, cutoff)
        for n1 in range(cutoff + 1):
            for n2 in range(cutoff + 1):
                for m1 in range(cutoff + 1):
                    for m2 in range(cutoff + 1):
                        got = element_fn(params, n1, n2, m1, m2)
                        ref = sim.element(n1, n2, m1, m2).real
                        err = abs(got - ref)
                        if err > worst:
                            worst = err
                            where = f"at eta={eta} ({n1},{n2},{m1},{m2})"
    return _result("oracle_matrix_elements", worst <= tol, worst, where)


def check_normalization(points=QUICK_POINTS, tol=1e-12):
    """Auto-truncated diagonal mass must reach 1 - tol."""
    worst = 0.0
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        cut = fockstate.truncation_cutoff(params, tol)
        total = float(fockstate.diag_probability_grid(params, cut).sum())
        worst = max(worst, 1.0 - total)
    return _result("diagonal_normalization", worst <= tol, worst)


def check_diag_form_equivalence(points=QUICK_POINTS, tol=1e-10, indices=12):
    """Terminating vs non-terminating printed forms of p(n1, n2), where n_t > eta."""
    worst = 0.0
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        if params.n_t <= eta:
            continue
        for n1 in range(indices + 1):
            for n2 in range(indices + 1):
                p_term = fockstate.p_diag(params, n1, n2)
                p_alt = fockstate.p_diag_nonterminating(params, n1, n2)
                worst = max(worst, abs(p_term - p_alt) / p_term)
    return _result("diagonal_form_equivalence", worst <= tol, worst)


def check_symplectic(samples=100, tol=1e-10, seed=7):
    """Closed-form symplectic invariants vs the covariance-matrix spectrum."""
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        params = make_params(rng.uniform(0.01, 0.999),
                             10.0 ** rng.uniform(-3, 1),
                             10.0 ** rng.uniform(-2, 1))
        mu = symplectic_mu(params)
        lo, hi = symplectic_mu_numeric(params, theta=rng.uniform(0, 2 * math.pi))
        worst = max(worst, abs(mu.mu_minus - lo), abs(mu.mu_plus - hi))
    return _result("symplectic_invariants", worst <= tol, worst)


def check_gaussian_entropy(points=QUICK_POINTS, tol=1e-6, tail_tol=1e-12):
    """Block-eigendecomposition entropy of the unmodulated state vs the Gaussian formula."""
    worst = 0.0
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        state = fockstate.build_psk_state(params, 0, tail_tol=tail_tol)
        got = fockstate.von_neumann_entropy(state).entropy
        worst = max(worst, abs(got - conditional_entropy(params)))
    return _result("gaussian_entropy_crosscheck", worst <= tol, worst)


def check_fidelity_dominance(points=QUICK_POINTS, ells=(1, 2, 3, 4, 5)):
    """Closed-form fidelity bound must dominate the directly summed series."""
    margin = 0.0
    ok = True
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        if not validity_check(params).valid:
            continue
        for ell in ells:
            series = oracle.direct_fidelity_series(params, ell)
            bound = bounds.fidelity_gap_bound(params, ell).leading
            gap = series - bound
            margin = max(margin, gap)
            ok = ok and gap <= 0.0
    return _result("fidelity_bound_dominance", ok, margin)


def check_trace_distance_dominance(points=((0.1, 0.5, 2.0), (0.3, 0.2, 1.0)),
                                   ells=(1, 2), cutoff=14):
    """Trace-distance bound vs the dense trace norm of the actual difference."""
    margin = 0.0
    ok = True
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        for ell in ells:
            avg = oracle.psk_average(params, ell, cutoff)
            flat = oracle.dephase(avg)
            measured = oracle.trace_norm_diff(avg, flat)
            bound = bounds.trace_distance_bound(params, ell)
            gap = measured - bound
            margin = max(margin, gap)
            ok = ok and gap <= 0.0
    return _result("trace_distance_dominance", ok, margin)


def check_rate_dominance(etas=(0.1, 0.001), count=200, cutoff_cap=128, tol=1e-6, seed=11):
    """Central claim: closed-form rate <= numeric continuous Holevo information.

    Samples log-uniform points inside the validity region with n_t > eta and
    an affordable truncation, then requires zero violations beyond tol.
    """
    rng = random.Random(seed)
    worst = -math.inf
    checked = 0
    ok = True
    per_eta = count // len(etas)
    for eta in etas:
        found = 0
        while found < per_eta:
            n_s = 10.0 ** rng.uniform(-3, 1)
            n_t = 10.0 ** rng.uniform(-2, 1)
            if n_t <= eta:
                continue
            params = make_params(eta, n_s, n_t / (1.0 - eta))
            if not validity_check(params).valid:
                continue
            if fockstate.truncation_cutoff(params, 1e-12) > cutoff_cap:
                continue
            found += 1
            checked += 1
            closed = bounds.achievable_rate_closed_form(params)
            numeric = fockstate.holevo_continuous(params)
            gap = closed - numeric
            worst = max(worst, gap)
            ok = ok and gap <= tol
    return _result("closed_form_rate_dominance", ok, worst, f"({checked} points)")


def check_decomposition_identity(points=QUICK_POINTS):
    """closed_form + conditional entropy must equal the mixed-entropy bound exactly."""
    worst = 0.0
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        lhs = bounds.achievable_rate_closed_form(params) + conditional_entropy(params)
        rhs = bounds.mixed_entropy_lower_bound(params)
        worst = max(worst, abs(lhs - rhs))
    return _result("rate_decomposition_identity", worst <= 1e-12, worst)


def check_transcriptions(samples=1000, tol=1e-12, seed=3):
    """The two independent transcriptions of the closed form must agree."""
    rng = random.Random(seed)
    worst = 0.0
    done = 0
    while done < samples:
        eta = rng.uniform(0.001, 0.999)
        n_s = 10.0 ** rng.uniform(-3, 1)
        n_t = 10.0 ** rng.uniform(-2, 1)
        if n_t <= eta:
            continue
        params = make_params(eta, n_s, n_t / (1.0 - eta))
        if not validity_check(params).valid:
            continue
        a = bounds.mixed_entropy_lower_bound(params)
        b = bounds.mixed_entropy_lower_bound_alt(params)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
        done += 1
    return _result("closed_form_transcriptions", worst <= tol, worst)


def check_hyper_identities(tol=1e-10, seed=5):
    """Euler transform, terminating-series Gauss evaluation, binomial convolution.

    The z = 1 series is re-summed in exact rational arithmetic (the signed
    float sum cancels catastrophically at larger orders).
    """
    from fractions import Fraction

    rng = random.Random(seed)
    worst = 0.0
    for _ in range(200):
        n1, n2 = rng.randint(0, 30), rng.randint(0, 30)
        gamma = rng.randint(1, 5)
        z = rng.uniform(0.05, 0.95)
        lhs = special.hyp2f1_terminating(n1, n2, gamma, z)
        rhs = ((1.0 - z) ** (gamma + n1 + n2)
               * special.hyp2f1_nonterminating(gamma + n1, gamma + n2, gamma, z))
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
    for _ in range(200):
        n = rng.randint(0, 20)
        b = Fraction(rng.randint(-24, 24), 8)
        c = Fraction(rng.randint(4, 40), 8)
        direct = Fraction(0)
        term = Fraction(1)
        for k in range(n + 1):
            direct += term
            term *= Fraction(-(n - k)) * (b + k) / ((c + k) * (k + 1))
        cv = special.chu_vandermonde(n, float(b), float(c))
        worst = max(worst, abs(float(direct) - cv) / max(1.0, abs(cv)))
    for _ in range(100):
        r = rng.randint(0, 40)
        s = rng.randint(0, 40)
        n = rng.randint(0, min(40, r + s))
        lhs = sum(math.comb(r, k) * math.comb(s, n - k)
                  for k in range(max(0, n - s), min(r, n) + 1))
        worst = max(worst, abs(lhs - math.comb(r + s, n)) / math.comb(r + s, n))
    return _result("hypergeometric_identities", worst <= tol, worst)


def check_ratio_growth_bounds(alpha_max=50, zs=(0.05, 0.25, 0.5, 0.75, 0.95)):
    """Sampled containment for the consecutive-parameter ratio and growth bounds.

    Both bounds are attained with equality on part of the domain (alpha = 1,
    and alpha = beta = 1 respectively), so containment is asserted up to
    relative rounding slack.
    """
    ok = True
    margin = 0.0
    for z in zs:
        for alpha in range(1, alpha_max + 1, 7):
            for beta in range(1, alpha_max + 1, 7):
                base = special.hyp2f1_nonterminating(alpha, beta, 1, z)
                up = special.hyp2f1_nonterminating(alpha + 1, beta + 1, 1, z)
                lo, hi = special.f_ratio_bounds(alpha, beta, z)
                ratio = up / base
                viol = max((lo - ratio) / max(1.0, lo), (ratio - hi) / hi)
                margin = max(margin, viol)
                ok = ok and viol <= 1e-12
                growth = special.f_growth_bound(alpha, beta, z)
                viol2 = (up - growth) / growth
                margin = max(margin, viol2)
                ok = ok and viol2 <= 1e-12
    return _result("ratio_and_growth_bounds", ok, margin)


def check_penalty_consistency(points=QUICK_POINTS, ells=(1, 2, 3)):
    """WARN-level: penalty >= direct entropy series minus the cubic remainder slack.

    Checked for both polynomial variants wherever the off-ray norm is small
    enough for the expansion to mean anything.
    """
    worst = -math.inf
    ok = True
    lines = []
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        for ell in ells:
            norm_sq = fockstate.hs_perturbation_norm_sq(params, ell)
            if norm_sq ** 0.5 >= 0.1:
                continue
            series = oracle.direct_entropy_series(params, ell)
            slack = 10.0 * norm_sq ** 1.5
            for variant in bounds.P_VARIANTS:
                penalty = bounds.continuity_penalty(params, ell, variant)
                gap = (series - slack) - penalty
                worst = max(worst, gap)
                if gap > 0:
                    ok = False
                    lines.append(f"{variant}@eta={eta},l={ell}")
    detail = ("violations: " + ",".join(lines)) if lines else ""
    return _result("penalty_dominance", ok, worst, detail, warn_only=True)


def check_holevo_monotonicity(points=QUICK_POINTS, ells=(0, 1, 2, 3), tol=1e-8):
    """WARN-level: constellation Holevo information should grow with ell."""
    worst = -math.inf
    ok = True
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        cut = fockstate.resolve_cutoff(params)
        values = [fockstate.holevo_psk(params, ell, cut) for ell in ells]
        cont = fockstate.holevo_continuous(params, cut)
        for lo, hi in zip(values, values[1:] + [cont]):
            worst = max(worst, lo - hi)
            ok = ok and lo <= hi + tol
    return _result("holevo_monotonicity", ok, worst, warn_only=True)


def check_selection_rule(point=(0.1, 0.5, 2.0), trials=10000, seed=13):
    """Random index quadruples violating the shift rule must give exactly zero."""
    rng = random.Random(seed)
    params = make_params(*point)
    bad = 0
    for _ in range(trials):
        n1, n2, m1, m2 = (rng.randint(0, 30) for _ in range(4))
        if n1 - m1 == n2 - m2:
            continue
        if fockstate.lambda_element(params, n1, n2, m1, m2) != 0.0:
            bad += 1
    return _result("selection_rule", bad == 0, float(bad))


def check_hs_norm_recomputation(points=QUICK_POINTS, ells=(1, 2), tol=1e-12):
    """Off-ray norm from the formula vs recomputation from the assembled state."""
    worst = 0.0
    for (eta, n_s, n_b) in points:
        params = make_params(eta, n_s, n_b)
        cut = min(fockstate.resolve_cutoff(params), 60)
        for ell in ells:
            direct = fockstate.hs_perturbation_norm_sq(params, ell, cut)
            state = fockstate.build_psk_state(params, ell, cut)
            total = 0.0
            for mat in state.blocks.values():
                off = mat - np.diag(np.diag(mat))
                total += float((off * off).sum())
            rel = abs(direct - total) / max(direct, 1e-300)
            worst = max(worst, rel if direct > 0 else abs(direct - total))
    return _result("hs_norm_recomputation", worst <= tol, worst)


def check_convergence_slope(point=(0.1, 4.0, 1.0 / 0.9), ells=(1, 2, 3), slack=0.1):
    """Gap log-slope per unit constellation size vs the modulation base."""
    eta, n_s, n_b = point
    params = make_params(eta, n_s, n_b)
    cut = fockstate.resolve_cutoff(params)
    cont = fockstate.holevo_continuous(params, cut)
    gaps = []
    for ell in ells:
        gap = cont - fockstate.holevo_psk(params, ell, cut)
        gaps.append((2 ** ell, gap))
    ok = True
    worst = -math.inf
    target = math.log(bounds.modulation_base(params))
    for (l0, g0), (l1, g1) in zip(gaps, gaps[1:]):
        if g0 <= 1e-12 or g1 <= 1e-12:
            continue
        ok = ok and g1 < g0
        slope = (math.log(g1) - math.log(g0)) / (l1 - l0)
        excess = slope - (target + slack)
        worst = max(worst, excess)
        ok = ok and excess <= 0.0
    return _result("convergence_slope", ok, worst)


def run_checks(level: str = "quick", element_fn=None) -> list[CheckResult]:
    """Run the suite; `full` adds the dense/grid checks with bigger budgets."""
    quick = level == "quick"
    checks = [
        ("oracle_matrix_elements",
         lambda: check_oracle_elements(cutoff=4 if quick else 6, element_fn=element_fn)),
        ("diagonal_normalization", check_normalization),
        ("diagonal_form_equivalence", check_diag_form_equivalence),
        ("symplectic_invariants", lambda: check_symplectic(samples=30 if quick else 100)),
        ("gaussian_entropy_crosscheck",
         lambda: check_gaussian_entropy(tail_tol=1e-8 if quick else 1e-12)),
        ("fidelity_bound_dominance",
         lambda: check_fidelity_dominance(ells=(1, 2, 3) if quick else (1, 2, 3, 4, 5))),
        ("rate_decomposition_identity", check_decomposition_identity),
        ("closed_form_transcriptions",
         lambda: check_transcriptions(samples=100 if quick else 1000)),
        ("hypergeometric_identities", check_hyper_identities),
        ("ratio_and_growth_bounds", check_ratio_growth_bounds),
        ("selection_rule", check_selection_rule),
        ("penalty_dominance",
         lambda: check_penalty_consistency(ells=(1, 2) if quick else (1, 2, 3))),
    ]
    if not quick:
        checks += [
            ("trace_distance_dominance", check_trace_distance_dominance),
            ("closed_form_rate_dominance", lambda: check_rate_dominance(count=200)),
            ("holevo_monotonicity", check_holevo_monotonicity),
            ("hs_norm_recomputation", check_hs_norm_recomputation),
            ("convergence_slope", check_convergence_slope),
        ]
    results = []
    for name, fn in checks:
        try:
            results.append(fn())
        except Exception as exc:  # harness must report, not die
            results.append(CheckResult(name=name, status=FAIL, residual=math.inf,
                                       detail=f"{type(exc).__name__}: {exc}"))
    return results
