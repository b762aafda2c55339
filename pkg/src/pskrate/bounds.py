"""Closed-form rate bounds and the quantum-advantage ratios.

Four families of results are evaluated here:

* a convergence bound on the fidelity between the finite-constellation state
  and its continuous-phase limit, with modulation base x = eta n_s / (1+n_t);
* the trace-distance bound obtained from it through the standard
  fidelity/trace-distance inequality (a derived, not quoted, constant);
* a continuity penalty bounding how much Holevo information a finite
  constellation can lose relative to the continuous limit, written as a
  quartic-polynomial-weighted geometric series in Q^L with Q = c^2 / D and
  D = 1 - a - b + ab - abz;
* a fully closed-form lower bound on the continuous-limit Holevo
  information, transcribed twice with different structure so the two copies
  can police each other.

Two of the penalty polynomials are printed ambiguously in the source
material (an (a-b) factor where the siblings have (1-b)); both readings are
implemented behind the `variant` switch, and an independent reconstruction
from the proof-side coefficients is exposed as the `proof_form`.

Masked evaluations raise MaskedPointError with a reason code; bound_report
catches these and records explicit nulls instead of values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import fockstate
from .channel import (ChannelParams, ReducedParams, conditional_entropy, reduced,
                      reference_capacities, validity_check)
from .errors import (C_CLASSICAL_ZERO, LEMMA1_INVALID, NT_LE_ETA, Q_GE_1,
                     DomainError, MaskedPointError)
from .special import g_entropy

P_VARIANTS = ("printed", "symmetrized")


def modulation_base(params: ChannelParams) -> float:
    """Decay base x = eta n_s / (1 + n_t) of all convergence bounds."""
    return params.eta * params.n_s / (1.0 + params.n_t)


def _require_valid(params: ChannelParams) -> None:
    if not validity_check(params).valid:
        raise MaskedPointError(LEMMA1_INVALID,
                               f"convergence hypothesis fails at n_t={params.n_t}")


@dataclass(frozen=True)
class FidelityGapBound:
    """Leading fidelity-deficit bound plus the size of the unquantified remainder."""
    leading: float
    remainder_magnitude: float


def fidelity_gap_bound(params: ChannelParams, ell: int) -> FidelityGapBound:
    """|1 - F| <= x^L / (1 - x^L) for L = 2**ell, with the x^(3L/2) remainder scale.

    The remainder magnitude is reported separately and never added: its
    constant is unknown.
    """
    _require_valid(params)
    if ell < 0:
        raise DomainError(f"ell must be >= 0, got {ell}")
    x = modulation_base(params)
    xl = x ** (2 ** ell)
    return FidelityGapBound(leading=xl / (1.0 - xl),
                            remainder_magnitude=x ** (1.5 * 2 ** ell))


def trace_distance_bound(params: ChannelParams, ell: int) -> float:
    """||rho_L - rho_dephased||_1 <= 2 sqrt(x^L / (1 - x^L)), L = 2**ell >= 2."""
    if ell < 1:
        raise DomainError(f"trace-distance bound needs ell >= 1, got {ell}")
    return 2.0 * math.sqrt(fidelity_gap_bound(params, ell).leading)


def c_coefficients(rp: ReducedParams) -> tuple[float, float, float, float]:
    """Proof-side polynomial weights (C0, C2, C3, C4); the linear weight is absent."""
    a, b, z = rp.a, rp.b, rp.z
    ab = a * b
    d0 = 1.0 - a - b + ab - ab * z
    c0 = d0 * d0
    c2 = (4.0 * (1 - a) ** 2 * (1 - b) ** 2
          + 4.0 * (1 - a) * (1 - b) * (1.0 - 3.0 * ab) * z
          + (1.0 + a + b - 6.0 * ab - 3.0 * a * ab - 3.0 * b * ab + 13.0 * ab * ab) * z ** 2
          + (6.0 - a - b - 6.0 * ab) * ab * z ** 3
          + ab * ab * z ** 4)
    c3 = (4.0 * (1 - a) * (1 - b) * (a + b - 2.0 * ab) * z
          + (3.0 * a + 3.0 * b - 13.0 * a * ab - 13.0 * b * ab + 20.0 * ab * ab) * z ** 2
          + (8.0 * ab + a * ab + b * ab - 16.0 * ab * ab) * z ** 3
          + 4.0 * ab * ab * z ** 4)
    c4 = (a + b - 2.0 * ab * (1.0 - z)) ** 2 * z ** 2
    return c0, c2, c3, c4


def p_coefficients(rp: ReducedParams, big_l: float, variant: str = "printed"):
    """Quartic penalty polynomials (P0..P4) in the constellation size L.

    variant="printed" keeps the (a-b) factors exactly as printed in two of
    the polynomials; variant="symmetrized" replaces them with the (1-b) of
    their siblings.  The constant term of P0 is read as D^2 in both (its
    printed form contains an unevaluable token).
    """
    if variant not in P_VARIANTS:
        raise DomainError(f"unknown polynomial variant {variant!r}")
    a, b, z = rp.a, rp.b, rp.z
    ab = a * b
    sub = (1.0 - b) if variant == "symmetrized" else (a - b)
    d0 = 1.0 - a - b + ab - ab * z
    dsq = d0 * d0

    p0 = (dsq
          + (4.0 * (1 - a) ** 2 * (1 - b) ** 2
             - 4.0 * (1 - a) * (1 - b) * (-1.0 + 3.0 * ab) * z
             + (13.0 * ab * ab - 3.0 * a * ab - 3.0 * b * ab - 6.0 * ab + a + b + 1.0) * z ** 2
             + (-6.0 * ab * ab - a * ab - b * ab + 6.0 * ab) * z ** 3
             + ab * ab * z ** 4) * big_l ** 2
          + (4.0 * (1 - a) * (1 - b) * (a + b - 2.0 * ab) * z
             + (20.0 * ab * ab - 13.0 * a * ab - 13.0 * b * ab + 3.0 * a + 3.0 * b) * z ** 2
             + (ab * (-16.0 * ab + a + b + 8.0)) * z ** 3
             + 4.0 * ab * ab * z ** 4) * big_l ** 3
          + ((2.0 * ab * z - 2.0 * ab + a + b) ** 2 * z ** 2) * big_l ** 4)

    p1 = (-4.0 * dsq
          + (-4.0 * (1 - a) ** 2 * (1 - b) ** 2
             + 4.0 * (1 - a) * (1 - b) * (3.0 * ab - 1.0) * z
             + (-13.0 * ab * ab + 3.0 * a * ab + 3.0 * b * ab + 6.0 * ab - a - b - 1.0) * z ** 2
             + (ab * (6.0 * ab + a + b - 6.0)) * z ** 3
             - ab * ab * z ** 4) * big_l ** 2
          + (12.0 * (1 - a) * (1 - b) * (a + b - 2.0 * ab) * z
             + (60.0 * ab * ab - 39.0 * a * ab - 39.0 * b * ab + 9.0 * a + 9.0 * b) * z ** 2
             + (3.0 * ab * (a + b - 16.0 * ab + 8.0)) * z ** 3
             + 12.0 * ab * ab * z ** 4) * big_l ** 3
          + (11.0 * (-2.0 * ab + a + b) ** 2 * z ** 2
             + 44.0 * ab * (-2.0 * ab + a + b) * z ** 3
             + 44.0 * ab * ab * z ** 4) * big_l ** 4)

    p2 = (6.0 * dsq
          + (-4.0 * (1 - a) ** 2 * (1 - b) ** 2
             + 4.0 * (1 - a) * sub * (3.0 * ab - 1.0) * z
             + (-13.0 * ab * ab + 3.0 * a * ab + 3.0 * b * ab + 6.0 * ab - a - b - 1.0) * z ** 2
             + ab * (6.0 * ab + a + b - 6.0) * z ** 3
             - ab * ab * z ** 4) * big_l ** 2
          + (12.0 * (1 - a) * sub * (a + b - 2.0 * ab) * z
             + (60.0 * ab * ab - 39.0 * a * ab - 39.0 * b * ab + 9.0 * a + 9.0 * b) * z ** 2
             + 3.0 * ab * (-16.0 * ab + a + b + 8.0) * z ** 3
             + 12.0 * ab * ab * z ** 4) * big_l ** 3
          + (11.0 * (-2.0 * ab + a + b) ** 2 * z ** 2
             + 44.0 * ab * (-2.0 * ab + a + b) * z ** 3
             + 44.0 * ab * ab * z ** 4) * big_l ** 4)

    p3 = (-4.0 * dsq
          + (4.0 * (1 - a) ** 2 * sub ** 2
             - 4.0 * (1 - a) * sub * (-1.0 + 3.0 * ab) * z
             + (13.0 * ab * ab - 3.0 * a * ab - 3.0 * b * ab - 6.0 * ab + a + b + 1.0) * z ** 2
             + (-6.0 * ab * ab - a * ab - b * ab + 6.0 * ab) * z ** 3
             + ab * ab * z ** 4) * big_l ** 2
          + (4.0 * (1 - a) * (1 - b) * (2.0 * ab - a - b) * z
             + (-20.0 * ab * ab + 13.0 * a * ab + 13.0 * b * ab - 3.0 * a - 3.0 * b) * z ** 2
             + (16.0 * ab * ab - a * ab - b * ab - 8.0 * ab) * z ** 3
             - 4.0 * ab * ab * z ** 4) * big_l ** 3
          + ((2.0 * ab * z - 2.0 * ab + a + b) ** 2 * z ** 2) * big_l ** 4)

    p4 = dsq
    return p0, p1, p2, p3, p4


def _penalty_pieces(params: ChannelParams, ell: int):
    _require_valid(params)
    if ell < 0:
        raise DomainError(f"ell must be >= 0, got {ell}")
    rp = reduced(params)
    denom = 1.0 - rp.a - rp.b + rp.a * rp.b - rp.a * rp.b * rp.z
    q_ratio = rp.c * rp.c / denom
    ql = q_ratio ** (2 ** ell)
    if not ql < 1.0:
        raise MaskedPointError(Q_GE_1, f"penalty series diverges: Q^L = {ql}")
    return rp, denom, q_ratio, ql


def continuity_penalty(params: ChannelParams, ell: int, variant: str = "printed") -> float:
    """Holevo-information penalty of the 2**ell constellation versus the continuous limit."""
    rp, denom, q_ratio, ql = _penalty_pieces(params, ell)
    big_l = float(2 ** ell)
    poly = p_coefficients(rp, big_l, variant)
    series = sum(poly[i] * q_ratio ** (i * 2 ** ell) for i in range(5))
    return rp.d * ql / (denom ** 3 * (1.0 - ql) ** 5) * series


def continuity_penalty_proof_form(params: ChannelParams, ell: int) -> float:
    """Same penalty rebuilt from the proof-side coefficients and exact geometric sums.

    Sums q^k, k^2 q^k, k^3 q^k, k^4 q^k over k >= 1 in closed form with
    q = Q^L; independent of the printed quartic polynomials, so it
    adjudicates their ambiguous tokens.
    """
    rp, denom, _, q = _penalty_pieces(params, ell)
    big_l = float(2 ** ell)
    c0, c2, c3, c4 = c_coefficients(rp)
    s0 = q / (1.0 - q)
    s2 = q * (1.0 + q) / (1.0 - q) ** 3
    s3 = q * (1.0 + 4.0 * q + q * q) / (1.0 - q) ** 4
    s4 = q * (1.0 + 11.0 * q + 11.0 * q * q + q ** 3) / (1.0 - q) ** 5
    return rp.d / denom ** 3 * (c0 * s0 + c2 * big_l ** 2 * s2
                                + c3 * big_l ** 3 * s3 + c4 * big_l ** 4 * s4)


def _require_closed_form_domain(params: ChannelParams) -> None:
    _require_valid(params)
    if not params.n_t > params.eta:
        raise MaskedPointError(NT_LE_ETA,
                               f"closed form needs n_t > eta, got n_t={params.n_t}, eta={params.eta}")


def mixed_entropy_lower_bound(params: ChannelParams) -> float:
    """Closed-form lower bound on the entropy of the dephased state, in nats.

    Transcribed term by term, one expression per displayed line group.  Only
    defined on the validity region with n_t > eta (real logarithms).
    """
    _require_closed_form_domain(params)
    e, s, t = params.eta, params.n_s, params.n_t
    s1 = s + 1.0
    w = t + 1.0
    q = t + e * s + 1.0
    u = e * s + 1.0

    t1 = math.log(s1 * t * (t - e + 1.0) / (t - e))
    t2 = s * math.log(s1 / s)
    t3 = s * math.log(t / (t - e))
    t4 = (e * s + t) * math.log((t - e + 1.0) / (t - e))
    t5 = math.log((w * (e - t)) / (t * (e - t - 1.0))) * ((e + 1.0) * s + t + 1.0)

    bracket6 = (1.0
                - 1.0 / s1 ** 2
                + 2.0 * e / (s1 ** 2 * w ** 3)
                + (-1.0 - 2.0 * e) / (s1 ** 2 * w ** 2)
                + 2.0 / (s1 ** 2 * w)
                - 2.0 * e * s1 / q ** 3
                + (2.0 * e + 2.0 * e * s + 1.0) / q ** 2
                - 2.0 / q)
    t6 = -s * math.log(3.0 + e / (t * (t - e + 1.0))) * bracket6

    bracket7 = (-1.0 - e - 2.0 * (e + 1.0) * s
                + (e + 1.0) / s1 ** 2
                - s * (s + 2.0) * t / s1 ** 2
                - 4.0 * e / (s1 ** 2 * w ** 3)
                + (3.0 * e + 2.0) / (s1 ** 2 * w ** 2)
                - 3.0 / (s1 ** 2 * w)
                - 6.0 * e ** 2 * s * s1 ** 2 / q ** 4
                + 4.0 * e * s1 * (s * (e + e * s + 2.0) + 1.0) / q ** 3
                - s1 * (3.0 * e + 8.0 * e * s + 2.0) / q ** 2
                + (4.0 * s + 3.0) / q)
    t7 = e * s / (e - 3.0 * (e - 1.0) * t + 3.0 * t ** 2) * bracket7

    bracket8 = (1.0 / s1 ** 2
                + (e - (e - 2.0) * e * s) / (t * u ** 3)
                + 2.0 * e / (s1 ** 2 * w ** 3)
                + (e - 1.0) / (s1 ** 2 * w ** 2)
                + e / (s1 ** 2 * w)
                - 2.0 * e * s1 / (u * q ** 3)
                + (-e + e ** 2 * s * s1 + 1.0) / (u ** 2 * q ** 2)
                + e * ((e - 2.0) * s - 1.0) / (u ** 3 * q))
    t8 = e * s / (e - t - 1.0) * bracket8

    bracket9 = ((1.0 - 2.0 * q) / q ** 2
                + (s * (2.0 * t * (-e + 2.0 * t + 3.0) + 2.0)
                   + s ** 2 * w ** 3
                   + (2.0 * t + 1.0) * w) / (s1 ** 2 * w ** 3))
    t9 = t * (-e + t + 1.0) / (e + 3.0 * t * (-e + t + 1.0)) * bracket9

    return t1 + t2 + t3 + t4 + t5 + t6 + t7 + t8 + t9


def mixed_entropy_lower_bound_alt(params: ChannelParams) -> float:
    """Second, structurally different transcription of the same closed form.

    Kept deliberately flat (no shared subexpressions with the primary copy)
    so a transcription slip in either version shows up as disagreement.
    Used by the verification harness; not part of the public evaluation path.
    """
    _require_closed_form_domain(params)
    E, S, T = params.eta, params.n_s, params.n_t
    total = math.log((S + 1) * T * (T - E + 1) / (T - E))
    total += S * math.log((S + 1) / S) + S * math.log(T / (T - E))
    total += (E * S + T) * math.log((T - E + 1) / (T - E))
    total += math.log(((T + 1) * (E - T)) / (T * (E - T - 1))) * ((E + 1) * S + T + 1)
    total -= S * math.log(3 + E / (T * (T - E + 1))) * (
        1
        - 1 / (S + 1) ** 2
        + 2 * E / ((S + 1) ** 2 * (T + 1) ** 3)
        + (-1 - 2 * E) / ((S + 1) ** 2 * (T + 1) ** 2)
        + 2 / ((S + 1) ** 2 * (T + 1))
        - 2 * E * (S + 1) / (T + E * S + 1) ** 3
        + (2 * E + 2 * E * S + 1) / (T + E * S + 1) ** 2
        - 2 / (T + E * S + 1))
    total += (E * S / (E - 3 * (E - 1) * T + 3 * T ** 2)) * (
        -1 - E - 2 * (E + 1) * S
        + (E + 1) / (S + 1) ** 2
        - S * (S + 2) * T / (S + 1) ** 2
        - 4 * E / ((S + 1) ** 2 * (T + 1) ** 3)
        + (3 * E + 2) / ((S + 1) ** 2 * (T + 1) ** 2)
        - 3 / ((S + 1) ** 2 * (T + 1))
        - 6 * E ** 2 * S * (S + 1) ** 2 / (E * S + T + 1) ** 4
        + 4 * E * (S + 1) * (S * (E + E * S + 2) + 1) / (E * S + T + 1) ** 3
        - (S + 1) * (3 * E + 8 * E * S + 2) / (E * S + T + 1) ** 2
        + (4 * S + 3) / (E * S + T + 1))
    total += (E * S / (E - T - 1)) * (
        1 / (S + 1) ** 2
        + (E - (E - 2) * E * S) / (T * (E * S + 1) ** 3)
        + 2 * E / ((S + 1) ** 2 * (T + 1) ** 3)
        + (E - 1) / ((S + 1) ** 2 * (T + 1) ** 2)
        + E / ((S + 1) ** 2 * (T + 1))
        - 2 * E * (S + 1) / ((E * S + 1) * (E * S + T + 1) ** 3)
        + (-E + E ** 2 * S * (S + 1) + 1) / ((E * S + 1) ** 2 * (E * S + T + 1) ** 2)
        + E * ((E - 2) * S - 1) / ((E * S + 1) ** 3 * (E * S + T + 1)))
    total += (T * (-E + T + 1) / (E + 3 * T * (-E + T + 1))) * (
        (1 - 2 * (E * S + T + 1)) / (E * S + T + 1) ** 2
        + (S * (2 * T * (-E + 2 * T + 3) + 2)
           + S ** 2 * (T + 1) ** 3
           + (2 * T + 1) * (T + 1)) / ((S + 1) ** 2 * (T + 1) ** 3))
    return total


def achievable_rate_closed_form(params: ChannelParams) -> float:
    """Closed-form lower bound on the continuous-modulation Holevo information.

    mixed_entropy_lower_bound minus the conditional entropy; can be negative
    (a vacuous but valid bound) for weak signals.
    """
    return mixed_entropy_lower_bound(params) - conditional_entropy(params)


def psk_achievable_rate(params: ChannelParams, ell: int, variant: str = "printed") -> float:
    """Guaranteed rate of the finite 2**ell constellation (unclamped).

    Closed-form continuous rate minus the continuity penalty; negative
    values are reported as-is, clamping happens only in the ratios.
    """
    return achievable_rate_closed_form(params) - continuity_penalty(params, ell, variant)


@dataclass(frozen=True)
class AdvantageRatio:
    ratio_psk: float
    ratio_optimal: float


def advantage_ratio(params: ChannelParams, ell: Optional[int] = None,
                    variant: str = "printed") -> AdvantageRatio:
    """Guaranteed and optimal multiplicative advantage over the unassisted capacity.

    ell = None rates the continuous limit; a negative guaranteed rate clamps
    to zero before division (a vacuous bound guarantees nothing).
    """
    caps = reference_capacities(params)
    if caps.c_classical <= 0.0:
        raise MaskedPointError(C_CLASSICAL_ZERO, "unassisted capacity vanishes")
    rate = achievable_rate_closed_form(params) if ell is None \
        else psk_achievable_rate(params, ell, variant)
    return AdvantageRatio(ratio_psk=max(rate, 0.0) / caps.c_classical,
                          ratio_optimal=caps.c_ea / caps.c_classical)


# --- one-point report -------------------------------------------------------

#: Column order of BoundReport.to_csv_row(); masked values are empty cells.
REPORT_FIELDS = (
    "eta", "n_s", "n_b", "n_t", "ell",
    "lemma1_valid", "validity_margin", "nt_gt_eta", "modulation_base",
    "fidelity_gap_bound", "fidelity_gap_remainder", "trace_distance_bound",
    "continuity_penalty", "continuity_penalty_printed",
    "continuity_penalty_symmetrized", "continuity_penalty_proof_form",
    "mixed_entropy_lower_bound", "closed_form_rate", "psk_rate",
    "holevo_numeric_continuous", "holevo_numeric_psk",
    "numeric_cutoff", "tail_tol",
    "c_ea", "c_classical", "ratio_psk", "ratio_optimal",
    "p_poly_variant", "masked_reasons", "oracle_residuals",
)


@dataclass
class BoundReport:
    """Full ledger for one parameter point: flags, bounds, numerics, masks."""
    eta: float
    n_s: float
    n_b: float
    n_t: float
    ell: Optional[int]
    lemma1_valid: bool
    validity_margin: float
    nt_gt_eta: bool
    modulation_base: float
    p_poly_variant: str
    tail_tol: float
    fidelity_gap_bound: Optional[float] = None
    fidelity_gap_remainder: Optional[float] = None
    trace_distance_bound: Optional[float] = None
    continuity_penalty: Optional[float] = None
    continuity_penalty_printed: Optional[float] = None
    continuity_penalty_symmetrized: Optional[float] = None
    continuity_penalty_proof_form: Optional[float] = None
    mixed_entropy_lower_bound: Optional[float] = None
    closed_form_rate: Optional[float] = None
    psk_rate: Optional[float] = None
    holevo_numeric_continuous: Optional[float] = None
    holevo_numeric_psk: Optional[float] = None
    numeric_cutoff: Optional[int] = None
    c_ea: Optional[float] = None
    c_classical: Optional[float] = None
    ratio_psk: Optional[float] = None
    ratio_optimal: Optional[float] = None
    masked_reasons: dict = field(default_factory=dict)
    oracle_residuals: dict = field(default_factory=dict)

    def to_flat_dict(self) -> dict:
        """Flat JSON-ready mapping; masked fields are explicit nulls."""
        out = {}
        for name in REPORT_FIELDS:
            value = getattr(self, name)
            out[name] = value
        return out

    def to_csv_row(self) -> list[str]:
        from .sweep import format_float  # shared fixed float formatting
        row = []
        for name in REPORT_FIELDS:
            value = getattr(self, name)
            if value is None:
                row.append("")
            elif isinstance(value, bool):
                row.append("true" if value else "false")
            elif isinstance(value, float):
                row.append(format_float(value))
            elif isinstance(value, dict):
                row.append(";".join(f"{k}={v}" for k, v in sorted(value.items())))
            else:
                row.append(str(value))
        return row


def _attempt(report: BoundReport, names, fn):
    """Run fn, storing MaskedPointError reasons under each field in names."""
    try:
        return fn()
    except MaskedPointError as exc:
        for name in names:
            report.masked_reasons[name] = exc.reason
        return None


def bound_report(params: ChannelParams, ell: Optional[int] = None, *,
                 cutoff: Optional[int] = None,
                 tail_tol: float = fockstate.DEFAULT_TAIL_TOL,
                 with_numeric: bool = True,
                 variant: str = "printed") -> BoundReport:
    """Evaluate every bound and (optionally) the truncated-state numerics at one point."""
    if variant not in P_VARIANTS:
        raise DomainError(f"unknown polynomial variant {variant!r}")
    validity = validity_check(params)
    report = BoundReport(
        eta=params.eta, n_s=params.n_s, n_b=params.n_b, n_t=params.n_t,
        ell=ell, lemma1_valid=validity.valid, validity_margin=validity.margin,
        nt_gt_eta=validity.nt_gt_eta, modulation_base=modulation_base(params),
        p_poly_variant=variant, tail_tol=tail_tol)

    caps = reference_capacities(params)
    report.c_ea = caps.c_ea
    report.c_classical = caps.c_classical

    mixed = _attempt(report, ("mixed_entropy_lower_bound", "closed_form_rate"),
                     lambda: mixed_entropy_lower_bound(params))
    if mixed is not None:
        report.mixed_entropy_lower_bound = mixed
        report.closed_form_rate = mixed - conditional_entropy(params)

    if ell is not None:
        gap = _attempt(report, ("fidelity_gap_bound", "fidelity_gap_remainder"),
                       lambda: fidelity_gap_bound(params, ell))
        if gap is not None:
            report.fidelity_gap_bound = gap.leading
            report.fidelity_gap_remainder = gap.remainder_magnitude
            if ell >= 1:
                report.trace_distance_bound = 2.0 * math.sqrt(gap.leading)
        for attr, var in (("continuity_penalty_printed", "printed"),
                          ("continuity_penalty_symmetrized", "symmetrized")):
            value = _attempt(report, (attr,),
                             lambda v=var: continuity_penalty(params, ell, v))
            if value is not None:
                setattr(report, attr, value)
        proof = _attempt(report, ("continuity_penalty_proof_form",),
                         lambda: continuity_penalty_proof_form(params, ell))
        if proof is not None:
            report.continuity_penalty_proof_form = proof
        selected = getattr(report, f"continuity_penalty_{variant}")
        if selected is not None:
            report.continuity_penalty = selected
        else:
            report.masked_reasons["continuity_penalty"] = \
                report.masked_reasons.get(f"continuity_penalty_{variant}", Q_GE_1)
        if report.closed_form_rate is not None and report.continuity_penalty is not None:
            report.psk_rate = report.closed_form_rate - report.continuity_penalty
        else:
            report.masked_reasons["psk_rate"] = (
                report.masked_reasons.get("closed_form_rate")
                or report.masked_reasons.get("continuity_penalty"))

    ratios = _attempt(report, ("ratio_psk", "ratio_optimal"),
                      lambda: advantage_ratio(params, ell, variant))
    if ratios is not None:
        report.ratio_optimal = ratios.ratio_optimal
        rate_field = "psk_rate" if ell is not None else "closed_form_rate"
        if getattr(report, rate_field) is not None:
            report.ratio_psk = ratios.ratio_psk
        else:
            report.masked_reasons["ratio_psk"] = report.masked_reasons[rate_field]

    if with_numeric:
        def run_numeric():
            if not validity.valid:
                raise MaskedPointError(LEMMA1_INVALID, "truncation needs the validity region")
            cut = fockstate.resolve_cutoff(params, cutoff, tail_tol)
            report.numeric_cutoff = cut
            report.holevo_numeric_continuous = fockstate.holevo_continuous(
                params, cut, tail_tol)
            if ell is not None:
                report.holevo_numeric_psk = fockstate.holevo_psk(params, ell, cut, tail_tol)
            return True
        names = ("holevo_numeric_continuous",) + (("holevo_numeric_psk",) if ell is not None else ())
        _attempt(report, names, run_numeric)
    return report
