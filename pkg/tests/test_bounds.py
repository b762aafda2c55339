import json
import math
import random

import pytest

from pskrate import bounds, fockstate, oracle
from pskrate.bounds import (BoundReport, REPORT_FIELDS, achievable_rate_closed_form,
                            advantage_ratio, bound_report, c_coefficients,
                            continuity_penalty, continuity_penalty_proof_form,
                            fidelity_gap_bound, mixed_entropy_lower_bound,
                            mixed_entropy_lower_bound_alt, modulation_base,
                            p_coefficients, psk_achievable_rate, trace_distance_bound)
from pskrate.channel import conditional_entropy, make_params, reduced, validity_check
from pskrate.errors import LEMMA1_INVALID, NT_LE_ETA, DomainError, MaskedPointError


def random_closed_form_params(rng, eta_range=(0.001, 0.999)):
    """Rejection-sample a point inside the validity region with n_t > eta."""
    while True:
        eta = rng.uniform(*eta_range)
        n_s = 10 ** rng.uniform(-3, 1)
        n_t = 10 ** rng.uniform(-2, 1)
        if n_t <= eta:
            continue
        p = make_params(eta, n_s, n_t / (1 - eta))
        if validity_check(p).valid:
            return p


class TestFidelityBound:
    def test_weak_source_vanishes(self):
        p = make_params(0.1, 1e-9, 2.0)
        assert fidelity_gap_bound(p, 1).leading < 1e-17

    def test_worked_value(self, workhorse):
        x = 0.05 / 2.8
        want = x ** 8 / (1 - x ** 8)
        got = fidelity_gap_bound(workhorse, 3)
        assert got.leading == pytest.approx(want, rel=1e-14)
        assert got.leading == pytest.approx(1.034e-14, rel=1e-3)
        assert got.remainder_magnitude == pytest.approx(x ** 12, rel=1e-12)

    def test_dominates_direct_series(self, standard_params):
        for ell in (1, 2, 3, 4, 5):
            assert (fidelity_gap_bound(standard_params, ell).leading
                    >= oracle.direct_fidelity_series(standard_params, ell))

    def test_masked_outside_validity(self):
        p = make_params(0.1, 1.0, 0.05)
        with pytest.raises(MaskedPointError) as err:
            fidelity_gap_bound(p, 2)
        assert err.value.reason == LEMMA1_INVALID


class TestTraceDistanceBound:
    def test_worked_value(self, workhorse):
        got = trace_distance_bound(workhorse, 3)
        assert got == pytest.approx(2 * math.sqrt(fidelity_gap_bound(workhorse, 3).leading),
                                    rel=1e-15)
        assert got == pytest.approx(2.033e-7, rel=1e-3)

    def test_squaring_relation_across_ell(self, workhorse):
        # bound(l)^2 / bound(l+1) = 2 sqrt(1 - x^2L) / (1 - x^L) -> 2 as x^L -> 0
        for ell in (2, 3):
            ratio = trace_distance_bound(workhorse, ell) ** 2 \
                / trace_distance_bound(workhorse, ell + 1)
            assert ratio == pytest.approx(2.0, rel=1e-3)

    def test_needs_ell_ge_one(self, workhorse):
        with pytest.raises(DomainError):
            trace_distance_bound(workhorse, 0)


class TestPenalty:
    def test_vanishes_for_large_constellations(self, workhorse):
        assert continuity_penalty(workhorse, 8) < 1e-40

    def test_vanishes_for_weak_source(self):
        p = make_params(0.1, 1e-8, 2.0)
        assert continuity_penalty(p, 1) < 1e-10

    def test_positive_at_moderate_sizes(self, standard_params):
        for ell in (2, 3, 4):
            for variant in bounds.P_VARIANTS:
                assert continuity_penalty(standard_params, ell, variant) >= 0.0

    def test_variant_and_proof_form_agree_at_small_q(self, workhorse):
        # differences live at order Q^(2L); invisible when Q^L is tiny
        printed = continuity_penalty(workhorse, 4, "printed")
        symm = continuity_penalty(workhorse, 4, "symmetrized")
        proof = continuity_penalty_proof_form(workhorse, 4)
        assert printed == pytest.approx(symm, rel=1e-10)
        assert printed == pytest.approx(proof, rel=1e-10)

    def test_variants_differ_near_the_frontier(self):
        # large Q separates the polynomial readings
        p = make_params(0.9, 10.0, 90.0)
        assert validity_check(p).valid
        assert modulation_base(p) > 0.4
        vals = {v: continuity_penalty(p, 1, v) for v in bounds.P_VARIANTS}
        proof = continuity_penalty_proof_form(p, 1)
        assert vals["printed"] != vals["symmetrized"]
        assert proof > 0.0

    def test_proof_form_reconstructs_printed_polynomials(self):
        # P0/P1/P3/P4 match the coefficient reconstruction exactly; P2 does
        # not (its printed middle blocks disagree with the geometric sums)
        rng = random.Random(9)
        for _ in range(50):
            p = random_closed_form_params(rng)
            rp = reduced(p)
            c0, c2, c3, c4 = c_coefficients(rp)
            for big_l in (2.0, 4.0, 16.0):
                p_poly = p_coefficients(rp, big_l, "printed")
                scale = c0 + c2 * big_l ** 2 + abs(c3) * big_l ** 3 + c4 * big_l ** 4
                want = {
                    0: c0 + c2 * big_l ** 2 + c3 * big_l ** 3 + c4 * big_l ** 4,
                    1: -4 * c0 - c2 * big_l ** 2 + 3 * c3 * big_l ** 3 + 11 * c4 * big_l ** 4,
                    3: -4 * c0 + c2 * big_l ** 2 - c3 * big_l ** 3 + c4 * big_l ** 4,
                    4: c0,
                }
                for idx, val in want.items():
                    # mixed signs cancel; compare against the term magnitude
                    assert p_poly[idx] == pytest.approx(val, rel=1e-9, abs=1e-10 * scale)

    def test_rejects_unknown_variant(self, workhorse):
        with pytest.raises(DomainError):
            continuity_penalty(workhorse, 2, "fixed")


class TestMixedEntropyBound:
    def test_below_numeric_entropy(self, standard_params):
        cut = fockstate.resolve_cutoff(standard_params)
        numeric = fockstate.holevo_continuous(standard_params, cut) \
            + conditional_entropy(standard_params)
        assert mixed_entropy_lower_bound(standard_params) <= numeric + 1e-6

    def test_below_numeric_on_low_transmissivity_point(self):
        p = make_params(0.001, 0.1, 5.0)
        cut = fockstate.resolve_cutoff(p)
        numeric = fockstate.holevo_continuous(p, cut) + conditional_entropy(p)
        assert mixed_entropy_lower_bound(p) <= numeric + 1e-6

    def test_transcriptions_agree(self):
        rng = random.Random(17)
        for _ in range(1000):
            p = random_closed_form_params(rng)
            a = mixed_entropy_lower_bound(p)
            b = mixed_entropy_lower_bound_alt(p)
            assert abs(a - b) <= 1e-12 * max(1.0, abs(a))

    def test_masked_below_eta(self):
        p = make_params(0.5, 0.2, 0.8)  # n_t = 0.4 < eta
        assert validity_check(p).valid
        with pytest.raises(MaskedPointError) as err:
            mixed_entropy_lower_bound(p)
        assert err.value.reason == NT_LE_ETA

    def test_golden_workhorse_value(self, workhorse):
        assert mixed_entropy_lower_bound(workhorse) == pytest.approx(
            2.680118544983056, rel=1e-12)


class TestClosedFormRate:
    def test_vacuous_but_valid_in_weak_coupling(self):
        p = make_params(1e-4, 1.0, 5.0)
        rate = achievable_rate_closed_form(p)
        cont = fockstate.holevo_continuous(p)
        assert rate <= 0.0
        assert cont == pytest.approx(0.0, abs=1e-3)
        assert rate <= cont + 1e-6

    def test_workhorse_gap_measurement(self, workhorse):
        rate = achievable_rate_closed_form(workhorse)
        cont = fockstate.holevo_continuous(workhorse)
        assert rate <= cont
        assert cont - rate == pytest.approx(0.12074003674375344, rel=1e-9)

    def test_decomposition_identity(self, standard_params):
        lhs = achievable_rate_closed_form(standard_params) \
            + conditional_entropy(standard_params)
        assert lhs == mixed_entropy_lower_bound(standard_params)

    def test_random_dominance_sample(self):
        rng = random.Random(23)
        for _ in range(25):
            p = random_closed_form_params(rng)
            if fockstate.truncation_cutoff(p, 1e-12) > 200:
                continue
            assert achievable_rate_closed_form(p) <= fockstate.holevo_continuous(p) + 1e-6


class TestPskRate:
    def test_approaches_closed_form(self, workhorse):
        closed = achievable_rate_closed_form(workhorse)
        assert psk_achievable_rate(workhorse, 8) == pytest.approx(closed, abs=1e-30)

    def test_monotone_in_ell(self, standard_params):
        vals = [psk_achievable_rate(standard_params, ell) for ell in (1, 2, 3, 4)]
        for lo, hi in zip(vals, vals[1:]):
            assert hi >= lo

    def test_warning_level_crosscheck_against_numeric(self, workhorse):
        # carries the unquantified cubic remainder: report, do not gate
        import warnings

        guaranteed = psk_achievable_rate(workhorse, 6)
        numeric = fockstate.holevo_psk(workhorse, 6)
        if guaranteed > numeric + 1e-6:
            warnings.warn(f"finite-constellation rate {guaranteed} above numeric {numeric}")


class TestAdvantageRatio:
    def test_assistance_at_least_one(self):
        rng = random.Random(31)
        for _ in range(50):
            p = random_closed_form_params(rng)
            ratios = advantage_ratio(p)
            assert ratios.ratio_optimal >= 1.0 - 1e-12

    def test_guaranteed_below_optimal(self):
        rng = random.Random(37)
        for _ in range(50):
            p = random_closed_form_params(rng)
            ratios = advantage_ratio(p, ell=6)
            assert ratios.ratio_psk <= ratios.ratio_optimal + 1e-9

    def test_low_brightness_regime_golden(self):
        p = make_params(0.1, 0.001, 10.0)
        ratios = advantage_ratio(p)
        assert ratios.ratio_optimal > 5.0
        assert ratios.ratio_optimal == pytest.approx(6.667982637544139, rel=1e-12)
        assert ratios.ratio_psk == pytest.approx(6.509888094345851, rel=1e-9)

    def test_negative_rate_clamps_to_zero(self, workhorse):
        # the closed form is vacuous here, so the guaranteed ratio is zero
        assert achievable_rate_closed_form(workhorse) < 0
        assert advantage_ratio(workhorse).ratio_psk == 0.0


class TestBoundReport:
    def test_fully_populated_point(self):
        p = make_params(0.1, 0.2, 2.0)
        report = bound_report(p, ell=3)
        for name in ("fidelity_gap_bound", "trace_distance_bound", "continuity_penalty",
                     "closed_form_rate", "psk_rate", "holevo_numeric_continuous",
                     "holevo_numeric_psk", "ratio_psk", "ratio_optimal"):
            assert getattr(report, name) is not None, name
        assert report.masked_reasons == {}
        assert report.psk_rate == pytest.approx(
            report.closed_form_rate - report.continuity_penalty)

    def test_invalid_point_masks_with_reason(self):
        report = bound_report(make_params(0.1, 1.0, 0.05), ell=2)
        assert not report.lemma1_valid
        assert report.closed_form_rate is None
        assert report.masked_reasons["closed_form_rate"] == LEMMA1_INVALID
        assert report.masked_reasons["holevo_numeric_continuous"] == LEMMA1_INVALID
        assert report.ratio_optimal is not None

    def test_nt_le_eta_masks_only_closed_form(self):
        report = bound_report(make_params(0.5, 0.2, 0.8), ell=2)
        assert report.lemma1_valid and not report.nt_gt_eta
        assert report.closed_form_rate is None
        assert report.masked_reasons["closed_form_rate"] == NT_LE_ETA
        assert report.continuity_penalty is not None
        assert report.holevo_numeric_continuous is not None

    def test_flat_json_round_trip(self, workhorse):
        report = bound_report(workhorse, ell=2, with_numeric=False)
        payload = json.loads(json.dumps(report.to_flat_dict()))
        assert payload["eta"] == workhorse.eta
        assert payload["holevo_numeric_continuous"] is None
        assert set(payload) == set(REPORT_FIELDS)

    def test_csv_row_alignment(self, workhorse):
        report = bound_report(workhorse, ell=2, with_numeric=False)
        row = report.to_csv_row()
        assert len(row) == len(REPORT_FIELDS)
        by_name = dict(zip(REPORT_FIELDS, row))
        assert by_name["holevo_numeric_continuous"] == ""
        assert by_name["lemma1_valid"] == "true"
        assert float(by_name["closed_form_rate"]) == report.closed_form_rate

    def test_both_penalty_variants_recorded(self, workhorse):
        report = bound_report(workhorse, ell=2, with_numeric=False, variant="symmetrized")
        assert report.continuity_penalty == report.continuity_penalty_symmetrized
        assert report.continuity_penalty_printed is not None
        assert report.continuity_penalty_proof_form is not None
