import math
import random

import numpy as np
import pytest

from pskrate import special
from pskrate.channel import (conditional_entropy, covariance, make_params, reduced,
                             reference_capacities, symplectic_mu, symplectic_mu_numeric,
                             validity_check)
from pskrate.errors import DomainError, SingularParameterError


class TestMakeParams:
    def test_derives_output_noise(self):
        assert make_params(0.1, 0.5, 2.0).n_t == pytest.approx(1.8, rel=1e-15)
        assert make_params(1.0, 1.0, 5.0).n_t == 0.0
        assert make_params(0.001, 0.01, 10.0).n_t == pytest.approx(9.99, rel=1e-15)

    def test_stored_exactly(self):
        p = make_params(0.37, 0.2, 1.3)
        assert p.n_t == p.n_b * (1 - p.eta)

    @pytest.mark.parametrize("bad", [
        dict(eta=0.0, n_s=1, n_b=1), dict(eta=1.2, n_s=1, n_b=1),
        dict(eta=0.5, n_s=0.0, n_b=1), dict(eta=0.5, n_s=-1, n_b=1),
        dict(eta=0.5, n_s=1, n_b=-0.1), dict(eta=math.nan, n_s=1, n_b=1),
    ])
    def test_rejects_out_of_range(self, bad):
        with pytest.raises(DomainError):
            make_params(**bad)


class TestReduced:
    def test_workhorse_values(self, workhorse):
        rp = reduced(workhorse)
        assert rp.a == pytest.approx(1.8 / 2.8, rel=1e-14)
        assert rp.d == pytest.approx(1.0 / (2.8 * 1.5), rel=1e-14)
        assert rp.b == pytest.approx(0.5 * 2.7 / (1.5 * 2.8), rel=1e-14)
        assert rp.z == pytest.approx(0.1 / (2.7 * 1.8), rel=1e-14)

    def test_small_transmissivity_limits(self):
        p = make_params(1e-12, 0.5, 2.0)
        rp = reduced(p)
        assert rp.z == pytest.approx(0.0, abs=1e-12)
        assert rp.c == pytest.approx(0.0, abs=1e-6)
        assert rp.b == pytest.approx(0.5 / 1.5, rel=1e-9)

    def test_small_source_limits(self):
        p = make_params(0.1, 1e-9, 2.0)
        rp = reduced(p)
        assert rp.b < 1e-8
        assert rp.c < 1e-4

    def test_zero_noise_is_singular(self):
        with pytest.raises(SingularParameterError):
            reduced(make_params(1.0, 1.0, 0.0))

    def test_ranges_inside_validity(self):
        rng = random.Random(0)
        for _ in range(200):
            p = make_params(rng.uniform(0.001, 0.999), 10 ** rng.uniform(-3, 1),
                            10 ** rng.uniform(-2, 1))
            if p.n_t == 0:
                continue
            rp = reduced(p)
            assert 0 <= rp.a < 1
            assert 0 <= rp.b < 1
            assert rp.d > 0
            assert rp.z >= 0

    def test_normalization_identity(self, standard_params):
        # d equals (1-a)(1-b)(1-alpha_geo); the bounds rely on this collapse
        rp = reduced(standard_params)
        assert rp.d == pytest.approx(
            (1 - rp.a) * (1 - rp.b) * (1 - rp.alpha_geo), rel=1e-13)


class TestCovariance:
    def test_zero_phase_block(self, workhorse):
        cov = covariance(workhorse, 0.0)
        np.testing.assert_allclose(cov.matrix[:2, 2:], cov.C * np.array([[1, 0], [0, -1]]),
                                   atol=1e-15)

    def test_quarter_turn_block(self, workhorse):
        cov = covariance(workhorse, math.pi / 2)
        np.testing.assert_allclose(cov.matrix[:2, 2:], cov.C * np.array([[0, 1], [1, 0]]),
                                   atol=1e-15)

    def test_workhorse_entries(self, workhorse):
        cov = covariance(workhorse, 0.3)
        assert cov.E == pytest.approx(4.7, rel=1e-14)
        assert cov.C == pytest.approx(2 * math.sqrt(0.075), rel=1e-14)
        assert cov.S == pytest.approx(2.0, rel=1e-15)

    def test_symmetric(self, standard_params):
        mat = covariance(standard_params, 1.234).matrix
        assert np.max(np.abs(mat - mat.T)) < 1e-14


class TestSymplecticMu:
    def test_no_transmission_collapse(self):
        p = make_params(1e-14, 0.7, 3.0)
        mu = symplectic_mu(p)
        assert mu.mu_plus == pytest.approx(p.n_t + 0.5, rel=1e-10)
        assert mu.mu_minus == pytest.approx(p.n_s + 0.5, rel=1e-10)

    def test_weak_source_collapse(self):
        p = make_params(0.3, 1e-12, 3.0)
        mu = symplectic_mu(p)
        assert mu.mu_plus == pytest.approx(p.n_t + 0.5, rel=1e-9)
        assert mu.mu_minus == pytest.approx(0.5, rel=1e-9)

    def test_pure_limit(self):
        mu = symplectic_mu(make_params(1.0, 0.8, 0.0))
        assert mu.mu_plus == pytest.approx(0.5, abs=1e-12)
        assert mu.mu_minus == pytest.approx(0.5, abs=1e-12)

    def test_ordering_and_floor(self):
        rng = random.Random(1)
        for _ in range(100):
            p = make_params(rng.uniform(0.01, 1.0), 10 ** rng.uniform(-3, 1),
                            10 ** rng.uniform(-2, 1))
            mu = symplectic_mu(p)
            assert mu.mu_plus >= mu.mu_minus >= 0.5 - 1e-12

    def test_against_matrix_spectrum(self):
        rng = random.Random(2)
        for _ in range(100):
            p = make_params(rng.uniform(0.01, 0.999), 10 ** rng.uniform(-3, 1),
                            10 ** rng.uniform(-2, 1))
            mu = symplectic_mu(p)
            lo, hi = symplectic_mu_numeric(p, theta=rng.uniform(0, 2 * math.pi))
            assert abs(mu.mu_minus - lo) < 1e-10
            assert abs(mu.mu_plus - hi) < 1e-10


class TestConditionalEntropy:
    def test_no_transmission_product(self):
        p = make_params(1e-13, 0.5, 2.0)
        want = special.g_entropy(p.n_t) + special.g_entropy(p.n_s)
        assert conditional_entropy(p) == pytest.approx(want, rel=1e-9)

    def test_weak_source(self):
        p = make_params(0.2, 1e-13, 2.0)
        assert conditional_entropy(p) == pytest.approx(special.g_entropy(p.n_t), rel=1e-9)

    def test_theta_independent_in_covariance(self, standard_params):
        # the numeric symplectic spectrum, hence the entropy, ignores theta
        for theta in (0.0, math.pi / 4, math.pi):
            lo, hi = symplectic_mu_numeric(standard_params, theta)
            want = special.g_entropy(hi - 0.5) + special.g_entropy(lo - 0.5)
            assert conditional_entropy(standard_params) == pytest.approx(want, abs=1e-10)


class TestValidity:
    def test_zero_noise_invalid(self):
        assert not validity_check(make_params(1.0, 1.0, 0.0)).valid

    def test_worked_margin(self):
        rep = validity_check(make_params(0.1, 1.0, 1.0))
        threshold = (-(1 + 0.2) + math.sqrt(4 * 0.1 + 4 * 0.1 + 1)) / 2
        assert rep.valid
        assert rep.margin == pytest.approx(0.9 - threshold, rel=1e-12)
        assert rep.margin == pytest.approx(0.829180, abs=1e-6)

    def test_worked_invalid_point(self):
        rep = validity_check(make_params(0.1, 1.0, 0.05))
        assert not rep.valid
        assert rep.margin == pytest.approx(-0.025820, abs=1e-6)

    def test_margin_monotone_in_environment(self):
        margins = [validity_check(make_params(0.2, 0.7, nb)).margin
                   for nb in np.linspace(0.01, 5.0, 40)]
        assert all(b > a for a, b in zip(margins, margins[1:]))

    def test_nt_gt_eta_flag(self):
        assert validity_check(make_params(0.1, 0.5, 2.0)).nt_gt_eta
        assert not validity_check(make_params(0.5, 0.1, 0.6)).nt_gt_eta


class TestReferenceCapacities:
    def test_no_transmission_vanishes(self):
        caps = reference_capacities(make_params(1e-13, 1.0, 2.0))
        assert caps.c_classical == pytest.approx(0.0, abs=1e-11)

    def test_weak_source_vanishes(self):
        caps = reference_capacities(make_params(0.3, 1e-12, 2.0))
        assert caps.c_classical == pytest.approx(0.0, abs=1e-10)
        assert caps.c_ea == pytest.approx(0.0, abs=1e-10)

    def test_low_brightness_advantage(self):
        caps = reference_capacities(make_params(0.1, 0.01, 10.0))
        assert caps.c_ea / caps.c_classical > 1.0

    def test_assistance_never_hurts(self):
        rng = random.Random(3)
        for _ in range(100):
            p = make_params(rng.uniform(0.01, 1.0), 10 ** rng.uniform(-3, 1),
                            10 ** rng.uniform(-2, 1))
            caps = reference_capacities(p)
            assert caps.c_ea >= caps.c_classical - 1e-12
            assert caps.c_classical >= -1e-12
