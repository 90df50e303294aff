import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqdslln.borel_cantelli import (
    EventSystem,
    GfmDependence,
    epsilon_bracket_check,
    event_prob,
    event_probs,
    pair_event_prob,
    renyi_lamperti_ratio,
    renyi_lamperti_ratios,
    scaled_tail_ratio,
)
from pqdslln.copulas import GfmCopula, ThetaSchedule
from pqdslln.errors import DomainError, ParameterError, UndefinedRatioError
from pqdslln.marginals import ParetoMarginal
from pqdslln.copulas import sample_pairs


def independent(alpha: float, p: float) -> EventSystem:
    return EventSystem(p=p, marginal=ParetoMarginal(alpha))


def gfm_system(alpha: float, p: float, mu: float = 0.2, nu: float = -1.5, r: float = 1.0, s: float = 1.0) -> EventSystem:
    dep = GfmDependence(r=r, s=s, schedule=ThetaSchedule(mu=mu, nu=nu, p=p))
    return EventSystem(p=p, marginal=ParetoMarginal(alpha), dependence=dep)


class TestEventProb:
    def test_upper_values(self):
        assert event_prob(independent(2.0, 1.0), 10) == pytest.approx(0.01)
        assert event_prob(independent(1.0, 1.0), 7) == pytest.approx(1.0 / 7.0)
        assert event_prob(independent(2.0, 1.0), 1) == 1.0

    def test_lower_side_vacuous(self):
        es = EventSystem(p=1.0, marginal=ParetoMarginal(2.0), side="lower")
        assert all(event_prob(es, k) == 0.0 for k in (1, 2, 10, 1000))
        assert np.all(event_probs(es, 100) == 0.0)

    def test_vector_matches_scalar(self):
        es = independent(1.5, 1.3)
        vec = event_probs(es, 20)
        for k in range(1, 21):
            assert vec[k - 1] == pytest.approx(event_prob(es, k), rel=1e-14)

    def test_validation(self):
        with pytest.raises(DomainError):
            event_prob(independent(2.0, 1.0), 0)
        with pytest.raises(ParameterError):
            EventSystem(p=2.5, marginal=ParetoMarginal(2.0))
        with pytest.raises(ParameterError):
            EventSystem(p=1.0, marginal=ParetoMarginal(2.0), side="sideways")


class TestPairEventProb:
    def test_independent_product(self):
        es = independent(2.0, 1.0)
        assert pair_event_prob(es, 2, 3) == pytest.approx((1.0 / 4.0) * (1.0 / 9.0), rel=1e-14)

    def test_direct_substitution(self):
        # theta_{2,3} = 1 via mu = nu = 0 is outside the schedule window, so
        # use a schedule-free check against the explicit formula instead
        es = gfm_system(2.0, 1.0)
        theta = es.dependence.schedule.theta(2, 3)
        expected = (1.0 / 36.0) + theta * (0.75 * 0.25) * ((8.0 / 9.0) * (1.0 / 9.0))
        assert pair_event_prob(es, 2, 3) == pytest.approx(expected, rel=1e-13)

    def test_unit_theta_reference_value(self):
        # frozen reference: theta = 1, r = s = 1, alpha = 2, p = 1, (k, j) = (2, 3)
        m = ParetoMarginal(2.0)
        copula = GfmCopula(theta=1.0, r=1.0, s=1.0)
        pk, pj = 0.25, 1.0 / 9.0
        delta = copula.perturbation_factor(m.cdf(2.0)) * copula.perturbation_factor(m.cdf(3.0))
        assert pk * pj + delta == pytest.approx(0.046296296296296294, rel=1e-13)

    def test_unit_theta_monte_carlo(self, rng):
        # sample the exact pair copula and count joint exceedances
        m = ParetoMarginal(2.0)
        copula = GfmCopula(theta=1.0, r=1.0, s=1.0)
        n = 2 * 10**5
        x, y = sample_pairs(copula, m, rng, n)
        target = 0.046296296296296294
        hit = float(np.mean((x > 2.0) & (y > 3.0)))
        se = math.sqrt(target * (1.0 - target) / n)
        assert abs(hit - target) <= 3.0 * se

    def test_linear_in_theta(self):
        es_full = gfm_system(2.0, 1.0)
        m = ParetoMarginal(2.0)
        theta = es_full.dependence.schedule.theta(4, 9)
        base = event_prob(es_full, 4) * event_prob(es_full, 9)
        increment = pair_event_prob(es_full, 4, 9) - base
        h4 = m.cdf(4.0) * (1.0 - m.cdf(4.0))
        h9 = m.cdf(9.0) * (1.0 - m.cdf(9.0))
        assert increment == pytest.approx(theta * h4 * h9, rel=1e-12)

    def test_symmetric_in_arguments(self):
        es = gfm_system(2.0, 1.0)
        assert pair_event_prob(es, 5, 2) == pytest.approx(pair_event_prob(es, 2, 5), rel=1e-14)

    def test_rejects_diagonal(self):
        with pytest.raises(DomainError):
            pair_event_prob(independent(2.0, 1.0), 3, 3)

    @given(st.integers(min_value=1, max_value=200), st.integers(min_value=1, max_value=200))
    @settings(max_examples=40)
    def test_pqd_lower_bound(self, k, j):
        if k == j:
            j = k + 1
        es = gfm_system(2.0, 1.0)
        assert pair_event_prob(es, k, j) >= event_prob(es, k) * event_prob(es, j) - 1e-15


class TestRenyiLampertiRatio:
    def test_n_one(self):
        assert renyi_lamperti_ratio(independent(2.0, 1.0), 1) == pytest.approx(1.0)

    def test_harmonic_exact_formula(self):
        # alpha = 1, p = 1: ratio = 1 + (H_n - H_n^(2)) / H_n^2 exactly
        es = independent(1.0, 1.0)
        for n in (10, 10**3, 10**4):
            k = np.arange(1, n + 1, dtype=float)
            h1 = math.fsum(1.0 / k)
            h2 = math.fsum(1.0 / k**2)
            expected = 1.0 + (h1 - h2) / h1**2
            assert renyi_lamperti_ratio(es, n) == pytest.approx(expected, abs=1e-10)

    def test_harmonic_value_at_1e4(self):
        assert renyi_lamperti_ratio(independent(1.0, 1.0), 10**4) == pytest.approx(1.0850000756939122, abs=1e-10)

    def test_divergent_systems_approach_one_from_above(self):
        # strictly divergent tail index: ratio - 1 decays like 1/S_n
        for alpha, p in ((0.8, 1.0), (1.0, 1.5)):
            es = independent(alpha, p)
            r4 = renyi_lamperti_ratio(es, 10**4)
            r6 = renyi_lamperti_ratio(es, 10**6)
            assert 1.0 < r6 < r4
            assert r4 - 1.0 <= 0.2
            assert r6 - 1.0 <= 0.05

    def test_convergent_case_stays_away_from_one(self):
        # alpha = 2, p = 1: limit 1 + (zeta(2) - zeta(4)) / zeta(2)^2 = 1.2079
        es = independent(2.0, 1.0)
        assert renyi_lamperti_ratio(es, 10**4) == pytest.approx(1.207915423617771, abs=1e-9)
        for n in (2, 10, 100, 10**4):
            assert renyi_lamperti_ratio(es, n) >= 1.1

    def test_grid_version_matches_scalar(self):
        es = gfm_system(2.0, 1.0)
        grid = np.array([1, 2, 10, 50, 200])
        ratios = renyi_lamperti_ratios(es, grid)
        for n, r in zip(grid, ratios):
            assert r == pytest.approx(renyi_lamperti_ratio(es, int(n)), rel=1e-14)

    def test_dependence_increases_pair_sum(self):
        dep = renyi_lamperti_ratio(gfm_system(2.0, 1.0), 500)
        ind = renyi_lamperti_ratio(independent(2.0, 1.0), 500)
        assert dep >= ind

    def test_lower_side_undefined(self):
        es = EventSystem(p=1.0, marginal=ParetoMarginal(2.0), side="lower")
        with pytest.raises(UndefinedRatioError):
            renyi_lamperti_ratio(es, 100)


class TestEpsilonBracket:
    def test_independent_reference(self):
        # alpha = 2, p = 1, (k, j) = (2, 3), eps = 2: lhs = 1/6, rhs = 1/24
        check = epsilon_bracket_check(independent(2.0, 1.0), 2, 3, 2.0)
        assert check.lhs == pytest.approx(1.0 / 6.0, abs=1e-9)
        assert check.rhs == pytest.approx(1.0 / 24.0, rel=1e-12)
        assert check.holds

    def test_dependent_case_holds(self):
        check = epsilon_bracket_check(gfm_system(2.0, 1.0), 4, 9, 1.5)
        assert check.holds
        assert check.lhs >= check.rhs

    @pytest.mark.parametrize("k", [2, 4, 9, 16])
    @pytest.mark.parametrize("j", [3, 8, 27])
    @pytest.mark.parametrize("eps", [1.25, 1.5, 2.0, 4.0])
    def test_full_grid_gfm(self, k, j, eps):
        es = gfm_system(2.0, 1.0)
        check = epsilon_bracket_check(es, k, j, eps)
        assert check.holds

    def test_validation(self):
        es = independent(2.0, 1.0)
        with pytest.raises(DomainError):
            epsilon_bracket_check(es, 2, 2, 1.5)
        with pytest.raises(DomainError):
            epsilon_bracket_check(es, 2, 3, 1.0)


class TestScaledTailRatio:
    def test_cap_regime(self):
        # n = 1, alpha = 2, p = 1, eps = 2: both sums are capped at 1
        out = scaled_tail_ratio(independent(2.0, 1.0), 2.0, 1)
        assert out.ratio == pytest.approx(1.0)
        assert out.lower == 1.0
        assert out.ratio <= out.upper

    def test_harmonic_value(self):
        # frozen: numerator 2 H_n - 1, denominator H_n at alpha = p = 1
        out = scaled_tail_ratio(independent(1.0, 1.0), 2.0, 10**4)
        assert out.ratio == pytest.approx(1.8978299702381416, abs=1e-12)
        assert out.upper == pytest.approx(2.204340059523717, abs=1e-12)
        assert out.ratio <= out.upper

    @pytest.mark.parametrize("alpha", [1.0, 2.0])
    @pytest.mark.parametrize("p", [1.0, 1.5])
    @pytest.mark.parametrize("eps", [1.5, 2.0, 3.0])
    @pytest.mark.parametrize("n", [10**2, 10**4])
    def test_chain_grid(self, alpha, p, eps, n):
        out = scaled_tail_ratio(independent(alpha, p), eps, n)
        assert 1.0 <= out.ratio <= out.upper

    def test_validation(self):
        with pytest.raises(DomainError):
            scaled_tail_ratio(independent(2.0, 1.0), 1.0, 10)
        with pytest.raises(DomainError):
            scaled_tail_ratio(independent(2.0, 1.0), 2.0, 0)
