"""Tail statistics: Hill fits, normalizing sequences, empirical tail
processes, angular measures.

Hill oracles use exact Pareto order-statistic identities and iid Pareto
samples whose index is known by construction.
"""
import math

import numpy as np
import pytest

from heavytail import models, randkit, tailstats
from heavytail.errors import (DegenerateSampleError,
                              InsufficientExceedancesError, ParameterError)
from heavytail.randkit import TailLaw, derive_stream
from heavytail.tailstats import (angular_measure, default_hill_k,
                                 empirical_tail_process, hill_estimate,
                                 normalizing_sequence)


class TestHill:
    def test_recovers_pareto_index_within_ci(self):
        alpha = 1.7
        x = randkit.sample_pareto(derive_stream(31, 1), alpha, 100_000)
        fit = hill_estimate(x, default_hill_k(x.size))
        assert fit.ci_low <= alpha <= fit.ci_high
        assert abs(fit.alpha_hat - alpha) < 0.15

    def test_ci_shape_is_relative_normal_band(self):
        x = randkit.sample_pareto(derive_stream(31, 2), 2.0, 10_000)
        k = 500
        fit = hill_estimate(x, k)
        half = 1.96 / math.sqrt(k)
        assert np.isclose(fit.ci_low, fit.alpha_hat * (1 - half))
        assert np.isclose(fit.ci_high, fit.alpha_hat * (1 + half))
        assert fit.k_used == k
        assert fit.threshold > 0

    def test_exact_on_inverse_cdf_points(self):
        # deterministic points x_i = (n/i)^(1/alpha): the Hill mean of
        # log spacings telescopes to an average of log(k+1 over i)
        alpha, n, k = 2.5, 4000, 400
        i = np.arange(1, n + 1)
        x = (n / i) ** (1.0 / alpha)
        fit = hill_estimate(x, k)
        logs = np.log(x[: k]) - math.log(x[k])
        assert np.isclose(fit.alpha_hat, 1.0 / logs.mean(), rtol=1e-12)

    def test_scale_invariance_is_exact(self):
        x = randkit.sample_pareto(derive_stream(31, 3), 1.2, 5000)
        f1 = hill_estimate(x, 200)
        f2 = hill_estimate(1e6 * x, 200)
        assert np.isclose(f1.alpha_hat, f2.alpha_hat, rtol=1e-12)

    def test_overlap_predicate(self):
        a = tailstats.TailFit(1.0, 10, 0.8, 1.2, 1.0)
        b = tailstats.TailFit(1.3, 10, 1.1, 1.5, 1.0)
        c = tailstats.TailFit(2.0, 10, 1.8, 2.2, 1.0)
        assert a.overlaps(b) and b.overlaps(a)
        assert not a.overlaps(c)

    def test_degenerate_sample_rejected(self):
        with pytest.raises(DegenerateSampleError):
            hill_estimate(np.ones(100), 10)

    def test_k_domain(self):
        with pytest.raises(ParameterError):
            hill_estimate(np.arange(1.0, 11.0), 10)

    def test_default_k_is_square_root(self):
        assert default_hill_k(10_000) == 100


class TestNormalizingSequence:
    def test_analytic_law_inversion(self):
        law = TailLaw(randkit.PARETO, alpha=2.0, scale=3.0)
        assert normalizing_sequence(law, 100) == 30.0

    def test_empirical_quantile_on_integers(self):
        x = np.arange(1.0, 101.0)
        assert normalizing_sequence(x, 100) == 100.0

    def test_empirical_requires_enough_samples(self):
        with pytest.raises(ParameterError):
            normalizing_sequence(np.ones(10), 100)


class TestEmpiricalTailProcess:
    def test_linear_chain_profile_matches_powers(self, ar_pareto15):
        # over high-threshold windows the mean forward profile of
        # X_{t+s}/|X_t| approaches a^s plus a vanishing remainder
        path = models.simulate_path(ar_pareto15, 400_000, 1000,
                                    derive_stream(32, 1))
        etp = empirical_tail_process(path, 0.999, 6)
        prof = etp.mean_profile[:, 0]
        assert np.isclose(prof[0], 1.0, atol=1e-12)
        for s in (1, 2, 3):
            assert abs(prof[s] - 0.5 ** s) < 0.12
        assert etp.exceedance_count >= 30
        assert etp.se_profile.shape == etp.mean_profile.shape

    def test_insufficient_exceedances(self):
        path = np.ones((50, 1))
        with pytest.raises((InsufficientExceedancesError, ParameterError)):
            empirical_tail_process(path, 0.999, 5)

    def test_horizon_domain(self):
        with pytest.raises(ParameterError):
            empirical_tail_process(np.ones((10, 1)), 0.9, 20)


class TestAngularMeasure:
    def test_scalar_signs_become_two_atoms(self):
        x = np.array([5.0, -4.0, 3.0, -2.0, 1.0, -0.5])[:, None]
        meas = angular_measure(x, 4)
        assert np.isclose(meas.total, 1.0)
        assert np.isclose(meas.weight_at([1.0]), 0.5)
        assert np.isclose(meas.weight_at([-1.0]), 0.5)

    def test_weights_follow_topk_proportions(self):
        x = np.array([10.0, 9.0, 8.0, -7.0, 1.0])[:, None]
        meas = angular_measure(x, 4)
        assert np.isclose(meas.weight_at([1.0]), 0.75)
        assert np.isclose(meas.weight_at([-1.0]), 0.25)

    def test_vector_atoms_are_unit_norm(self):
        rng = derive_stream(33, 1).rng
        x = rng.standard_normal((500, 3)) * rng.pareto(2.0, 500)[:, None]
        meas = angular_measure(x, 50)
        units, weights = meas.as_arrays()
        assert np.allclose(np.linalg.norm(units, axis=1), 1.0)
        assert np.isclose(weights.sum(), 1.0)

    def test_zero_norm_rejected(self):
        with pytest.raises(DegenerateSampleError):
            angular_measure(np.zeros((10, 2)), 5)

    def test_k_domain(self):
        with pytest.raises(ParameterError):
            angular_measure(np.ones((3, 1)), 9)
