"""Regeneration: split-chain validity, exact block decomposition, Kac
occupation identity, and block statistics.

Kernel-fidelity oracles compare split-chain transitions against the
closed-form conditional law of the underlying chain.
"""
import math

import numpy as np
import pytest
from scipy import stats

from heavytail import models, randkit, regen
from heavytail.errors import (InsufficientCyclesError,
                              MinorizationInvalidError, NoCyclesError,
                              ParameterError, UnsupportedCaseError)
from heavytail.randkit import TailLaw, derive_stream
from heavytail.regen import (MinorizationSpec, harvest_blocks, kac_check,
                             make_iid_minorization,
                             make_var1_minorization, split_step)


@pytest.fixture
def gauss_mino(ar_gauss):
    return make_var1_minorization(ar_gauss, stream=derive_stream(61, 0))


@pytest.fixture
def pareto_chain():
    return models.Var1Spec(1, TailLaw(randkit.PARETO, alpha=0.8),
                           a_matrix=np.array([[0.5]]))


class TestMinorizationConstruction:
    def test_gaussian_epsilon_formula(self, ar_gauss):
        mino = make_var1_minorization(ar_gauss, m_bound=2.0)
        # epsilon = 2 Phibar(|a| M / s) with a = 1/2, M = 2, s = 1
        expect = 2.0 * stats.norm.sf(1.0)
        assert abs(mino.epsilon - expect) < 1e-12
        assert not mino.heuristic

    def test_pareto_epsilon_formula(self, pareto_chain):
        mino = make_var1_minorization(pareto_chain, m_bound=4.0)
        # epsilon = ((s + 2 a M)/s)^(-alpha) = 5^(-0.8)
        assert abs(mino.epsilon - 5.0 ** -0.8) < 1e-12

    def test_pilot_bound_marked_heuristic(self, ar_gauss):
        mino = make_var1_minorization(ar_gauss,
                                      stream=derive_stream(61, 1))
        assert mino.heuristic
        assert mino.m_bound > 0
        assert 0 < mino.epsilon < 1

    def test_unsupported_specs_rejected(self, garch_benchmark):
        with pytest.raises(UnsupportedCaseError):
            make_var1_minorization(garch_benchmark)


class TestSplitStepFidelity:
    def test_gaussian_transitions_match_conditional_law(self, ar_gauss,
                                                        gauss_mino):
        # one-step law from x0 is N(a x0, 1) regardless of the split
        st = derive_stream(61, 2)
        x0 = 1.0
        draws = np.array([split_step(x0, gauss_mino, st)[0]
                          for _ in range(10_000)])
        ks = stats.kstest(draws, stats.norm(loc=0.5 * x0, scale=1.0).cdf)
        assert ks.pvalue > 0.01

    def test_pareto_transitions_match_conditional_law(self, pareto_chain):
        mino = make_var1_minorization(pareto_chain, m_bound=4.0)
        st = derive_stream(61, 3)
        x0 = 2.0
        draws = np.array([split_step(x0, mino, st)[0]
                          for _ in range(10_000)])
        # next state is a x0 + Z with Z unit-scale Pareto(0.8)
        z = draws - 0.5 * x0
        ks = stats.kstest(z, lambda t: 1.0 - np.minimum(1.0, t ** -0.8))
        assert ks.pvalue > 0.01

    def test_regeneration_flag_frequency(self, ar_gauss, gauss_mino):
        # started inside the small set, the flag fires with rate epsilon
        st = derive_stream(61, 4)
        hits = sum(split_step(0.0, gauss_mino, st)[1]
                   for _ in range(20_000))
        p_hat = hits / 20_000.0
        se = math.sqrt(gauss_mino.epsilon * (1 - gauss_mino.epsilon)
                       / 20_000.0)
        assert abs(p_hat - gauss_mino.epsilon) < 4 * se

    def test_invalid_split_detected(self):
        # epsilon far above the true minorization mass: the residual
        # density goes negative and the rejection sampler reports it
        bad = MinorizationSpec(
            small_set=lambda x: abs(x) <= 1.0,
            epsilon=0.5,
            nu_sampler=lambda stream: float(stream.rng.normal()),
            transition_sampler=lambda x, stream: 0.5 * x
            + float(stream.rng.normal()),
            transition_density=lambda x, y: stats.norm.pdf(y - 0.5 * x),
            nu_density=lambda y: stats.norm.pdf(y) * 5.0,
            m_bound=1.0, heuristic=False)
        st = derive_stream(61, 5)
        with pytest.raises(MinorizationInvalidError):
            for _ in range(200):
                split_step(0.0, bad, st)


class TestHarvest:
    def test_decomposition_is_bit_exact(self, ar_gauss, gauss_mino):
        blocks = harvest_blocks(ar_gauss, gauss_mino, 100_000,
                                derive_stream(62, 1))
        assert np.array_equal(blocks.reconstruct_total(), blocks.total)
        assert blocks.n == 100_000
        assert blocks.path.shape == (100_000, 1)

    def test_total_equals_path_sum_to_float_tolerance(self, ar_gauss,
                                                      gauss_mino):
        blocks = harvest_blocks(ar_gauss, gauss_mino, 50_000,
                                derive_stream(62, 2))
        assert np.allclose(blocks.total, blocks.path.sum(axis=0),
                           rtol=1e-9, atol=1e-9)

    def test_cycle_bookkeeping(self, ar_gauss, gauss_mino):
        blocks = harvest_blocks(ar_gauss, gauss_mino, 50_000,
                                derive_stream(62, 3))
        starts = blocks.cycle_starts
        assert starts[0] == 0
        assert np.all(np.diff(starts) >= 1)
        assert blocks.n_cycles == starts.size - 1
        assert blocks.block_sums.shape == (blocks.n_cycles, 1)
        assert np.all(blocks.cycle_lengths() >= 1)

    def test_pareto_chain_harvest(self, pareto_chain):
        mino = make_var1_minorization(pareto_chain, m_bound=4.0)
        blocks = harvest_blocks(pareto_chain, mino, 100_000,
                                derive_stream(62, 4))
        assert np.array_equal(blocks.reconstruct_total(), blocks.total)
        assert blocks.n_cycles > 1000

    def test_determinism(self, ar_gauss, gauss_mino):
        b1 = harvest_blocks(ar_gauss, gauss_mino, 20_000,
                            derive_stream(62, 5))
        b2 = harvest_blocks(ar_gauss, gauss_mino, 20_000,
                            derive_stream(62, 5))
        assert np.array_equal(b1.path, b2.path)
        assert np.array_equal(b1.cycle_starts, b2.cycle_starts)


class TestIidAtomization:
    def test_every_step_regenerates(self):
        law = TailLaw(randkit.PARETO, alpha=1.5)
        spec = models.Var1Spec(1, law, a_matrix=np.array([[0.0]]))
        blocks = harvest_blocks(spec, make_iid_minorization(law), 5000,
                                derive_stream(63, 1))
        lengths = blocks.cycle_lengths()
        assert float(lengths.mean()) == 1.0
        assert np.all(lengths == 1)
        # each block is one increment of the path
        assert np.allclose(blocks.block_sums[:, 0],
                           blocks.path[:-1, 0], rtol=0, atol=0)

    def test_kac_is_exact(self):
        law = TailLaw(randkit.GAUSSIAN)
        spec = models.Var1Spec(1, law, a_matrix=np.array([[0.0]]))
        blocks = harvest_blocks(spec, make_iid_minorization(law), 2000,
                                derive_stream(63, 2))
        report = kac_check(blocks, 1.0)
        assert report.mean_length == 1.0
        assert report.expected_length == 1.0
        assert report.z_score == 0.0
        assert report.passed


class TestKac:
    def test_gaussian_chain_passes(self, ar_gauss, gauss_mino):
        blocks = harvest_blocks(ar_gauss, gauss_mino, 200_000,
                                derive_stream(64, 1))
        pi_c = regen.stationary_small_set_mass(blocks.path,
                                               gauss_mino.m_bound)
        report = kac_check(blocks, gauss_mino.epsilon * pi_c)
        assert report.passed
        assert abs(report.z_score) <= 3.0
        assert report.geometric_rate > 0.0

    def test_small_set_mass_matches_stationary_law(self, ar_gauss,
                                                   gauss_mino):
        # stationary law is N(0, 1/(1-a^2))
        blocks = harvest_blocks(ar_gauss, gauss_mino, 200_000,
                                derive_stream(64, 2))
        emp = regen.stationary_small_set_mass(blocks.path,
                                              gauss_mino.m_bound)
        sd = math.sqrt(4.0 / 3.0)
        expect = 1.0 - 2.0 * stats.norm.sf(gauss_mino.m_bound / sd)
        assert abs(emp - expect) < 0.01

    def test_insufficient_cycles(self, ar_gauss, gauss_mino):
        blocks = harvest_blocks(ar_gauss, gauss_mino, 60,
                                derive_stream(64, 3))
        if blocks.n_cycles < 30:
            with pytest.raises(InsufficientCyclesError):
                kac_check(blocks, 0.05)

    def test_pi_domain(self, ar_gauss, gauss_mino):
        blocks = harvest_blocks(ar_gauss, gauss_mino, 50_000,
                                derive_stream(64, 4))
        with pytest.raises(ParameterError):
            kac_check(blocks, 0.0)


class TestBlockMeasure:
    def test_block_angular_measure_total(self, ar_gauss, gauss_mino):
        blocks = harvest_blocks(ar_gauss, gauss_mino, 50_000,
                                derive_stream(65, 1))
        meas = regen.block_spectral_measure(blocks, 100)
        units, weights = meas.as_arrays()
        assert np.isclose(weights.sum(), 1.0)
        assert set(np.round(units[:, 0], 12)) <= {-1.0, 1.0}
