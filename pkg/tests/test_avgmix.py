import math

import numpy as np
import pytest

import ctqw
from conftest import petersen, quadrature_interval_average
from ctqw.errors import NotApplicableError

P3_AVERAGE = np.array(
    [[3 / 8, 1 / 4, 3 / 8], [1 / 4, 1 / 2, 1 / 4], [3 / 8, 1 / 4, 3 / 8]]
)


def simple_spectrum(dec: ctqw.SpectralDecomposition) -> bool:
    return bool((dec.multiplicities == 1).all())


class TestAverageMixing:
    def test_p2_is_half_flat(self):
        res = ctqw.average_mixing(ctqw.decompose(ctqw.path(2)))
        assert np.max(np.abs(res.matrix - 0.5)) < 1e-12
        assert res.rank == 1

    def test_p3_exact(self):
        res = ctqw.average_mixing(ctqw.decompose(ctqw.path(3)))
        assert np.max(np.abs(res.matrix - P3_AVERAGE)) < 1e-12
        assert res.rank == 2

    def test_c4_rank(self):
        # J/8 + (I + antipodal swap)/4: eigenvalues (1, 1/2, 0, 0), rank 2
        res = ctqw.average_mixing(ctqw.decompose(ctqw.cycle(4)))
        p2 = np.zeros((4, 4))
        for i in range(4):
            p2[i, (i + 2) % 4] = 1.0
        expected = np.ones((4, 4)) / 8 + (np.eye(4) + p2) / 4
        assert np.max(np.abs(res.matrix - expected)) < 1e-12
        assert res.rank == 2

    def test_invariants_on_corpus(self, corpus_decompositions):
        for name, dec in corpus_decompositions.items():
            res = ctqw.average_mixing(dec)
            m = res.matrix
            assert np.max(np.abs(m - m.T)) < 1e-12, name
            assert m.min() >= -1e-15, name
            assert np.max(np.abs(m.sum(axis=1) - 1)) < 1e-10, name
            assert res.psd_certified, name

    def test_rank_at_most_n_minus_1_for_simple_spectra(self, corpus_decompositions):
        checked = 0
        for name, dec in corpus_decompositions.items():
            if dec.n < 3 or not simple_spectrum(dec):
                continue
            assert ctqw.average_mixing(dec).rank <= dec.n - 1, name
            checked += 1
        assert checked >= 3  # P3, P4, P5 at least


class TestIntervalAverage:
    def test_short_time_is_identity(self, corpus_decompositions):
        dec = corpus_decompositions["P4"]
        avg = ctqw.interval_average(dec, 1e-8)
        assert np.max(np.abs(avg - np.eye(dec.n))) < 1e-12

    def test_p2_at_full_period(self):
        dec = ctqw.decompose(ctqw.path(2))
        avg = ctqw.interval_average(dec, 2 * math.pi)
        assert np.max(np.abs(avg - 0.5)) < 1e-9

    def test_matches_quadrature_oracle(self):
        for g in (ctqw.path(3), ctqw.cycle(5)):
            dec = ctqw.decompose(g)
            closed = ctqw.interval_average(dec, 3.7)
            quad = quadrature_interval_average(g.adjacency(), 3.7, 100_001)
            assert np.max(np.abs(closed - quad)) < 1e-6

    def test_convergence_to_average_mixing(self, corpus_decompositions):
        for name, dec in corpus_decompositions.items():
            m_hat = ctqw.average_mixing(dec).matrix
            err_10 = np.linalg.norm(ctqw.interval_average(dec, 10.0) - m_hat)
            err_1000 = np.linalg.norm(ctqw.interval_average(dec, 1000.0) - m_hat)
            assert err_1000 < err_10, name
            assert err_1000 <= 0.05, name

    def test_rejects_nonpositive_horizon(self):
        with pytest.raises(ValueError):
            ctqw.interval_average(ctqw.decompose(ctqw.path(2)), 0.0)


class TestDistributionAverage:
    def test_point_equals_mixing(self, corpus_decompositions):
        dec = corpus_decompositions["P3"]
        for tau in (0.0, 0.9, math.pi / math.sqrt(2)):
            res = ctqw.distribution_average(dec, ctqw.DistributionSpec.point(tau))
            assert np.max(np.abs(res.matrix - ctqw.mixing(dec, tau).matrix)) < 1e-12

    def test_wide_gaussian_approaches_average_mixing(self):
        dec = ctqw.decompose(ctqw.path(2))
        res = ctqw.distribution_average(dec, ctqw.DistributionSpec.gaussian(0.0, 50.0))
        assert np.max(np.abs(res.matrix - 0.5)) < 1e-12

    def test_gaussian_matches_quadrature(self):
        dec = ctqw.decompose(ctqw.path(3))
        mu, sigma = 0.7, 0.8
        res = ctqw.distribution_average(dec, ctqw.DistributionSpec.gaussian(mu, sigma))
        ts = np.linspace(mu - 8 * sigma, mu + 8 * sigma, 100_001)
        pdf = np.exp(-0.5 * ((ts - mu) / sigma) ** 2) / (sigma * math.sqrt(2 * math.pi))
        weights = np.ones(len(ts))
        weights[0] = weights[-1] = 0.5
        stack = ctqw.walk.mixing_batch(dec, ts)
        quad = np.einsum("t,tij->ij", pdf * weights, stack) * (ts[1] - ts[0])
        assert np.max(np.abs(res.matrix - quad)) < 1e-6

    def test_exponential_matches_quadrature(self):
        dec = ctqw.decompose(ctqw.path(3))
        rate = 1.3
        res = ctqw.distribution_average(dec, ctqw.DistributionSpec.exponential(rate))
        ts = np.linspace(0, 40 / rate, 200_001)
        pdf = rate * np.exp(-rate * ts)
        weights = np.ones(len(ts))
        weights[0] = weights[-1] = 0.5
        stack = ctqw.walk.mixing_batch(dec, ts)
        quad = np.einsum("t,tij->ij", pdf * weights, stack) * (ts[1] - ts[0])
        assert np.max(np.abs(res.matrix - quad)) < 1e-6

    def test_uniform_kind_delegates_to_interval(self):
        dec = ctqw.decompose(ctqw.path(4))
        res = ctqw.distribution_average(dec, ctqw.DistributionSpec.uniform_interval(5.0))
        assert np.max(np.abs(res.matrix - ctqw.interval_average(dec, 5.0))) < 1e-15

    def test_sampled_mean_and_standard_error(self):
        dec = ctqw.decompose(ctqw.path(3))
        times = np.array([0.1, 0.7, 1.9, 2.3])
        res = ctqw.distribution_average(dec, ctqw.DistributionSpec.sampled(times))
        direct = ctqw.walk.mixing_batch(dec, times).mean(axis=0)
        assert np.max(np.abs(res.matrix - direct)) < 1e-15
        assert res.mc_standard_error is not None and res.mc_standard_error > 0

    def test_p3_gaussian_grid_exploration(self):
        # descriptive: scan (mu, sigma) for low-rank averaged mixing matrices
        dec = ctqw.decompose(ctqw.path(3))
        best_rank = min(
            ctqw.distribution_average(dec, ctqw.DistributionSpec.gaussian(mu, sigma)).rank
            for mu in np.linspace(0, 3, 7)
            for sigma in (0.05, 0.2, 0.5, 1.0, 2.0)
        )
        assert 1 <= best_rank <= 3

    def test_invalid_specs_rejected(self):
        with pytest.raises(ValueError):
            ctqw.DistributionSpec.gaussian(0.0, 0.0)
        with pytest.raises(ValueError):
            ctqw.DistributionSpec.exponential(-1.0)
        with pytest.raises(ValueError):
            ctqw.DistributionSpec.uniform_interval(-2.0)
        with pytest.raises(ValueError):
            ctqw.DistributionSpec.sampled([])


class TestCpFactorize:
    def test_p2_single_direction(self):
        res = ctqw.cp_factorize(ctqw.decompose(ctqw.path(2)))
        assert res.cp_rank_bound == 2
        assert res.nonneg_rank_bound == 1
        assert res.residual <= 1e-12

    def test_p3_factors(self):
        res = ctqw.cp_factorize(ctqw.decompose(ctqw.path(3)))
        factors = np.array(res.vectors)
        expected = np.array([[0.25, 0.5, 0.25], [0.5, 0.0, 0.5], [0.25, 0.5, 0.25]])
        assert np.max(np.abs(factors - expected)) < 1e-12
        assert res.cp_rank_bound == 3
        assert res.nonneg_rank_bound == 2

    def test_cycle_4_not_applicable(self):
        with pytest.raises(NotApplicableError, match="not applicable"):
            ctqw.cp_factorize(ctqw.decompose(ctqw.cycle(4)))

    def test_simple_spectrum_corpus(self, corpus_decompositions):
        for name, dec in corpus_decompositions.items():
            if not simple_spectrum(dec):
                continue
            res = ctqw.cp_factorize(dec)
            assert res.residual <= 1e-10, name
            assert all((f >= 0).all() for f in res.vectors), name
            m_hat = ctqw.average_mixing(dec).matrix
            recon = sum(np.outer(f, f) for f in res.vectors)
            assert np.max(np.abs(recon - m_hat)) < 1e-12, name


class TestDrgRankProbe:
    def test_complete_5_primitive_full_rank(self):
        probe = ctqw.drg_rank_probe(ctqw.complete(5))
        assert probe.distance_regular and probe.is_primitive_drg
        assert probe.rank == 5 and probe.equals_n

    def test_cycle_4_imprimitive(self):
        probe = ctqw.drg_rank_probe(ctqw.cycle(4))
        assert probe.distance_regular and not probe.is_primitive_drg
        assert probe.rank == 2 and not probe.equals_n

    def test_petersen_reported(self):
        probe = ctqw.drg_rank_probe(petersen())
        assert probe.distance_regular and probe.is_primitive_drg
        assert 1 <= probe.rank <= 10

    def test_non_drg_still_reports_rank(self):
        probe = ctqw.drg_rank_probe(ctqw.path(4))
        assert not probe.distance_regular and not probe.is_primitive_drg
        assert probe.rank == ctqw.average_mixing(ctqw.decompose(ctqw.path(4))).rank
