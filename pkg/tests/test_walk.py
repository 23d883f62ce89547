import math

import numpy as np
import pytest

import ctqw
from conftest import expm_transition


class TestTransition:
    def test_p2_quarter_period(self):
        dec = ctqw.decompose(ctqw.path(2))
        u = ctqw.transition(dec, math.pi / 2).matrix
        assert np.allclose(u, [[0, 1j], [1j, 0]], atol=1e-12)

    def test_identity_at_time_zero(self, corpus_decompositions):
        for dec in corpus_decompositions.values():
            assert np.allclose(ctqw.transition(dec, 0.0).matrix, np.eye(dec.n), atol=1e-12)

    def test_hypercube_antipodal_amplitude(self):
        dec = ctqw.decompose(ctqw.hypercube(4))
        assert abs(ctqw.fidelity(dec, 0, 15, math.pi / 2) - 1) < 1e-12

    def test_unitary_and_symmetric_at_random_times(self, corpus_decompositions):
        rng = np.random.default_rng(7)
        for name, dec in corpus_decompositions.items():
            for t in rng.uniform(0, 20, size=200):
                u = ctqw.transition(dec, t).matrix
                assert np.linalg.norm(u @ u.conj().T - np.eye(dec.n)) < 1e-9 * dec.n, name
                assert np.max(np.abs(u - u.T)) < 1e-9, name

    def test_matches_expm_oracle(self, corpus_graphs):
        rng = np.random.default_rng(11)
        for name, g in corpus_graphs.items():
            if g.n > 20:
                continue
            dec = ctqw.decompose(g)
            for t in rng.uniform(0, 10, size=5):
                u_spec = ctqw.transition(dec, t).matrix
                u_ref = expm_transition(g.adjacency(), t)
                assert np.linalg.norm(u_spec - u_ref) < 1e-8, name

    def test_product_transition_is_kronecker(self):
        g, h = ctqw.path(3), ctqw.cycle(5)
        prod = ctqw.cartesian_product(g, h)
        dg, dh, dp = ctqw.decompose(g), ctqw.decompose(h), ctqw.decompose(prod)
        for t in (0.3, 1.7, math.pi / 2):
            u = ctqw.transition(dp, t).matrix
            u_kron = np.kron(ctqw.transition(dg, t).matrix, ctqw.transition(dh, t).matrix)
            assert np.max(np.abs(u - u_kron)) < 1e-9


class TestMixing:
    def test_identity_at_time_zero(self, corpus_decompositions):
        for dec in corpus_decompositions.values():
            assert np.allclose(ctqw.mixing(dec, 0.0).matrix, np.eye(dec.n), atol=1e-12)

    def test_p2_flat_at_pi_over_4(self):
        dec = ctqw.decompose(ctqw.path(2))
        assert np.allclose(ctqw.mixing(dec, math.pi / 4).matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_k3_off_diagonal_closed_form(self):
        dec = ctqw.decompose(ctqw.complete(3))
        for t in (0.2, 0.9, 2.5):
            m = ctqw.mixing(dec, t).matrix
            expected = abs(np.exp(3j * t) - 1) ** 2 / 9
            off = m[~np.eye(3, dtype=bool)]
            assert np.max(np.abs(off - expected)) < 1e-12

    def test_doubly_stochastic_at_random_times(self, corpus_decompositions):
        rng = np.random.default_rng(13)
        for name, dec in corpus_decompositions.items():
            ms = ctqw.walk.mixing_batch(dec, rng.uniform(0, 20, size=200))
            assert np.max(np.abs(ms.sum(axis=2) - 1)) < 1e-9, name
            assert np.max(np.abs(ms - ms.transpose(0, 2, 1))) < 1e-9, name
            assert ms.min() > -1e-12, name


class TestFidelity:
    def test_p3_extremal_time(self):
        dec = ctqw.decompose(ctqw.path(3))
        t = math.pi / math.sqrt(2)
        assert abs(ctqw.fidelity(dec, 0, 2, t) - 1) < 1e-12
        assert abs(abs(expm_transition(ctqw.path(3).adjacency(), t)[2, 0]) - 1) < 1e-12

    def test_k3_ceiling(self):
        dec = ctqw.decompose(ctqw.complete(3))
        ts = np.linspace(0, 50, 5000)
        fids = np.abs(ctqw.walk.amplitude_batch(dec, 0, 1, ts))
        assert fids.max() <= 2 / 3 + 1e-12

    def test_hypercube_2_corner_pair(self):
        g = ctqw.hypercube(2)
        dec = ctqw.decompose(g)
        assert abs(ctqw.fidelity(dec, 0, 3, math.pi / 2) - 1) < 1e-12
        assert abs(abs(expm_transition(g.adjacency(), math.pi / 2)[3, 0]) - 1) < 1e-12

    def test_vertex_range_checked(self):
        dec = ctqw.decompose(ctqw.path(3))
        with pytest.raises(ValueError):
            ctqw.fidelity(dec, 0, 5, 1.0)
